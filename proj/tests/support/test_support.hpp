#pragma once

#include <gpb/types.hpp>

#include <random>

namespace gpb::testing {

inline PointSet uniform_points(std::size_t count, int dimension, std::uint64_t seed, double lo = -1.0,
                               double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    PointSet out;
    for (std::size_t i = 0; i < count; ++i) {
        Point p(dimension);
        for (int d = 0; d < dimension; ++d) p(d) = u(rng);
        out.push_back(p);
    }
    return out;
}

inline Eigen::VectorXd uniform_vector(std::size_t count, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::VectorXd v(static_cast<Eigen::Index>(count));
    for (auto& x : v) x = u(rng);
    return v;
}

/// Every stride-th point of a node list, starting at index 0.
inline PointSet every_nth(const PointSet& points, std::size_t stride) {
    PointSet out;
    for (std::size_t i = 0; i < points.size(); i += stride) out.push_back(points[i]);
    return out;
}

}  // namespace gpb::testing
