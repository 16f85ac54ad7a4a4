#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpb {

using Point = Eigen::VectorXd;
using PointSet = std::vector<Point>;

/// Scalar field on the ambient domain (prior means, constraint data, test functions).
using ScalarField = std::function<double(const Point&)>;

/// Raised when a factorization or eigensolve cannot be completed.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline Point make_point(std::initializer_list<double> xs) {
    Point p(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) p(i++) = x;
    return p;
}

/// Column-stacks values f(p) over a point set.
inline Eigen::VectorXd evaluate(const ScalarField& f, const PointSet& points) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) out(static_cast<Eigen::Index>(i)) = f(points[i]);
    return out;
}

}  // namespace gpb
