#pragma once

#include "gpb/conditioning.hpp"
#include "gpb/spectral.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace gpb {

/// Errors |a(f, k_t) - f(t)| of a discretized inner product against the
/// reproducing property, one per test point.
struct ReproducingReport {
    std::string backend;
    std::size_t basis_count = 0;
    double max_error = 0.0;
    std::vector<double> errors;
};

ReproducingReport reproduce_check(const RkhsForm& form, const ScalarField& f, const PointSet& test_points);

enum class InterpolantBasis { KernelSections, Polynomial };

/// A 1-D interpolant through (x_j, y_j). Kernel-section interpolants solve
/// k(x, x) alpha = y without jitter; polynomial interpolants use the
/// barycentric Lagrange form of degree J - 1.
class Interpolant {
public:
    Interpolant(std::vector<double> xs, std::vector<double> ys, InterpolantBasis basis,
                const Kernel& kernel = Kernel::squared_exponential(1));

    double operator()(double x) const;
    double operator()(const Point& p) const { return (*this)(p(0)); }
    ScalarField as_field() const;

    InterpolantBasis basis() const { return basis_; }
    const std::vector<double>& xs() const { return xs_; }
    const std::vector<double>& ys() const { return ys_; }

private:
    std::vector<double> xs_;
    std::vector<double> ys_;
    InterpolantBasis basis_;
    Kernel kernel_;
    std::vector<double> coeffs_;  ///< section weights or barycentric weights
};

Interpolant interpolant_build(const std::vector<std::pair<double, double>>& points, InterpolantBasis basis,
                              const Kernel& kernel = Kernel::squared_exponential(1));

/// Minimum eigenvalue of the Gram of `cov` on the points.
double psd_probe(const std::function<double(const Point&, const Point&)>& cov, const PointSet& points);
double psd_probe(const Eigen::MatrixXd& gram_matrix);

/// J equispaced x_j on [-1, 1] with y_j uniform on [-1, 1] from the seed.
std::vector<std::pair<double, double>> random_interpolation_data(std::size_t count, std::uint64_t seed);

}  // namespace gpb
