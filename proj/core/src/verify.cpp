#include "gpb/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace gpb {

ReproducingReport reproduce_check(const RkhsForm& form, const ScalarField& f, const PointSet& test_points) {
    ReproducingReport report{form.label(), form.basis_count(), 0.0, {}};
    const Eigen::VectorXd coeffs = form.coeffs(evaluate(f, form.nodes()));
    report.errors.reserve(test_points.size());
    for (const auto& t : test_points) {
        const double approx = coeffs.dot(section(form.kernel(), form.nodes(), t));
        const double err = std::abs(approx - f(t));
        report.errors.push_back(err);
        report.max_error = std::max(report.max_error, err);
    }
    return report;
}

Interpolant::Interpolant(std::vector<double> xs, std::vector<double> ys, InterpolantBasis basis, const Kernel& kernel)
    : xs_(std::move(xs)), ys_(std::move(ys)), basis_(basis), kernel_(kernel) {
    if (xs_.empty() || xs_.size() != ys_.size()) throw std::invalid_argument("interpolant needs matching x and y");
    for (std::size_t i = 0; i < xs_.size(); ++i)
        for (std::size_t j = i + 1; j < xs_.size(); ++j)
            if (xs_[i] == xs_[j]) throw std::invalid_argument("interpolation nodes must be distinct");
    const auto n = xs_.size();

    if (basis_ == InterpolantBasis::KernelSections) {
        if (kernel_.dimension() != 1) throw std::invalid_argument("kernel-section interpolant needs a 1-D kernel");
        PointSet pts;
        for (double x : xs_) pts.push_back(make_point({x}));
        const Eigen::MatrixXd g = gram(kernel_, pts);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
        if (!lu.isInvertible()) throw NumericalError("kernel interpolation system is singular");
        const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(ys_.data(), static_cast<Eigen::Index>(n));
        const Eigen::VectorXd alpha = lu.solve(y);
        if (!alpha.allFinite() || (g * alpha - y).cwiseAbs().maxCoeff() > 1e-8)
            throw NumericalError("kernel interpolation system is too ill-conditioned");
        coeffs_.assign(alpha.data(), alpha.data() + n);
    } else {
        coeffs_.assign(n, 1.0);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                if (k != j) coeffs_[j] /= xs_[j] - xs_[k];
    }
}

double Interpolant::operator()(double x) const {
    if (basis_ == InterpolantBasis::KernelSections) {
        const Point p = make_point({x});
        double acc = 0.0;
        for (std::size_t j = 0; j < xs_.size(); ++j) acc += coeffs_[j] * kernel_(p, make_point({xs_[j]}));
        return acc;
    }
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < xs_.size(); ++j) {
        const double diff = x - xs_[j];
        if (diff == 0.0) return ys_[j];
        const double w = coeffs_[j] / diff;
        num += w * ys_[j];
        den += w;
    }
    return num / den;
}

ScalarField Interpolant::as_field() const {
    return [self = *this](const Point& p) { return self(p(0)); };
}

Interpolant interpolant_build(const std::vector<std::pair<double, double>>& points, InterpolantBasis basis,
                              const Kernel& kernel) {
    std::vector<double> xs, ys;
    for (const auto& [x, y] : points) {
        xs.push_back(x);
        ys.push_back(y);
    }
    return {std::move(xs), std::move(ys), basis, kernel};
}

double psd_probe(const Eigen::MatrixXd& gram_matrix) {
    if (gram_matrix.rows() == 0) throw std::invalid_argument("psd probe needs at least one point");
    const Eigen::MatrixXd sym = 0.5 * (gram_matrix + gram_matrix.transpose());
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

double psd_probe(const std::function<double(const Point&, const Point&)>& cov, const PointSet& points) {
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = cov(points[i], points[j]);
    return psd_probe(g);
}

std::vector<std::pair<double, double>> random_interpolation_data(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<std::pair<double, double>> out;
    for (const auto& p : linspace_1d(-1.0, 1.0, count)) out.emplace_back(p(0), unit(rng));
    return out;
}

}  // namespace gpb
