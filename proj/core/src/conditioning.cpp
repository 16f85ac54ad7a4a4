#include "gpb/conditioning.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace gpb {

namespace {

std::string describe(const Point& p) {
    std::ostringstream s;
    s << '(';
    for (Eigen::Index i = 0; i < p.size(); ++i) s << (i ? ", " : "") << p(i);
    s << ')';
    return s.str();
}

std::pair<std::size_t, std::size_t> closest_pair(const PointSet& points) {
    std::pair<std::size_t, std::size_t> best{0, 0};
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const double d = (points[i] - points[j]).norm();
            if (d < dist) {
                dist = d;
                best = {i, j};
            }
        }
    return best;
}

[[noreturn]] void throw_dependent(const PointSet& points, const char* what) {
    const auto [i, j] = closest_pair(points);
    std::ostringstream msg;
    msg << what << " is singular even after jitter";
    if (i != j)
        msg << "; nearest points are #" << i << ' ' << describe(points[i]) << " and #" << j << ' '
            << describe(points[j]);
    throw NumericalError(msg.str());
}

void check_consistent(const PointSet& points, const Eigen::VectorXd& values, const char* what) {
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if ((points[i] - points[j]).norm() <= 1e-12 * (1.0 + points[i].norm()) &&
                std::abs(values(static_cast<Eigen::Index>(i)) - values(static_cast<Eigen::Index>(j))) >
                    1e-12 * (1.0 + std::abs(values(static_cast<Eigen::Index>(i))))) {
                throw std::invalid_argument(std::string(what) + ": points #" + std::to_string(i) + " and #" +
                                            std::to_string(j) + " at " + describe(points[i]) +
                                            " carry different values");
            }
}

}  // namespace

Eigen::VectorXd Process::mean(const PointSet& points) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) out(static_cast<Eigen::Index>(i)) = mean(points[i]);
    return out;
}

Eigen::MatrixXd Process::cov(const PointSet& a, const PointSet& b) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cov(a[i], b[j]);
    return out;
}

// ---------------------------------------------------------------------------

GP::GP(Kernel kernel, ScalarField mean) : kernel_(std::move(kernel)), mean_(std::move(mean)) {}

double GP::mean(const Point& s) const { return mean_ ? mean_(s) : 0.0; }

// ---------------------------------------------------------------------------

FiniteConditionedGP::FiniteConditionedGP(GP prior, PointSet points, const Eigen::VectorXd& values,
                                         double noise_variance, SolvePath path, double relative_jitter)
    : prior_(std::move(prior)), points_(std::move(points)), path_(path) {
    if (points_.empty()) throw std::invalid_argument("finite conditioning needs at least one point");
    if (static_cast<std::size_t>(values.size()) != points_.size())
        throw std::invalid_argument("finite conditioning: point and value counts differ");
    if (noise_variance < 0.0) throw std::invalid_argument("noise variance must be nonnegative");
    if (noise_variance == 0.0) check_consistent(points_, values, "finite conditioning");

    Eigen::MatrixXd s = gram(prior_.kernel(), points_);
    s.diagonal().array() += noise_variance + relative_jitter * s.diagonal().maxCoeff();
    if (path_ == SolvePath::Factored) {
        ldlt_.compute(s);
        if (ldlt_.info() != Eigen::Success || !ldlt_.isPositive() || (ldlt_.vectorD().array() <= 0.0).any())
            throw_dependent(points_, "observation covariance");
    } else {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(s);
        if (!lu.isInvertible()) throw_dependent(points_, "observation covariance");
        inverse_ = lu.inverse();
    }
    Eigen::VectorXd residual = values;
    for (std::size_t i = 0; i < points_.size(); ++i) residual(static_cast<Eigen::Index>(i)) -= prior_.mean(points_[i]);
    weights_ = solve(residual);
}

Eigen::VectorXd FiniteConditionedGP::solve(const Eigen::VectorXd& rhs) const {
    return path_ == SolvePath::Factored ? Eigen::VectorXd(ldlt_.solve(rhs)) : Eigen::VectorXd(inverse_ * rhs);
}

double FiniteConditionedGP::mean(const Point& s) const {
    return prior_.mean(s) + section(prior_.kernel(), points_, s).dot(weights_);
}

double FiniteConditionedGP::cov(const Point& s1, const Point& s2) const {
    const Eigen::VectorXd k1 = section(prior_.kernel(), points_, s1);
    const Eigen::VectorXd k2 = section(prior_.kernel(), points_, s2);
    return prior_.kernel()(s1, s2) - k1.dot(solve(k2));
}

Eigen::MatrixXd FiniteConditionedGP::cov(const PointSet& a, const PointSet& b) const {
    const Eigen::MatrixXd ka = gram(prior_.kernel(), points_, a);
    const Eigen::MatrixXd kb = gram(prior_.kernel(), points_, b);
    const Eigen::MatrixXd solved =
        path_ == SolvePath::Factored ? Eigen::MatrixXd(ldlt_.solve(kb)) : Eigen::MatrixXd(inverse_ * kb);
    return gram(prior_.kernel(), a, b) - ka.transpose() * solved;
}

FiniteConditionedGP finite_condition(const GP& prior, const PointSet& points, const Eigen::VectorXd& values,
                                     double noise_variance) {
    return {prior, points, values, noise_variance};
}

// ---------------------------------------------------------------------------

RkhsForm build_form(const Kernel& kernel, const ConstraintSet& t0, const FormSpec& spec) {
    using Backend = RkhsForm::Backend;
    if (kernel.dimension() != t0.ambient_dimension())
        throw std::invalid_argument("kernel dimension does not match the constraint set");
    if (spec.backend == Backend::SumKernel && !spec.correlated)
        throw std::invalid_argument("the sum-kernel backend needs a correlated kernel q");
    if (spec.backend == Backend::Spectral && spec.nugget != 0.0)
        throw std::invalid_argument("the spectral backend has no nugget; use the nugget backend");
    const Kernel geometry = spec.correlated ? kernel + *spec.correlated : kernel;
    const QuadratureRule rule = quadrature(t0, spec.nodes, spec.rule);

    if (spec.backend == Backend::Interpolation)
        return RkhsForm::interpolation(geometry, rule.ambient_nodes, spec.nugget, spec.jitter);

    auto basis = nystrom_eig(geometry, rule, spec.truncation);
    const std::size_t n = spec.retained == 0 ? basis.size() : spec.retained;
    switch (spec.backend) {
        case Backend::Spectral: return RkhsForm::spectral(std::move(basis), n);
        case Backend::Nugget: return RkhsForm::nugget(std::move(basis), n, spec.nugget);
        case Backend::SumKernel: return RkhsForm::sum_kernel(std::move(basis), n, spec.nugget);
        case Backend::Interpolation: break;
    }
    throw std::logic_error("unreachable backend");
}

ConstrainedGP::ConstrainedGP(GP prior, ConstraintSet t0, ScalarField g, RkhsForm form)
    : prior_(std::move(prior)), t0_(std::move(t0)), g_(std::move(g)), form_(std::move(form)) {
    if (!g_) throw std::invalid_argument("constraint function g is empty");
    const auto& nodes = form_.nodes();
    g_nodes_ = evaluate(g_, nodes);
    check_consistent(nodes, g_nodes_, "inconsistent constraint");
    const Eigen::VectorXd residual = g_nodes_ - prior_.mean(nodes);
    residual_coeffs_ = form_.coeffs(residual);
    residual_norm_sq_ = residual_coeffs_.dot(residual);
}

Eigen::MatrixXd ConstrainedGP::node_sections(const PointSet& points) const {
    return gram(prior_.kernel(), form_.nodes(), points);
}

double ConstrainedGP::mean(const Point& s) const {
    return prior_.mean(s) + section(prior_.kernel(), form_.nodes(), s).dot(residual_coeffs_);
}

Eigen::VectorXd ConstrainedGP::mean(const PointSet& points) const {
    return prior_.mean(points) + node_sections(points).transpose() * residual_coeffs_;
}

double ConstrainedGP::cov(const Point& s1, const Point& s2) const {
    const Eigen::MatrixXd z1 = form_.whiten(section(prior_.kernel(), form_.nodes(), s1));
    const Eigen::MatrixXd z2 = form_.whiten(section(prior_.kernel(), form_.nodes(), s2));
    return prior_.kernel()(s1, s2) - z1.col(0).dot(z2.col(0));
}

Eigen::MatrixXd ConstrainedGP::cov(const PointSet& a, const PointSet& b) const {
    const Eigen::MatrixXd za = form_.whiten(node_sections(a));
    const Eigen::MatrixXd zb = form_.whiten(node_sections(b));
    return gram(prior_.kernel(), a, b) - za.transpose() * zb;
}

ConstrainedGP constrain(const GP& prior, const ConstraintSet& t0, const ScalarField& g, const FormSpec& spec) {
    return {prior, t0, g, build_form(prior.kernel(), t0, spec)};
}

ResidualNormTrend residual_norm_trend(const GP& prior, const ConstraintSet& t0, const ScalarField& g, FormSpec spec,
                                      const std::vector<std::size_t>& counts) {
    ResidualNormTrend trend;
    for (std::size_t n : counts) {
        if (spec.backend == RkhsForm::Backend::Interpolation)
            spec.nodes = n;
        else
            spec.retained = n;
        trend.counts.push_back(n);
        trend.norms.push_back(constrain(prior, t0, g, spec).residual_norm_sq());
    }
    if (trend.norms.size() >= 2) {
        const double mid = trend.norms[trend.norms.size() / 2 - (trend.norms.size() % 2 == 0 ? 1 : 0)];
        trend.growing = trend.norms.back() > 1.5 * mid;
    }
    return trend;
}

// ---------------------------------------------------------------------------

PredictiveGP::PredictiveGP(std::shared_ptr<const Process> base, PointSet points, const Eigen::VectorXd& values,
                           double noise_variance, double relative_jitter)
    : base_(std::move(base)), points_(std::move(points)), noise_(noise_variance) {
    if (!base_) throw std::invalid_argument("posterior needs a base process");
    if (static_cast<std::size_t>(values.size()) != points_.size())
        throw std::invalid_argument("posterior: point and value counts differ");
    if (noise_variance < 0.0) throw std::invalid_argument("noise variance must be nonnegative");
    if (points_.empty()) return;
    if (noise_variance == 0.0) check_consistent(points_, values, "posterior observations");

    // Jitter is relative to the largest diagonal of the system being factored; if the
    // base variance there is numerically zero, fall back to the prior variance scale.
    const Eigen::MatrixXd base_cov = base_->cov(points_);
    double prior_scale = 0.0;
    for (const auto& p : points_) prior_scale = std::max(prior_scale, base_->prior_variance(p));
    Eigen::LLT<Eigen::MatrixXd> llt;
    for (double scale : {std::max(base_cov.diagonal().maxCoeff(), 0.0), prior_scale}) {
        Eigen::MatrixXd s = base_cov;
        s.diagonal().array() += noise_variance + relative_jitter * scale;
        llt.compute(s);
        if (llt.info() == Eigen::Success) break;
    }
    if (llt.info() != Eigen::Success) throw_dependent(points_, "observation system");
    factor_ = llt.matrixL();
    const auto lower = factor_.triangularView<Eigen::Lower>();
    weights_ = factor_.transpose().triangularView<Eigen::Upper>().solve(lower.solve(values - base_->mean(points_)));
}

double PredictiveGP::mean(const Point& s) const {
    if (points_.empty()) return base_->mean(s);
    return base_->mean(s) + base_->cov(PointSet{s}, points_).row(0).dot(weights_);
}

Eigen::VectorXd PredictiveGP::mean(const PointSet& points) const {
    if (points_.empty()) return base_->mean(points);
    return base_->mean(points) + base_->cov(points, points_) * weights_;
}

double PredictiveGP::cov(const Point& s1, const Point& s2) const { return cov(PointSet{s1}, PointSet{s2})(0, 0); }

Eigen::MatrixXd PredictiveGP::cov(const PointSet& a, const PointSet& b) const {
    if (points_.empty()) return base_->cov(a, b);
    const auto lower = factor_.triangularView<Eigen::Lower>();
    const Eigen::MatrixXd za = lower.solve(base_->cov(points_, a));
    const Eigen::MatrixXd zb = lower.solve(base_->cov(points_, b));
    return base_->cov(a, b) - za.transpose() * zb;
}

PredictiveGP posterior(std::shared_ptr<const Process> base, const PointSet& points, const Eigen::VectorXd& values,
                       double noise_variance) {
    return {std::move(base), points, values, noise_variance};
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd sample_paths(const Process& process, const PointSet& grid, std::size_t count, std::uint64_t seed) {
    if (grid.empty()) throw std::invalid_argument("sample grid is empty");
    const auto n = static_cast<Eigen::Index>(grid.size());
    if (count == 0) return Eigen::MatrixXd(0, n);

    const Eigen::VectorXd mu = process.mean(grid);
    Eigen::MatrixXd c = process.cov(grid);
    c = 0.5 * (c + c.transpose()).eval();
    double scale = 0.0;
    for (const auto& p : grid) scale = std::max(scale, process.prior_variance(p));

    Eigen::MatrixXd lower;
    for (double level : {0.0, 1e-12, 1e-10, 1e-8, 1e-6}) {
        Eigen::MatrixXd shifted = c;
        shifted.diagonal().array() += level * scale;
        Eigen::LLT<Eigen::MatrixXd> llt(shifted);
        if (llt.info() == Eigen::Success) {
            lower = llt.matrixL();
            break;
        }
    }
    if (lower.size() == 0)
        throw NumericalError("sample covariance on " + std::to_string(grid.size()) +
                             " grid points is not factorizable with jitter up to 1e-6");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd draws(static_cast<Eigen::Index>(count), n);
    Eigen::VectorXd z(n);
    for (Eigen::Index r = 0; r < draws.rows(); ++r) {
        for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng);
        draws.row(r) = (mu + lower * z).transpose();
    }
    return draws;
}

}  // namespace gpb
