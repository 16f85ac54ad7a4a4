#pragma once

#include "gpb/domain.hpp"
#include "gpb/kernel.hpp"
#include "gpb/spectral.hpp"

#include <concepts>
#include <cstdint>
#include <memory>
#include <optional>

namespace gpb {

/// A Gaussian process given by its mean and covariance functions.
class Process {
public:
    virtual ~Process() = default;

    virtual double mean(const Point& s) const = 0;
    virtual double cov(const Point& s1, const Point& s2) const = 0;
    /// Variance of the root prior at s; sets the scale for jitter.
    virtual double prior_variance(const Point& s) const = 0;

    virtual Eigen::VectorXd mean(const PointSet& points) const;
    virtual Eigen::MatrixXd cov(const PointSet& a, const PointSet& b) const;
    Eigen::MatrixXd cov(const PointSet& points) const { return cov(points, points); }
    double variance(const Point& s) const { return cov(s, s); }
};

/// Prior process with mean function mu and covariance kernel k.
class GP final : public Process {
public:
    explicit GP(Kernel kernel, ScalarField mean = {});

    double mean(const Point& s) const override;
    double cov(const Point& s1, const Point& s2) const override { return kernel_(s1, s2); }
    double prior_variance(const Point& s) const override { return kernel_(s, s); }
    using Process::cov;
    using Process::mean;

    const Kernel& kernel() const { return kernel_; }
    const ScalarField& mean_function() const { return mean_; }

private:
    Kernel kernel_;
    ScalarField mean_;
};

/// Classical conditioning on finitely many (noisy) point values:
///   mu_0(s) = mu(s) + k(s,t) S^{-1} (x - mu(t)),  k_0(s,s') = k(s,s') - k(s,t) S^{-1} k(t,s'),
/// with S = k(t,t) + (noise + jitter * max diag) I.
class FiniteConditionedGP final : public Process {
public:
    enum class SolvePath { Factored, ExplicitInverse };

    FiniteConditionedGP(GP prior, PointSet points, const Eigen::VectorXd& values, double noise_variance,
                        SolvePath path = SolvePath::Factored, double relative_jitter = kDefaultJitter);

    double mean(const Point& s) const override;
    double cov(const Point& s1, const Point& s2) const override;
    double prior_variance(const Point& s) const override { return prior_.prior_variance(s); }
    Eigen::MatrixXd cov(const PointSet& a, const PointSet& b) const override;
    using Process::cov;
    using Process::mean;

    const PointSet& points() const { return points_; }

private:
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

    GP prior_;
    PointSet points_;
    SolvePath path_;
    Eigen::LDLT<Eigen::MatrixXd> ldlt_;
    Eigen::MatrixXd inverse_;
    Eigen::VectorXd weights_;
};

FiniteConditionedGP finite_condition(const GP& prior, const PointSet& points, const Eigen::VectorXd& values,
                                     double noise_variance = 0.0);

/// How the inner product of H(T0) is discretized when constraining.
struct FormSpec {
    RkhsForm::Backend backend = RkhsForm::Backend::Interpolation;
    /// Interpolation node count, or quadrature node count for the spectral family.
    /// Ignored for finite constraint sets (their points are the nodes).
    std::size_t nodes = 64;
    /// Retained eigenpairs N for the spectral family; 0 keeps all of them.
    std::size_t retained = 0;
    /// White-noise variance: added to the Gram (interpolation) or to each lambda_n.
    double nugget = 0.0;
    QuadratureKind rule = QuadratureKind::Midpoint;
    double truncation = kDefaultTruncation;
    double jitter = kDefaultJitter;
    /// Kernel q of correlated information on T0; the form then uses k + q.
    std::optional<Kernel> correlated;
};

/// Builds the discretized H(T0) inner product for a prior kernel on T0.
RkhsForm build_form(const Kernel& kernel, const ConstraintSet& t0, const FormSpec& spec);

/// Process conditioned on X|_{T0} = g:
///   mu_0(s) = mu(s) + <k_s, g - mu>_{H(T0)},   k_0(s1, s2) = k(s1, s2) - <k_{s1}, k_{s2}>_{H(T0)}.
class ConstrainedGP final : public Process {
public:
    ConstrainedGP(GP prior, ConstraintSet t0, ScalarField g, RkhsForm form);

    double mean(const Point& s) const override;
    double cov(const Point& s1, const Point& s2) const override;
    double prior_variance(const Point& s) const override { return prior_.prior_variance(s); }
    Eigen::VectorXd mean(const PointSet& points) const override;
    Eigen::MatrixXd cov(const PointSet& a, const PointSet& b) const override;
    using Process::cov;

    const GP& prior() const { return prior_; }
    const ConstraintSet& constraint_set() const { return t0_; }
    const RkhsForm& form() const { return form_; }
    const ScalarField& constraint_function() const { return g_; }
    const Eigen::VectorXd& constraint_values() const { return g_nodes_; }
    const Eigen::VectorXd& residual_coeffs() const { return residual_coeffs_; }
    /// a(g - mu, g - mu): finite proxy for the squared H(T0) norm of the residual.
    double residual_norm_sq() const { return residual_norm_sq_; }

private:
    Eigen::MatrixXd node_sections(const PointSet& points) const;

    GP prior_;
    ConstraintSet t0_;
    ScalarField g_;
    RkhsForm form_;
    Eigen::VectorXd g_nodes_;
    Eigen::VectorXd residual_coeffs_;
    double residual_norm_sq_ = 0.0;
};

/// Throws std::invalid_argument if two nodes coincide but g differs there.
ConstrainedGP constrain(const GP& prior, const ConstraintSet& t0, const ScalarField& g, const FormSpec& spec);

struct ResidualNormTrend {
    std::vector<std::size_t> counts;
    std::vector<double> norms;
    /// The proxy keeps growing with resolution: evidence that g - mu is not in H(T0).
    bool growing = false;
};

/// a_N(g - mu, g - mu) across basis counts (retained N for the spectral family,
/// node count for interpolation). `growing` is set when the last value exceeds
/// the middle one by more than 50%.
ResidualNormTrend residual_norm_trend(const GP& prior, const ConstraintSet& t0, const ScalarField& g,
                                      FormSpec spec, const std::vector<std::size_t>& counts);

/// Finite conditioning on observations with another process as prior.
class PredictiveGP final : public Process {
public:
    PredictiveGP(std::shared_ptr<const Process> base, PointSet points, const Eigen::VectorXd& values,
                 double noise_variance, double relative_jitter = kDefaultJitter);

    double mean(const Point& s) const override;
    double cov(const Point& s1, const Point& s2) const override;
    double prior_variance(const Point& s) const override { return base_->prior_variance(s); }
    Eigen::VectorXd mean(const PointSet& points) const override;
    Eigen::MatrixXd cov(const PointSet& a, const PointSet& b) const override;
    using Process::cov;

    const Process& base() const { return *base_; }
    const PointSet& observation_points() const { return points_; }
    double noise_variance() const { return noise_; }

private:
    std::shared_ptr<const Process> base_;
    PointSet points_;
    double noise_;
    Eigen::MatrixXd factor_;
    Eigen::VectorXd weights_;
};

PredictiveGP posterior(std::shared_ptr<const Process> base, const PointSet& points, const Eigen::VectorXd& values,
                       double noise_variance = 0.0);

template <std::derived_from<Process> P>
PredictiveGP posterior(const P& base, const PointSet& points, const Eigen::VectorXd& values,
                       double noise_variance = 0.0) {
    return posterior(std::make_shared<const P>(base), points, values, noise_variance);
}

/// count x |grid| matrix of joint draws. The covariance is factored with
/// jitter escalating from 0 to 1e-6 times the prior variance scale.
Eigen::MatrixXd sample_paths(const Process& process, const PointSet& grid, std::size_t count, std::uint64_t seed);

}  // namespace gpb
