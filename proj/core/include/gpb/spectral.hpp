#pragma once

#include "gpb/domain.hpp"
#include "gpb/kernel.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace gpb {

/// Truncated eigenpairs of the kernel integral operator on T0, discretized by a
/// quadrature rule. Eigenfunctions are orthonormal in the discrete L2(T0) inner
/// product sum_i w_i f(x_i) g(x_i).
struct SpectralBasis {
    Kernel kernel;
    QuadratureRule quadrature;
    Eigen::VectorXd eigenvalues;     ///< descending, all > 0
    Eigen::MatrixXd eigenfunctions;  ///< nodes x retained; column n is e_n at the nodes
    double truncation_threshold = 0.0;

    std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
    std::size_t node_count() const { return quadrature.size(); }

    /// <f, e_n>_{T0} for every retained n, from node values of f.
    Eigen::VectorXd project(const Eigen::VectorXd& f) const;
    /// Nystroem extension e_n(s) = (1/lambda_n) sum_i w_i k(s, x_i) e_n(x_i).
    double extend(std::size_t n, const Point& s) const;
};

inline constexpr double kDefaultTruncation = 1e-12;
inline constexpr double kDefaultJitter = 1e-10;

/// Eigendecomposes W^{1/2} G W^{1/2} and maps eigenvectors back through W^{-1/2}.
/// Eigenpairs with lambda_n < threshold * lambda_1 (or lambda_n <= 0) are dropped.
SpectralBasis nystrom_eig(const Kernel& kernel, const QuadratureRule& quadrature,
                          double truncation_threshold = kDefaultTruncation);

/// Discrete approximation of the inner product of H(T0). Every backend acts on
/// function values at a fixed node set and is a symmetric PSD bilinear form
/// a(f, g) = z(f) . z(g) with a linear "whitening" map z.
class RkhsForm {
public:
    enum class Backend { Interpolation, Spectral, Nugget, SumKernel };

    /// f^T (G + (nugget + jitter * max diag G) I)^{-1} g on the given nodes.
    static RkhsForm interpolation(const Kernel& kernel, PointSet nodes, double nugget = 0.0,
                                  double relative_jitter = kDefaultJitter);
    /// sum_{n <= N} <f, e_n><g, e_n> / lambda_n. Requested N is clamped to basis.size().
    static RkhsForm spectral(SpectralBasis basis, std::size_t retained);
    /// Same series with lambda_n + sigma2 in the denominators (operator-level white noise).
    static RkhsForm nugget(SpectralBasis basis, std::size_t retained, double sigma2);
    /// Spectral series of a basis built for k + q.
    static RkhsForm sum_kernel(SpectralBasis basis, std::size_t retained, double sigma2 = 0.0);

    Backend backend() const { return backend_; }
    std::string label() const;
    /// Kernel whose geometry the form represents (k + q for the sum-kernel backend).
    const Kernel& kernel() const { return kernel_; }
    const PointSet& nodes() const { return nodes_; }
    std::size_t node_count() const { return nodes_.size(); }
    /// Node count for interpolation, retained eigenpairs otherwise.
    std::size_t basis_count() const;
    std::size_t requested_count() const { return requested_; }
    double shift() const { return shift_; }
    const std::optional<SpectralBasis>& basis() const { return basis_; }

    double inner(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const;
    /// Node-space vector c with inner(f, g) = c . g for every g.
    Eigen::VectorXd coeffs(const Eigen::VectorXd& f) const;
    /// z(F) column by column; inner(f, g) = z(f) . z(g).
    Eigen::MatrixXd whiten(const Eigen::MatrixXd& values) const;

    /// Lower-triangular factor of the regularized Gram (interpolation backend only).
    const Eigen::MatrixXd& gram_factor() const;
    double applied_jitter() const { return jitter_; }

private:
    RkhsForm() = default;
    static RkhsForm make_spectral(Backend backend, SpectralBasis basis, std::size_t retained, double sigma2);
    void check_length(Eigen::Index n) const;

    Backend backend_ = Backend::Interpolation;
    Kernel kernel_ = Kernel::squared_exponential(1);
    PointSet nodes_;
    std::size_t requested_ = 0;

    // interpolation
    Eigen::MatrixXd factor_;
    double jitter_ = 0.0;

    // spectral family
    std::optional<SpectralBasis> basis_;
    std::size_t retained_ = 0;
    double shift_ = 0.0;
    Eigen::MatrixXd weighted_modes_;  ///< W Phi_N, nodes x N
    Eigen::VectorXd inv_sqrt_denominators_;
};

double rkhs_inner(const RkhsForm& form, const Eigen::VectorXd& f, const Eigen::VectorXd& g);
Eigen::VectorXd inner_coeffs(const RkhsForm& form, const Eigen::VectorXd& f);

/// CSV rows "index,eigenvalue,node_0,...": one row per retained eigenpair.
void write_eigen_csv(std::ostream& out, const SpectralBasis& basis);

}  // namespace gpb
