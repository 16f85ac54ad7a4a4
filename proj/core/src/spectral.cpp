#include "gpb/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gpb {

namespace {

// Below this, 1/lambda_N is dominated by rounding in the eigensolve.
constexpr double kSafeFloor = 1e-15;

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

Eigen::VectorXd SpectralBasis::project(const Eigen::VectorXd& f) const {
    if (static_cast<std::size_t>(f.size()) != node_count())
        throw std::invalid_argument("projection expects " + std::to_string(node_count()) + " node values");
    return eigenfunctions.transpose() * quadrature.weight_vector().cwiseProduct(f);
}

double SpectralBasis::extend(std::size_t n, const Point& s) const {
    if (n >= size()) throw std::out_of_range("eigenfunction index out of range");
    double acc = 0.0;
    for (std::size_t i = 0; i < node_count(); ++i)
        acc += quadrature.weights[i] * kernel(s, quadrature.ambient_nodes[i]) *
               eigenfunctions(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n));
    return acc / eigenvalues(static_cast<Eigen::Index>(n));
}

SpectralBasis nystrom_eig(const Kernel& kernel, const QuadratureRule& quadrature, double truncation_threshold) {
    if (!(truncation_threshold >= 0.0 && truncation_threshold < 1.0))
        throw std::invalid_argument("truncation threshold must lie in [0, 1)");
    if (quadrature.size() == 0) throw std::invalid_argument("empty quadrature rule");
    for (double w : quadrature.weights)
        if (!(w > 0.0)) throw std::invalid_argument("quadrature weights must be positive");

    const Eigen::VectorXd sqrt_w = quadrature.weight_vector().cwiseSqrt();
    const Eigen::MatrixXd g = gram(kernel, quadrature.ambient_nodes);
    const Eigen::MatrixXd b = sqrt_w.asDiagonal() * g * sqrt_w.asDiagonal();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "symmetric eigensolve failed on the " << b.rows() << "x" << b.cols()
            << " weighted Gram (trace " << b.trace() << ", max |entry| " << b.cwiseAbs().maxCoeff()
            << ", finite " << (b.allFinite() ? "yes" : "no") << ")";
        throw NumericalError(msg.str());
    }

    // Eigen returns ascending eigenvalues
    const Eigen::VectorXd& values = solver.eigenvalues();
    const Eigen::Index m = values.size();
    const double top = values(m - 1);
    Eigen::Index kept = 0;
    for (Eigen::Index i = m - 1; i >= 0; --i) {
        if (!(values(i) > 0.0) || values(i) < truncation_threshold * top) break;
        ++kept;
    }

    SpectralBasis basis{kernel, quadrature, Eigen::VectorXd(kept), Eigen::MatrixXd(m, kept), truncation_threshold};
    const Eigen::VectorXd inv_sqrt_w = sqrt_w.cwiseInverse();
    for (Eigen::Index n = 0; n < kept; ++n) {
        basis.eigenvalues(n) = values(m - 1 - n);
        basis.eigenfunctions.col(n) = solver.eigenvectors().col(m - 1 - n).cwiseProduct(inv_sqrt_w);
    }
    return basis;
}

RkhsForm RkhsForm::interpolation(const Kernel& kernel, PointSet nodes, double nugget, double relative_jitter) {
    if (nodes.empty()) throw std::invalid_argument("interpolation form needs at least one node");
    if (nugget < 0.0 || relative_jitter < 0.0) throw std::invalid_argument("nugget and jitter must be nonnegative");
    RkhsForm form;
    form.backend_ = Backend::Interpolation;
    form.kernel_ = kernel;
    form.requested_ = nodes.size();
    Eigen::MatrixXd g = gram(kernel, nodes);
    form.jitter_ = relative_jitter * g.diagonal().maxCoeff();
    form.shift_ = nugget;
    g.diagonal().array() += nugget + form.jitter_;
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "Cholesky factorization of the " << g.rows() << "-node Gram failed after adding "
            << nugget + form.jitter_ << " to the diagonal; the nodes are numerically dependent (increase jitter or "
            << "add a nugget)";
        throw NumericalError(msg.str());
    }
    form.factor_ = llt.matrixL();
    form.nodes_ = std::move(nodes);
    return form;
}

RkhsForm RkhsForm::make_spectral(Backend backend, SpectralBasis basis, std::size_t retained, double sigma2) {
    if (sigma2 < 0.0) throw std::invalid_argument("nugget variance must be nonnegative");
    RkhsForm form;
    form.backend_ = backend;
    form.kernel_ = basis.kernel;
    form.nodes_ = basis.quadrature.ambient_nodes;
    form.requested_ = retained;
    form.retained_ = std::min(retained, basis.size());
    form.shift_ = sigma2;
    const auto n = static_cast<Eigen::Index>(form.retained_);
    if (n > 0) {
        const double floor = kSafeFloor * basis.eigenvalues(0);
        const double last = basis.eigenvalues(n - 1) + sigma2;
        if (!(last > floor)) {
            throw NumericalError("eigenvalue " + std::to_string(n) + " (" + fmt_double(basis.eigenvalues(n - 1)) +
                                 ") is below the safe floor " + fmt_double(floor) +
                                 "; retain fewer eigenpairs, raise the truncation threshold, or add a nugget");
        }
    }
    form.weighted_modes_ = basis.quadrature.weight_vector().asDiagonal() * basis.eigenfunctions.leftCols(n);
    form.inv_sqrt_denominators_ = (basis.eigenvalues.head(n).array() + sigma2).rsqrt().matrix();
    form.basis_ = std::move(basis);
    return form;
}

RkhsForm RkhsForm::spectral(SpectralBasis basis, std::size_t retained) {
    return make_spectral(Backend::Spectral, std::move(basis), retained, 0.0);
}

RkhsForm RkhsForm::nugget(SpectralBasis basis, std::size_t retained, double sigma2) {
    return make_spectral(Backend::Nugget, std::move(basis), retained, sigma2);
}

RkhsForm RkhsForm::sum_kernel(SpectralBasis basis, std::size_t retained, double sigma2) {
    return make_spectral(Backend::SumKernel, std::move(basis), retained, sigma2);
}

std::string RkhsForm::label() const {
    switch (backend_) {
        case Backend::Interpolation: return "interpolation";
        case Backend::Spectral: return "spectral";
        case Backend::Nugget: return "nugget";
        case Backend::SumKernel: return "sum_kernel";
    }
    return "unknown";
}

std::size_t RkhsForm::basis_count() const {
    return backend_ == Backend::Interpolation ? nodes_.size() : retained_;
}

void RkhsForm::check_length(Eigen::Index n) const {
    if (static_cast<std::size_t>(n) != nodes_.size())
        throw std::invalid_argument("form has " + std::to_string(nodes_.size()) + " nodes but got " +
                                    std::to_string(n) + " values");
}

Eigen::MatrixXd RkhsForm::whiten(const Eigen::MatrixXd& values) const {
    check_length(values.rows());
    if (backend_ == Backend::Interpolation)
        return factor_.triangularView<Eigen::Lower>().solve(values);
    return inv_sqrt_denominators_.asDiagonal() * (weighted_modes_.transpose() * values);
}

double RkhsForm::inner(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
    check_length(f.size());
    check_length(g.size());
    return whiten(f).col(0).dot(whiten(g).col(0));
}

Eigen::VectorXd RkhsForm::coeffs(const Eigen::VectorXd& f) const {
    check_length(f.size());
    if (backend_ == Backend::Interpolation) {
        const auto lower = factor_.triangularView<Eigen::Lower>();
        return factor_.transpose().triangularView<Eigen::Upper>().solve(lower.solve(f));
    }
    const Eigen::VectorXd z = inv_sqrt_denominators_.cwiseProduct(weighted_modes_.transpose() * f);
    return weighted_modes_ * inv_sqrt_denominators_.cwiseProduct(z);
}

const Eigen::MatrixXd& RkhsForm::gram_factor() const {
    if (backend_ != Backend::Interpolation) throw std::logic_error("only the interpolation form has a Gram factor");
    return factor_;
}

double rkhs_inner(const RkhsForm& form, const Eigen::VectorXd& f, const Eigen::VectorXd& g) { return form.inner(f, g); }

Eigen::VectorXd inner_coeffs(const RkhsForm& form, const Eigen::VectorXd& f) { return form.coeffs(f); }

void write_eigen_csv(std::ostream& out, const SpectralBasis& basis) {
    out << "index,eigenvalue";
    for (std::size_t i = 0; i < basis.node_count(); ++i) out << ",node_" << i;
    out << '\n';
    for (std::size_t n = 0; n < basis.size(); ++n) {
        out << n << ',' << fmt_double(basis.eigenvalues(static_cast<Eigen::Index>(n)));
        for (std::size_t i = 0; i < basis.node_count(); ++i)
            out << ',' << fmt_double(basis.eigenfunctions(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n)));
        out << '\n';
    }
}

}  // namespace gpb
