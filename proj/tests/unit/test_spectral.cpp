#include <gpb/spectral.hpp>

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace gpb;

namespace {

const Point lo = make_point({-1.0, -1.0});
const Point hi = make_point({1.0, 1.0});

Eigen::VectorXd section_values(const Kernel& k, const PointSet& nodes, const Point& s) {
    return section(k, nodes, s);
}

SpectralBasis diagonal_basis(std::size_t n, double threshold = kDefaultTruncation) {
    return nystrom_eig(Kernel::squared_exponential(2), quadrature(diagonal(lo, hi), n), threshold);
}

}  // namespace

TEST(NystromEig, SinglePointOperator) {
    const auto set = ConstraintSet::finite({make_point({0.0})});
    const auto basis = nystrom_eig(Kernel::squared_exponential(1), quadrature(set, 1));
    ASSERT_EQ(basis.size(), 1u);
    EXPECT_NEAR(basis.eigenvalues(0), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(basis.eigenfunctions(0, 0)), 1.0, 1e-15);
}

TEST(NystromEig, LeadingEigenvalueStableUnderRefinement) {
    const double l64 = diagonal_basis(64).eigenvalues(0);
    const double l128 = diagonal_basis(128).eigenvalues(0);
    EXPECT_NEAR(l64, l128, 1e-4 * l128);
}

TEST(NystromEig, TraceMatchesSetMeasure) {
    const auto basis = diagonal_basis(64, 0.0);
    EXPECT_NEAR(basis.eigenvalues.sum(), 2.0 * std::sqrt(2.0), 1e-3);
}

TEST(NystromEig, EigenvaluesDescendingPositiveAndTruncated) {
    const auto basis = diagonal_basis(64);
    for (Eigen::Index i = 0; i < basis.eigenvalues.size(); ++i) {
        EXPECT_GT(basis.eigenvalues(i), 0.0);
        EXPECT_GE(basis.eigenvalues(i), kDefaultTruncation * basis.eigenvalues(0));
        if (i > 0) EXPECT_LE(basis.eigenvalues(i), basis.eigenvalues(i - 1));
    }
    EXPECT_LT(basis.size(), 64u);
    EXPECT_THROW(diagonal_basis(8, 1.0), std::invalid_argument);
    EXPECT_THROW(diagonal_basis(8, -0.1), std::invalid_argument);
}

TEST(NystromEig, DiscreteOrthonormality) {
    for (auto kind : {QuadratureKind::Midpoint, QuadratureKind::GaussLegendre}) {
        const auto basis = nystrom_eig(Kernel::squared_exponential(2), quadrature(rect_boundary(lo, hi), 64, kind));
        const Eigen::VectorXd w = basis.quadrature.weight_vector();
        const Eigen::MatrixXd gram = basis.eigenfunctions.transpose() * w.asDiagonal() * basis.eigenfunctions;
        EXPECT_LE((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(NystromEig, MercerReconstructionAtFullRank) {
    const auto k = Kernel::matern(2, MaternSmoothness::ThreeHalves);
    const auto q = quadrature(rect_boundary(lo, hi), 48);
    const auto basis = nystrom_eig(k, q, 0.0);
    const Eigen::MatrixXd& e = basis.eigenfunctions;
    const Eigen::MatrixXd rebuilt = e * basis.eigenvalues.asDiagonal() * e.transpose();
    EXPECT_LE((rebuilt - gram(k, q.ambient_nodes)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(NystromEig, ExtensionAgreesAtNodes) {
    const auto basis = diagonal_basis(32);
    for (std::size_t n = 0; n < 3; ++n)
        for (std::size_t i = 0; i < basis.node_count(); i += 7)
            EXPECT_NEAR(basis.extend(n, basis.quadrature.ambient_nodes[i]),
                        basis.eigenfunctions(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n)), 1e-8);
}

TEST(NystromEig, EigenCsvHasHeaderAndOneRowPerPair) {
    const auto basis = diagonal_basis(4);
    std::ostringstream out;
    write_eigen_csv(out, basis);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "index,eigenvalue,node_0,node_1,node_2,node_3");
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, basis.size());
}

TEST(RkhsInner, SinglePointInterpolationIsReproducingNorm) {
    const auto k = Kernel::squared_exponential(1);
    const auto form = RkhsForm::interpolation(k, {make_point({0.0})}, 0.0, 0.0);
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
    EXPECT_DOUBLE_EQ(rkhs_inner(form, one, one), 1.0);
    EXPECT_DOUBLE_EQ(inner_coeffs(form, Eigen::VectorXd::Constant(1, 2.0))(0), 2.0);
    EXPECT_EQ(inner_coeffs(form, Eigen::VectorXd::Zero(1)), Eigen::VectorXd::Zero(1));
}

TEST(RkhsInner, LargeNuggetVanishes) {
    const auto basis = diagonal_basis(16);
    const Eigen::VectorXd f = section_values(basis.kernel, basis.quadrature.ambient_nodes, make_point({0.2, 0.1}));
    double previous = std::numeric_limits<double>::infinity();
    for (double s2 : {1e-2, 1.0, 1e2, 1e6}) {
        const double v = rkhs_inner(RkhsForm::nugget(basis, basis.size(), s2), f, f);
        EXPECT_LT(v, previous);
        previous = v;
    }
    EXPECT_LT(previous, 1e-4);
}

TEST(RkhsInner, LengthMismatchThrows) {
    const auto basis = diagonal_basis(16);
    const auto form = RkhsForm::spectral(basis, 5);
    EXPECT_THROW(rkhs_inner(form, Eigen::VectorXd::Ones(15), Eigen::VectorXd::Ones(16)), std::invalid_argument);
    const auto interp = RkhsForm::interpolation(basis.kernel, basis.quadrature.ambient_nodes);
    EXPECT_THROW(inner_coeffs(interp, Eigen::VectorXd::Ones(3)), std::invalid_argument);
}

TEST(RkhsInner, RequestedCountIsClampedToBasis) {
    const auto basis = diagonal_basis(16);
    const auto form = RkhsForm::spectral(basis, 1000);
    EXPECT_EQ(form.basis_count(), basis.size());
    EXPECT_EQ(form.requested_count(), 1000u);
}

TEST(RkhsInner, TinyEigenvalueWithoutNuggetIsRejected) {
    auto basis = diagonal_basis(16, 0.0);
    basis.eigenvalues(basis.size() - 1) = 1e-18 * basis.eigenvalues(0);
    EXPECT_THROW(RkhsForm::spectral(basis, basis.size()), NumericalError);
    EXPECT_NO_THROW(RkhsForm::nugget(basis, basis.size(), 1e-6));
}

TEST(RkhsInner, SpectralMatchesInterpolationOnSections) {
    const auto basis = diagonal_basis(64);
    const auto interp = RkhsForm::interpolation(basis.kernel, basis.quadrature.ambient_nodes);
    const auto spec = RkhsForm::spectral(basis, 40);
    const Eigen::VectorXd f = section_values(basis.kernel, basis.quadrature.ambient_nodes, make_point({0.0, 0.0}));
    EXPECT_NEAR(rkhs_inner(spec, f, f), rkhs_inner(interp, f, f), 1e-4);
}

TEST(RkhsInner, FullRankSpectralMatchesInterpolationOnSections) {
    const auto basis = diagonal_basis(24);
    const auto interp = RkhsForm::interpolation(basis.kernel, basis.quadrature.ambient_nodes);
    const auto spec = RkhsForm::spectral(basis, basis.size());
    for (const auto& s : gpb::testing::uniform_points(10, 2, 4)) {
        const Eigen::VectorXd f = section_values(basis.kernel, basis.quadrature.ambient_nodes, s);
        const Eigen::VectorXd g = section_values(basis.kernel, basis.quadrature.ambient_nodes, -s);
        EXPECT_NEAR(rkhs_inner(spec, f, g), rkhs_inner(interp, f, g), 1e-6);
    }
}

TEST(RkhsInner, CoefficientPathMatchesDirect) {
    const auto basis = diagonal_basis(16);
    const auto& nodes = basis.quadrature.ambient_nodes;
    const auto check = [](const RkhsForm& form, const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
        const double direct = rkhs_inner(form, f, g);
        EXPECT_NEAR(inner_coeffs(form, f).dot(g), direct, 1e-12 * std::max(1.0, std::abs(direct)));
    };
    for (const auto& form : {RkhsForm::spectral(basis, 10), RkhsForm::nugget(basis, 12, 1e-3)})
        for (std::uint64_t seed = 0; seed < 20; ++seed)
            check(form, gpb::testing::uniform_vector(16, seed), gpb::testing::uniform_vector(16, seed + 100));
    // Random node vectors put weight on Gram directions far below the jitter, where the two
    // paths differ by roundoff amplified by the condition number; kernel sections do not.
    const auto interp = RkhsForm::interpolation(basis.kernel, nodes);
    const auto probes = gpb::testing::uniform_points(40, 2, 17);
    for (std::size_t i = 0; i + 1 < probes.size(); i += 2)
        check(interp, section(basis.kernel, nodes, probes[i]), section(basis.kernel, nodes, probes[i + 1]));
}

TEST(RkhsInner, SymmetricAndNonnegative) {
    const auto basis = diagonal_basis(32);
    std::vector<RkhsForm> forms{RkhsForm::interpolation(basis.kernel, basis.quadrature.ambient_nodes),
                                RkhsForm::spectral(basis, 20), RkhsForm::nugget(basis, 20, 1e-4)};
    for (const auto& form : forms)
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const Eigen::VectorXd f = gpb::testing::uniform_vector(32, 2 * seed);
            const Eigen::VectorXd g = gpb::testing::uniform_vector(32, 2 * seed + 1);
            const double fg = rkhs_inner(form, f, g);
            EXPECT_NEAR(fg, rkhs_inner(form, g, f), 1e-12 * std::max(1.0, std::abs(fg)));
            EXPECT_GE(rkhs_inner(form, f, f), -1e-10);
        }
}

TEST(RkhsInner, MonotoneInRetainedCount) {
    const auto basis = diagonal_basis(48);
    for (const auto& s : gpb::testing::uniform_points(20, 2, 9)) {
        const Eigen::VectorXd f = section_values(basis.kernel, basis.quadrature.ambient_nodes, s);
        double previous = 0.0;
        for (std::size_t n = 1; n <= basis.size(); ++n) {
            const double v = rkhs_inner(RkhsForm::spectral(basis, n), f, f);
            EXPECT_GE(v, previous - 1e-12);
            previous = v;
        }
    }
}

TEST(RkhsInner, NuggetNeverExceedsSpectral) {
    const auto basis = diagonal_basis(32);
    const auto spec = RkhsForm::spectral(basis, 20);
    const auto nug = RkhsForm::nugget(basis, 20, 1e-3);
    for (const auto& s : gpb::testing::uniform_points(20, 2, 10)) {
        const Eigen::VectorXd f = section_values(basis.kernel, basis.quadrature.ambient_nodes, s);
        EXPECT_LE(rkhs_inner(nug, f, f), rkhs_inner(spec, f, f) + 1e-14);
    }
}

TEST(RkhsInner, UniformConvergenceProbe) {
    const auto basis = diagonal_basis(32);
    const auto& nodes = basis.quadrature.ambient_nodes;
    const auto full = RkhsForm::spectral(basis, basis.size());
    PointSet grid;
    for (const auto& x : linspace_1d(-1.0, 1.0, 20)) grid.push_back(make_point({x(0), 0.5 * x(0) + 0.1}));
    Eigen::MatrixXd sections(static_cast<Eigen::Index>(nodes.size()), static_cast<Eigen::Index>(grid.size()));
    for (std::size_t j = 0; j < grid.size(); ++j)
        sections.col(static_cast<Eigen::Index>(j)) = section_values(basis.kernel, nodes, grid[j]);
    const auto gap = [&](std::size_t n) {
        const Eigen::MatrixXd a = RkhsForm::spectral(basis, n).whiten(sections);
        const Eigen::MatrixXd b = full.whiten(sections);
        return (a.transpose() * a - b.transpose() * b).cwiseAbs().maxCoeff();
    };
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t n : {2u, 4u, 8u, 16u}) {
        const double g = gap(n);
        EXPECT_LT(g, previous);
        previous = g;
    }
}

TEST(RkhsForm, InterpolationFactorReconstructsGram) {
    const auto k = Kernel::squared_exponential(2);
    const auto nodes = quadrature(rect_boundary(lo, hi), 40).ambient_nodes;
    const auto form = RkhsForm::interpolation(k, nodes);
    const Eigen::MatrixXd& l = form.gram_factor();
    const Eigen::MatrixXd diff = l * l.transpose() - gram(k, nodes);
    EXPECT_LE(diff.cwiseAbs().maxCoeff(), 1e-8 + form.applied_jitter());
}

TEST(RkhsForm, SumKernelUsesCombinedGeometry) {
    const auto k = Kernel::squared_exponential(2);
    const auto q = scale_variance(Kernel::squared_exponential(2), VarianceProfile::constant(0.5));
    const auto basis = nystrom_eig(k + q, quadrature(diagonal(lo, hi), 16));
    const auto form = RkhsForm::sum_kernel(basis, basis.size());
    EXPECT_EQ(form.backend(), RkhsForm::Backend::SumKernel);
    const Eigen::VectorXd f = section_values(k, basis.quadrature.ambient_nodes, make_point({0.3, 0.3}));
    // ||k_s||^2 under k + q is strictly below k(s, s)
    EXPECT_LT(rkhs_inner(form, f, f), k(make_point({0.3, 0.3}), make_point({0.3, 0.3})));
}
