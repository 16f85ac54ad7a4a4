#include <gpb/conditioning.hpp>
#include <gpb/verify.hpp>

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace gpb;

namespace {

PointSet grid_1d(std::size_t count) { return linspace_1d(-1.0, 1.0, count); }

}  // namespace

TEST(Interpolant, SingleKernelSection) {
    const auto f = interpolant_build({{0.0, 1.0}}, InterpolantBasis::KernelSections);
    EXPECT_NEAR(f(0.5), 0.7788008, 1e-7);
    EXPECT_NEAR(f(0.5), std::exp(-0.25), 1e-15);
}

TEST(Interpolant, PolynomialLine) {
    const auto f = interpolant_build({{-1.0, -1.0}, {1.0, 1.0}}, InterpolantBasis::Polynomial);
    for (double x : {-0.9, -0.2, 0.0, 0.4, 1.7}) EXPECT_NEAR(f(x), x, 1e-14);
}

TEST(Interpolant, BothBasesInterpolateData) {
    const auto data = random_interpolation_data(6, 1);
    for (auto basis : {InterpolantBasis::KernelSections, InterpolantBasis::Polynomial}) {
        const auto f = interpolant_build(data, basis);
        for (const auto& [x, y] : data) EXPECT_NEAR(f(x), y, 1e-8);
    }
}

TEST(Interpolant, KernelAndPolynomialHaveSimilarShape) {
    // For random y_j the SE and polynomial interpolants agree at the data but drift apart
    // between the outer nodes: about 30% of max|f1| for this seed, not a tenth of it.
    const auto data = random_interpolation_data(6, 1);
    const auto f1 = interpolant_build(data, InterpolantBasis::KernelSections);
    const auto f2 = interpolant_build(data, InterpolantBasis::Polynomial);
    double gap = 0.0, scale = 0.0;
    for (const auto& p : grid_1d(200)) {
        gap = std::max(gap, std::abs(f1(p) - f2(p)));
        scale = std::max(scale, std::abs(f1(p)));
    }
    EXPECT_LE(gap, 0.5 * scale);
    EXPECT_GT(gap, 0.1 * scale);
}

TEST(Interpolant, RejectsDuplicatesAndEmptyInput) {
    EXPECT_THROW(interpolant_build({{0.0, 1.0}, {0.0, 2.0}}, InterpolantBasis::Polynomial), std::invalid_argument);
    EXPECT_THROW(interpolant_build({{0.0, 1.0}, {0.0, 2.0}}, InterpolantBasis::KernelSections),
                 std::invalid_argument);
    EXPECT_THROW(interpolant_build({}, InterpolantBasis::Polynomial), std::invalid_argument);
}

TEST(RandomData, SeededAndEquispaced) {
    const auto a = random_interpolation_data(6, 9);
    EXPECT_EQ(a, random_interpolation_data(6, 9));
    EXPECT_DOUBLE_EQ(a.front().first, -1.0);
    EXPECT_DOUBLE_EQ(a.back().first, 1.0);
    for (const auto& [x, y] : a) {
        EXPECT_GE(y, -1.0);
        EXPECT_LE(y, 1.0);
    }
}

TEST(ReproduceCheck, NodeSectionIsReproducedExactly) {
    const auto k = Kernel::squared_exponential(1);
    const auto nodes = quadrature(interval(-1.0, 1.0), 12).ambient_nodes;
    const auto form = RkhsForm::interpolation(k, nodes);
    const Point t_star = nodes[4];
    const ScalarField f = [&](const Point& s) { return k(s, t_star); };
    const auto report = reproduce_check(form, f, nodes);
    EXPECT_LE(report.errors[4], 1e-8);
    EXPECT_LE(report.max_error, 1e-8);
}

TEST(ReproduceCheck, ZeroFunctionHasZeroError) {
    const auto basis = nystrom_eig(Kernel::squared_exponential(1), quadrature(interval(-1.0, 1.0), 32));
    const auto report = reproduce_check(RkhsForm::spectral(basis, 10), [](const Point&) { return 0.0; }, grid_1d(50));
    EXPECT_EQ(report.max_error, 0.0);
    EXPECT_EQ(report.errors.size(), 50u);
    EXPECT_EQ(report.basis_count, 10u);
}

TEST(ReproduceCheck, MaxIsMaxOfPointErrors) {
    const auto basis = nystrom_eig(Kernel::squared_exponential(1), quadrature(interval(-1.0, 1.0), 32));
    const ScalarField f = [](const Point& s) { return std::sin(3.0 * s(0)); };
    const auto report = reproduce_check(RkhsForm::spectral(basis, 6), f, grid_1d(40));
    EXPECT_EQ(report.max_error, *std::max_element(report.errors.begin(), report.errors.end()));
}

TEST(ReproduceCheck, KernelInterpolantImprovesWithBasisSize) {
    const auto f1 = interpolant_build(random_interpolation_data(6, 1), InterpolantBasis::KernelSections);
    const auto basis = nystrom_eig(Kernel::squared_exponential(1), quadrature(interval(-1.0, 1.0), 64));
    const auto tests = grid_1d(200);
    const double e10 = reproduce_check(RkhsForm::spectral(basis, 10), f1.as_field(), tests).max_error;
    const double e40 = reproduce_check(RkhsForm::spectral(basis, 40), f1.as_field(), tests).max_error;
    EXPECT_LT(e40, e10);
}

TEST(PsdProbe, PriorAndOnePointConditioning) {
    const auto k = Kernel::squared_exponential(2);
    const auto pts = gpb::testing::uniform_points(10, 2, 3);
    EXPECT_GE(psd_probe([&](const Point& a, const Point& b) { return k(a, b); }, pts), -1e-10);

    const GP prior(k);
    const Point t = make_point({0.1, 0.2});
    const auto post = finite_condition(prior, {t}, Eigen::VectorXd::Ones(1));
    PointSet with_t = pts;
    with_t.push_back(t);
    EXPECT_GE(psd_probe([&](const Point& a, const Point& b) { return post.cov(a, b); }, with_t), -1e-10);
    for (const auto& p : with_t) EXPECT_NEAR(post.cov(t, p), 0.0, 1e-9);
}

TEST(PsdProbe, NestedDifferenceKernelIsPositive) {
    const GP prior(Kernel::squared_exponential(2));
    const auto nodes = quadrature(diagonal(make_point({-1.0, -1.0}), make_point({1.0, 1.0})), 32).ambient_nodes;
    const ScalarField g = [](const Point&) { return 0.0; };
    FormSpec spec;
    const auto coarse = constrain(prior, ConstraintSet::finite(gpb::testing::every_nth(nodes, 2)), g, spec);
    const auto fine = constrain(prior, ConstraintSet::finite(nodes), g, spec);
    const auto probes = gpb::testing::uniform_points(10, 2, 5);
    EXPECT_GE(psd_probe(coarse.cov(probes) - fine.cov(probes)), -1e-8);
}

TEST(PsdProbe, DetectsIndefiniteMatrix) {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 2.0, 2.0, 1.0;
    EXPECT_NEAR(psd_probe(m), -1.0, 1e-14);
}
