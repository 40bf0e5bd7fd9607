#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "shiftgibbs/errors.hpp"
#include "shiftgibbs/potential.hpp"
#include "shiftgibbs/transfer.hpp"

using namespace shiftgibbs;

namespace {
const SpaceKind l1 = SpaceKind::lp(1.0);
}

TEST_CASE("builtin evaluators")
{
    Eigen::VectorXd v(3);
    v << 0.5, -1.0, 2.0;
    const Point x(v, l1);
    CHECK(Potential::zero()(x) == 0.0);
    CHECK(Potential::constant(1.5)(x) == 1.5);
    CHECK(Potential::quadratic_first_coord(-0.25)(x) == doctest::Approx(-0.0625));
    CHECK(Potential::tanh_coords({1.0, 2.0})(x) ==
          doctest::Approx(std::tanh(0.5) + 2.0 * std::tanh(-1.0)));
    CHECK(Potential::arctan_norm()(x) == doctest::Approx(std::atan(3.5)));
    // rank metadata
    CHECK(Potential::tanh_coords({1.0, 2.0}).rank() == 2);
    CHECK_FALSE(Potential::arctan_norm().finite_rank());
}

TEST_CASE("finite-rank potentials have zero variation beyond their rank")
{
    const auto A = Potential::tanh_pair(0.4, 0.25);
    for (int n = 2; n <= 6; ++n) CHECK(variation(A, n, l1) == 0.0);
    CHECK(variation(Potential::constant(3.0), 1, l1) == 0.0);
    // rank-2 coupling does vary over the second coordinate
    VariationOptions opt;
    opt.samples = 2000;
    CHECK(variation(A, 1, l1, opt) > 0.1);
}

TEST_CASE("arctan norm oscillation stays near its sup on every level")
{
    // V_n(arctan ||x||) = pi/2 independently of n: the Monte-Carlo lower
    // estimate must get close at 1e4 samples and must not decay with n.
    const auto A = Potential::arctan_norm();
    VariationOptions opt;
    opt.samples = 10000;
    for (int n : {1, 3, 6}) {
        const double v = variation(A, n, l1, opt);
        CHECK(v >= 1.5);
        CHECK(v <= M_PI_2 + 1e-12);
    }
}

TEST_CASE("summable variation verdicts")
{
    VariationOptions opt;
    opt.samples = 800;
    const auto finite = summable_variation_check(Potential::tanh_pair(0.4, 0.25), l1, 12, opt);
    CHECK(finite.verdict == Verdict::holds);
    CHECK(finite.v[5] == 0.0);

    const auto zero = summable_variation_check(Potential::zero(), l1, 12, opt);
    CHECK(zero.verdict == Verdict::holds);
    CHECK(zero.partial == 0.0);

    const auto bad = summable_variation_check(Potential::arctan_norm(), l1, 80, opt);
    CHECK(bad.verdict == Verdict::fails);
    CHECK(bad.partial > 100.0);
}

TEST_CASE("is_normalized residuals")
{
    const auto m = AprioriMeasure::gaussian(0.0, 1.0);
    const auto w = WeightSequence::constant(2.0);
    const std::vector<double> hw = {2.0, 1.0};
    const auto pts = audit_points(l1, hw, 12, 3);

    CHECK(is_normalized_residual(Potential::zero(), m, w, pts) <= 1e-12);
    CHECK(is_normalized_residual(Potential::constant(1.0), m, w, pts) ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
    // built-in first-coordinate normalization
    CHECK(is_normalized_residual(Potential::tanh_first_normalized(0.7, m), m, w, pts) <= 1e-13);
}

TEST_CASE("normalize: constant data and first-coordinate potentials")
{
    const auto m = AprioriMeasure::gaussian(0.0, 1.0);
    const auto w = WeightSequence::constant(2.0);
    const GridFunction one = GridFunction::constant({2.0}, {33}, 1.0);

    // A = 0, psi = 1, lambda = 1 -> abar = 0 and L(1) = 1
    const auto np0 = normalize(Potential::zero(), one, 1.0, w, m);
    CHECK(np0.residual <= 1e-12);
    Eigen::VectorXd v(2);
    v << 0.3, -0.2;
    CHECK(np0.abar(Point(v, l1)) == doctest::Approx(0.0).scale(1.0));

    // A = A(x_1) with int e^A dm = lambda, psi = 1: abar = A - log lambda
    const double lambda = std::sqrt(2.0 / 3.0);  // int e^{-r^2/4} dm, closed form
    const auto np1 = normalize(Potential::quadratic_first_coord(-0.25), one, lambda, w, m);
    CHECK(np1.residual <= 1e-8);
    CHECK(np1.abar(Point(v, l1)) ==
          doctest::Approx(-0.25 * 0.09 - std::log(lambda)).epsilon(1e-12));

    GridFunction neg = one;
    neg.value(0) = -0.5;
    CHECK_THROWS_AS(normalize(Potential::zero(), neg, 1.0, w, m), NonpositiveEigenfunction);
}

TEST_CASE("normalized potentials from the eigen solver audit below 1e-6")
{
    // atoms keep the quadrature exact, so the eigenpair residual propagates
    // directly into the normalization audit
    const auto m = AprioriMeasure::atoms({-1.0, 1.0}, {0.5, 0.5});
    const auto w = WeightSequence::constant(2.0);
    const auto A = Potential::tanh_pair(0.4, 0.25);
    GridSpec spec;
    spec.half_widths = {2.0};
    spec.sizes = {161};
    EigenOptions opt;
    const EigenPair pair = eigenpair(A, m, w, spec, opt);
    const auto np = normalize(A, pair.psi, pair.lambda, w, m);
    CHECK(np.residual <= 1e-6);
}
