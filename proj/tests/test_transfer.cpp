#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "shiftgibbs/errors.hpp"
#include "shiftgibbs/oracle.hpp"
#include "shiftgibbs/rng.hpp"
#include "shiftgibbs/specfun.hpp"
#include "shiftgibbs/transfer.hpp"

using namespace shiftgibbs;

namespace {

const SpaceKind l1 = SpaceKind::lp(1.0);

Point pt(std::initializer_list<double> cs)
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(cs.size()));
    Eigen::Index i = 0;
    for (double c : cs) v[i++] = c;
    return Point(v, l1);
}

} // namespace

TEST_CASE("transfer apply: quadrature basics")
{
    const auto m = AprioriMeasure::gaussian(0.0, 1.0);
    const auto w = WeightSequence::constant(2.0);
    auto one = [](const Point&) { return 1.0; };
    auto first = [](const Point& v) { return v.coord(0); };

    CHECK(transfer_apply(Potential::zero(), m, w, one, pt({0.4, -0.1})) ==
          doctest::Approx(1.0).epsilon(1e-12));
    // odd integrand vanishes by symmetry of the standard normal
    CHECK(transfer_apply(Potential::zero(), m, w, first, pt({0.4, -0.1})) ==
          doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("transfer apply agrees with the oracle matrix on atomic instances")
{
    const auto m = AprioriMeasure::atoms({-1.0, 1.0}, {0.3, 0.7});
    const auto w = WeightSequence::constant(2.0);
    const auto A = Potential::tanh_pair(0.4, 0.25);
    const FiniteInstance inst = oracle_build(2.0, m, A);

    // phi reads the first coordinate of the state
    auto phi = [](const Point& v) { return 1.0 + 0.5 * std::tanh(v.coord(0)); };
    for (std::size_t id = 0; id < inst.collocation.size(); ++id) {
        const Point x(inst.collocation[id], l1);
        double via_matrix = 0.0;
        for (std::size_t jd = 0; jd < inst.collocation.size(); ++jd)
            via_matrix += inst.matrix(static_cast<Eigen::Index>(id),
                                      static_cast<Eigen::Index>(jd)) *
                          phi(Point(inst.collocation[jd], l1));
        const double direct = transfer_apply(A, m, w, phi, x);
        CHECK(direct == doctest::Approx(via_matrix).epsilon(1e-12));
    }
}

TEST_CASE("n-fold iterate: consistency, normalized identities, budget")
{
    const auto m = AprioriMeasure::gaussian(0.0, 1.0, 16);
    const auto w = WeightSequence::constant(2.0);
    const auto abar = Potential::tanh_first_normalized(0.5, m);
    auto one = [](const Point&) { return 1.0; };
    const Point x = pt({0.7, 0.2});

    // L^n(1) = 1 for a normalized potential, any n
    for (int n : {1, 2, 3})
        CHECK(transfer_apply_n(abar, m, w, one, x, n, IterateMethod::nested_quadrature, 1000000)
                  .value == doctest::Approx(1.0).epsilon(1e-12));

    // n = 1 agrees with apply
    auto phi = [](const Point& v) { return std::tanh(v.coord(0)) + 0.3 * v.coord(1); };
    CHECK(transfer_apply_n(abar, m, w, phi, x, 1, IterateMethod::nested_quadrature, 1000000)
              .value == doctest::Approx(transfer_apply(abar, m, w, phi, x)).epsilon(1e-13));

    // L^n(g o L^n) = g for normalized potentials
    const auto w15 = WeightSequence::constant(1.5);
    auto g = [](const Point& v) { return std::tanh(v.coord(0)); };
    for (int n : {1, 2, 3}) {
        auto g_ln = [&](const Point& v) {
            Point u = v;
            for (int t = 0; t < n; ++t) u = apply_L(w15, u);
            return g(u);
        };
        const double got =
            transfer_apply_n(abar, m, w15, g_ln, x, n, IterateMethod::nested_quadrature, 1000000)
                .value;
        CHECK(got == doctest::Approx(g(x)).epsilon(1e-11));
    }

    CHECK_THROWS_AS(
        transfer_apply_n(abar, m, w, one, x, 5, IterateMethod::nested_quadrature, 1000),
        BudgetExceeded);

    // Monte Carlo agrees within its own error bars
    const auto nested =
        transfer_apply_n(abar, m, w, phi, x, 2, IterateMethod::nested_quadrature, 1000000);
    const auto mc = transfer_apply_n(abar, m, w, phi, x, 2, IterateMethod::monte_carlo, 20000, 9);
    CHECK(std::fabs(mc.value - nested.value) <= 5.0 * mc.stderr_est + 1e-3);
    CHECK(mc.stderr_est > 0.0);
}

TEST_CASE("discounted operator: fixed values and contraction")
{
    const auto m = AprioriMeasure::gaussian(0.0, 1.0, 24);
    const auto w = WeightSequence::constant(2.0);
    GridFunction u0 = GridFunction::constant({2.0}, {17}, 0.0);

    // A = 0, u = 0 -> 0 ; A = c, u = 0 -> c
    const GridFunction t0 = discounted_step(Potential::zero(), m, w, 0.5, u0);
    CHECK(t0.values().cwiseAbs().maxCoeff() <= 1e-13);
    const GridFunction tc = discounted_step(Potential::constant(0.7), m, w, 0.5, u0);
    CHECK((tc.values().array() - 0.7).abs().maxCoeff() <= 1e-13);

    // uniform contraction with factor exactly <= s on random pairs
    const auto A = Potential::tanh_pair(0.4, 0.25);
    SplitMix64 rng(5);
    for (double s : {0.3, 0.9, 0.99}) {
        for (int trial = 0; trial < 20; ++trial) {
            GridFunction u1 = GridFunction::constant({2.0, 1.0}, {9, 9}, 0.0);
            GridFunction u2 = u1;
            for (std::size_t i = 0; i < u1.node_count(); ++i) {
                u1.value(i) = 2.0 * rng.next_double() - 1.0;
                u2.value(i) = 2.0 * rng.next_double() - 1.0;
            }
            const GridFunction tu1 = discounted_step(A, m, w, s, u1);
            const GridFunction tu2 = discounted_step(A, m, w, s, u2);
            CHECK(tu1.max_abs_diff(tu2) <= s * u1.max_abs_diff(u2) + 1e-12);
        }
    }
}

TEST_CASE("solve_discounted: closed forms and the exact atomic fixed point")
{
    const auto m = AprioriMeasure::gaussian(0.0, 1.0, 24);
    const auto w = WeightSequence::constant(2.0);
    GridSpec spec;
    spec.half_widths = {2.0};
    spec.sizes = {33};

    const GridFunction uz = solve_discounted(Potential::zero(), m, w, 0.99, spec);
    CHECK(uz.values().cwiseAbs().maxCoeff() <= 1e-10);

    // A = c: scalar fixed point u = c + s u => u = c/(1-s)
    for (double s : {0.5, 0.99}) {
        const GridFunction uc = solve_discounted(Potential::constant(0.4), m, w, s, spec);
        CHECK((uc.values().array() - 0.4 / (1.0 - s)).abs().maxCoeff() <= 1e-8);
    }

    // rank-2 atomic instance: grid solve matches the exact two-state fixed
    // point at the collocation points (atoms are grid nodes, so the grid
    // iteration is exact there)
    const auto atoms = AprioriMeasure::atoms({-1.0, 1.0}, {0.5, 0.5});
    const auto A = Potential::tanh_pair(0.4, 0.25);
    GridSpec aspec;
    aspec.half_widths = {2.0};
    aspec.sizes = {161};
    const double s = 0.9;
    const GridFunction us = solve_discounted(A, atoms, w, s, aspec);

    // exact 2-state solve: y_i = log sum_r p_r exp(A(a_r, a_i/2) + s y_r)
    Eigen::Vector2d y(0.0, 0.0);
    const double a[2] = {-1.0, 1.0};
    for (int it = 0; it < 4000; ++it) {
        Eigen::Vector2d ny;
        for (int i = 0; i < 2; ++i) {
            double acc = 0.0;
            for (int r = 0; r < 2; ++r)
                acc += 0.5 * std::exp(A(pt({a[r], a[i] / 2.0})) + s * y[r]);
            ny[i] = std::log(acc);
        }
        if ((ny - y).cwiseAbs().maxCoeff() < 1e-15) {
            y = ny;
            break;
        }
        y = ny;
    }
    for (int i = 0; i < 2; ++i) {
        const double coords[1] = {a[i]};
        CHECK(us.evaluate(coords, 1) == doctest::Approx(y[i]).epsilon(1e-8));
    }
}

TEST_CASE("eigenpair: trivial, first-coordinate, and atomic instances")
{
    const auto w = WeightSequence::constant(2.0);
    GridSpec spec;
    spec.half_widths = {6.0};
    spec.sizes = {65};

    // A = 0: lambda = 1, psi = 1
    {
        const auto m = AprioriMeasure::gaussian(0.0, 1.0, 40);
        const EigenPair p = eigenpair(Potential::zero(), m, w, spec, {});
        CHECK(p.lambda == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((p.psi.values().array() - 1.0).abs().maxCoeff() <= 1e-10);
        CHECK(p.residual <= 1e-10);
        CHECK(p.power_lambda == doctest::Approx(1.0).epsilon(1e-10));
    }

    // A = -x_1^2/4: lambda = sqrt(2/3) by the closed-form gaussian integral
    {
        const auto m = AprioriMeasure::gaussian(0.0, 1.0, 40);
        const EigenPair p = eigenpair(Potential::quadratic_first_coord(-0.25), m, w, spec, {});
        CHECK(p.lambda == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-9));
        // psi constant: the operator output is independent of x
        CHECK((p.psi.values().array() - 1.0).abs().maxCoeff() <= 1e-9);
        CHECK(std::fabs(p.lambda - p.power_lambda) <= 1e-6);
    }

    // rank-2 atomic instance vs the exact finite reduction
    {
        const auto atoms = AprioriMeasure::atoms({-1.0, 1.0}, {0.5, 0.5});
        const auto A = Potential::tanh_pair(0.4, 0.25);
        GridSpec aspec;
        aspec.half_widths = {2.0};
        aspec.sizes = {161};
        const EigenPair p = eigenpair(A, atoms, w, aspec, {});
        const OracleEigen exact = oracle_exact_eigen(oracle_build(2.0, atoms, A));
        CHECK(std::fabs(p.lambda - exact.lambda) <= 1e-8);
        CHECK(std::fabs(p.lambda - p.power_lambda) <= 1e-6);
    }
}

TEST_CASE("eigenfunction regularity bounds from the fixed-point estimates")
{
    // |u(x) - u(y)| <= d Lip_A ||x-y||^alpha and |u| <= V(A)
    const auto atoms = AprioriMeasure::atoms({-1.0, 1.0}, {0.5, 0.5});
    const auto w = WeightSequence::constant(2.0);
    const auto A = Potential::tanh_pair(0.4, 0.25);
    GridSpec spec;
    spec.half_widths = {2.0};
    spec.sizes = {161};
    const EigenPair p = eigenpair(A, atoms, w, spec, {});

    const double d = d_series(w, 1.0, 64);
    SplitMix64 rng(13);
    for (int t = 0; t < 400; ++t) {
        const double x = 4.0 * rng.next_double() - 2.0;
        const double y = 4.0 * rng.next_double() - 2.0;
        const double ux = std::log(p.psi.evaluate(&x, 1));
        const double uy = std::log(p.psi.evaluate(&y, 1));
        CHECK(std::fabs(ux - uy) <= d * A.lip_const() * std::fabs(x - y) + 1e-9);
        // V(A) <= 2|c2| for the tanh pair (V_1 <= 2|c2|, V_n = 0 beyond)
        CHECK(std::fabs(ux) <= 2.0 * 0.25 + 1e-9);
    }
}

TEST_CASE("holder certificates")
{
    const auto m = AprioriMeasure::gaussian(0.0, 1.0, 24);
    const auto w = WeightSequence::constant(2.0);
    HolderOptions opt;
    opt.pairs = 1500;
    opt.quad_order = 10;

    // phi constant under a normalized potential: L^n(1) = 1, zero ratio
    const auto c0 = holder_certificate(Potential::tanh_first_normalized(0.4, m), m, w,
                                       Potential::constant(1.0), 2, 0.5, l1, opt);
    CHECK(c0.empirical_ratio == doctest::Approx(0.0).scale(1.0));
    CHECK(c0.ok_global);
    CHECK(c0.ok_local);
    // generic potential: constant phi still sits below both bounds
    const auto cg = holder_certificate(Potential::tanh_pair(0.3, 0.2), m, w,
                                       Potential::constant(1.0), 2, 0.5, l1, opt);
    CHECK(cg.ok_global);
    CHECK(cg.ok_local);

    // A = 0: global bound collapses to (d_n)^{-alpha} Lip_phi
    const auto phi = Potential::tanh_coords({0.7});
    const auto cz = holder_certificate(Potential::zero(), m, w, phi, 2, 0.5, l1, opt);
    CHECK(cz.bound_global == doctest::Approx(0.25 * 0.7).epsilon(1e-12));
    CHECK(cz.ok_global);

    // generic rank-2 potential, n in {1,2}: no violations on sampled pairs
    for (int n : {1, 2}) {
        const auto cert = holder_certificate(Potential::tanh_pair(0.3, 0.2), m, w, phi, n, 0.5,
                                             l1, opt);
        CHECK(cert.ok_global);
        CHECK(cert.ok_local);
        CHECK(cert.empirical_ratio > 0.0);
        CHECK(cert.D_n == doctest::Approx(n == 1 ? 0.5 : 0.75));
    }
}

TEST_CASE("positivity and monotonicity of the quadrature operator")
{
    const auto m = AprioriMeasure::gaussian(0.0, 1.0, 24);
    const auto w = WeightSequence::constant(2.0);
    const auto A = Potential::tanh_pair(0.4, 0.25);
    SplitMix64 rng(17);
    auto lo = [](const Point& v) { return 0.2 + 0.1 * std::tanh(v.coord(0)); };
    auto hi = [&lo](const Point& v) { return lo(v) + 0.05 * (2.0 + std::tanh(v.coord(1))); };
    for (int t = 0; t < 50; ++t) {
        const Point x = pt({4.0 * rng.next_double() - 2.0, 2.0 * rng.next_double() - 1.0});
        const double flo = transfer_apply(A, m, w, lo, x);
        const double fhi = transfer_apply(A, m, w, hi, x);
        CHECK(flo >= 0.0);
        CHECK(fhi >= flo);
        const double f1 = transfer_apply(A, m, w, [](const Point&) { return 1.0; }, x);
        CHECK(f1 <= std::exp(A.sup_bound()) + 1e-12);
        CHECK(f1 >= std::exp(-A.sup_bound()) - 1e-12);
    }
}
