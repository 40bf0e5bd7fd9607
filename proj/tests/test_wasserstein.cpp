#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "shiftgibbs/errors.hpp"
#include "shiftgibbs/rng.hpp"
#include "shiftgibbs/specfun.hpp"
#include "shiftgibbs/wasserstein.hpp"

using namespace shiftgibbs;

namespace {

const SpaceKind l1 = SpaceKind::lp(1.0);

EmpiricalMeasure cloud_1d(const std::vector<double>& xs)
{
    Eigen::MatrixXd p(static_cast<Eigen::Index>(xs.size()), 1);
    for (std::size_t i = 0; i < xs.size(); ++i) p(static_cast<Eigen::Index>(i), 0) = xs[i];
    return EmpiricalMeasure(std::move(p), l1);
}

EmpiricalMeasure random_cloud(int n, int depth, std::uint64_t seed, double scale = 1.0)
{
    Eigen::MatrixXd p(n, depth);
    SplitMix64 rng(seed);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < depth; ++j) p(i, j) = scale * normal_quantile(rng.next_open());
    return EmpiricalMeasure(std::move(p), l1);
}

Point pt1(double x)
{
    Eigen::VectorXd v(1);
    v[0] = x;
    return Point(v, l1);
}

} // namespace

TEST_CASE("exact transport basics")
{
    const auto metric = MetricSpec::bounded(1.0, 1.0);
    const auto mu = random_cloud(32, 3, 1);
    CHECK(w1(mu, mu, metric).value == doctest::Approx(0.0).scale(1.0));

    // single-point clouds transport at the metric distance
    const auto dx = EmpiricalMeasure::dirac(pt1(0.25), 8);
    const auto dy = EmpiricalMeasure::dirac(pt1(-0.5), 8);
    CHECK(w1(dx, dy, metric).value == doctest::Approx(0.75));
    CHECK(w1(dx, dy, MetricSpec::bounded(1.0, 0.5)).value ==
          doctest::Approx(std::sqrt(0.75)));
}

TEST_CASE("1-D transport equals the sorted coupling under the norm metric")
{
    // 3-point hand case
    const auto mu = cloud_1d({0.0, 1.0, 4.0});
    const auto nu = cloud_1d({0.5, 2.0, 3.0});
    // sorted coupling: |0-0.5| + |1-2| + |4-3| = 2.5, mean 2.5/3
    CHECK(w1(mu, nu, MetricSpec::norm_metric()).value == doctest::Approx(2.5 / 3.0));

    SplitMix64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> a(17), b(17);
        for (auto& v : a) v = 3.0 * (2.0 * rng.next_double() - 1.0);
        for (auto& v : b) v = 3.0 * (2.0 * rng.next_double() - 1.0);
        const double got = w1(cloud_1d(a), cloud_1d(b), MetricSpec::norm_metric()).value;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        double expect = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) expect += std::fabs(a[i] - b[i]);
        expect /= static_cast<double>(a.size());
        CHECK(got == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("metric axioms, permutation and thread invariance")
{
    const auto metric = MetricSpec::bounded(2.0, 0.7);
    const auto a = random_cloud(24, 3, 11);
    const auto b = random_cloud(24, 3, 12);
    const auto c = random_cloud(24, 3, 13);
    const double ab = w1(a, b, metric).value;
    const double ba = w1(b, a, metric).value;
    const double ac = w1(a, c, metric).value;
    const double cb = w1(c, b, metric).value;
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(ab <= ac + cb + 1e-12);

    // permuting particles leaves the value unchanged
    Eigen::MatrixXd perm = b.particles();
    for (int i = 0; i < perm.rows() / 2; ++i) perm.row(i).swap(perm.row(perm.rows() - 1 - i));
    const double ab2 = w1(a, EmpiricalMeasure(perm, l1), metric).value;
    CHECK(ab2 == doctest::Approx(ab).epsilon(1e-12));

    // thread count must not change the value at all
    W1Options opt1, opt4;
    opt1.threads = 1;
    opt4.threads = 4;
    CHECK(w1(a, b, metric, opt1).value == w1(a, b, metric, opt4).value);

    CHECK_THROWS_AS(w1(a, random_cloud(23, 3, 14), metric), SizeMismatch);
}

TEST_CASE("kantorovich duality lower bound")
{
    const auto metric = MetricSpec::bounded(1.0, 1.0);
    const Point y0 = pt1(0.0);

    std::vector<std::function<double(const Point&)>> fns;
    fns.emplace_back([](const Point&) { return 3.0; });  // constant: contributes zero
    fns.emplace_back([&](const Point& p) { return dist(p, y0, MetricSpec::bounded(1.0, 1.0)); });

    // Dirac pair: the distance function witnesses the whole cost
    const auto dx = EmpiricalMeasure::dirac(pt1(0.4), 4);
    const auto dy = EmpiricalMeasure::dirac(y0, 4);
    const double lb = kantorovich_lb(dx, dy, metric, fns);
    const double v = w1(dx, dy, metric).value;
    CHECK(lb == doctest::Approx(v).epsilon(1e-12));

    // random clouds: lb <= w1 every time
    for (int t = 0; t < 100; ++t) {
        const auto a = random_cloud(16, 2, 100 + t);
        const auto b = random_cloud(16, 2, 200 + t, 1.3);
        CHECK(kantorovich_lb(a, b, metric, fns) <= w1(a, b, metric).value + 1e-9);
    }

    // a non-Lipschitz declaration is caught by the audit
    std::vector<std::function<double(const Point&)>> bad;
    bad.emplace_back([&](const Point& p) { return 2.0 * dist(p, y0, metric); });
    CHECK_THROWS_AS(kantorovich_lb(random_cloud(16, 2, 5), random_cloud(16, 2, 6), metric, bad),
                    LipschitzAuditFailed);
}

TEST_CASE("entropic solver approaches the exact value with tight marginals")
{
    const auto metric = MetricSpec::bounded(1.0, 1.0);
    const auto a = random_cloud(48, 2, 21);
    const auto b = random_cloud(48, 2, 22);
    const double exact = w1(a, b, metric).value;

    W1Options opt;
    opt.exact_threshold = 0;  // force the entropic path
    opt.eps_reg = 2e-3;
    const W1Result ent = w1(a, b, metric, opt);
    CHECK(ent.plan.method == TransportPlan::Method::entropic);
    CHECK(std::fabs(ent.value - exact) <= 5e-2 * std::max(1.0, exact));
    // marginals of the coupling are uniform
    const double row_err =
        (ent.plan.coupling.rowwise().sum().array() - 1.0 / 48.0).abs().maxCoeff();
    const double col_err =
        (ent.plan.coupling.colwise().sum().array() - 1.0 / 48.0).abs().maxCoeff();
    CHECK(row_err <= 1e-9);
    CHECK(col_err <= 1e-9);
    CHECK(ent.plan.dual_gap >= 0.0);
}

TEST_CASE("appendix constants")
{
    CHECK(contraction_constant(0.0, 1.0) == 0.0);
    // sup over (0,1] of (e^{Lt}-1)/t is attained at t = 1
    for (double L : {0.2, 0.9, 2.0})
        CHECK(contraction_constant(L, 1.0) == doctest::Approx(std::expm1(L)).epsilon(1e-9));
    CHECK(metric_scale_auto(0.1) == 1.0);
    CHECK(metric_scale_auto(3.0) == doctest::Approx(8.0));
}

TEST_CASE("contraction profile r_n")
{
    const auto w = WeightSequence::constant(2.0);
    // (d_2)^1 = 4 >= 8/3
    const double a = 1.0;
    const std::vector<double> ts = {0.1, 0.5, 0.999999, 1.000001, 2.0, 1e9};
    const auto r = rn_profile(w, 1.0, a, 2, ts);
    CHECK(r[0] == doctest::Approx(0.75));
    CHECK(r[1] == doctest::Approx(0.75));
    CHECK(r[2] == doctest::Approx(0.75));  // left of the 1/a breakpoint
    // right of the breakpoint the displayed formula takes over
    CHECK(r[3] == doctest::Approx(1.0 - std::exp(-1.000001) * (1.0 - 1.000001 * 0.25)));
    // saturation: min{1, t a d_n^{-alpha}} = 1 forces r_n = 1
    CHECK(r[5] == doctest::Approx(1.0));

    CHECK_THROWS_AS(rn_profile(w, 1.0, a, 1, ts), PremiseViolated);  // d_1 = 2 < 8/3
}

TEST_CASE("tail-uniform contraction factor")
{
    const auto w = WeightSequence::constant(2.0);
    // plug-in arithmetic: 1 - (1 - 2*2^{-4}) / (2 e^{2}) with sum d_i^{-1} = 1
    const double got = tails_contraction_factor(1.0, w, 1.0, 1.0, 4);
    CHECK(got == doctest::Approx(1.0 - 0.875 / (2.0 * std::exp(2.0))).epsilon(1e-12));
    CHECK(got == doctest::Approx(0.94079).epsilon(1e-4));

    // saturated min: no contraction guaranteed
    CHECK(tails_contraction_factor(8.0, w, 1.0, 1.0, 2) == doctest::Approx(1.0));
    // factor < 1 whenever the min stays below 1
    for (int n : {3, 4, 6})
        CHECK(tails_contraction_factor(1.0, w, 1.0, 1.0, n) < 1.0);

    CHECK_THROWS_AS(tails_contraction_factor(0.5, w, 1.0, 1.0, 4), PremiseViolated);
    CHECK_THROWS_AS(tails_contraction_factor(1.0, w, 1.0, 1.0, 1), PremiseViolated);
}

TEST_CASE("noise floor is small for same-law clouds and positive")
{
    const auto metric = MetricSpec::bounded(1.0, 1.0);
    auto sampler = [](std::uint64_t seed) { return random_cloud(128, 2, seed, 0.5); };
    const double floor = noise_floor(sampler, metric, 2, 99);
    CHECK(floor > 0.0);
    CHECK(floor < 0.25);
}
