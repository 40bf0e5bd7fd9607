#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "shiftgibbs/errors.hpp"
#include "shiftgibbs/rng.hpp"
#include "shiftgibbs/weights.hpp"

using namespace shiftgibbs;

TEST_CASE("beta products")
{
    const auto w2 = WeightSequence::constant(2.0);
    CHECK(w2.beta(1, 5) == doctest::Approx(32.0).epsilon(1e-14));
    CHECK(w2.beta(3, 1) == doctest::Approx(2.0));

    const auto per = WeightSequence::periodic({2.0, 0.5});
    // 2 * 1/2 * 2 * 1/2, by hand
    CHECK(per.beta(1, 4) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(per.beta(2, 1) == doctest::Approx(0.5));
}

TEST_CASE("beta cocycle identity in log space")
{
    const auto fam = WeightSequence::block_family(0.8, 2.5, 2);
    SplitMix64 rng(9);
    for (int t = 0; t < 200; ++t) {
        const int k = 1 + static_cast<int>(rng.next() % 20);
        const int n = 1 + static_cast<int>(rng.next() % 15);
        const int m = 1 + static_cast<int>(rng.next() % 15);
        const double lhs = fam.log_beta(k, n + m);
        const double rhs = fam.log_beta(k, n) + fam.log_beta(k + n, m);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("d_n exact values")
{
    const auto w2 = WeightSequence::constant(2.0);
    CHECK(w2.d(3) == doctest::Approx(8.0));
    CHECK_FALSE(w2.d_horizon_truncated());

    const auto per = WeightSequence::periodic({2.0, 0.5});
    CHECK(per.d(1) == doctest::Approx(0.5));
    // beta_1^2 = beta_2^2 = 1 over the period
    CHECK(per.d(2) == doctest::Approx(1.0));
}

TEST_CASE("d super-multiplicativity and constant-weight identity")
{
    const auto fam = WeightSequence::block_family(0.8, 2.5, 2);
    for (int n = 1; n <= 10; ++n)
        for (int m = 1; m <= 10; ++m)
            CHECK(fam.log_d(n + m) >= fam.log_d(n) + fam.log_d(m) - 1e-12);

    // for constant weights d_n = alpha^n exactly (the co-norm identity)
    const auto w = WeightSequence::constant(1.5);
    for (int n = 1; n <= 20; ++n)
        CHECK(w.log_d(n) == doctest::Approx(n * std::log(1.5)).epsilon(1e-13));
}

TEST_CASE("summability of (d_n)^{-alpha}")
{
    const auto w2 = WeightSequence::constant(2.0);
    const auto s1 = summability(w2, 1.0, 40);
    CHECK(s1.converges == Verdict::holds);
    // geometric series sums to 1
    CHECK(s1.partial_sum + s1.tail_bound.value() == doctest::Approx(1.0).epsilon(1e-11));

    // alpha = 1/2: sum 2^{-n/2} = 1/(sqrt(2)-1), closed form checked numerically
    const auto s2 = summability(w2, 0.5, 80);
    CHECK(s2.partial_sum + s2.tail_bound.value() ==
          doctest::Approx(1.0 / (std::sqrt(2.0) - 1.0)).epsilon(1e-11));

    const auto wh = WeightSequence::constant(0.5);
    CHECK(summability(wh, 1.0, 40).converges == Verdict::fails);

    CHECK(d_series(w2, 1.0, 64) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(d_series(wh, 1.0, 64), Error);
}

TEST_CASE("classifier flags")
{
    const auto w2 = WeightSequence::constant(2.0);
    const auto f = classify(w2, 2.0, 32);
    CHECK(f.transitive == Verdict::holds);
    CHECK(f.mixing == Verdict::holds);
    CHECK(f.freq_hypercyclic == Verdict::holds);
    CHECK(f.chaotic == Verdict::holds);
    CHECK(f.pos_expansive == Verdict::holds);

    const auto wh = WeightSequence::constant(0.5);
    const auto g = classify(wh, 2.0, 32);
    CHECK(g.transitive == Verdict::fails);
    CHECK(g.mixing == Verdict::fails);
    CHECK(g.freq_hypercyclic == Verdict::fails);
    CHECK(g.chaotic == Verdict::fails);
    CHECK(g.pos_expansive == Verdict::fails);

    // bounded products: transitivity fails
    const auto per = classify(WeightSequence::periodic({2.0, 0.5}), 1.0, 32);
    CHECK(per.transitive == Verdict::fails);

    // mixing holds implies transitive holds on assorted instances
    for (const auto& w : {WeightSequence::constant(3.0), WeightSequence::block_family(0.8, 2.5, 2),
                          WeightSequence::periodic({1.2, 0.9})}) {
        const auto fl = classify(w, 1.0, 32);
        if (fl.mixing == Verdict::holds) CHECK(fl.transitive == Verdict::holds);
    }
}

TEST_CASE("three equivalent growth indicators")
{
    const auto a = rgh_indicators(WeightSequence::constant(2.0), 48);
    CHECK(a.i_root == doctest::Approx(0.5));
    CHECK(a.i_sum == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(a.i_sup_sum == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(a.consistent);
    CHECK(a.root_v == Verdict::holds);

    const auto b = rgh_indicators(WeightSequence::constant(0.5), 48);
    CHECK(b.i_root == doctest::Approx(2.0));
    CHECK(b.consistent);
    CHECK(b.root_v == Verdict::fails);

    const auto c = rgh_indicators(WeightSequence::periodic({2.0, 0.5}), 48);
    CHECK(c.consistent);
    CHECK(c.root_v == Verdict::fails);

    // block family with a^e b > 1 (0.8^2 * 2.5 = 1.6)
    const auto d = rgh_indicators(WeightSequence::block_family(0.8, 2.5, 2), 48);
    CHECK(d.consistent);
    CHECK(d.root_v == Verdict::holds);
}

TEST_CASE("spectral radius")
{
    CHECK(spectral_radius(WeightSequence::constant(2.0), 32) == doctest::Approx(2.0));
    CHECK(spectral_radius(WeightSequence::constant(0.7), 32) == doctest::Approx(0.7));
    CHECK(spectral_radius(WeightSequence::periodic({2.0, 0.5}), 32) == doctest::Approx(1.0));
}

TEST_CASE("construction guards")
{
    CHECK_THROWS_AS(WeightSequence::constant(2.0, 2.5, 3.0), ConfigInvalid);
    CHECK_THROWS_AS(WeightSequence::constant(-1.0), ConfigInvalid);
    CHECK_THROWS_AS(WeightSequence::block_family(1.2, 2.0, 2), ConfigInvalid);
    CHECK_THROWS_AS(WeightSequence::periodic({}), ConfigInvalid);
}

TEST_CASE("explicit list with and without eventual period")
{
    const auto evp = WeightSequence::explicit_list({3.0, 2.0, 0.5}, true, 2);
    CHECK(evp.closed_form());
    CHECK(evp.value(1) == doctest::Approx(3.0));
    // prefix {3}, period {2, 1/2}
    CHECK(evp.value(4) == doctest::Approx(2.0));
    CHECK(evp.value(5) == doctest::Approx(0.5));

    const auto raw = WeightSequence::explicit_list({1.1, 1.2, 1.3}, false);
    CHECK(raw.d_horizon_truncated());
    CHECK(raw.value(10) == doctest::Approx(1.3));
}
