#include "shiftgibbs/gibbs.hpp"

#include <atomic>
#include <cmath>

#include "shiftgibbs/errors.hpp"
#include "shiftgibbs/parallel.hpp"
#include "shiftgibbs/rng.hpp"

namespace shiftgibbs {

EmpiricalMeasure push_dual(const Potential& abar, const AprioriMeasure& m,
                           const WeightSequence& w, const EmpiricalMeasure& mu, int K,
                           std::uint64_t seed, const PushOptions& opt)
{
    if (K < 1) throw Error("push_dual: K must be >= 1");
    if (opt.check_normalized) {
        const int dim = abar.finite_rank() ? std::max(1, abar.rank() - 1) : 2;
        const std::vector<double> hw(static_cast<std::size_t>(dim), 2.0);
        const auto pts = audit_points(mu.space(), hw, 8, 0x9d5u);
        const double resid = is_normalized_residual(abar, m, w, pts);
        if (resid > opt.normalized_tol)
            throw NotNormalized("push_dual: L(1) residual " + std::to_string(resid) +
                                " above tolerance");
    }

    const int n = mu.count();
    const int old_depth = mu.depth();
    const int new_depth = std::min(old_depth + 1, opt.max_depth);
    const bool drops = old_depth + 1 > opt.max_depth;
    // Finite-rank potentials read only the head of the preimage; evaluating
    // them on the truncated head is exact.
    const int head_len =
        abar.finite_rank() ? std::min(abar.rank(), old_depth + 1) : old_depth + 1;

    Eigen::MatrixXd out(n, new_depth);
    std::vector<double> dropped(static_cast<std::size_t>(n), 0.0);
    const std::uint64_t gen = static_cast<std::uint64_t>(mu.generation());
    const SpaceKind space = mu.space();
    const auto& src = mu.particles();

    parallel_for(static_cast<std::size_t>(n), opt.threads, [&](std::size_t i) {
        SplitMix64 rng = substream(seed, gen, static_cast<std::uint64_t>(i));
        double rs[64];
        double logw[64];
        const int kk = std::min(K, 64);
        Eigen::VectorXd head(head_len);
        for (int c = 0; c < kk; ++c) {
            rs[c] = m.sample(rng);
            head[0] = rs[c];
            for (int j = 1; j < head_len; ++j)
                head[j] = src(static_cast<int>(i), j - 1) / w.value(j);
            logw[c] = abar(Point(head, space));
        }
        double mx = logw[0];
        for (int c = 1; c < kk; ++c) mx = std::max(mx, logw[c]);
        double total = 0.0;
        for (int c = 0; c < kk; ++c) {
            logw[c] = std::exp(logw[c] - mx);
            total += logw[c];
        }
        const double u = rng.next_double() * total;
        double acc = 0.0;
        int pick = kk - 1;
        for (int c = 0; c < kk; ++c) {
            acc += logw[c];
            if (u <= acc) {
                pick = c;
                break;
            }
        }
        out(static_cast<int>(i), 0) = rs[pick];
        for (int j = 1; j < new_depth; ++j)
            out(static_cast<int>(i), j) = src(static_cast<int>(i), j - 1) / w.value(j);
        if (drops)
            dropped[i] = std::fabs(src(static_cast<int>(i), old_depth - 1) /
                                   w.value(old_depth));
    });

    if (opt.dropped_tail) {
        double worst = 0.0;
        for (double d : dropped) worst = std::max(worst, d);
        *opt.dropped_tail = std::max(*opt.dropped_tail, worst);
    }
    EmpiricalMeasure next(std::move(out), space, mu.generation() + 1, mu.seed_lineage());
    return next;
}

SupportProbe support_probe(const EmpiricalMeasure& mu, const Point& x, double eps,
                           const AprioriMeasure& m, double inf_A)
{
    if (!(eps > 0.0)) throw Error("support_probe: eps must be positive");
    SupportProbe probe;
    int hits = 0, first_hits = 0;
    const MetricSpec nm = MetricSpec::norm_metric();
    for (int i = 0; i < mu.count(); ++i) {
        const Point p = mu.particle(i);
        if (dist(p, x, nm) <= eps) ++hits;
        if (std::fabs(p.coord(0) - x.coord(0)) <= eps) ++first_hits;
    }
    const double n = static_cast<double>(mu.count());
    probe.hit_fraction = hits / n;
    probe.first_coord_fraction = first_hits / n;
    probe.lower_bound = std::exp(inf_A) * m.interval(x.coord(0) - eps, x.coord(0) + eps);
    probe.binom_stderr = std::sqrt(std::max(probe.lower_bound * (1.0 - probe.lower_bound), 0.0) / n);
    return probe;
}

double mixing_correlation(const EmpiricalMeasure& mu, const WeightSequence& w,
                          const std::function<double(const Point&)>& f,
                          const std::function<double(const Point&)>& g, int n)
{
    if (n < 0) throw Error("mixing_correlation: n must be >= 0");
    double sf = 0.0, sg = 0.0, sfg = 0.0;
    for (int i = 0; i < mu.count(); ++i) {
        Point p = mu.particle(i);
        const double fv = f(p);
        Point q = p;
        for (int t = 0; t < n; ++t) q = apply_L(w, q);
        const double gv = g(q);
        sf += fv;
        sg += gv;
        sfg += fv * gv;
    }
    const double cnt = static_cast<double>(mu.count());
    return std::fabs(sfg / cnt - (sf / cnt) * (sg / cnt));
}

double invariance_gap(const EmpiricalMeasure& mu, const WeightSequence& w,
                      const MetricSpec& metric, const W1Options& opt)
{
    const EmpiricalMeasure pushed = pushforward_L(w, mu);
    return w1(pushed, mu, metric, opt).value;
}

GibbsRunReport iterate_to_gibbs(const Potential& abar, const AprioriMeasure& m,
                                const WeightSequence& w, const EmpiricalMeasure& nu0,
                                std::optional<EmpiricalMeasure> nu0_alt, int n_iters, int K,
                                std::uint64_t seed, const GibbsOptions& opt)
{
    GibbsRunReport rep;
    rep.particles = nu0.count();
    rep.iters = n_iters;
    rep.candidates = K;

    PushOptions push = opt.push;
    double dropped = 0.0;
    push.dropped_tail = &dropped;

    EmpiricalMeasure cur = nu0;
    std::optional<EmpiricalMeasure> cur_alt = std::move(nu0_alt);
    std::optional<EmpiricalMeasure> prev_recorded;

    auto record = [&](int gen_idx) {
        rep.recorded_gens.push_back(gen_idx);
        const EmpiricalMeasure snap = cur.subsample(opt.w_subsample, 0x5eed);
        if (prev_recorded)
            rep.w_trace.push_back(w1(*prev_recorded, snap, opt.metric, opt.w1).value);
        prev_recorded = snap;
        if (cur_alt) {
            const EmpiricalMeasure alt_snap = cur_alt->subsample(opt.w_subsample, 0x5eed);
            rep.uniqueness_trace.push_back(w1(snap, alt_snap, opt.metric, opt.w1).value);
        }
    };

    for (int it = 0; it < n_iters; ++it) {
        cur = push_dual(abar, m, w, cur, K, seed, push);
        if (cur_alt) *cur_alt = push_dual(abar, m, w, *cur_alt, K, mix64(seed ^ 0xa17), push);
        push.check_normalized = false;  // audited on the first step
        if ((it + 1) % opt.record_every == 0 || it + 1 == n_iters) record(it + 1);
    }
    rep.max_dropped_tail = dropped;

    {
        const EmpiricalMeasure snap = cur.subsample(opt.w_subsample, 0x77);
        rep.invariance_gap = invariance_gap(snap, w, opt.metric, opt.w1);
    }
    auto tanh1 = [](const Point& p) { return std::tanh(p.coord(0)); };
    for (int lag : opt.mixing_lags)
        rep.mixing_trace.push_back(
            {static_cast<double>(lag), mixing_correlation(cur, w, tanh1, tanh1, lag)});

    if (opt.keep_clouds) {
        rep.final_cloud = std::move(cur);
        if (cur_alt) rep.final_cloud_alt = std::move(cur_alt);
    }
    return rep;
}

} // namespace shiftgibbs
