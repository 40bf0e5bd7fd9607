#include "shiftgibbs/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "shiftgibbs/errors.hpp"
#include "shiftgibbs/numeric.hpp"

namespace shiftgibbs {

namespace {

// Margin for claiming convergence/divergence from finite data: a ratio has
// to clear 0.999 (resp. its inverse) before a definite verdict is issued.
constexpr double kMargin = 0.999;

void check_bounds(const std::vector<double>& vals, double c, double c_prime)
{
    if (!(c > 0.0) || !(c < c_prime))
        throw ConfigInvalid("weights: need 0 < c < c_prime");
    for (double a : vals) {
        if (!(a > c) || !(a < c_prime)) {
            std::ostringstream os;
            os << "weights: alpha=" << a << " outside (" << c << ", " << c_prime << ")";
            throw ConfigInvalid(os.str());
        }
    }
}

std::vector<double> to_logs(const std::vector<double>& vals)
{
    std::vector<double> out(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) out[i] = std::log(vals[i]);
    return out;
}

std::pair<double, double> default_bounds(const std::vector<double>& vals)
{
    double lo = *std::min_element(vals.begin(), vals.end());
    double hi = *std::max_element(vals.begin(), vals.end());
    return {0.5 * lo, 2.0 * hi};
}

} // namespace

const char* to_string(Verdict v)
{
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::fails: return "fails";
        default: return "inconclusive-at-horizon";
    }
}

WeightSequence::WeightSequence(Kind kind, std::vector<double> prefix, std::vector<double> period,
                               bool closed_form, double c, double c_prime, int horizon_K)
    : kind_(kind),
      log_prefix_(std::move(prefix)),
      log_period_(std::move(period)),
      closed_form_(closed_form),
      c_(c),
      c_prime_(c_prime),
      horizon_K_(horizon_K)
{
    if (log_period_.empty()) throw ConfigInvalid("weights: empty period");
    if (horizon_K_ < 1) throw ConfigInvalid("weights: horizon_K must be >= 1");
}

WeightSequence WeightSequence::constant(double alpha, std::optional<double> c,
                                        std::optional<double> c_prime, int horizon_K)
{
    if (!(alpha > 0.0)) throw ConfigInvalid("weights: alpha must be positive");
    auto [dc, dcp] = default_bounds({alpha});
    const double lo = c.value_or(dc), hi = c_prime.value_or(dcp);
    check_bounds({alpha}, lo, hi);
    return WeightSequence(Kind::constant, {}, {std::log(alpha)}, true, lo, hi, horizon_K);
}

WeightSequence WeightSequence::periodic(std::vector<double> values, std::optional<double> c,
                                        std::optional<double> c_prime, int horizon_K)
{
    if (values.empty()) throw ConfigInvalid("weights: periodic values empty");
    for (double v : values)
        if (!(v > 0.0)) throw ConfigInvalid("weights: periodic values must be positive");
    auto [dc, dcp] = default_bounds(values);
    const double lo = c.value_or(dc), hi = c_prime.value_or(dcp);
    check_bounds(values, lo, hi);
    return WeightSequence(Kind::periodic, {}, to_logs(values), true, lo, hi, horizon_K);
}

WeightSequence WeightSequence::explicit_list(std::vector<double> values, bool eventually_periodic,
                                             int period, std::optional<double> c,
                                             std::optional<double> c_prime, int horizon_K)
{
    if (values.empty()) throw ConfigInvalid("weights: explicit values empty");
    for (double v : values)
        if (!(v > 0.0)) throw ConfigInvalid("weights: explicit values must be positive");
    auto [dc, dcp] = default_bounds(values);
    const double lo = c.value_or(dc), hi = c_prime.value_or(dcp);
    check_bounds(values, lo, hi);
    auto logs = to_logs(values);
    if (eventually_periodic) {
        if (period < 1 || period > static_cast<int>(values.size()))
            throw ConfigInvalid("weights: eventual period must be in [1, len(values)]");
        std::vector<double> prefix(logs.begin(), logs.end() - period);
        std::vector<double> per(logs.end() - period, logs.end());
        return WeightSequence(Kind::explicit_list, std::move(prefix), std::move(per), true, lo,
                              hi, horizon_K);
    }
    // Tail unknown: repeat the last value so value(n) stays total, but keep
    // the horizon-truncated flag on everything derived from infima.
    std::vector<double> per = {logs.back()};
    return WeightSequence(Kind::explicit_list, std::move(logs), std::move(per), false, lo, hi,
                          horizon_K);
}

WeightSequence WeightSequence::block_family(double a, double b, int e, std::optional<double> c,
                                            std::optional<double> c_prime, int horizon_K)
{
    if (!(a > 0.0 && a < 1.0)) throw ConfigInvalid("weights: block family needs a in (0,1)");
    if (!(b > 1.0)) throw ConfigInvalid("weights: block family needs b > 1");
    if (e < 1) throw ConfigInvalid("weights: block family needs e >= 1");
    const double lo = c.value_or(0.5 * a), hi = c_prime.value_or(2.0 * b);
    check_bounds({a, b}, lo, hi);
    std::vector<double> per(static_cast<std::size_t>(e), std::log(a));
    per.push_back(std::log(b));
    return WeightSequence(Kind::block_family, {}, std::move(per), true, lo, hi, horizon_K);
}

double WeightSequence::log_value(int n) const
{
    if (n < 1) throw Error("weights: index must be >= 1");
    const std::size_t i = static_cast<std::size_t>(n - 1);
    if (i < log_prefix_.size()) return log_prefix_[i];
    return log_period_[(i - log_prefix_.size()) % log_period_.size()];
}

double WeightSequence::value(int n) const { return std::exp(log_value(n)); }

double WeightSequence::log_beta(int k, int n) const
{
    if (k < 1 || n < 1) throw Error("weights: beta requires k >= 1, n >= 1");
    double s = 0.0;
    for (int j = k; j < k + n; ++j) s += log_value(j);
    return s;
}

double WeightSequence::beta(int k, int n) const { return std::exp(log_beta(k, n)); }

double WeightSequence::log_d(int n) const
{
    if (n < 1) throw Error("weights: d requires n >= 1");
    // For closed-form families beta_k^n is periodic in k once k passes the
    // prefix, so the infimum closes over one period window.
    const int window = closed_form_
                           ? static_cast<int>(log_prefix_.size() + log_period_.size())
                           : horizon_K_;
    double best = std::numeric_limits<double>::infinity();
    double cur = log_beta(1, n);
    best = cur;
    for (int k = 2; k <= window; ++k) {
        cur += log_value(k + n - 1) - log_value(k - 1);
        best = std::min(best, cur);
    }
    return best;
}

double WeightSequence::d(int n) const { return std::exp(log_d(n)); }

double WeightSequence::geometric_rate() const
{
    const double s = pairwise_sum(log_period_);
    return std::exp(s / static_cast<double>(log_period_.size()));
}

std::string WeightSequence::describe() const
{
    switch (kind_) {
        case Kind::constant: return "constant";
        case Kind::periodic: return "periodic";
        case Kind::explicit_list: return closed_form_ ? "explicit+eventual-period" : "explicit";
        default: return "block_family";
    }
}

SummabilityReport summability(const WeightSequence& w, double alpha, int N)
{
    if (!(alpha > 0.0 && alpha <= 1.0)) throw Error("summability: alpha must be in (0,1]");
    if (N < 1) throw Error("summability: N must be >= 1");

    SummabilityReport rep;
    rep.horizon_truncated = w.d_horizon_truncated();

    std::vector<double> terms(static_cast<std::size_t>(N));
    std::vector<double> logd(static_cast<std::size_t>(N));
    for (int n = 1; n <= N; ++n) {
        logd[n - 1] = w.log_d(n);
        terms[n - 1] = std::exp(-alpha * logd[n - 1]);
    }
    rep.partial_sum = pairwise_sum(terms);

    double rho;  // estimate of lim (d_n)^{-1/n}
    if (w.closed_form()) {
        rho = 1.0 / w.geometric_rate();
    } else {
        rho = std::exp(-logd[static_cast<std::size_t>(N - 1)] / static_cast<double>(N));
    }
    rep.root_limit = rho;

    const double rho_a = std::pow(rho, alpha);
    if (rho_a < kMargin) {
        if (w.closed_form() && N > w.prefix_length()) {
            // Exact tail: once n clears the prefix, d_{n+P} = Pi * d_n with
            // Pi the product over one period, so the remainder splits into P
            // geometric series anchored at d_{N+1} .. d_{N+P}.
            const int P = w.period_length();
            const double pi_a = std::pow(w.geometric_rate(), -alpha * P);
            double block = 0.0;
            for (int j = 1; j <= P; ++j) block += std::exp(-alpha * w.log_d(N + j));
            rep.tail_bound = block / (1.0 - pi_a);
        } else {
            const double dN_a = terms.back();
            rep.tail_bound = dN_a * rho_a / (1.0 - rho_a);
        }
        rep.converges = Verdict::holds;
    } else if (rho_a > 1.0 / kMargin) {
        rep.converges = Verdict::fails;
    } else {
        rep.converges = Verdict::inconclusive;
    }
    return rep;
}

double d_series(const WeightSequence& w, double alpha, int N)
{
    const SummabilityReport rep = summability(w, alpha, N);
    if (rep.converges != Verdict::holds)
        throw Error("d_series: sum of (d_n)^{-alpha} not certified convergent at horizon");
    return rep.partial_sum + rep.tail_bound.value_or(0.0);
}

ClassifierFlags classify(const WeightSequence& w, std::optional<double> p, int N)
{
    if (N < 2) throw Error("classify: N must be >= 2");
    if (p && !(*p >= 1.0)) throw Error("classify: p must be >= 1");

    ClassifierFlags f;
    Verdict growth;  // verdict for "beta_1^n -> infinity at a geometric rate"
    if (w.closed_form()) {
        const double g = w.geometric_rate();
        growth = g > 1.0 ? Verdict::holds : Verdict::fails;
    } else {
        const int half = N / 2;
        const double g_hat =
            std::exp((w.log_beta(1, N) - w.log_beta(1, half)) / static_cast<double>(N - half));
        if (g_hat > 1.0 / kMargin)
            growth = Verdict::holds;
        else if (g_hat < kMargin)
            growth = Verdict::fails;
        else
            growth = Verdict::inconclusive;
    }

    // For weight products with a per-step geometric rate the five criteria
    // (limsup, lim, sup of beta_1^n infinite; sum (beta_1^n)^{-p} finite)
    // coincide: they all hold iff the rate exceeds 1. Bounded products
    // (rate <= 1, closed form) fail all of them.
    f.transitive = growth;
    f.mixing = growth;
    f.pos_expansive = growth;
    if (p) {
        f.freq_hypercyclic = growth;
        f.chaotic = growth;
    } else {
        // The series criteria are stated for l^p only; on c0 we do not decide.
        f.freq_hypercyclic = Verdict::inconclusive;
        f.chaotic = Verdict::inconclusive;
    }
    return f;
}

RghIndicators rgh_indicators(const WeightSequence& w, int N)
{
    if (N < 2) throw Error("rgh_indicators: N must be >= 2");
    RghIndicators ind;

    // For closed-form families the per-step decay rate of each series is
    // exact, so rate >= 1 is a definite divergence (terms do not vanish);
    // horizon kinds keep the tri-state margin.
    const auto series_verdict = [&w](double per_step) {
        if (w.closed_form()) return per_step < 1.0 - 1e-12 ? Verdict::holds : Verdict::fails;
        if (per_step < kMargin) return Verdict::holds;
        if (per_step > 1.0 / kMargin) return Verdict::fails;
        return Verdict::inconclusive;
    };

    if (w.closed_form())
        ind.i_root = 1.0 / w.geometric_rate();
    else
        ind.i_root = std::exp(-w.log_d(N) / static_cast<double>(N));
    ind.root_v = series_verdict(ind.i_root);

    std::vector<double> dterm(static_cast<std::size_t>(N));
    for (int n = 1; n <= N; ++n) dterm[n - 1] = std::exp(-w.log_d(n));
    ind.i_sum = pairwise_sum(dterm);
    {
        const double ratio = dterm[static_cast<std::size_t>(N - 1)] /
                             dterm[static_cast<std::size_t>(N / 2 - 1)];
        ind.sum_v = series_verdict(std::pow(ratio, 1.0 / static_cast<double>(N - N / 2)));
    }

    const int K = w.horizon_K();
    double sup_sum = 0.0;
    double worst_per_step = 0.0;
    for (int k = 1; k <= K; ++k) {
        std::vector<double> bterm(static_cast<std::size_t>(N));
        for (int n = 1; n <= N; ++n) bterm[n - 1] = std::exp(-w.log_beta(k, n));
        sup_sum = std::max(sup_sum, pairwise_sum(bterm));
        const double ratio = bterm[static_cast<std::size_t>(N - 1)] /
                             bterm[static_cast<std::size_t>(N / 2 - 1)];
        worst_per_step =
            std::max(worst_per_step, std::pow(ratio, 1.0 / static_cast<double>(N - N / 2)));
    }
    ind.i_sup_sum = sup_sum;
    ind.sup_v = series_verdict(worst_per_step);

    ind.consistent = (ind.root_v == ind.sum_v) && (ind.sum_v == ind.sup_v) &&
                     ind.root_v != Verdict::inconclusive;
    return ind;
}

double spectral_radius(const WeightSequence& w, int N)
{
    if (N < 2) throw Error("spectral_radius: N must be >= 2");
    if (w.closed_form()) return w.geometric_rate();
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 1; k <= w.horizon_K(); ++k) best = std::max(best, w.log_beta(k, N));
    return std::exp(best / static_cast<double>(N));
}

WeightReport weight_report(const WeightSequence& w, double alpha, std::optional<double> p, int N)
{
    WeightReport rep;
    rep.d_values.resize(static_cast<std::size_t>(N));
    for (int n = 1; n <= N; ++n) rep.d_values[n - 1] = w.d(n);
    const SummabilityReport s = summability(w, alpha, N);
    rep.d_sum_alpha = s.partial_sum;
    rep.root_limit = s.root_limit;
    rep.spectral_radius = spectral_radius(w, N);
    rep.flags = classify(w, p, N);
    rep.horizon_truncated = w.d_horizon_truncated();
    return rep;
}

} // namespace shiftgibbs
