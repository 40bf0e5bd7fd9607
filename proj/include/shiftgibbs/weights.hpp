#pragma once

#include <optional>
#include <string>
#include <vector>

namespace shiftgibbs {

// Tri-state verdict for asymptotic claims decided from finite data. Exact
// closed-form families get holds/fails directly; horizon-truncated families
// only get a definite verdict when the ratio-test margin is met.
enum class Verdict { holds, fails, inconclusive };

const char* to_string(Verdict v);

// Generator of the shift weights alpha_n together with the bounds (c, c').
//
// Every family is represented internally as a finite prefix of log-weights
// followed by a repeating period. The `explicit` kind without the
// eventually-periodic flag is the one family whose tail is unknown; its
// infima over k are truncated at horizon_K and flagged as such.
class WeightSequence {
public:
    enum class Kind { constant, periodic, explicit_list, block_family };

    static WeightSequence constant(double alpha,
                                   std::optional<double> c = std::nullopt,
                                   std::optional<double> c_prime = std::nullopt,
                                   int horizon_K = 64);
    static WeightSequence periodic(std::vector<double> values,
                                   std::optional<double> c = std::nullopt,
                                   std::optional<double> c_prime = std::nullopt,
                                   int horizon_K = 64);
    static WeightSequence explicit_list(std::vector<double> values, bool eventually_periodic,
                                        int period = 1,
                                        std::optional<double> c = std::nullopt,
                                        std::optional<double> c_prime = std::nullopt,
                                        int horizon_K = 64);
    // Extremal member of the alternating block family: blocks of e weights
    // equal to a (c <= a < 1) followed by a single weight b (1 < b <= c').
    static WeightSequence block_family(double a, double b, int e,
                                       std::optional<double> c = std::nullopt,
                                       std::optional<double> c_prime = std::nullopt,
                                       int horizon_K = 64);

    Kind kind() const { return kind_; }
    double lower_bound() const { return c_; }
    double upper_bound() const { return c_prime_; }
    int horizon_K() const { return horizon_K_; }

    // True when infima over k and asymptotic rates are available in closed
    // form (everything except a non-periodic explicit list).
    bool closed_form() const { return closed_form_; }

    double value(int n) const;      // alpha_n, n >= 1
    double log_value(int n) const;

    double log_beta(int k, int n) const;  // log(alpha_k ... alpha_{k+n-1})
    double beta(int k, int n) const;

    double log_d(int n) const;  // log inf_k beta_k^n (exact or horizon-truncated)
    double d(int n) const;
    bool d_horizon_truncated() const { return !closed_form_; }

    // Per-step geometric rate of the weight products: exp(period mean of
    // log alpha). Only meaningful for closed-form families.
    double geometric_rate() const;

    int prefix_length() const { return static_cast<int>(log_prefix_.size()); }
    int period_length() const { return static_cast<int>(log_period_.size()); }

    std::string describe() const;

private:
    WeightSequence(Kind kind, std::vector<double> prefix, std::vector<double> period,
                   bool closed_form, double c, double c_prime, int horizon_K);

    Kind kind_;
    std::vector<double> log_prefix_;
    std::vector<double> log_period_;
    bool closed_form_;
    double c_;
    double c_prime_;
    int horizon_K_;
};

struct ClassifierFlags {
    Verdict transitive = Verdict::inconclusive;
    Verdict mixing = Verdict::inconclusive;
    Verdict freq_hypercyclic = Verdict::inconclusive;
    Verdict chaotic = Verdict::inconclusive;
    Verdict pos_expansive = Verdict::inconclusive;
};

struct SummabilityReport {
    double partial_sum = 0.0;                 // sum_{n<=N} (d_n)^{-alpha}
    std::optional<double> tail_bound;         // geometric bound on the rest
    Verdict converges = Verdict::inconclusive;
    double root_limit = 0.0;                  // estimate of lim (d_n)^{-1/n}
    bool horizon_truncated = false;
};

struct RghIndicators {
    double i_root = 0.0;     // lim (d_n)^{-1/n} estimate
    double i_sum = 0.0;      // sum_{n<=N} (d_n)^{-1}
    double i_sup_sum = 0.0;  // sup_{k<=K} sum_{n<=N} (beta_k^n)^{-1}
    Verdict root_v = Verdict::inconclusive;
    Verdict sum_v = Verdict::inconclusive;
    Verdict sup_v = Verdict::inconclusive;
    bool consistent = false;
};

struct WeightReport {
    std::vector<double> d_values;
    double d_sum_alpha = 0.0;
    double root_limit = 0.0;
    double spectral_radius = 0.0;
    ClassifierFlags flags;
    bool horizon_truncated = false;
};

// sum_{n<=N} (d_n)^{-alpha} plus, when the rate allows, a tail bound making
// the total an estimate of the full series d of the convergence condition.
SummabilityReport summability(const WeightSequence& w, double alpha, int N);

// Total sum_{n>=1} (d_n)^{-alpha} = partial + tail bound. Throws Error if the
// series is not certified convergent at this horizon.
double d_series(const WeightSequence& w, double alpha, int N);

// Dynamics classification from the growth of beta_1^n. `p` is the l^p
// exponent; nullopt means c0, where the series criteria for frequent
// hypercyclicity / chaos are not covered and stay inconclusive.
ClassifierFlags classify(const WeightSequence& w, std::optional<double> p, int N);

RghIndicators rgh_indicators(const WeightSequence& w, int N);

double spectral_radius(const WeightSequence& w, int N);

WeightReport weight_report(const WeightSequence& w, double alpha, std::optional<double> p, int N);

} // namespace shiftgibbs
