#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "shiftgibbs/apriori.hpp"
#include "shiftgibbs/measure.hpp"
#include "shiftgibbs/potential.hpp"
#include "shiftgibbs/wasserstein.hpp"

namespace shiftgibbs {

struct PushOptions {
    int max_depth = 32;       // clouds re-truncated here; dropped tail is logged
    int threads = 1;
    bool check_normalized = true;
    double normalized_tol = 1e-6;
    double* dropped_tail = nullptr;  // optional out: max |dropped coordinate|
};

// One step of the dual operator on a particle cloud: per particle, draw K
// candidates r ~ m, select with probability proportional to
// e^{abar(preimage(x, r))}, emit the selected preimage. Per-particle
// counter-based streams keyed by (seed, generation, index) make the result
// bit-identical for every thread count.
EmpiricalMeasure push_dual(const Potential& abar, const AprioriMeasure& m,
                           const WeightSequence& w, const EmpiricalMeasure& mu, int K,
                           std::uint64_t seed, const PushOptions& opt = {});

struct SupportProbe {
    double hit_fraction = 0.0;          // particles within eps of x in D_X
    double first_coord_fraction = 0.0;  // the one-step cylinder event of the support bound
    double lower_bound = 0.0;           // e^{inf A} m([x_1 - eps, x_1 + eps])
    double binom_stderr = 0.0;
};

SupportProbe support_probe(const EmpiricalMeasure& mu, const Point& x, double eps,
                           const AprioriMeasure& m, double inf_A);

// |mean(f * g(L^n .)) - mean(f) mean(g)| over particles.
double mixing_correlation(const EmpiricalMeasure& mu, const WeightSequence& w,
                          const std::function<double(const Point&)>& f,
                          const std::function<double(const Point&)>& g, int n);

// W(L # mu, mu) under the given metric.
double invariance_gap(const EmpiricalMeasure& mu, const WeightSequence& w,
                      const MetricSpec& metric, const W1Options& opt = {});

struct GibbsRunReport {
    int particles = 0;
    int iters = 0;
    int candidates = 0;
    std::vector<int> recorded_gens;
    std::vector<double> w_trace;           // W between successive recorded iterates
    std::vector<double> uniqueness_trace;  // W between the two initializations' iterates
    double invariance_gap = 0.0;
    double max_dropped_tail = 0.0;
    std::vector<std::array<double, 2>> mixing_trace;  // (n, |corr_n|), f = g = tanh(x_1)
    std::optional<EmpiricalMeasure> final_cloud;
    std::optional<EmpiricalMeasure> final_cloud_alt;
};

struct GibbsOptions {
    int record_every = 5;
    int w_subsample = 1024;  // particle count used for W evaluations
    MetricSpec metric = MetricSpec::bounded(1.0, 1.0);
    W1Options w1;
    PushOptions push;
    std::vector<int> mixing_lags = {0, 1, 2, 4, 8};
    bool keep_clouds = true;
};

// Runs n_iters dual steps from nu0 and from an optional second
// initialization (uniqueness witness); records the W traces and the
// invariance gap of the final cloud.
GibbsRunReport iterate_to_gibbs(const Potential& abar, const AprioriMeasure& m,
                                const WeightSequence& w, const EmpiricalMeasure& nu0,
                                std::optional<EmpiricalMeasure> nu0_alt, int n_iters, int K,
                                std::uint64_t seed, const GibbsOptions& opt = {});

} // namespace shiftgibbs
