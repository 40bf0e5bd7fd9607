#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "shiftgibbs/gibbs.hpp"
#include "shiftgibbs/wasserstein.hpp"

namespace shiftgibbs {

// assignment_solver: independent clouds, exact W, statistical tolerance.
// coupled_draws: identical r-streams for both clouds; the paired mean
// distance is a deterministic upper-bound estimator and, for abar = 0 with
// constant weights, reproduces the analytic contraction ratio exactly.
enum class ContractionChannel { assignment_solver, coupled_draws };

struct ContractionReport {
    double a = 1.0;
    double c_contr = 0.0;
    int n = 1;
    double alpha = 1.0;
    bool premise_dn_small = false;  // (d_n)^{-alpha} <= 3/8 (local case)
    bool premise_distance = false;  // local: Dtilde < 1; global: Dtilde = 1 and aD < d_n^alpha
    double d_xy = 0.0;       // D(x,y) = ||x-y||^alpha
    double dtilde_xy = 0.0;  // min{1, a D}
    double measured = 0.0;   // W between the n-step pushed clouds
    double measured_ratio = 0.0;  // measured / Dtilde(x,y)
    double paper_bound = 0.75;
    double noise_floor = 0.0;
    double stat_tol = 0.0;  // 3 x noise floor (zero for the coupled channel)
    bool passes = false;
    std::string channel;
};

struct ContractionOptions {
    int particles = 512;
    int horizon = 64;  // for the d-series
    ContractionChannel channel = ContractionChannel::assignment_solver;
    std::optional<double> a_override;  // must not undercut the a-rule
    int noise_reps = 2;
    W1Options w1;
    PushOptions push;
};

ContractionReport local_contraction_experiment(const Potential& abar, const AprioriMeasure& m,
                                               const WeightSequence& w, const Point& x,
                                               const Point& y, int n, std::uint64_t seed,
                                               const ContractionOptions& opt = {});

ContractionReport global_contraction_experiment(const Potential& abar, const AprioriMeasure& m,
                                                const WeightSequence& w, const Point& x,
                                                const Point& y, int n, std::uint64_t seed,
                                                const ContractionOptions& opt = {});

} // namespace shiftgibbs
