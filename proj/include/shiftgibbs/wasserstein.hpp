#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "shiftgibbs/measure.hpp"
#include "shiftgibbs/space.hpp"
#include "shiftgibbs/weights.hpp"

namespace shiftgibbs {

struct TransportPlan {
    enum class Method { exact_assignment, entropic };
    Method method = Method::exact_assignment;
    std::vector<int> assignment;  // exact case: row i -> column assignment[i]
    Eigen::MatrixXd coupling;     // entropic case: dense plan with uniform marginals
    double cost = 0.0;
    double eps_reg = 0.0;
    double dual_gap = 0.0;  // reported entropic bias bound; zero for exact
};

struct W1Options {
    int exact_threshold = 2048;  // particle count up to which the exact solver runs
    double eps_reg = 1e-3;
    int sinkhorn_max_iters = 20000;
    double sinkhorn_tol = 1e-10;  // marginal sup error
    int threads = 1;
};

struct W1Result {
    double value = 0.0;
    TransportPlan plan;
};

// Pairwise distance matrix under the metric spec (rows: mu, cols: nu).
Eigen::MatrixXd cost_matrix(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                            const MetricSpec& metric, int threads = 1);

// Exact min-cost perfect matching on a square cost matrix
// (Jonker-Volgenant shortest augmenting path); returns row->col assignment.
double solve_assignment(const Eigen::MatrixXd& cost, std::vector<int>& assignment);

W1Result w1(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const MetricSpec& metric,
            const W1Options& opt = {});

// Kantorovich lower bound: max over declared 1-Lipschitz test functions of
// |mean_mu(f) - mean_nu(f)|; the declaration is audited on sampled pairs.
double kantorovich_lb(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                      const MetricSpec& metric,
                      std::span<const std::function<double(const Point&)>> test_functions,
                      int audit_pairs = 256, std::uint64_t seed = 3);

// Appendix constant: sup over 0 < t <= 1 of (e^{Lip * dsum * t} - 1)/t,
// computed by golden-section search.
double contraction_constant(double lip_abar, double dsum, double tol = 1e-10);

// Bounded-metric scale rule a = max{8 c_contr / 3, 1}.
double metric_scale_auto(double c_contr);

// Piecewise one-step contraction profile r_n(t) of the combined estimate.
// Requires (d_n)^alpha >= 8/3.
std::vector<double> rn_profile(const WeightSequence& w, double alpha, double a, int n,
                               std::span<const double> t_grid, int horizon = 64);

// Tail-uniform contraction factor of the concentrated-measure estimate.
// Requires gamma >= 1/a and (d_n)^alpha >= 8/3.
double tails_contraction_factor(double gamma, const WeightSequence& w, double alpha, double a,
                                int n, int horizon = 64);

// W between two iid clouds of the same law: the resolution floor used by
// every statistical Wasserstein assertion. `sample_cloud` must return an
// independent cloud for each seed.
double noise_floor(const std::function<EmpiricalMeasure(std::uint64_t)>& sample_cloud,
                   const MetricSpec& metric, int reps, std::uint64_t seed,
                   const W1Options& opt = {});

} // namespace shiftgibbs
