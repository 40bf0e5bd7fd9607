#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "shiftgibbs/apriori.hpp"
#include "shiftgibbs/grid.hpp"
#include "shiftgibbs/potential.hpp"
#include "shiftgibbs/space.hpp"
#include "shiftgibbs/weights.hpp"

namespace shiftgibbs {

// One application of the transfer operator by quadrature over the a-priori
// coordinate: sum_i w_i e^{A(v_i)} phi(v_i) with v_i = preimage(x, r_i).
double transfer_apply(const Potential& A, const AprioriMeasure& m, const WeightSequence& w,
                      const std::function<double(const Point&)>& phi, const Point& x);

enum class IterateMethod { nested_quadrature, monte_carlo };

struct ApplyNResult {
    double value = 0.0;
    double stderr_est = 0.0;  // zero for nested quadrature
    long evaluations = 0;
};

// n-th iterate as the n-fold integral, either tensorized quadrature
// (order^n capped by `budget`) or iid sampling of (r_1..r_n) ~ m^n.
ApplyNResult transfer_apply_n(const Potential& A, const AprioriMeasure& m,
                              const WeightSequence& w,
                              const std::function<double(const Point&)>& phi, const Point& x,
                              int n, IterateMethod method, long budget_or_samples,
                              std::uint64_t seed = 0);

struct GridSpec {
    std::vector<double> half_widths;
    std::vector<int> sizes;
};

// Axis ranges adapted to the dynamics: axis 1 covers supp(m) up to
// `clamp_mass` of tail probability, and axis j+1 covers axis j divided by
// alpha_j, which is exactly the range the preimage map produces.
GridSpec auto_grid_spec(const AprioriMeasure& m, const WeightSequence& w, int rank, int points,
                        double clamp_mass = 1e-6);

// Rank of the grid the eigenfunction lives on: the fixed point of the
// discounted operator for a rank-N potential depends on the first N-1
// coordinates; rank-truncation applies otherwise.
int solver_rank(const Potential& A, int max_rank = 3);

// The discounted operator T_{s,A}(u)(x) = log Int e^{A + s u} dm over
// preimages of x, evaluated at every grid node of u.
GridFunction discounted_step(const Potential& A, const AprioriMeasure& m,
                             const WeightSequence& w, double s, const GridFunction& u,
                             int threads = 1);

struct DiscountedOptions {
    double tol = 1e-10;       // guaranteed sup-norm error of the returned fixed point
    long max_sweeps = 2000000;
    int threads = 1;
};

GridFunction solve_discounted(const Potential& A, const AprioriMeasure& m,
                              const WeightSequence& w, double s, const GridSpec& spec,
                              const DiscountedOptions& opt = {});

struct EigenPair {
    double lambda = 1.0;
    double kappa = 0.0;  // lambda = exp(kappa), kappa = lim (1-s) u_s(0)
    GridFunction psi;    // strictly positive, psi(0-node) = 1
    std::vector<std::array<double, 2>> kappa_trace;  // (s, (1-s) u_s(0))
    double residual = 0.0;  // sup |L_A psi - lambda psi| over audit points
    double power_lambda = 0.0;  // cross-check value; NaN when skipped
};

struct EigenOptions {
    std::vector<double> s_schedule = {0.9, 0.99, 0.999, 0.9999};
    double tol = 1e-10;
    double cauchy_tol = 1e-6;  // tolerance on the extrapolated kappa diagonal
    int threads = 1;
    bool cross_validate = true;
    int power_iters = 4000;
    int audit_count = 64;
    std::uint64_t seed = 11;
};

EigenPair eigenpair(const Potential& A, const AprioriMeasure& m, const WeightSequence& w,
                    const GridSpec& spec, const EigenOptions& opt = {});

EigenPair power_iterate(const Potential& A, const AprioriMeasure& m, const WeightSequence& w,
                        const GridSpec& spec, int iters, double tol, int threads = 1,
                        std::uint64_t seed = 11);

struct HolderCertificate {
    int n = 1;
    double D_n = 0.0;           // sum_{j<=n} (d_j)^{-alpha}
    double bound_global = 0.0;  // RHS of the global estimate
    double bound_local = 0.0;   // RHS of the local estimate at delta
    double delta = 0.0;
    double empirical_ratio = 0.0;        // max over sampled pairs
    double empirical_ratio_local = 0.0;  // restricted to ||x-y|| < delta
    bool ok_global = false;
    bool ok_local = false;
};

struct HolderOptions {
    int pairs = 10000;
    double box_scale = 2.0;   // pair base points ~ uniform in this box
    int quad_order = 12;      // quadrature order used for the n-fold iterate
    long budget = 4000000;
    std::uint64_t seed = 5;
};

// Certificate for the Hoelder propagation bounds: both right-hand sides from
// declared constants, plus the sampled ratio which must stay below them.
HolderCertificate holder_certificate(const Potential& A, const AprioriMeasure& m,
                                     const WeightSequence& w, const Potential& phi, int n,
                                     double delta, const SpaceKind& space,
                                     const HolderOptions& opt = {});

} // namespace shiftgibbs
