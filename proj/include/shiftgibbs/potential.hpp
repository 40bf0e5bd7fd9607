#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "shiftgibbs/apriori.hpp"
#include "shiftgibbs/grid.hpp"
#include "shiftgibbs/space.hpp"

namespace shiftgibbs {

enum class Provenance { declared, estimated };

// A potential A : X -> R together with its regularity data. The Hoelder /
// Lipschitz constant is either declared by the author of the evaluator (all
// builtins) or a sampled lower estimate; bound-type computations use the
// declared value and report which one they got.
class Potential {
public:
    static constexpr int kUnboundedRank = -1;

    Potential(std::string name, std::function<double(const Point&)> eval, int rank,
              double sup_bound, double holder_alpha, double lip_const, Provenance prov);

    double operator()(const Point& x) const { return eval_(x); }

    const std::string& name() const { return name_; }
    int rank() const { return rank_; }
    bool finite_rank() const { return rank_ != kUnboundedRank; }
    double sup_bound() const { return sup_bound_; }
    double holder_alpha() const { return holder_alpha_; }
    double lip_const() const { return lip_const_; }
    Provenance provenance() const { return prov_; }

    Potential shifted(double c) const;  // A + c

    // Builtins selectable from the experiment config.
    static Potential zero();
    static Potential constant(double c);
    static Potential quadratic_first_coord(double coeff);       // coeff * x_1^2
    static Potential gauss_first_coord(double amp, double width);
    static Potential tanh_coords(std::vector<double> coeffs);   // sum c_i tanh(x_i)
    static Potential tanh_pair(double c1, double c2);           // c1 tanh(x1) + c2 tanh(x1) tanh(x2)
    static Potential arctan_norm();                             // arctan ||x||
    // c * tanh(x_1) - log Integral exp(c tanh(r)) dm(r); normalized by built-in
    // quadrature so that L(1) = 1.
    static Potential tanh_first_normalized(double c, const AprioriMeasure& m);
    // Finite-rank table with multilinear interpolation.
    static Potential cylinder(GridFunction table, double lip_const, double holder_alpha = 1.0);

private:
    std::string name_;
    std::function<double(const Point&)> eval_;
    int rank_;
    double sup_bound_;
    double holder_alpha_;
    double lip_const_;
    Provenance prov_;
};

struct VariationOptions {
    int samples = 10000;
    int tail_len = 6;        // extra coordinates appended beyond the agreeing prefix
    double scale = 1.0;      // base coordinate scale; per-sample scales are log-uniform around it
    std::uint64_t seed = 1;
};

// Monte-Carlo lower estimate of V_n(A): max |A(x) - A(y)| over sampled pairs
// agreeing in the first n coordinates. Exact 0 when n >= rank.
double variation(const Potential& A, int n, const SpaceKind& space,
                 const VariationOptions& opt = {});

struct SummableVariationReport {
    std::vector<double> v;   // per-n estimates
    double partial = 0.0;
    Verdict verdict = Verdict::inconclusive;
};

SummableVariationReport summable_variation_check(const Potential& A, const SpaceKind& space,
                                                 int N, const VariationOptions& opt = {},
                                                 double divergence_threshold = 100.0);

struct NormalizedPotential {
    Potential abar;     // evaluator of A + log psi - log psi(L .) - log lambda
    GridFunction psi;
    double lambda = 1.0;
    double residual = 0.0;  // audited sup |L_abar(1) - 1|
};

NormalizedPotential normalize(const Potential& A, const GridFunction& psi, double lambda,
                              const WeightSequence& w, const AprioriMeasure& m,
                              int audit_points = 16, std::uint64_t seed = 7);

// Max over the audit points of |L_A(1)(x) - 1|.
double is_normalized_residual(const Potential& A, const AprioriMeasure& m,
                              const WeightSequence& w, std::span<const Point> audit);

// Random audit points with coordinates uniform in the given per-axis boxes.
std::vector<Point> audit_points(const SpaceKind& space, std::span<const double> half_widths,
                                int count, std::uint64_t seed);

} // namespace shiftgibbs
