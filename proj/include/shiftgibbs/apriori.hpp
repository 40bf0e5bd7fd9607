#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "shiftgibbs/rng.hpp"
#include "shiftgibbs/space.hpp"
#include "shiftgibbs/weights.hpp"

namespace shiftgibbs {

struct QuadratureRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
    int exact_degree = 0;  // polynomials up to this degree are integrated exactly
};

struct TailClass {
    enum class Kind { none, polynomial, exponential };
    Kind kind = Kind::none;
    double gamma = 0.0;  // polynomial order; unused otherwise
};

// The a-priori probability m on Ker(L) ~= R. Gaussian and Student-t have
// closed-form tails and full support; the atomic kind is the exact oracle
// companion and carries full_support = false.
class AprioriMeasure {
public:
    enum class Kind { gaussian, student_t, atoms };

    static AprioriMeasure gaussian(double mean, double variance, int quadrature_order = 40);
    static AprioriMeasure student_t(double gamma);
    static AprioriMeasure atoms(std::vector<double> values, std::vector<double> probs);

    Kind kind() const { return kind_; }
    bool full_support() const { return kind_ != Kind::atoms; }
    int quadrature_order() const { return quadrature_order_; }
    double mean() const { return mean_; }
    double variance() const { return variance_; }
    double gamma() const { return gamma_; }
    const std::vector<double>& atom_values() const { return atom_values_; }
    const std::vector<double>& atom_probs() const { return atom_probs_; }

    TailClass tail_class() const { return tail_class_; }
    void clear_tail_class() { tail_class_ = {TailClass::Kind::none, 0.0}; }

    double tail(double z) const;           // m(|x| > z), z >= 0
    double tail_quantile(double q) const;  // smallest z with tail(z) <= q
    double interval(double lo, double hi) const;  // m([lo, hi])
    double sample(SplitMix64& rng) const;

    // Discretization of dm. Throws UnsupportedKind for student_t, reporting
    // the largest finite moment degree.
    QuadratureRule quadrature() const;

    std::string describe() const;

private:
    AprioriMeasure() = default;

    Kind kind_ = Kind::gaussian;
    double mean_ = 0.0;
    double variance_ = 1.0;
    double gamma_ = 0.0;
    std::vector<double> atom_values_;
    std::vector<double> atom_probs_;
    std::vector<double> atom_cdf_;
    int quadrature_order_ = 40;
    TailClass tail_class_;
};

struct TailReport {
    double epsilon = 0.0;
    std::vector<double> kappa;
    double tail_sum = 0.0;       // sum of m(|x| > beta_1^n kappa_n)
    Verdict kappa_in_X = Verdict::inconclusive;
    Verdict verdict = Verdict::inconclusive;  // holds / not-established / inconclusive
};

// Constructive check of the adapted-tails property: kappa_n is built by
// inverting the tail so that each term of the sum is at most eps * 2^{-n},
// then membership of (kappa_n) in X is decided at the horizon.
TailReport adapted_tails_check(const AprioriMeasure& m, const WeightSequence& w,
                               const SpaceKind& space, double eps, int N);

// Arithmetic form of the polynomial-tail sufficient condition: d_n growing
// like n^ell is enough when ell > 1/gamma (c0) or ell > 1/gamma + 1/p (l^p).
// A failed condition is inconclusive, never a disproof.
Verdict polynomial_tail_criterion(double gamma, double ell, const SpaceKind& space);

// Exponential-tail sufficient condition: ((log n)/d_n) in X, decided at the
// horizon with the usual ratio margin.
Verdict exponential_tail_criterion(const WeightSequence& w, const SpaceKind& space, int N);

// Dispatch on the measure's declared tail class; throws MissingTailClass.
Verdict fast_tail_criteria(const AprioriMeasure& m, const WeightSequence& w,
                           const SpaceKind& space, int N);

} // namespace shiftgibbs
