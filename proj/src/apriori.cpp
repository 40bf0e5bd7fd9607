#include "shiftgibbs/apriori.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "shiftgibbs/errors.hpp"
#include "shiftgibbs/numeric.hpp"
#include "shiftgibbs/specfun.hpp"

namespace shiftgibbs {

namespace {
constexpr double kMargin = 0.999;
}

AprioriMeasure AprioriMeasure::gaussian(double mean, double variance, int quadrature_order)
{
    if (!(variance > 0.0)) throw ConfigInvalid("apriori: gaussian variance must be positive");
    if (quadrature_order < 1) throw ConfigInvalid("apriori: quadrature_order must be >= 1");
    AprioriMeasure m;
    m.kind_ = Kind::gaussian;
    m.mean_ = mean;
    m.variance_ = variance;
    m.quadrature_order_ = quadrature_order;
    m.tail_class_ = {TailClass::Kind::exponential, 0.0};
    return m;
}

AprioriMeasure AprioriMeasure::student_t(double gamma)
{
    if (!(gamma > 1.0)) throw ConfigInvalid("apriori: student_t tail order must be > 1");
    AprioriMeasure m;
    m.kind_ = Kind::student_t;
    m.gamma_ = gamma;
    m.tail_class_ = {TailClass::Kind::polynomial, gamma};
    return m;
}

AprioriMeasure AprioriMeasure::atoms(std::vector<double> values, std::vector<double> probs)
{
    if (values.empty() || values.size() != probs.size())
        throw ConfigInvalid("apriori: atoms need matching nonempty values/probs");
    double s = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw ConfigInvalid("apriori: atom probs must be nonnegative");
        s += p;
    }
    if (std::fabs(s - 1.0) > 1e-12) throw ConfigInvalid("apriori: atom probs must sum to 1");
    AprioriMeasure m;
    m.kind_ = Kind::atoms;
    m.atom_values_ = std::move(values);
    m.atom_probs_ = std::move(probs);
    m.atom_cdf_.resize(m.atom_probs_.size());
    double c = 0.0;
    for (std::size_t i = 0; i < m.atom_probs_.size(); ++i) {
        c += m.atom_probs_[i];
        m.atom_cdf_[i] = c;
    }
    m.atom_cdf_.back() = 1.0;
    // Bounded support: tails vanish, trivially within the exponential class.
    m.tail_class_ = {TailClass::Kind::exponential, 0.0};
    return m;
}

double AprioriMeasure::tail(double z) const
{
    if (!(z >= 0.0)) throw Error("apriori: tail requires z >= 0");
    switch (kind_) {
        case Kind::gaussian: {
            const double sd = std::sqrt(variance_);
            return normal_sf((z - mean_) / sd) + normal_cdf((-z - mean_) / sd);
        }
        case Kind::student_t: return student_t_tail(gamma_, z);
        default: {
            double s = 0.0;
            for (std::size_t i = 0; i < atom_values_.size(); ++i)
                if (std::fabs(atom_values_[i]) > z) s += atom_probs_[i];
            return s;
        }
    }
}

double AprioriMeasure::tail_quantile(double q) const
{
    if (!(q > 0.0 && q <= 1.0)) throw Error("apriori: tail_quantile requires q in (0,1]");
    if (tail(0.0) <= q) return 0.0;
    // symmetric gaussian: z with sf(z) = q/2, through the lower quantile so
    // that q near the double-precision floor keeps full accuracy
    if (kind_ == Kind::gaussian && mean_ == 0.0)
        return std::sqrt(variance_) * -normal_quantile(0.5 * q);
    double lo = 0.0, hi = 1.0;
    while (tail(hi) > q) {
        hi *= 2.0;
        if (hi > 1e300) throw NonFinite("apriori: tail_quantile bracket blew up");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (tail(mid) > q)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

double AprioriMeasure::interval(double lo, double hi) const
{
    if (lo > hi) return 0.0;
    switch (kind_) {
        case Kind::gaussian: {
            const double sd = std::sqrt(variance_);
            return normal_cdf((hi - mean_) / sd) - normal_cdf((lo - mean_) / sd);
        }
        case Kind::student_t: {
            auto cdf = [this](double x) {
                const double t = student_t_tail(gamma_, std::fabs(x));
                return x >= 0.0 ? 1.0 - 0.5 * t : 0.5 * t;
            };
            return cdf(hi) - cdf(lo);
        }
        default: {
            double s = 0.0;
            for (std::size_t i = 0; i < atom_values_.size(); ++i)
                if (atom_values_[i] >= lo && atom_values_[i] <= hi) s += atom_probs_[i];
            return s;
        }
    }
}

double AprioriMeasure::sample(SplitMix64& rng) const
{
    const double u = rng.next_open();
    switch (kind_) {
        case Kind::gaussian: return mean_ + std::sqrt(variance_) * normal_quantile(u);
        case Kind::student_t: {
            // invert the symmetric cdf through the two-sided tail
            const double q = u < 0.5 ? 2.0 * u : 2.0 * (1.0 - u);
            const double z = tail_quantile(std::max(q, 1e-300));
            return u < 0.5 ? -z : z;
        }
        default: {
            const auto it = std::lower_bound(atom_cdf_.begin(), atom_cdf_.end(), u);
            const std::size_t i = static_cast<std::size_t>(it - atom_cdf_.begin());
            return atom_values_[std::min(i, atom_values_.size() - 1)];
        }
    }
}

QuadratureRule AprioriMeasure::quadrature() const
{
    switch (kind_) {
        case Kind::atoms: {
            QuadratureRule r;
            r.nodes = Eigen::Map<const Eigen::VectorXd>(atom_values_.data(),
                                                        static_cast<Eigen::Index>(atom_values_.size()));
            r.weights = Eigen::Map<const Eigen::VectorXd>(atom_probs_.data(),
                                                          static_cast<Eigen::Index>(atom_probs_.size()));
            r.exact_degree = std::numeric_limits<int>::max();  // the rule is the measure
            return r;
        }
        case Kind::student_t: {
            std::ostringstream os;
            os << "apriori: no quadrature for student_t(gamma=" << gamma_
               << "); moments exist only below degree " << gamma_;
            throw UnsupportedKind(os.str());
        }
        default: {
            // Probabilists' Gauss-Hermite by Golub-Welsch: the Jacobi matrix
            // of He_n has zero diagonal and off-diagonal sqrt(i).
            const int n = quadrature_order_;
            Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
            for (int i = 1; i < n; ++i) {
                const double b = std::sqrt(static_cast<double>(i));
                J(i, i - 1) = b;
                J(i - 1, i) = b;
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
            QuadratureRule r;
            const double sd = std::sqrt(variance_);
            r.nodes = (es.eigenvalues().array() * sd + mean_).matrix();
            r.weights = es.eigenvectors().row(0).array().square().matrix();
            r.weights /= r.weights.sum();
            r.exact_degree = 2 * n - 1;
            return r;
        }
    }
}

std::string AprioriMeasure::describe() const
{
    switch (kind_) {
        case Kind::gaussian: return "gaussian";
        case Kind::student_t: return "student_t";
        default: return "atoms";
    }
}

namespace {

// Membership of a positive sequence (v_n) in X, decided at the horizon with
// a geometric ratio margin.
Verdict sequence_in_space(const std::vector<double>& v, const SpaceKind& space)
{
    const std::size_t N = v.size();
    if (N < 4) return Verdict::inconclusive;
    const std::size_t half = N / 2;
    const double ratio =
        std::pow(v[N - 1] / std::max(v[half - 1], 1e-300), 1.0 / static_cast<double>(N - half));
    if (space.is_c0()) {
        if (ratio < kMargin) return Verdict::holds;
        if (ratio > 1.0 / kMargin) return Verdict::fails;
        return Verdict::inconclusive;
    }
    const double rp = std::pow(ratio, space.p);
    if (rp < kMargin) return Verdict::holds;
    if (rp > 1.0 / kMargin) return Verdict::fails;
    return Verdict::inconclusive;
}

} // namespace

TailReport adapted_tails_check(const AprioriMeasure& m, const WeightSequence& w,
                               const SpaceKind& space, double eps, int N)
{
    if (!(eps > 0.0)) throw Error("adapted_tails_check: eps must be positive");
    if (N < 4) throw Error("adapted_tails_check: N must be >= 4");

    TailReport rep;
    rep.epsilon = eps;
    rep.kappa.resize(static_cast<std::size_t>(N));
    std::vector<double> terms(static_cast<std::size_t>(N));
    double budget = eps;
    for (int n = 1; n <= N; ++n) {
        budget *= 0.5;  // eps * 2^{-n} split across n
        const double z = m.tail_quantile(budget);
        rep.kappa[n - 1] = z * std::exp(-w.log_beta(1, n));
        terms[n - 1] = m.tail(z);
    }
    rep.tail_sum = pairwise_sum(terms);
    rep.kappa_in_X = sequence_in_space(rep.kappa, space);

    const bool sum_ok = rep.tail_sum < eps;
    if (sum_ok && rep.kappa_in_X == Verdict::holds)
        rep.verdict = Verdict::holds;
    else if (rep.kappa_in_X == Verdict::fails)
        rep.verdict = Verdict::fails;  // this construction fails; not a disproof of adaptedness
    else
        rep.verdict = Verdict::inconclusive;
    return rep;
}

Verdict polynomial_tail_criterion(double gamma, double ell, const SpaceKind& space)
{
    if (!(gamma > 1.0)) throw Error("polynomial_tail_criterion: gamma must be > 1");
    // c0: n/d_n -> 0 suffices, i.e. growth order above 1.
    // l^p: d_n > C n^ell with ell > 1/gamma + 1/p.
    const double needed = space.is_c0() ? 1.0 : 1.0 / gamma + 1.0 / space.p;
    return ell > needed ? Verdict::holds : Verdict::inconclusive;
}

Verdict exponential_tail_criterion(const WeightSequence& w, const SpaceKind& space, int N)
{
    if (N < 4) throw Error("exponential_tail_criterion: N must be >= 4");
    std::vector<double> v(static_cast<std::size_t>(N));
    for (int n = 1; n <= N; ++n)
        v[n - 1] = std::log(static_cast<double>(n) + 1.0) * std::exp(-w.log_d(n));
    const Verdict in_x = sequence_in_space(v, space);
    return in_x == Verdict::holds ? Verdict::holds : Verdict::inconclusive;
}

Verdict fast_tail_criteria(const AprioriMeasure& m, const WeightSequence& w,
                           const SpaceKind& space, int N)
{
    const TailClass tc = m.tail_class();
    if (tc.kind == TailClass::Kind::none)
        throw MissingTailClass("fast_tail_criteria: measure declares no tail class");

    if (tc.kind == TailClass::Kind::exponential) return exponential_tail_criterion(w, space, N);

    // Polynomial tails: estimate the growth order of d_n from the last
    // doubling. Exponential growth shows up as a huge exponent and clears
    // the threshold automatically; the margin only matters near it.
    const double ell = (w.log_d(N) - w.log_d(N / 2)) /
                       (std::log(static_cast<double>(N)) - std::log(N / 2.0));
    return polynomial_tail_criterion(tc.gamma, ell * kMargin, space);
}

} // namespace shiftgibbs
