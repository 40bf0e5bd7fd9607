#include "shiftgibbs/potential.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>

#include "shiftgibbs/errors.hpp"
#include "shiftgibbs/numeric.hpp"
#include "shiftgibbs/specfun.hpp"
#include "shiftgibbs/transfer.hpp"

namespace shiftgibbs {

Potential::Potential(std::string name, std::function<double(const Point&)> eval, int rank,
                     double sup_bound, double holder_alpha, double lip_const, Provenance prov)
    : name_(std::move(name)),
      eval_(std::move(eval)),
      rank_(rank),
      sup_bound_(sup_bound),
      holder_alpha_(holder_alpha),
      lip_const_(lip_const),
      prov_(prov)
{
    if (rank_ != kUnboundedRank && rank_ < 1) throw ConfigInvalid("potential: rank must be >= 1");
    if (!(holder_alpha_ > 0.0 && holder_alpha_ <= 1.0))
        throw ConfigInvalid("potential: holder_alpha must be in (0,1]");
}

Potential Potential::shifted(double c) const
{
    auto base = eval_;
    return Potential(name_ + "+const", [base, c](const Point& x) { return base(x) + c; }, rank_,
                     sup_bound_ + std::fabs(c), holder_alpha_, lip_const_, prov_);
}

Potential Potential::zero()
{
    return Potential("zero", [](const Point&) { return 0.0; }, 1, 0.0, 1.0, 0.0,
                     Provenance::declared);
}

Potential Potential::constant(double c)
{
    return Potential("constant", [c](const Point&) { return c; }, 1, std::fabs(c), 1.0, 0.0,
                     Provenance::declared);
}

Potential Potential::quadratic_first_coord(double coeff)
{
    // Unbounded on X; the declared sup is an estimate for the grid boxes in
    // which the solver actually evaluates it.
    return Potential(
        "quadratic_first_coord",
        [coeff](const Point& x) {
            const double t = x.coord(0);
            return coeff * t * t;
        },
        1, std::fabs(coeff) * 64.0, 1.0, std::fabs(coeff) * 16.0, Provenance::estimated);
}

Potential Potential::gauss_first_coord(double amp, double width)
{
    if (!(width > 0.0)) throw ConfigInvalid("potential: gauss width must be positive");
    const double lip = std::fabs(amp) * std::sqrt(2.0 / width) * std::exp(-0.5);
    return Potential(
        "gauss_first_coord",
        [amp, width](const Point& x) {
            const double t = x.coord(0);
            return amp * std::exp(-t * t / width);
        },
        1, std::fabs(amp), 1.0, lip, Provenance::declared);
}

Potential Potential::tanh_coords(std::vector<double> coeffs)
{
    if (coeffs.empty()) throw ConfigInvalid("potential: tanh_coords needs coefficients");
    double sup = 0.0;
    for (double c : coeffs) sup += std::fabs(c);
    const int rank = static_cast<int>(coeffs.size());
    return Potential(
        "tanh_coords",
        [coeffs](const Point& x) {
            double s = 0.0;
            for (std::size_t i = 0; i < coeffs.size(); ++i)
                s += coeffs[i] * std::tanh(x.coord(static_cast<int>(i)));
            return s;
        },
        rank, sup, 1.0, sup, Provenance::declared);
}

Potential Potential::tanh_pair(double c1, double c2)
{
    const double sup = std::fabs(c1) + std::fabs(c2);
    return Potential(
        "tanh_pair",
        [c1, c2](const Point& x) {
            const double t1 = std::tanh(x.coord(0));
            return c1 * t1 + c2 * t1 * std::tanh(x.coord(1));
        },
        2, sup, 1.0, std::fabs(c1) + 2.0 * std::fabs(c2), Provenance::declared);
}

Potential Potential::arctan_norm()
{
    return Potential(
        "arctan_norm", [](const Point& x) { return std::atan(norm(x)); }, kUnboundedRank,
        1.5707963267948966, 1.0, 1.0, Provenance::declared);
}

Potential Potential::tanh_first_normalized(double c, const AprioriMeasure& m)
{
    const QuadratureRule q = m.quadrature();
    std::vector<double> terms(static_cast<std::size_t>(q.nodes.size()));
    for (Eigen::Index i = 0; i < q.nodes.size(); ++i)
        terms[static_cast<std::size_t>(i)] = q.weights[i] * std::exp(c * std::tanh(q.nodes[i]));
    const double log_lambda0 = std::log(pairwise_sum(terms));
    return Potential(
        "tanh_first_normalized",
        [c, log_lambda0](const Point& x) { return c * std::tanh(x.coord(0)) - log_lambda0; }, 1,
        std::fabs(c) + std::fabs(log_lambda0), 1.0, std::fabs(c), Provenance::declared);
}

Potential Potential::cylinder(GridFunction table, double lip_const, double holder_alpha)
{
    const int rank = table.rank();
    const double sup =
        std::max(std::fabs(table.values().maxCoeff()), std::fabs(table.values().minCoeff()));
    auto tbl = std::make_shared<GridFunction>(std::move(table));
    return Potential(
        "cylinder", [tbl](const Point& x) { return tbl->evaluate(x); }, rank, sup, holder_alpha,
        lip_const, Provenance::declared);
}

namespace {

// Log-uniform scale over [base*1e-3, base*1e3]; wide enough that both the
// near-zero and the saturated regime of bounded potentials get sampled.
double random_scale(SplitMix64& rng, double base)
{
    return base * std::pow(10.0, 6.0 * rng.next_double() - 3.0);
}

Point variation_sample(SplitMix64& rng, const Eigen::VectorXd& prefix, int tail_len,
                       double base_scale, const SpaceKind& space)
{
    const double s = random_scale(rng, base_scale);
    Eigen::VectorXd v(prefix.size() + tail_len);
    v.head(prefix.size()) = prefix;
    for (int i = 0; i < tail_len; ++i)
        v[prefix.size() + i] = s * normal_quantile(rng.next_open());
    return Point(std::move(v), space);
}

} // namespace

double variation(const Potential& A, int n, const SpaceKind& space, const VariationOptions& opt)
{
    if (n < 1) throw Error("variation: n must be >= 1");
    if (A.finite_rank() && n >= A.rank()) return 0.0;

    double best = 0.0;
    for (int s = 0; s < opt.samples; ++s) {
        SplitMix64 rng = substream(opt.seed, static_cast<std::uint64_t>(n),
                                   static_cast<std::uint64_t>(s));
        const double ps = random_scale(rng, opt.scale);
        Eigen::VectorXd prefix(n);
        for (int i = 0; i < n; ++i) prefix[i] = ps * normal_quantile(rng.next_open());
        const Point x = variation_sample(rng, prefix, opt.tail_len, opt.scale, space);
        const Point y = variation_sample(rng, prefix, opt.tail_len, opt.scale, space);
        best = std::max(best, std::fabs(A(x) - A(y)));
    }
    return best;
}

SummableVariationReport summable_variation_check(const Potential& A, const SpaceKind& space,
                                                 int N, const VariationOptions& opt,
                                                 double divergence_threshold)
{
    SummableVariationReport rep;
    rep.v.resize(static_cast<std::size_t>(N));
    for (int n = 1; n <= N; ++n) rep.v[n - 1] = variation(A, n, space, opt);
    rep.partial = pairwise_sum(rep.v);

    if (A.finite_rank()) {
        rep.verdict = Verdict::holds;
        return rep;
    }
    if (rep.partial > divergence_threshold) {
        rep.verdict = Verdict::fails;
        return rep;
    }
    // Decaying estimates: accept when the last terms are negligible.
    const double head = *std::max_element(rep.v.begin(), rep.v.end());
    const double last = rep.v.back();
    rep.verdict = (head > 0.0 && last < 1e-3 * head) ? Verdict::holds : Verdict::inconclusive;
    return rep;
}

std::vector<Point> audit_points(const SpaceKind& space, std::span<const double> half_widths,
                                int count, std::uint64_t seed)
{
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        SplitMix64 rng = substream(seed, 0xa0d17, static_cast<std::uint64_t>(i));
        Eigen::VectorXd v(static_cast<Eigen::Index>(half_widths.size()));
        for (std::size_t j = 0; j < half_widths.size(); ++j)
            v[static_cast<Eigen::Index>(j)] = (2.0 * rng.next_double() - 1.0) * half_widths[j];
        pts.emplace_back(std::move(v), space);
    }
    return pts;
}

double is_normalized_residual(const Potential& A, const AprioriMeasure& m,
                              const WeightSequence& w, std::span<const Point> audit)
{
    double worst = 0.0;
    for (const Point& x : audit) {
        const double v = transfer_apply(A, m, w, [](const Point&) { return 1.0; }, x);
        worst = std::max(worst, std::fabs(v - 1.0));
    }
    return worst;
}

NormalizedPotential normalize(const Potential& A, const GridFunction& psi, double lambda,
                              const WeightSequence& w, const AprioriMeasure& m, int audit_count,
                              std::uint64_t seed)
{
    if (!(lambda > 0.0)) throw Error("normalize: lambda must be positive");
    if (psi.values().minCoeff() <= 0.0)
        throw NonpositiveEigenfunction("normalize: psi must be strictly positive on its grid");

    const double log_lambda = std::log(lambda);
    auto psi_tbl = std::make_shared<GridFunction>(psi);
    auto base = A;
    WeightSequence wts = w;
    auto eval = [base, psi_tbl, log_lambda, wts](const Point& x) {
        const Point lx = apply_L(wts, x);
        return base(x) + std::log(psi_tbl->evaluate(x)) - std::log(psi_tbl->evaluate(lx)) -
               log_lambda;
    };

    // Declared data for the normalized potential. log(psi) inherits the
    // eigenfunction bound |u(x)-u(y)| <= d Lip_A ||x-y||^alpha, and
    // log(psi(L .)) picks up a factor (c')^alpha from the shift.
    const double alpha = A.holder_alpha();
    double d = 0.0;
    bool have_d = true;
    try {
        d = d_series(w, alpha, 256);
    } catch (const Error&) {
        have_d = false;
    }
    const double lip = have_d
                           ? A.lip_const() * (1.0 + d + d * std::pow(w.upper_bound(), alpha))
                           : A.lip_const();
    const double log_psi_span = std::fabs(std::log(psi.values().maxCoeff()) -
                                          std::log(psi.values().minCoeff()));
    const double sup = A.sup_bound() + 2.0 * log_psi_span + std::fabs(log_lambda);
    const int rank = A.finite_rank() ? std::max(A.rank(), psi.rank() + 1) : Potential::kUnboundedRank;

    Potential abar(A.name() + "~normalized", eval, rank, sup, alpha, lip,
                   have_d ? A.provenance() : Provenance::estimated);

    // Residual audit over the psi grid box.
    std::vector<double> hw(static_cast<std::size_t>(psi.rank()));
    for (int j = 0; j < psi.rank(); ++j) hw[static_cast<std::size_t>(j)] = psi.half_width(j);
    const auto pts = audit_points(SpaceKind::lp(2.0), hw, audit_count, seed);
    const double resid = is_normalized_residual(abar, m, w, pts);

    return NormalizedPotential{std::move(abar), psi, lambda, resid};
}

} // namespace shiftgibbs
