#include "shiftgibbs/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shiftgibbs/errors.hpp"
#include "shiftgibbs/numeric.hpp"
#include "shiftgibbs/parallel.hpp"
#include "shiftgibbs/rng.hpp"

namespace shiftgibbs {

double transfer_apply(const Potential& A, const AprioriMeasure& m, const WeightSequence& w,
                      const std::function<double(const Point&)>& phi, const Point& x)
{
    const QuadratureRule q = m.quadrature();
    std::vector<double> terms(static_cast<std::size_t>(q.nodes.size()));
    for (Eigen::Index i = 0; i < q.nodes.size(); ++i) {
        const Point v = preimage(w, x, q.nodes[i]);
        terms[static_cast<std::size_t>(i)] = q.weights[i] * std::exp(A(v)) * phi(v);
    }
    return pairwise_sum(terms);
}

namespace {

double nested_apply(const Potential& A, const QuadratureRule& q, const WeightSequence& w,
                    const std::function<double(const Point&)>& phi, const Point& x, int k,
                    long& evals)
{
    if (k == 0) return phi(x);
    std::vector<double> terms(static_cast<std::size_t>(q.nodes.size()));
    for (Eigen::Index i = 0; i < q.nodes.size(); ++i) {
        const Point v = preimage(w, x, q.nodes[i]);
        ++evals;
        terms[static_cast<std::size_t>(i)] =
            q.weights[i] * std::exp(A(v)) * nested_apply(A, q, w, phi, v, k - 1, evals);
    }
    return pairwise_sum(terms);
}

} // namespace

ApplyNResult transfer_apply_n(const Potential& A, const AprioriMeasure& m,
                              const WeightSequence& w,
                              const std::function<double(const Point&)>& phi, const Point& x,
                              int n, IterateMethod method, long budget_or_samples,
                              std::uint64_t seed)
{
    if (n < 1) throw Error("transfer_apply_n: n must be >= 1");
    ApplyNResult res;
    if (method == IterateMethod::nested_quadrature) {
        const QuadratureRule q = m.quadrature();
        double total = 1.0;
        for (int j = 0; j < n; ++j) {
            total *= static_cast<double>(q.nodes.size());
            if (total > static_cast<double>(budget_or_samples))
                throw BudgetExceeded("transfer_apply_n: quadrature order^n exceeds budget");
        }
        res.value = nested_apply(A, q, w, phi, x, n, res.evaluations);
        return res;
    }
    // Monte Carlo over (r_1..r_n) ~ m^n along the preimage chain.
    const long samples = budget_or_samples;
    if (samples < 2) throw Error("transfer_apply_n: need at least 2 samples");
    double sum = 0.0, sumsq = 0.0;
    for (long sidx = 0; sidx < samples; ++sidx) {
        SplitMix64 rng = substream(seed, 0x17e2a7e, static_cast<std::uint64_t>(sidx));
        Point v = x;
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            v = preimage(w, v, m.sample(rng));
            acc += A(v);
        }
        const double val = std::exp(acc) * phi(v);
        sum += val;
        sumsq += val * val;
    }
    res.value = sum / static_cast<double>(samples);
    const double var =
        std::max(0.0, sumsq / static_cast<double>(samples) - res.value * res.value);
    res.stderr_est = std::sqrt(var / static_cast<double>(samples));
    res.evaluations = samples;
    return res;
}

GridSpec auto_grid_spec(const AprioriMeasure& m, const WeightSequence& w, int rank, int points,
                        double clamp_mass)
{
    if (rank < 1) throw Error("auto_grid_spec: rank must be >= 1");
    if (points < 3 || points % 2 == 0) throw Error("auto_grid_spec: points must be odd >= 3");
    GridSpec spec;
    spec.half_widths.resize(static_cast<std::size_t>(rank));
    spec.sizes.assign(static_cast<std::size_t>(rank), points);
    double R = m.tail_quantile(clamp_mass);
    if (!(R > 0.0)) R = 1.0;
    for (int j = 0; j < rank; ++j) {
        spec.half_widths[static_cast<std::size_t>(j)] = R;
        R /= w.value(j + 1);
    }
    return spec;
}

int solver_rank(const Potential& A, int max_rank)
{
    if (!A.finite_rank()) return std::max(1, max_rank);
    return std::max(1, A.rank() - 1);
}

namespace {

struct QuadCache {
    QuadratureRule q;
    std::vector<double> log_w;
};

QuadCache make_quad_cache(const AprioriMeasure& m)
{
    QuadCache c;
    c.q = m.quadrature();
    c.log_w.resize(static_cast<std::size_t>(c.q.nodes.size()));
    for (Eigen::Index i = 0; i < c.q.nodes.size(); ++i)
        c.log_w[static_cast<std::size_t>(i)] = std::log(c.q.weights[i]);
    return c;
}

// Value of T_{s,A}(u) at a single point with grid-coordinates `coords`
// (length = u.rank()). The preimage lives one coordinate deeper; only its
// first coordinate varies across quadrature nodes.
double discounted_node(const Potential& A, const QuadCache& qc, const WeightSequence& w,
                       double s, const GridFunction& u, const double* coords, int rank)
{
    const Eigen::Index nq = qc.q.nodes.size();
    std::vector<double> terms(static_cast<std::size_t>(nq));
    Eigen::VectorXd v(rank + 1);
    for (int j = 0; j < rank; ++j) v[j + 1] = coords[j] / w.value(j + 1);
    for (Eigen::Index i = 0; i < nq; ++i) {
        v[0] = qc.q.nodes[i];
        const Point pv(v, SpaceKind::lp(2.0));
        terms[static_cast<std::size_t>(i)] =
            qc.log_w[static_cast<std::size_t>(i)] + A(pv) + s * u.evaluate(v.data(), rank + 1);
    }
    return log_sum_exp(terms);
}

} // namespace

GridFunction discounted_step(const Potential& A, const AprioriMeasure& m,
                             const WeightSequence& w, double s, const GridFunction& u,
                             int threads)
{
    if (!(s > 0.0 && s < 1.0)) throw Error("discounted_step: s must be in (0,1)");
    const QuadCache qc = make_quad_cache(m);
    GridFunction out = u;
    const int rank = u.rank();
    parallel_for(u.node_count(), threads, [&](std::size_t flat) {
        double coords[16];
        u.node_coords(flat, coords);
        out.value(flat) = discounted_node(A, qc, w, s, u, coords, rank);
    });
    return out;
}

GridFunction solve_discounted(const Potential& A, const AprioriMeasure& m,
                              const WeightSequence& w, double s, const GridSpec& spec,
                              const DiscountedOptions& opt)
{
    if (!(s > 0.0 && s < 1.0)) throw Error("solve_discounted: s must be in (0,1)");
    if (!(opt.tol > 0.0)) throw Error("solve_discounted: tol must be positive");

    const QuadCache qc = make_quad_cache(m);
    GridFunction v(spec.half_widths, spec.sizes);
    GridFunction tv = v;
    const int rank = v.rank();
    const std::size_t zero = v.zero_node();

    // Iterate the 0-anchored map v <- T(v) - T(v)(0). T is additively
    // homogeneous, T(u + c) = T(u) + s c, so the fixed point splits as
    // u_s = v* + c* with v*(0) = 0 and c* available in closed form. The
    // Banach residual of the reassembled u = v + c certifies a sup-norm
    // error <= tol, the same guarantee the plain iteration's stopping rule
    // gives. Should the anchored iteration ever stall, fall back to the
    // plain Banach iteration, which converges at rate s unconditionally.
    double resid = std::numeric_limits<double>::infinity();
    const double target = opt.tol * (1.0 - s);
    double anchor_gain = 0.0;
    bool anchored = true;
    double best_resid = resid;
    long stalled = 0;
    for (long sweep = 0; sweep < opt.max_sweeps; ++sweep) {
        parallel_for(v.node_count(), opt.threads, [&](std::size_t flat) {
            double coords[16];
            v.node_coords(flat, coords);
            tv.value(flat) = discounted_node(A, qc, w, s, v, coords, rank);
        });
        if (!tv.values().allFinite()) throw NonFinite("solve_discounted: grid value not finite");
        const Eigen::VectorXd diff = tv.values() - v.values();
        if (anchored) {
            const double diff0 = diff[static_cast<Eigen::Index>(zero)];
            resid = (diff.array() - diff0).abs().maxCoeff();
            anchor_gain = diff0;
            if (resid <= target) {
                const double c_star = anchor_gain / (1.0 - s);
                GridFunction u = v;
                u.values().array() += c_star;
                return u;
            }
            if (resid < 0.9 * best_resid) {
                best_resid = resid;
                stalled = 0;
            } else if (++stalled > 100) {
                anchored = false;  // hand over to the plain iteration
                const double c_star = anchor_gain / (1.0 - s);
                v.values().array() += c_star;
                continue;
            }
            v.values() = tv.values().array() - tv.value(zero);
        } else {
            resid = diff.cwiseAbs().maxCoeff();
            v.values() = tv.values();
            if (resid <= target) return v;
        }
    }
    throw Stagnation("solve_discounted: no convergence within sweep budget");
}

namespace {

double audit_residual(const Potential& A, const AprioriMeasure& m, const WeightSequence& w,
                      const GridFunction& psi, double lambda, int count, std::uint64_t seed)
{
    std::vector<double> hw(static_cast<std::size_t>(psi.rank()));
    for (int j = 0; j < psi.rank(); ++j) hw[static_cast<std::size_t>(j)] = psi.half_width(j);
    auto pts = audit_points(SpaceKind::lp(2.0), hw, count, seed);
    double worst = 0.0;
    for (const Point& x : pts) {
        const double lhs =
            transfer_apply(A, m, w, [&psi](const Point& v) { return psi.evaluate(v); }, x);
        worst = std::max(worst, std::fabs(lhs - lambda * psi.evaluate(x)));
    }
    return worst;
}

} // namespace

EigenPair eigenpair(const Potential& A, const AprioriMeasure& m, const WeightSequence& w,
                    const GridSpec& spec, const EigenOptions& opt)
{
    if (opt.s_schedule.empty()) throw Error("eigenpair: empty s schedule");
    for (std::size_t i = 1; i < opt.s_schedule.size(); ++i)
        if (!(opt.s_schedule[i] > opt.s_schedule[i - 1]))
            throw Error("eigenpair: s schedule must be increasing");

    EigenPair pair;
    pair.kappa_trace.reserve(opt.s_schedule.size());
    GridFunction last(spec.half_widths, spec.sizes);
    DiscountedOptions dopt;
    dopt.tol = opt.tol;
    dopt.threads = opt.threads;
    for (double s : opt.s_schedule) {
        last = solve_discounted(A, m, w, s, spec, dopt);
        pair.kappa_trace.push_back({s, (1.0 - s) * last.value(last.zero_node())});
    }

    // Richardson extrapolation of kappa(h) to h = 0 along h = 1 - s
    // (Neville tableau; kappa is smooth in s, so each level removes one
    // power of h). The diagonal must settle: a non-Cauchy tail means the
    // schedule did not converge.
    const std::size_t S = pair.kappa_trace.size();
    std::vector<double> h(S), diag(S);
    std::vector<std::vector<double>> T(S);
    for (std::size_t i = 0; i < S; ++i) {
        h[i] = 1.0 - pair.kappa_trace[i][0];
        T[i].assign(S, 0.0);
        T[i][0] = pair.kappa_trace[i][1];
    }
    for (std::size_t j = 1; j < S; ++j)
        for (std::size_t i = j; i < S; ++i)
            T[i][j] = (h[i - j] * T[i][j - 1] - h[i] * T[i - 1][j - 1]) / (h[i - j] - h[i]);
    for (std::size_t i = 0; i < S; ++i) diag[i] = T[i][i];
    pair.kappa = diag.back();
    if (S >= 3 && std::fabs(diag[S - 1] - diag[S - 2]) > opt.cauchy_tol)
        throw ScheduleDiverged("eigenpair: extrapolated kappa trace is not Cauchy");

    // The eigenvalue equation e^{u} = e^{-kappa} L_A(e^u) gives
    // L_A psi = e^{kappa} psi for psi = e^u.
    pair.lambda = std::exp(pair.kappa);

    GridFunction u = last;
    u.values().array() -= u.value(u.zero_node());
    pair.psi = u;
    pair.psi.values() = u.values().array().exp();

    pair.residual = audit_residual(A, m, w, pair.psi, pair.lambda, opt.audit_count, opt.seed);

    if (opt.cross_validate) {
        const EigenPair pw = power_iterate(A, m, w, spec, opt.power_iters, opt.tol * 100.0,
                                           opt.threads, opt.seed);
        pair.power_lambda = pw.lambda;
    } else {
        pair.power_lambda = std::numeric_limits<double>::quiet_NaN();
    }
    return pair;
}

EigenPair power_iterate(const Potential& A, const AprioriMeasure& m, const WeightSequence& w,
                        const GridSpec& spec, int iters, double tol, int threads,
                        std::uint64_t seed)
{
    if (iters < 1) throw Error("power_iterate: iters must be >= 1");
    const QuadCache qc = make_quad_cache(m);
    GridFunction phi = GridFunction::constant(spec.half_widths, spec.sizes, 1.0);
    GridFunction next = phi;
    const int rank = phi.rank();
    const std::size_t zero = phi.zero_node();

    double lambda = 1.0, prev_lambda = 0.0;
    double change = std::numeric_limits<double>::infinity();
    for (int it = 0; it < iters; ++it) {
        parallel_for(phi.node_count(), threads, [&](std::size_t flat) {
            double coords[16];
            phi.node_coords(flat, coords);
            // L_A(phi) at the node; same quadrature as the discounted step
            // with s-exponent replaced by a plain multiplication.
            const Eigen::Index nq = qc.q.nodes.size();
            std::vector<double> terms(static_cast<std::size_t>(nq));
            Eigen::VectorXd v(rank + 1);
            for (int j = 0; j < rank; ++j) v[j + 1] = coords[j] / w.value(j + 1);
            for (Eigen::Index i = 0; i < nq; ++i) {
                v[0] = qc.q.nodes[i];
                const Point pv(v, SpaceKind::lp(2.0));
                terms[static_cast<std::size_t>(i)] =
                    qc.q.weights[i] * std::exp(A(pv)) * phi.evaluate(v.data(), rank + 1);
            }
            next.value(flat) = pairwise_sum(terms);
        });
        if (!next.values().allFinite()) throw NonFinite("power_iterate: grid value not finite");
        prev_lambda = lambda;
        lambda = next.value(zero);
        if (!(lambda > 0.0)) throw Stagnation("power_iterate: nonpositive normalization");
        next.values() /= lambda;
        change = phi.max_abs_diff(next);
        phi.values() = next.values();
        if (change <= tol && std::fabs(lambda - prev_lambda) <= tol * std::fabs(lambda)) break;
    }
    if (change > tol) throw Stagnation("power_iterate: ratio trace did not settle");

    EigenPair pair;
    pair.lambda = lambda;
    pair.kappa = std::log(lambda);
    pair.psi = phi;
    pair.residual = audit_residual(A, m, w, pair.psi, pair.lambda, 64, seed);
    pair.power_lambda = lambda;
    return pair;
}

namespace {

inline double expm1_over(double x) { return x == 0.0 ? 1.0 : std::expm1(x) / x; }

} // namespace

HolderCertificate holder_certificate(const Potential& A, const AprioriMeasure& m,
                                     const WeightSequence& w, const Potential& phi, int n,
                                     double delta, const SpaceKind& space,
                                     const HolderOptions& opt)
{
    if (n < 1) throw Error("holder_certificate: n must be >= 1");
    if (!(delta > 0.0)) throw Error("holder_certificate: delta must be positive");
    const double alpha = A.holder_alpha();

    HolderCertificate cert;
    cert.n = n;
    cert.delta = delta;
    for (int j = 1; j <= n; ++j) cert.D_n += std::exp(-alpha * w.log_d(j));
    const double dn_a = std::exp(-alpha * w.log_d(n));
    const double lip_phi = phi.lip_const();
    const double sup_phi = phi.sup_bound();
    const double sup_A = A.sup_bound();
    const double c_A = A.lip_const();

    cert.bound_global =
        dn_a * lip_phi + sup_phi * c_A * cert.D_n * expm1_over(2.0 * n * sup_A);
    const double da = std::pow(delta, alpha);
    cert.bound_local = dn_a * lip_phi + sup_phi * std::expm1(c_A * cert.D_n * da) / da;

    // Sampled ratio. The quadrature-discretized measure is itself a
    // probability, so the inequality is exact for the computed values; a
    // reduced order just makes the n-fold iterate affordable.
    AprioriMeasure mq = m;
    if (m.kind() == AprioriMeasure::Kind::gaussian)
        mq = AprioriMeasure::gaussian(m.mean(), m.variance(),
                                      std::min(m.quadrature_order(), opt.quad_order));
    auto phi_fn = [&phi](const Point& v) { return phi(v); };
    auto one_fn = [](const Point&) { return 1.0; };

    const int dim = std::max(2, A.finite_rank() ? A.rank() : 2);
    for (int sidx = 0; sidx < opt.pairs; ++sidx) {
        SplitMix64 rng = substream(opt.seed, 0x401de5, static_cast<std::uint64_t>(sidx));
        Eigen::VectorXd xv(dim), yv(dim);
        for (int j = 0; j < dim; ++j)
            xv[j] = (2.0 * rng.next_double() - 1.0) * opt.box_scale;
        // half the pairs are local perturbations, half are far apart
        const bool local = (sidx % 2) == 0;
        for (int j = 0; j < dim; ++j) {
            const double off = local ? 0.45 * delta * (2.0 * rng.next_double() - 1.0)
                                     : opt.box_scale * (2.0 * rng.next_double() - 1.0);
            yv[j] = xv[j] + off;
        }
        const Point x(xv, space), y(yv, space);
        const double dxy = norm_diff(x, y);
        if (dxy == 0.0) continue;

        const double lx =
            transfer_apply_n(A, mq, w, phi_fn, x, n, IterateMethod::nested_quadrature,
                             opt.budget)
                .value;
        const double ly =
            transfer_apply_n(A, mq, w, phi_fn, y, n, IterateMethod::nested_quadrature,
                             opt.budget)
                .value;
        const double l1x =
            transfer_apply_n(A, mq, w, one_fn, x, n, IterateMethod::nested_quadrature,
                             opt.budget)
                .value;
        const double ratio = std::fabs(lx - ly) / (std::pow(dxy, alpha) * l1x);
        cert.empirical_ratio = std::max(cert.empirical_ratio, ratio);
        if (dxy < delta)
            cert.empirical_ratio_local = std::max(cert.empirical_ratio_local, ratio);
    }
    cert.ok_global = cert.empirical_ratio <= cert.bound_global;
    cert.ok_local = cert.empirical_ratio_local <= cert.bound_local;
    return cert;
}

} // namespace shiftgibbs
