#include "shiftgibbs/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shiftgibbs/errors.hpp"
#include "shiftgibbs/numeric.hpp"
#include "shiftgibbs/parallel.hpp"
#include "shiftgibbs/rng.hpp"

namespace shiftgibbs {

namespace {

// Distance between matrix rows with implicit zero tails, avoiding Point
// round trips in the O(n^2) cost loop.
double row_dist(const Eigen::MatrixXd& A, int i, const Eigen::MatrixXd& B, int j,
                const SpaceKind& space, const MetricSpec& metric)
{
    const int da = static_cast<int>(A.cols());
    const int db = static_cast<int>(B.cols());
    const int n = std::max(da, db);
    double base;
    if (metric.kind == MetricSpec::Kind::shift) {
        if (space.is_c0()) {
            double m = 0.0, w2 = 0.5;
            for (int t = 0; t < n; ++t, w2 *= 0.5) {
                const double d = std::fabs((t < da ? A(i, t) : 0.0) - (t < db ? B(j, t) : 0.0));
                m = std::max(m, std::min(1.0, d) * w2);
            }
            return m;
        }
        const double p = space.p;
        double s = 0.0, w2 = 0.5;
        for (int t = 0; t < n; ++t, w2 *= 0.5) {
            const double d = std::fabs((t < da ? A(i, t) : 0.0) - (t < db ? B(j, t) : 0.0));
            s += std::min(1.0, std::pow(d, p)) * w2;
        }
        return std::pow(s, 1.0 / p);
    }
    if (space.is_c0()) {
        double m = 0.0;
        for (int t = 0; t < n; ++t)
            m = std::max(m, std::fabs((t < da ? A(i, t) : 0.0) - (t < db ? B(j, t) : 0.0)));
        base = m;
    } else {
        const double p = space.p;
        double s = 0.0;
        if (p == 2.0) {
            for (int t = 0; t < n; ++t) {
                const double d = (t < da ? A(i, t) : 0.0) - (t < db ? B(j, t) : 0.0);
                s += d * d;
            }
            base = std::sqrt(s);
        } else {
            for (int t = 0; t < n; ++t)
                s += std::pow(std::fabs((t < da ? A(i, t) : 0.0) - (t < db ? B(j, t) : 0.0)), p);
            base = std::pow(s, 1.0 / p);
        }
    }
    switch (metric.kind) {
        case MetricSpec::Kind::norm: return base;
        case MetricSpec::Kind::holder: return std::pow(base, metric.alpha);
        default: return std::min(1.0, metric.a * std::pow(base, metric.alpha));
    }
}

} // namespace

Eigen::MatrixXd cost_matrix(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                            const MetricSpec& metric, int threads)
{
    if (!(mu.space() == nu.space())) throw SpaceMismatch("cost_matrix: cloud spaces differ");
    const int n = mu.count(), m = nu.count();
    Eigen::MatrixXd C(n, m);
    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
        for (int j = 0; j < m; ++j)
            C(static_cast<int>(i), j) =
                row_dist(mu.particles(), static_cast<int>(i), nu.particles(), j, mu.space(),
                         metric);
    });
    return C;
}

// Jonker-Volgenant shortest augmenting path; O(n^3), exact.
double solve_assignment(const Eigen::MatrixXd& cost, std::vector<int>& assignment)
{
    const int n = static_cast<int>(cost.rows());
    if (cost.cols() != n) throw SizeMismatch("solve_assignment: matrix must be square");
    constexpr double kInf = std::numeric_limits<double>::infinity();

    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
    std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);

    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(n) + 1, kInf);
        std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const int i0 = p[static_cast<std::size_t>(j0)];
            int j1 = 0;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                                   v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0);
    }

    assignment.assign(static_cast<std::size_t>(n), -1);
    double total = 0.0;
    for (int j = 1; j <= n; ++j) {
        if (p[static_cast<std::size_t>(j)] == 0) continue;
        assignment[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
        total += cost(p[static_cast<std::size_t>(j)] - 1, j - 1);
    }
    return total;
}

namespace {

// Log-domain Sinkhorn with uniform marginals.
TransportPlan sinkhorn(const Eigen::MatrixXd& C, const W1Options& opt)
{
    const int n = static_cast<int>(C.rows());
    const int m = static_cast<int>(C.cols());
    const double eps = opt.eps_reg;
    const double loga = -std::log(static_cast<double>(n));
    const double logb = -std::log(static_cast<double>(m));
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
    std::vector<double> buf(static_cast<std::size_t>(std::max(n, m)));

    double err = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opt.sinkhorn_max_iters && err > opt.sinkhorn_tol; ++it) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < m; ++j)
                buf[static_cast<std::size_t>(j)] = (g[j] - C(i, j)) / eps + logb;
            f[i] = -eps * log_sum_exp({buf.data(), static_cast<std::size_t>(m)});
        }
        for (int j = 0; j < m; ++j) {
            for (int i = 0; i < n; ++i)
                buf[static_cast<std::size_t>(i)] = (f[i] - C(i, j)) / eps + loga;
            g[j] = -eps * log_sum_exp({buf.data(), static_cast<std::size_t>(n)});
        }
        // row marginal error of the implied plan
        err = 0.0;
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < m; ++j)
                s += std::exp((f[i] + g[j] - C(i, j)) / eps + loga + logb);
            err = std::max(err, std::fabs(s - std::exp(loga)));
        }
    }

    TransportPlan plan;
    plan.method = TransportPlan::Method::entropic;
    plan.eps_reg = eps;
    plan.coupling.resize(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            plan.coupling(i, j) = std::exp((f[i] + g[j] - C(i, j)) / eps + loga + logb);

    // Round to exact uniform marginals: scale rows, then columns, then add
    // the rank-one correction carrying the leftover mass.
    const double an = std::exp(loga), bm = std::exp(logb);
    for (int i = 0; i < n; ++i) {
        const double r = plan.coupling.row(i).sum();
        if (r > an) plan.coupling.row(i) *= an / r;
    }
    for (int j = 0; j < m; ++j) {
        const double csum = plan.coupling.col(j).sum();
        if (csum > bm) plan.coupling.col(j) *= bm / csum;
    }
    Eigen::VectorXd er = Eigen::VectorXd::Constant(n, an) - plan.coupling.rowwise().sum();
    Eigen::VectorXd ec =
        Eigen::VectorXd::Constant(m, bm) - plan.coupling.colwise().sum().transpose();
    const double mass = er.sum();
    if (mass > 0.0) plan.coupling += er * ec.transpose() / mass;

    plan.cost = (plan.coupling.array() * C.array()).sum();
    // Entropic bias bound: rounded primal cost minus the dual value of (f, g).
    const double dual = f.mean() + g.mean();
    plan.dual_gap = std::fabs(plan.cost - dual);
    return plan;
}

} // namespace

W1Result w1(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const MetricSpec& metric,
            const W1Options& opt)
{
    W1Result res;
    if (mu.count() <= opt.exact_threshold && nu.count() <= opt.exact_threshold) {
        if (mu.count() != nu.count())
            throw SizeMismatch("w1: exact assignment needs equal particle counts");
        const Eigen::MatrixXd C = cost_matrix(mu, nu, metric, opt.threads);
        res.plan.method = TransportPlan::Method::exact_assignment;
        res.plan.cost = solve_assignment(C, res.plan.assignment) / static_cast<double>(mu.count());
        res.value = res.plan.cost;
        return res;
    }
    const Eigen::MatrixXd C = cost_matrix(mu, nu, metric, opt.threads);
    res.plan = sinkhorn(C, opt);
    res.value = res.plan.cost;
    return res;
}

double kantorovich_lb(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                      const MetricSpec& metric,
                      std::span<const std::function<double(const Point&)>> test_functions,
                      int audit_pairs, std::uint64_t seed)
{
    // Lipschitz audit on sampled particle pairs.
    for (std::size_t t = 0; t < test_functions.size(); ++t) {
        for (int a = 0; a < audit_pairs; ++a) {
            SplitMix64 rng = substream(seed, t, static_cast<std::uint64_t>(a));
            const Point x = mu.particle(static_cast<int>(rng.next() %
                                                         static_cast<std::uint64_t>(mu.count())));
            const Point y = nu.particle(static_cast<int>(rng.next() %
                                                         static_cast<std::uint64_t>(nu.count())));
            const double d = dist(x, y, metric);
            const double df = std::fabs(test_functions[t](x) - test_functions[t](y));
            if (df > d * (1.0 + 1e-9) + 1e-15)
                throw LipschitzAuditFailed("kantorovich_lb: test function is not 1-Lipschitz");
        }
    }
    double best = 0.0;
    for (const auto& f : test_functions)
        best = std::max(best, std::fabs(mu.mean_of(f) - nu.mean_of(f)));
    return best;
}

double contraction_constant(double lip_abar, double dsum, double tol)
{
    if (!(lip_abar >= 0.0) || !(dsum >= 0.0))
        throw Error("contraction_constant: constants must be nonnegative");
    const double L = lip_abar * dsum;
    if (L == 0.0) return 0.0;
    auto f = [L](double t) { return std::expm1(L * t) / t; };
    const double t_star = golden_section_max(f, tol, 1.0, tol);
    return std::max(f(t_star), f(1.0));
}

double metric_scale_auto(double c_contr) { return std::max(8.0 * c_contr / 3.0, 1.0); }

std::vector<double> rn_profile(const WeightSequence& w, double alpha, double a, int n,
                               std::span<const double> t_grid, int horizon)
{
    if (!(std::pow(w.d(n), alpha) >= 8.0 / 3.0))
        throw PremiseViolated("rn_profile: needs (d_n)^alpha >= 8/3");
    const double dsum = d_series(w, alpha, horizon);
    const double dn_a = std::exp(-alpha * w.log_d(n));
    std::vector<double> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        if (t < 1.0 / a) {
            out.push_back(0.75);
        } else {
            out.push_back(1.0 - std::exp(-dsum * t) * (1.0 - std::min(1.0, t * a * dn_a)));
        }
    }
    return out;
}

double tails_contraction_factor(double gamma, const WeightSequence& w, double alpha, double a,
                                int n, int horizon)
{
    if (!(gamma >= 1.0 / a))
        throw PremiseViolated("tails_contraction_factor: needs gamma >= 1/a");
    if (!(std::pow(w.d(n), alpha) >= 8.0 / 3.0))
        throw PremiseViolated("tails_contraction_factor: needs (d_n)^alpha >= 8/3");
    const double dsum = d_series(w, alpha, horizon);
    const double dn_a = std::exp(-alpha * w.log_d(n));
    return 1.0 -
           (1.0 - std::min(1.0, 2.0 * a * gamma * dn_a)) / (2.0 * std::exp(2.0 * gamma * dsum));
}

double noise_floor(const std::function<EmpiricalMeasure(std::uint64_t)>& sample_cloud,
                   const MetricSpec& metric, int reps, std::uint64_t seed, const W1Options& opt)
{
    if (reps < 1) throw Error("noise_floor: reps must be >= 1");
    double acc = 0.0;
    for (int r = 0; r < reps; ++r) {
        const EmpiricalMeasure a = sample_cloud(mix64(seed + 2 * static_cast<std::uint64_t>(r)));
        const EmpiricalMeasure b =
            sample_cloud(mix64(seed + 2 * static_cast<std::uint64_t>(r) + 1));
        acc += w1(a, b, metric, opt).value;
    }
    return acc / static_cast<double>(reps);
}

} // namespace shiftgibbs
