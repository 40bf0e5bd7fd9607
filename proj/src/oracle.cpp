#include "shiftgibbs/oracle.hpp"

#include <cmath>

#include "shiftgibbs/errors.hpp"

namespace shiftgibbs {

FiniteInstance oracle_build(double alpha, const AprioriMeasure& atoms, const Potential& A)
{
    if (atoms.kind() != AprioriMeasure::Kind::atoms)
        throw UnsupportedKind("oracle: a-priori measure must be atomic");
    if (!A.finite_rank()) throw UnsupportedKind("oracle: potential must have finite rank");
    const int N = A.rank();
    const int k = static_cast<int>(atoms.atom_values().size());
    if (k < 2) throw Error("oracle: need at least two atoms");

    FiniteInstance inst;
    inst.alpha = alpha;
    inst.rank = N;
    inst.atom_values =
        Eigen::Map<const Eigen::VectorXd>(atoms.atom_values().data(), k);
    inst.atom_probs = Eigen::Map<const Eigen::VectorXd>(atoms.atom_probs().data(), k);

    const int digits = N - 1;
    std::size_t states = 1;
    for (int j = 0; j < digits; ++j) {
        states *= static_cast<std::size_t>(k);
        if (states > 100000) throw Error("oracle: state count k^{N-1} capped at 1e5");
    }

    // State id reads its atom indices most-significant-first:
    // id = i_1 k^{N-2} + ... + i_{N-1}; coordinate j is a_{i_j} / alpha^{j-1}.
    inst.collocation.resize(states);
    for (std::size_t id = 0; id < states; ++id) {
        Eigen::VectorXd c(digits);
        std::size_t rem = id;
        for (int j = digits - 1; j >= 0; --j) {
            const std::size_t i = rem % static_cast<std::size_t>(k);
            rem /= static_cast<std::size_t>(k);
            c[j] = inst.atom_values[static_cast<Eigen::Index>(i)] /
                   std::pow(alpha, static_cast<double>(j));
        }
        inst.collocation[id] = std::move(c);
    }

    const std::size_t shift = digits > 0 ? states / static_cast<std::size_t>(k) : 1;
    inst.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(states),
                                        static_cast<Eigen::Index>(states));
    const SpaceKind space = SpaceKind::lp(2.0);
    for (std::size_t id = 0; id < states; ++id) {
        // full preimage of the state point under atom r: (a_r, c_1/alpha, ...)
        Eigen::VectorXd v(digits + 1);
        for (int j = 0; j < digits; ++j) v[j + 1] = inst.collocation[id][j] / alpha;
        for (int r = 0; r < k; ++r) {
            v[0] = inst.atom_values[r];
            const std::size_t next =
                digits > 0 ? static_cast<std::size_t>(r) * shift + id / static_cast<std::size_t>(k)
                           : 0;
            // Closure guard: the preimage head must reproduce the collocation
            // coordinates of the next state (index arithmetic keeps it exact
            // for constant weights; a mismatch means the reduction is wrong).
            for (int j = 0; j < digits; ++j) {
                const double expect = inst.collocation[next][j];
                if (std::fabs(v[j] - expect) > 1e-12 * std::max(1.0, std::fabs(expect)))
                    throw ClosureViolation("oracle: preimage left the collocation set");
            }
            const Point pv(v, space);
            inst.matrix(static_cast<Eigen::Index>(id), static_cast<Eigen::Index>(next)) +=
                inst.atom_probs[r] * std::exp(A(pv));
        }
    }
    return inst;
}

namespace {

std::size_t zero_nearest_state(const FiniteInstance& inst)
{
    if (inst.collocation.empty() || inst.collocation[0].size() == 0) return 0;
    std::size_t best = 0;
    double best_norm = inst.collocation[0].norm();
    for (std::size_t i = 1; i < inst.collocation.size(); ++i) {
        const double n = inst.collocation[i].norm();
        if (n < best_norm) {
            best_norm = n;
            best = i;
        }
    }
    return best;
}

} // namespace

OracleEigen oracle_exact_eigen(const FiniteInstance& inst, double tol, int max_iters)
{
    const Eigen::Index n = inst.matrix.rows();
    const Eigen::Index anchor = static_cast<Eigen::Index>(zero_nearest_state(inst));
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    double lambda = 1.0;
    for (int it = 0; it < max_iters; ++it) {
        Eigen::VectorXd nv = inst.matrix * v;
        const double scale = nv[anchor];
        if (!(scale > 0.0)) throw Error("oracle: power iteration lost positivity");
        nv /= scale;
        const double change = (nv - v).cwiseAbs().maxCoeff();
        v = nv;
        lambda = scale;
        if (change <= tol) break;
    }
    OracleEigen out;
    out.lambda = lambda;
    out.psi = v;
    return out;
}

Eigen::VectorXd oracle_exact_stationary(const FiniteInstance& inst, double tol, int max_iters)
{
    const Eigen::Index n = inst.matrix.rows();
    const Eigen::VectorXd rows = inst.matrix.rowwise().sum();
    if ((rows.array() - 1.0).abs().maxCoeff() > 1e-12)
        throw NotStochastic("oracle: rows do not sum to 1; normalize the potential first");
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    for (int it = 0; it < max_iters; ++it) {
        Eigen::VectorXd nv = inst.matrix.transpose() * v;
        nv /= nv.sum();
        const double change = (nv - v).cwiseAbs().maxCoeff();
        v = nv;
        if (change <= tol) break;
    }
    return v;
}

} // namespace shiftgibbs
