#pragma once

#include <Eigen/Core>
#include <vector>

#include "shiftgibbs/apriori.hpp"
#include "shiftgibbs/potential.hpp"

namespace shiftgibbs {

// Exact finite reduction of the transfer operator: constant weights plus an
// atomic a-priori measure keep the collocation set closed under the
// preimage map, so a rank-N potential reduces L_A to a k^{N-1} by k^{N-1}
// nonnegative matrix. States enumerate tuples (i_1..i_{N-1}) of atom
// indices with coordinates a_{i_j} / alpha^{j-1}.
struct FiniteInstance {
    double alpha = 2.0;
    Eigen::VectorXd atom_values;
    Eigen::VectorXd atom_probs;
    int rank = 1;
    std::vector<Eigen::VectorXd> collocation;  // state coordinates, length k^{rank-1}
    Eigen::MatrixXd matrix;                    // M[state][next] = p_r e^{A(preimage)}
};

FiniteInstance oracle_build(double alpha, const AprioriMeasure& atoms, const Potential& A);

struct OracleEigen {
    double lambda = 1.0;
    Eigen::VectorXd psi;  // strictly positive, normalized at the 0-nearest state
};

// Perron pair of the reduction by power iteration to tight tolerance.
OracleEigen oracle_exact_eigen(const FiniteInstance& inst, double tol = 1e-13,
                               int max_iters = 100000);

// Left Perron probability vector of a normalized (row-stochastic) instance.
Eigen::VectorXd oracle_exact_stationary(const FiniteInstance& inst, double tol = 1e-13,
                                        int max_iters = 100000);

} // namespace shiftgibbs
