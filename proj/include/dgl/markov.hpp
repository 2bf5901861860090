#pragma once

#include <cstdint>
#include <utility>

#include "dgl/fpr.hpp"
#include "dgl/sparse.hpp"
#include "dgl/types.hpp"

namespace dgl::markov {

// Row-stochastic chain over the self-loop-augmented combinatorial graph,
// together with its stationary distribution.
struct PfprChain {
  SparseMatrix transition;  // P, row-stochastic
  Vector degrees;           // augmented out-degrees d~
  Vector stationary;        // pi~, positive, sums to 1
  int iterations_used = 0;
  double residual = 0.0;  // || pi^T P - pi^T ||_1 of the returned vector
  bool converged = true;  // residual <= 1e-6 (warn-level contract)
};

// P_pr = alpha P + (1 - alpha) ee^T / N. Dense by construction; only used by
// the feature-independent ablation route.
DenseMatrix pagerank_transition(const SparseMatrix& p, double alpha);

// Left power iteration pi <- normalize_1(pi^T P) from a uniform start.
// Stops after `iterations` steps or when the L1 step residual drops below
// `tol`; never throws on slow convergence, the residual is recorded.
PfprChain stationary_distribution(const SparseMatrix& p, const Vector& degrees,
                                  int iterations = 30, double tol = 1e-10);

PfprChain make_chain(const fpr::CombinatorialGraph& cg, int iterations = 30,
                     double tol = 1e-10);

// T~ = Pi(D~^{-1} - P). Shares P's sparsity pattern (diagonal included).
SparseMatrix diglacian(const PfprChain& chain);

// T = D~^{-1} - (Pi^{1/2} P Pi^{-1/2} + Pi^{-1/2} P^T Pi^{1/2}) / 2.
// Symmetric with eigenvalues in [1/d_max - 1, 1/d_min + 1].
DenseMatrix normalized_diglacian(const PfprChain& chain);

// T^ = D~^{-1} + (Pi^{1/2} P Pi^{-1/2} + Pi^{-1/2} P^T Pi^{1/2}) / 2, the
// propagation operator; satisfies T + T^ = 2 diag(1/d~).
DenseMatrix augmented_propagation(const PfprChain& chain);
SparseMatrix augmented_propagation_sparse(const PfprChain& chain);

// Z = (I - P + J Pi)^{-1} - J Pi via dense LU. Oracle-grade reference path.
DenseMatrix fundamental_matrix_dense(const PfprChain& chain);

// Z = Pi^{-1/2} M^+ Pi^{1/2} with M = Pi^{-1/2} T~ Pi^{-1/2} - D~^{-1} + I,
// M^+ through the Lanczos truncated SVD. rank < 0 selects n - 1, the exact
// rank of M (its nullspace is spanned by Pi^{1/2} e on the right and
// pi^{1/2} on the left).
DenseMatrix fundamental_matrix_sparse(const PfprChain& chain,
                                      const SparseMatrix& diglacian_tilde,
                                      Index rank = -1);

// The sparse-path operator M itself; exposed so its two algebraically equal
// constructions can be compared.
SparseMatrix sparse_path_operator(const PfprChain& chain,
                                  const SparseMatrix& diglacian_tilde);
SparseMatrix sparse_path_operator_simplified(const PfprChain& chain);

// H(i,j) = (z_jj - z_ij) / pi_j, zero diagonal.
DenseMatrix hitting_times(const DenseMatrix& z, const PfprChain& chain);

// C = H + H^T with zero diagonal.
DenseMatrix commute_times(const DenseMatrix& h);

// Per row drops the floor(mu*N) largest off-diagonal entries; ties at the
// cutoff keep the lower node index. Generally asymmetric.
SparseMatrix sparsify_commute(const DenseMatrix& c, double mu);

// Row-normalized exp(-c) over the kept entries only; structural zeros stay
// zero. Rows are shifted by their minimum kept value before exponentiation,
// which cancels under normalization. EmptyRow(i) when a row kept nothing.
SparseMatrix commute_propagation(const SparseMatrix& c_sparse);

struct CommuteModel {
  DenseMatrix fundamental;   // Z
  DenseMatrix hitting;       // H
  DenseMatrix commute;       // C
  SparseMatrix sparsified;   // after mu-sparsification
  SparseMatrix propagation;  // row-stochastic commute propagation
  double mu = 0.0;
};

// Dense fundamental-matrix route below `dense_limit` nodes, Lanczos route
// above it.
CommuteModel build_commute_model(const PfprChain& chain, double mu,
                                 Index dense_limit = 2000);

// Both evaluations of the Rayleigh quotient; first is the edge-sum
// definition, second the closed form 2 g (T + I - D~^{-1}) g^T / g g^T with
// g = f^T Pi^{1/2}.
std::pair<double, double> rayleigh_quotient_forms(const Vector& f,
                                                  const PfprChain& chain);
// Definitional value; throws if the two forms disagree beyond 1e-8 relative.
double rayleigh_quotient(const Vector& f, const PfprChain& chain);

struct DiameterBound {
  double bound = 0.0;
  Index diameter = 0;
  bool holds = false;
  double lambda = 0.0;  // second-smallest eigenvalue of T
  double decay = 0.0;   // (1 - d * lambda) / d, the walk decay factor
};

// Regular-chain diameter bound: floor(2 max_i log(1/pi_i) / log(1/decay))+1
// against the BFS diameter. NotRegular when degrees differ.
DiameterBound diameter_bound_check(const PfprChain& chain);

}  // namespace dgl::markov
