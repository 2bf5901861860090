#pragma once

#include <cstdint>
#include <vector>

#include "dgl/markov.hpp"
#include "dgl/sparse.hpp"
#include "dgl/types.hpp"

// Brute-force verifiers. Each one is implemented independently of the code
// paths it cross-checks: dense linear solves instead of power iteration,
// absorbing-state systems instead of the fundamental matrix, walk simulation
// instead of closed forms, full pairwise search instead of similarity
// sorting. They share only the matrix types.
namespace dgl::oracle {

// Solves pi^T (P - I) = 0 with sum(pi) = 1 by dense LU.
Vector stationary_dense(const SparseMatrix& p);

// Expected steps to reach `target`: solves (I - P restricted to the
// complement of target) h = 1, h[target] = 0.
Vector hitting_linear_system(const SparseMatrix& p, Index target);

struct WalkEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  Index walks_used = 0;
  Index capped = 0;  // walks that hit the step cap (counted, excluded)
};

// Sample mean over independent walks. Walk w draws from a generator seeded
// by mix(seed, w), so any parallel schedule reproduces the sequential result.
WalkEstimate monte_carlo_hitting(const SparseMatrix& p, Index source,
                                 Index target, Index walks,
                                 std::uint64_t seed,
                                 Index step_cap = 1000000);

// Exact top-k cosine neighbors per node, ties broken by ascending index.
std::vector<std::vector<Index>> exact_knn(const DenseMatrix& x, Index k);

struct OperatorReport {
  double symmetry_residual = 0.0;
  double orthonormality_residual = 0.0;
  double reconstruction_residual = 0.0;
  double eig_min = 0.0, eig_max = 0.0;
  double box_lo = 0.0, box_hi = 0.0;
  bool box_holds = false;
};

// Dense eigendecomposition of the normalized operator: realness/symmetry,
// orthonormal eigenvectors, spectrum box, reconstruction residual.
OperatorReport dense_operator_check(const markov::PfprChain& chain);

}  // namespace dgl::oracle
