#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dgl/graph.hpp"
#include "dgl/sparse.hpp"
#include "dgl/types.hpp"

namespace dgl::fpr {

// Feature-aware PageRank preprocessing: normalize features, order nodes by
// similarity to an auxiliary direction, connect order-neighbors into a
// similarity-sorting graph, and merge it into the input digraph so the
// resulting chain is irreducible (self-loops then make it aperiodic).

struct NormalizedFeatures {
  DenseMatrix rows;             // unit rows; zero rows left as zero
  std::vector<Index> zero_rows; // indices of flagged all-zero rows
};

NormalizedFeatures l2_normalize_rows(const DenseMatrix& x);

// Unit mean direction of already-normalized rows; ZeroMean when they cancel.
Vector mean_direction(const DenseMatrix& xhat);

// Unit residual of `a` projected against unit `xbar`; DegenerateAux when the
// residual norm is below 1e-12.
Vector gram_schmidt_unit(const Vector& a, const Vector& xbar);

// Seeded unit vector orthogonal to xbar. Redraws with seed+1 when a draw is
// (numerically) parallel to xbar, giving up after 16 attempts.
Vector auxiliary_vector(const Vector& xbar, std::uint64_t seed);

struct SortedIndex {
  std::vector<Index> order;  // permutation of 0..n-1, scores non-increasing
  Vector scores;             // scores[i] = xhat_i . a (original node order)
};

// Scores every row against `a` and sorts descending; ties break by ascending
// node index so rebuilds are reproducible.
SortedIndex similarity_sort(const DenseMatrix& xhat, const Vector& a);

// Undirected edges between order-neighbors s[i] and s[i+w], w = 1..window.
// No wrap-around; window is clamped to n-1. Interior nodes end up with
// k = 2*window neighbors and the w=1 path alone spans all nodes.
SparseMatrix sorting_graph(const SortedIndex& s, Index window_size);

// X = X_pos + X_neg with X_pos keeping positive entries and X_neg negative.
std::pair<DenseMatrix, DenseMatrix> split_signs(const DenseMatrix& x);

struct CombinatorialGraph {
  SparseMatrix merged;        // element-wise max of A and sorting graph(s)
  SparseMatrix merged_loops;  // merged + I
  Vector degrees;             // row sums of merged_loops
  SparseMatrix transition;    // row-normalized merged_loops (PFPR)
  Index k = 0;
  Index window_size = 0;
  std::uint64_t seed = 0;
};

// Full construction for an even k = 2*window_size. When X has negative
// entries, two sorting graphs are built: one from the positive part and one
// from |negative part| so each score set lives in a single orthant.
CombinatorialGraph build_combinatorial(const DiGraph& g, Index k,
                                       std::uint64_t seed);

// Ablation route: exact cosine kNN (mutualized to undirected via element-wise
// max) merged with A plus self-loops. Unlike the sorting construction this
// does not guarantee strong connectivity on its own.
CombinatorialGraph knn_combine(const DiGraph& g, Index k);

}  // namespace dgl::fpr
