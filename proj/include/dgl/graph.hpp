#pragma once

#include <vector>

#include "dgl/sparse.hpp"
#include "dgl/types.hpp"

namespace dgl {

// Directed graph: CSR out-adjacency plus optional node features. Input
// graphs are unweighted (all weights 1); loaders drop self-loops and
// duplicate edges so adjacency diagonals stay clean until add_self_loops.
struct DiGraph {
  Index n = 0;
  SparseMatrix adj;       // n x n out-adjacency
  DenseMatrix features;   // n x d, 0 x 0 when absent

  bool has_features() const { return features.size() > 0; }
  bool has_self_loops() const;
  Index num_edges() const { return adj.nnz(); }

  static DiGraph from_edges(Index n,
                            const std::vector<std::pair<Index, Index>>& edges,
                            DenseMatrix features = {});
};

// Row sums of the adjacency (out-degrees).
Vector out_degrees(const SparseMatrix& a);

// A + I; applying twice keeps adding to the diagonal.
SparseMatrix add_self_loops(const SparseMatrix& a);

// (A + A^T) / 2
SparseMatrix symmetrize(const SparseMatrix& a);

// D^{-1} A; throws DeadEndRow(i) when row i sums to zero, which signals the
// caller must augment (self-loops / feature-aware merge) first.
SparseMatrix row_normalize(const SparseMatrix& a);

bool is_strongly_connected(const SparseMatrix& a);

// Cycle-length gcd == 1. Requires a strongly connected input
// (NotIrreducible otherwise). Any self-loop short-circuits to true.
bool is_aperiodic(const SparseMatrix& a);

}  // namespace dgl
