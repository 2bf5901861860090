#pragma once

#include <span>
#include <tuple>
#include <vector>

#include "dgl/types.hpp"

namespace dgl {

// CSR matrix over doubles. Column indices are strictly increasing within each
// row and no duplicate (row, col) entries exist; from_coo enforces both.
struct SparseMatrix {
  Index rows = 0;
  Index cols = 0;
  std::vector<Index> indptr;   // size rows + 1
  std::vector<Index> indices;  // size nnz
  std::vector<double> values;  // size nnz

  SparseMatrix() : indptr(1, 0) {}
  SparseMatrix(Index r, Index c) : rows(r), cols(c), indptr(r + 1, 0) {}

  Index nnz() const { return static_cast<Index>(indices.size()); }

  std::span<const Index> row_indices(Index i) const {
    return {indices.data() + indptr[i],
            static_cast<std::size_t>(indptr[i + 1] - indptr[i])};
  }
  std::span<const double> row_values(Index i) const {
    return {values.data() + indptr[i],
            static_cast<std::size_t>(indptr[i + 1] - indptr[i])};
  }

  // Value at (i, j), 0.0 for structural zeros.
  double at(Index i, Index j) const;

  SparseMatrix transposed() const;
  DenseMatrix to_dense() const;

  // Throws InvalidArgument if any structural invariant is violated.
  void check_valid() const;

  static SparseMatrix identity(Index n);
  static SparseMatrix from_dense(const DenseMatrix& m, double prune = 0.0);

  enum class Dup { Sum, Max, Error };
  // Builds CSR from unordered triplets; duplicates combined per `dup`.
  static SparseMatrix from_coo(
      Index rows, Index cols,
      std::vector<std::tuple<Index, Index, double>> triplets,
      Dup dup = Dup::Sum);
};

// y = A x
Vector spmv(const SparseMatrix& a, const Vector& x);
// y^T = x^T A  (left multiplication, used by power iteration)
Vector spmv_left(const SparseMatrix& a, const Vector& x);
// A B with dense B
DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b);
// A^T B without materializing the transpose
DenseMatrix spmm_transposed(const SparseMatrix& a, const DenseMatrix& b);

// Element-wise maximum of two same-shape matrices (union sparsity pattern).
SparseMatrix element_max(const SparseMatrix& a, const SparseMatrix& b);
// diag(left) * A * diag(right); pass empty vectors to skip a side.
SparseMatrix scale_diag(const SparseMatrix& a, const Vector& left,
                        const Vector& right);
SparseMatrix sparse_add(const SparseMatrix& a, const SparseMatrix& b,
                        double alpha = 1.0, double beta = 1.0);

}  // namespace dgl
