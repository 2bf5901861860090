#pragma once

#include <cstdint>

#include "dgl/sparse.hpp"
#include "dgl/types.hpp"

namespace dgl {

struct TruncatedSvd {
  DenseMatrix left;    // rows x r
  DenseMatrix right;   // cols x r
  Vector sigma;        // r singular values, descending
  int iterations = 0;  // bidiagonalization steps taken
  double max_residual = 0.0;
};

// Truncated SVD of a sparse matrix via Golub-Kahan-Lanczos bidiagonalization
// with full reorthogonalization. Only matrix-vector products with M and M^T
// touch the matrix. On (near-)breakdown the iteration restarts with a fresh
// vector orthogonal to the computed basis, so invariant subspaces and
// repeated singular values are handled. Throws EigensolverFailure when the
// requested triplets fail to converge.
TruncatedSvd lanczos_svd(const SparseMatrix& m, Index rank,
                         double tol = 1e-10, std::uint64_t seed = 0x5eedULL);

// Moore-Penrose pseudoinverse through lanczos_svd; singular values below
// rel_cut * sigma_max are treated as zero.
DenseMatrix pseudoinverse(const SparseMatrix& m, Index rank,
                          double rel_cut = 1e-10);

}  // namespace dgl
