#pragma once

#include <string>

#include "dgl/sparse.hpp"
#include "dgl/types.hpp"

namespace dgl {

// "DGL1" container: 4 magic bytes, u32 dtype (0 = f64), u32 layout
// (0 = dense row-major, 1 = CSR, 2 = vector), u64 rows, u64 cols, then the
// payload. CSR payloads carry u64 nnz, i64 indptr/indices and f64 values.
// Little-endian throughout.
void write_dense(const std::string& path, const DenseMatrix& m);
DenseMatrix read_dense(const std::string& path);

void write_sparse(const std::string& path, const SparseMatrix& m);
SparseMatrix read_sparse(const std::string& path);

void write_vector(const std::string& path, const Vector& v);
Vector read_vector(const std::string& path);

}  // namespace dgl
