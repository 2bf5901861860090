#pragma once

#include <initializer_list>
#include <vector>

#include "dgl/graph.hpp"
#include "dgl/sparse.hpp"
#include "dgl/types.hpp"

namespace testutil {

inline dgl::DenseMatrix dm(
    std::initializer_list<std::initializer_list<double>> rows) {
  dgl::Index r = static_cast<dgl::Index>(rows.size());
  dgl::Index c = static_cast<dgl::Index>(rows.begin()->size());
  dgl::DenseMatrix m(r, c);
  dgl::Index i = 0;
  for (const auto& row : rows) {
    dgl::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline dgl::SparseMatrix sp(
    std::initializer_list<std::initializer_list<double>> rows) {
  return dgl::SparseMatrix::from_dense(dm(rows));
}

inline dgl::Vector vec(std::initializer_list<double> vals) {
  dgl::Vector v(static_cast<dgl::Index>(vals.size()));
  dgl::Index i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

inline double max_abs_diff(const dgl::DenseMatrix& a,
                           const dgl::DenseMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace testutil
