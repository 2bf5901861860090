#include "dgl/sparse.hpp"

#include <algorithm>
#include <cmath>

namespace dgl {

double SparseMatrix::at(Index i, Index j) const {
  auto cols_i = row_indices(i);
  auto it = std::lower_bound(cols_i.begin(), cols_i.end(), j);
  if (it == cols_i.end() || *it != j) return 0.0;
  return values[indptr[i] + (it - cols_i.begin())];
}

SparseMatrix SparseMatrix::transposed() const {
  SparseMatrix t(cols, rows);
  t.indptr.assign(cols + 1, 0);
  for (Index k = 0; k < nnz(); ++k) ++t.indptr[indices[k] + 1];
  for (Index j = 0; j < cols; ++j) t.indptr[j + 1] += t.indptr[j];
  t.indices.resize(nnz());
  t.values.resize(nnz());
  std::vector<Index> cursor(t.indptr.begin(), t.indptr.end() - 1);
  for (Index i = 0; i < rows; ++i) {
    for (Index k = indptr[i]; k < indptr[i + 1]; ++k) {
      Index pos = cursor[indices[k]]++;
      t.indices[pos] = i;
      t.values[pos] = values[k];
    }
  }
  return t;
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d = DenseMatrix::Zero(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index k = indptr[i]; k < indptr[i + 1]; ++k)
      d(i, indices[k]) = values[k];
  return d;
}

void SparseMatrix::check_valid() const {
  if (rows < 0 || cols < 0)
    throw Error(ErrorCode::InvalidArgument, "negative matrix dimension");
  if (static_cast<Index>(indptr.size()) != rows + 1)
    throw Error(ErrorCode::InvalidArgument, "indptr size mismatch");
  if (indptr.front() != 0 || indptr.back() != nnz())
    throw Error(ErrorCode::InvalidArgument, "indptr bounds mismatch");
  if (indices.size() != values.size())
    throw Error(ErrorCode::InvalidArgument, "indices/values size mismatch");
  for (Index i = 0; i < rows; ++i) {
    if (indptr[i] > indptr[i + 1])
      throw Error(ErrorCode::InvalidArgument, "indptr not monotone", i);
    for (Index k = indptr[i]; k < indptr[i + 1]; ++k) {
      if (indices[k] < 0 || indices[k] >= cols)
        throw Error(ErrorCode::InvalidArgument, "column index out of range", i);
      if (k > indptr[i] && indices[k] <= indices[k - 1])
        throw Error(ErrorCode::InvalidArgument,
                    "column indices not strictly increasing", i);
      if (!std::isfinite(values[k]))
        throw Error(ErrorCode::InvalidArgument, "non-finite value", i);
    }
  }
}

SparseMatrix SparseMatrix::identity(Index n) {
  SparseMatrix m(n, n);
  m.indices.resize(n);
  m.values.assign(n, 1.0);
  for (Index i = 0; i < n; ++i) {
    m.indptr[i + 1] = i + 1;
    m.indices[i] = i;
  }
  return m;
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& d, double prune) {
  std::vector<std::tuple<Index, Index, double>> trip;
  for (Index i = 0; i < d.rows(); ++i)
    for (Index j = 0; j < d.cols(); ++j)
      if (std::abs(d(i, j)) > prune) trip.emplace_back(i, j, d(i, j));
  return from_coo(d.rows(), d.cols(), std::move(trip));
}

SparseMatrix SparseMatrix::from_coo(
    Index rows, Index cols, std::vector<std::tuple<Index, Index, double>> trip,
    Dup dup) {
  for (const auto& [i, j, v] : trip) {
    (void)v;
    if (i < 0 || i >= rows || j < 0 || j >= cols)
      throw Error(ErrorCode::InvalidArgument, "triplet index out of range", i);
  }
  std::sort(trip.begin(), trip.end(), [](const auto& a, const auto& b) {
    return std::make_pair(std::get<0>(a), std::get<1>(a)) <
           std::make_pair(std::get<0>(b), std::get<1>(b));
  });
  SparseMatrix m(rows, cols);
  m.indices.reserve(trip.size());
  m.values.reserve(trip.size());
  for (std::size_t k = 0; k < trip.size(); ++k) {
    auto [i, j, v] = trip[k];
    bool same_as_prev = k > 0 && std::get<0>(trip[k - 1]) == i &&
                        std::get<1>(trip[k - 1]) == j;
    if (same_as_prev) {
      switch (dup) {
        case Dup::Sum:
          m.values.back() += v;
          break;
        case Dup::Max:
          m.values.back() = std::max(m.values.back(), v);
          break;
        case Dup::Error:
          throw Error(ErrorCode::InvalidArgument, "duplicate entry", i);
      }
      continue;
    }
    m.indices.push_back(j);
    m.values.push_back(v);
    ++m.indptr[i + 1];
  }
  for (Index i = 0; i < rows; ++i) m.indptr[i + 1] += m.indptr[i];
  return m;
}

Vector spmv(const SparseMatrix& a, const Vector& x) {
  if (x.size() != a.cols)
    throw Error(ErrorCode::ShapeMismatch, "spmv dimension mismatch");
  Vector y = Vector::Zero(a.rows);
  for (Index i = 0; i < a.rows; ++i) {
    double s = 0.0;
    for (Index k = a.indptr[i]; k < a.indptr[i + 1]; ++k)
      s += a.values[k] * x[a.indices[k]];
    y[i] = s;
  }
  return y;
}

Vector spmv_left(const SparseMatrix& a, const Vector& x) {
  if (x.size() != a.rows)
    throw Error(ErrorCode::ShapeMismatch, "spmv_left dimension mismatch");
  Vector y = Vector::Zero(a.cols);
  for (Index i = 0; i < a.rows; ++i) {
    double xi = x[i];
    if (xi == 0.0) continue;
    for (Index k = a.indptr[i]; k < a.indptr[i + 1]; ++k)
      y[a.indices[k]] += xi * a.values[k];
  }
  return y;
}

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b) {
  if (b.rows() != a.cols)
    throw Error(ErrorCode::ShapeMismatch, "spmm dimension mismatch");
  DenseMatrix y = DenseMatrix::Zero(a.rows, b.cols());
  for (Index i = 0; i < a.rows; ++i)
    for (Index k = a.indptr[i]; k < a.indptr[i + 1]; ++k)
      y.row(i) += a.values[k] * b.row(a.indices[k]);
  return y;
}

DenseMatrix spmm_transposed(const SparseMatrix& a, const DenseMatrix& b) {
  if (b.rows() != a.rows)
    throw Error(ErrorCode::ShapeMismatch, "spmm_transposed dimension mismatch");
  DenseMatrix y = DenseMatrix::Zero(a.cols, b.cols());
  for (Index i = 0; i < a.rows; ++i)
    for (Index k = a.indptr[i]; k < a.indptr[i + 1]; ++k)
      y.row(a.indices[k]) += a.values[k] * b.row(i);
  return y;
}

namespace {

template <typename Combine>
SparseMatrix merge_rows(const SparseMatrix& a, const SparseMatrix& b,
                        Combine combine) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw Error(ErrorCode::ShapeMismatch, "shape mismatch in sparse merge");
  SparseMatrix m(a.rows, a.cols);
  m.indices.reserve(a.nnz() + b.nnz());
  m.values.reserve(a.nnz() + b.nnz());
  for (Index i = 0; i < a.rows; ++i) {
    Index ka = a.indptr[i], kb = b.indptr[i];
    while (ka < a.indptr[i + 1] || kb < b.indptr[i + 1]) {
      Index ja = ka < a.indptr[i + 1] ? a.indices[ka] : a.cols;
      Index jb = kb < b.indptr[i + 1] ? b.indices[kb] : a.cols;
      if (ja < jb) {
        m.indices.push_back(ja);
        m.values.push_back(combine(a.values[ka], 0.0));
        ++ka;
      } else if (jb < ja) {
        m.indices.push_back(jb);
        m.values.push_back(combine(0.0, b.values[kb]));
        ++kb;
      } else {
        m.indices.push_back(ja);
        m.values.push_back(combine(a.values[ka], b.values[kb]));
        ++ka;
        ++kb;
      }
    }
    m.indptr[i + 1] = static_cast<Index>(m.indices.size());
  }
  return m;
}

}  // namespace

SparseMatrix element_max(const SparseMatrix& a, const SparseMatrix& b) {
  return merge_rows(a, b, [](double x, double y) { return std::max(x, y); });
}

SparseMatrix sparse_add(const SparseMatrix& a, const SparseMatrix& b,
                        double alpha, double beta) {
  return merge_rows(
      a, b, [=](double x, double y) { return alpha * x + beta * y; });
}

SparseMatrix scale_diag(const SparseMatrix& a, const Vector& left,
                        const Vector& right) {
  if (left.size() != 0 && left.size() != a.rows)
    throw Error(ErrorCode::ShapeMismatch, "left diagonal size mismatch");
  if (right.size() != 0 && right.size() != a.cols)
    throw Error(ErrorCode::ShapeMismatch, "right diagonal size mismatch");
  SparseMatrix m = a;
  for (Index i = 0; i < m.rows; ++i) {
    for (Index k = m.indptr[i]; k < m.indptr[i + 1]; ++k) {
      double v = m.values[k];
      if (left.size() != 0) v *= left[i];
      if (right.size() != 0) v *= right[m.indices[k]];
      m.values[k] = v;
    }
  }
  return m;
}

}  // namespace dgl
