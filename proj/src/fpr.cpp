#include "dgl/fpr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace dgl::fpr {

NormalizedFeatures l2_normalize_rows(const DenseMatrix& x) {
  NormalizedFeatures out;
  out.rows = x;
  for (Index i = 0; i < x.rows(); ++i) {
    double norm = x.row(i).norm();
    if (norm == 0.0) {
      out.zero_rows.push_back(i);
    } else {
      out.rows.row(i) /= norm;
    }
  }
  return out;
}

Vector mean_direction(const DenseMatrix& xhat) {
  if (xhat.rows() == 0)
    throw Error(ErrorCode::InvalidArgument, "empty feature matrix");
  Vector mean = xhat.colwise().mean().transpose();
  double norm = mean.norm();
  if (norm == 0.0)
    throw Error(ErrorCode::ZeroMean, "row mean is the zero vector");
  return mean / norm;
}

Vector gram_schmidt_unit(const Vector& a, const Vector& xbar) {
  Vector r = a - (a.dot(xbar)) * xbar;
  double norm = r.norm();
  if (norm < 1e-12)
    throw Error(ErrorCode::DegenerateAux, "draw parallel to mean direction");
  return r / norm;
}

Vector auxiliary_vector(const Vector& xbar, std::uint64_t seed) {
  const int kMaxAttempts = 16;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(attempt));
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Vector a(xbar.size());
    for (Index i = 0; i < a.size(); ++i) a[i] = unif(rng);
    Vector r = a - (a.dot(xbar)) * xbar;
    if (r.norm() < 1e-12) continue;  // parallel draw, redraw with seed+1
    return r / r.norm();
  }
  throw Error(ErrorCode::DegenerateAux,
              "no non-parallel auxiliary draw in 16 attempts");
}

SortedIndex similarity_sort(const DenseMatrix& xhat, const Vector& a) {
  SortedIndex s;
  Index n = xhat.rows();
  s.scores = xhat * a;  // rows are unit or zero, so dot = cosine
  s.order.resize(n);
  std::iota(s.order.begin(), s.order.end(), Index{0});
  std::stable_sort(s.order.begin(), s.order.end(), [&](Index i, Index j) {
    return s.scores[i] > s.scores[j];
  });
  return s;
}

SparseMatrix sorting_graph(const SortedIndex& s, Index window_size) {
  Index n = static_cast<Index>(s.order.size());
  Index window = std::min<Index>(window_size, n > 0 ? n - 1 : 0);
  if (window_size < 1)
    throw Error(ErrorCode::InvalidArgument, "window_size must be positive");
  std::vector<std::tuple<Index, Index, double>> trip;
  for (Index w = 1; w <= window; ++w) {
    for (Index i = 0; i + w < n; ++i) {
      Index u = s.order[i], v = s.order[i + w];
      trip.emplace_back(u, v, 1.0);
      trip.emplace_back(v, u, 1.0);
    }
  }
  return SparseMatrix::from_coo(n, n, std::move(trip), SparseMatrix::Dup::Max);
}

std::pair<DenseMatrix, DenseMatrix> split_signs(const DenseMatrix& x) {
  DenseMatrix pos = x.cwiseMax(0.0);
  DenseMatrix neg = x.cwiseMin(0.0);
  return {std::move(pos), std::move(neg)};
}

namespace {

SparseMatrix sorting_graph_for(const DenseMatrix& part, Index window,
                               std::uint64_t seed) {
  auto normalized = l2_normalize_rows(part);
  Vector xbar = mean_direction(normalized.rows);
  Vector a = auxiliary_vector(xbar, seed);
  return sorting_graph(similarity_sort(normalized.rows, a), window);
}

CombinatorialGraph finish_build(SparseMatrix merged, Index k, Index window,
                                std::uint64_t seed) {
  CombinatorialGraph cg;
  cg.merged = std::move(merged);
  cg.merged_loops = add_self_loops(cg.merged);
  cg.degrees = out_degrees(cg.merged_loops);
  cg.transition = row_normalize(cg.merged_loops);
  cg.k = k;
  cg.window_size = window;
  cg.seed = seed;
  return cg;
}

}  // namespace

CombinatorialGraph build_combinatorial(const DiGraph& g, Index k,
                                       std::uint64_t seed) {
  if (k <= 0 || k % 2 != 0)
    throw Error(ErrorCode::InvalidArgument, "k must be a positive even number");
  if (!g.has_features())
    throw Error(ErrorCode::InvalidArgument,
                "similarity sorting needs node features");
  Index window = k / 2;

  SparseMatrix merged;
  if ((g.features.array() < 0.0).any()) {
    auto [pos, neg] = split_signs(g.features);
    // Flip the negative part so both score sets live in one orthant; the
    // negative branch draws its auxiliary vector from an offset seed.
    SparseMatrix s_pos = sorting_graph_for(pos, window, seed);
    SparseMatrix s_neg = sorting_graph_for((-neg).eval(), window,
                                           seed + 0x9e3779b9ULL);
    merged = element_max(g.adj, element_max(s_pos, s_neg));
  } else {
    merged = element_max(g.adj, sorting_graph_for(g.features, window, seed));
  }
  return finish_build(std::move(merged), k, window, seed);
}

CombinatorialGraph knn_combine(const DiGraph& g, Index k) {
  if (!g.has_features())
    throw Error(ErrorCode::InvalidArgument, "kNN merge needs node features");
  if (k <= 0) throw Error(ErrorCode::InvalidArgument, "k must be positive");
  Index n = g.n;
  auto normalized = l2_normalize_rows(g.features);
  const DenseMatrix& xhat = normalized.rows;

  std::vector<std::tuple<Index, Index, double>> trip;
  std::vector<std::pair<double, Index>> cand;
  for (Index i = 0; i < n; ++i) {
    cand.clear();
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      cand.emplace_back(xhat.row(i).dot(xhat.row(j)), j);
    }
    Index take = std::min<Index>(k, static_cast<Index>(cand.size()));
    std::stable_sort(cand.begin(), cand.end(), [](const auto& a,
                                                  const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (Index t = 0; t < take; ++t) trip.emplace_back(i, cand[t].second, 1.0);
  }
  SparseMatrix knn =
      SparseMatrix::from_coo(n, n, std::move(trip), SparseMatrix::Dup::Max);
  SparseMatrix mutual = element_max(knn, knn.transposed());
  return finish_build(element_max(g.adj, mutual), k, /*window=*/0,
                      /*seed=*/0);
}

}  // namespace dgl::fpr
