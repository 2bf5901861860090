#include "dgl/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "dgl/graph.hpp"
#include "dgl/svd.hpp"

namespace dgl::markov {

namespace {

SparseMatrix diag_matrix(const Vector& d) {
  SparseMatrix m(d.size(), d.size());
  m.indices.resize(d.size());
  m.values.resize(d.size());
  for (Index i = 0; i < d.size(); ++i) {
    m.indptr[i + 1] = i + 1;
    m.indices[i] = i;
    m.values[i] = d[i];
  }
  return m;
}

void check_row_stochastic(const SparseMatrix& p) {
  if (p.rows != p.cols)
    throw Error(ErrorCode::ShapeMismatch, "transition matrix must be square");
  for (Index i = 0; i < p.rows; ++i) {
    double s = 0.0;
    for (double v : p.row_values(i)) s += v;
    if (std::abs(s - 1.0) > 1e-9)
      throw Error(ErrorCode::InvalidArgument,
                  "row " + std::to_string(i) + " is not stochastic", i);
  }
}

// (Pi^{1/2} P Pi^{-1/2} + Pi^{-1/2} P^T Pi^{1/2}) / 2, dense.
DenseMatrix symmetrized_similarity(const PfprChain& chain) {
  Vector sq = chain.stationary.cwiseSqrt();
  Vector isq = sq.cwiseInverse();
  DenseMatrix s = scale_diag(chain.transition, sq, isq).to_dense();
  DenseMatrix w = 0.5 * (s + s.transpose());
  return w;
}

}  // namespace

DenseMatrix pagerank_transition(const SparseMatrix& p, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "alpha out of [0, 1]");
  check_row_stochastic(p);
  Index n = p.rows;
  DenseMatrix out =
      DenseMatrix::Constant(n, n, (1.0 - alpha) / static_cast<double>(n));
  for (Index i = 0; i < n; ++i)
    for (Index k = p.indptr[i]; k < p.indptr[i + 1]; ++k)
      out(i, p.indices[k]) += alpha * p.values[k];
  return out;
}

PfprChain stationary_distribution(const SparseMatrix& p, const Vector& degrees,
                                  int iterations, double tol) {
  check_row_stochastic(p);
  if (degrees.size() != p.rows)
    throw Error(ErrorCode::ShapeMismatch, "degree vector size mismatch");
  Index n = p.rows;
  PfprChain chain;
  chain.transition = p;
  chain.degrees = degrees;
  Vector pi = Vector::Constant(n, 1.0 / static_cast<double>(n));
  int used = 0;
  for (int it = 0; it < iterations; ++it) {
    Vector next = spmv_left(p, pi);
    double step = (next - pi).lpNorm<1>();
    double total = next.sum();
    pi = next / total;
    ++used;
    if (step < tol) break;
  }
  chain.stationary = pi;
  chain.iterations_used = used;
  chain.residual = (spmv_left(p, pi) - pi).lpNorm<1>();
  chain.converged = chain.residual <= 1e-6;
  return chain;
}

PfprChain make_chain(const fpr::CombinatorialGraph& cg, int iterations,
                     double tol) {
  return stationary_distribution(cg.transition, cg.degrees, iterations, tol);
}

SparseMatrix diglacian(const PfprChain& chain) {
  Vector pi_over_d =
      chain.stationary.cwiseQuotient(chain.degrees);
  return sparse_add(diag_matrix(pi_over_d),
                    scale_diag(chain.transition, chain.stationary, {}), 1.0,
                    -1.0);
}

DenseMatrix normalized_diglacian(const PfprChain& chain) {
  DenseMatrix t = -symmetrized_similarity(chain);
  for (Index i = 0; i < t.rows(); ++i) t(i, i) += 1.0 / chain.degrees[i];
  return t;
}

DenseMatrix augmented_propagation(const PfprChain& chain) {
  DenseMatrix t = symmetrized_similarity(chain);
  for (Index i = 0; i < t.rows(); ++i) t(i, i) += 1.0 / chain.degrees[i];
  return t;
}

SparseMatrix augmented_propagation_sparse(const PfprChain& chain) {
  Vector sq = chain.stationary.cwiseSqrt();
  Vector isq = sq.cwiseInverse();
  SparseMatrix s = scale_diag(chain.transition, sq, isq);
  SparseMatrix w = sparse_add(s, s.transposed(), 0.5, 0.5);
  return sparse_add(diag_matrix(chain.degrees.cwiseInverse()), w);
}

DenseMatrix fundamental_matrix_dense(const PfprChain& chain) {
  Index n = chain.transition.rows;
  DenseMatrix jpi(n, n);
  for (Index i = 0; i < n; ++i)
    jpi.row(i) = chain.stationary.transpose();
  DenseMatrix b = -chain.transition.to_dense() + jpi;
  b.diagonal().array() += 1.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu{Eigen::MatrixXd(b)};
  DenseMatrix z = lu.solve(Eigen::MatrixXd::Identity(n, n));
  double check = (b * z.col(0) - Eigen::VectorXd::Unit(n, 0)).lpNorm<Eigen::Infinity>();
  if (!std::isfinite(check) || check > 1e-6)
    throw Error(ErrorCode::SingularSystem,
                "dense fundamental-matrix solve failed");
  return z - jpi;
}

SparseMatrix sparse_path_operator(const PfprChain& chain,
                                  const SparseMatrix& diglacian_tilde) {
  Vector isq = chain.stationary.cwiseSqrt().cwiseInverse();
  SparseMatrix scaled = scale_diag(diglacian_tilde, isq, isq);
  Vector diag_shift =
      Vector::Ones(chain.degrees.size()) - chain.degrees.cwiseInverse();
  return sparse_add(scaled, diag_matrix(diag_shift));
}

SparseMatrix sparse_path_operator_simplified(const PfprChain& chain) {
  Vector sq = chain.stationary.cwiseSqrt();
  Vector isq = sq.cwiseInverse();
  SparseMatrix s = scale_diag(chain.transition, sq, isq);
  return sparse_add(SparseMatrix::identity(chain.transition.rows), s, 1.0,
                    -1.0);
}

DenseMatrix fundamental_matrix_sparse(const PfprChain& chain,
                                      const SparseMatrix& diglacian_tilde,
                                      Index rank) {
  Index n = chain.transition.rows;
  if (rank < 0) rank = n - 1;
  if (n == 1) return DenseMatrix::Zero(1, 1);
  SparseMatrix m = sparse_path_operator(chain, diglacian_tilde);
  DenseMatrix pinv = pseudoinverse(m, std::min(rank, n), 1e-10);
  Vector sq = chain.stationary.cwiseSqrt();
  Vector isq = sq.cwiseInverse();
  return isq.asDiagonal() * pinv * sq.asDiagonal();
}

DenseMatrix hitting_times(const DenseMatrix& z, const PfprChain& chain) {
  Index n = z.rows();
  DenseMatrix h(n, n);
  for (Index j = 0; j < n; ++j) {
    double zjj = z(j, j);
    double inv_pi = 1.0 / chain.stationary[j];
    for (Index i = 0; i < n; ++i) h(i, j) = (zjj - z(i, j)) * inv_pi;
    h(j, j) = 0.0;
  }
  return h;
}

DenseMatrix commute_times(const DenseMatrix& h) {
  DenseMatrix c = h + h.transpose();
  c.diagonal().setZero();
  return c;
}

SparseMatrix sparsify_commute(const DenseMatrix& c, double mu) {
  if (!(mu > 0.0 && mu < 1.0))
    throw Error(ErrorCode::InvalidArgument, "mu must lie in (0, 1)");
  Index n = c.rows();
  // Tolerate representation error in mu*N (0.97 * 100 must drop 97).
  Index drop = static_cast<Index>(std::floor(
      mu * static_cast<double>(n) + 1e-9));
  Index keep = std::max<Index>(n - 1 - drop, 0);

  std::vector<std::tuple<Index, Index, double>> trip;
  std::vector<std::pair<double, Index>> row;
  for (Index i = 0; i < n; ++i) {
    row.clear();
    for (Index j = 0; j < n; ++j)
      if (j != i) row.emplace_back(c(i, j), j);
    // Ascending by value keeps the smallest entries; ascending index at ties
    // keeps the lower node index.
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return a.second < b.second;
    });
    for (Index t = 0; t < keep && t < static_cast<Index>(row.size()); ++t)
      trip.emplace_back(i, row[t].second, row[t].first);
  }
  return SparseMatrix::from_coo(n, n, std::move(trip));
}

SparseMatrix commute_propagation(const SparseMatrix& c_sparse) {
  SparseMatrix out = c_sparse;
  for (Index i = 0; i < c_sparse.rows; ++i) {
    Index begin = c_sparse.indptr[i], end = c_sparse.indptr[i + 1];
    if (begin == end)
      throw Error(ErrorCode::EmptyRow,
                  "row " + std::to_string(i) +
                      " kept no entries; mu too large for this size",
                  i);
    double row_min = c_sparse.values[begin];
    for (Index k = begin; k < end; ++k)
      row_min = std::min(row_min, c_sparse.values[k]);
    double sum = 0.0;
    for (Index k = begin; k < end; ++k) {
      out.values[k] = std::exp(-(c_sparse.values[k] - row_min));
      sum += out.values[k];
    }
    for (Index k = begin; k < end; ++k) out.values[k] /= sum;
  }
  return out;
}

CommuteModel build_commute_model(const PfprChain& chain, double mu,
                                 Index dense_limit) {
  CommuteModel model;
  model.mu = mu;
  if (chain.transition.rows <= dense_limit) {
    model.fundamental = fundamental_matrix_dense(chain);
  } else {
    model.fundamental = fundamental_matrix_sparse(chain, diglacian(chain));
  }
  model.hitting = hitting_times(model.fundamental, chain);
  model.commute = commute_times(model.hitting);
  model.sparsified = sparsify_commute(model.commute, mu);
  model.propagation = commute_propagation(model.sparsified);
  return model;
}

std::pair<double, double> rayleigh_quotient_forms(const Vector& f,
                                                  const PfprChain& chain) {
  if (f.size() != chain.transition.rows)
    throw Error(ErrorCode::ShapeMismatch, "signal size mismatch");
  if (f.lpNorm<Eigen::Infinity>() == 0.0)
    throw Error(ErrorCode::InvalidArgument, "signal must be non-zero");
  const SparseMatrix& p = chain.transition;
  const Vector& pi = chain.stationary;

  double num = 0.0;
  for (Index i = 0; i < p.rows; ++i) {
    for (Index k = p.indptr[i]; k < p.indptr[i + 1]; ++k) {
      double diff = f[i] - f[p.indices[k]];
      num += diff * diff * pi[i] * p.values[k];
    }
  }
  double den = f.array().square().matrix().dot(pi);
  double definitional = num / den;

  Vector g = pi.cwiseSqrt().cwiseProduct(f);
  DenseMatrix op = normalized_diglacian(chain);
  op.diagonal().array() += 1.0;
  for (Index i = 0; i < op.rows(); ++i) op(i, i) -= 1.0 / chain.degrees[i];
  double closed = 2.0 * g.dot(op * g) / g.squaredNorm();
  return {definitional, closed};
}

double rayleigh_quotient(const Vector& f, const PfprChain& chain) {
  auto [definitional, closed] = rayleigh_quotient_forms(f, chain);
  double scale = std::max({1.0, std::abs(definitional), std::abs(closed)});
  if (std::abs(definitional - closed) > 1e-8 * scale)
    throw Error(ErrorCode::InvalidArgument,
                "rayleigh quotient evaluations disagree");
  return definitional;
}

DiameterBound diameter_bound_check(const PfprChain& chain) {
  Index n = chain.transition.rows;
  double d = chain.degrees[0];
  for (Index i = 0; i < n; ++i)
    if (chain.degrees[i] != d)
      throw Error(ErrorCode::NotRegular,
                  "combinatorial graph is not regular", i);

  DenseMatrix t = normalized_diglacian(chain);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Eigen::MatrixXd(t),
                                                     Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success)
    throw Error(ErrorCode::EigensolverFailure, "eigendecomposition failed");

  DiameterBound out;
  out.lambda = n >= 2 ? eig.eigenvalues()[1] : eig.eigenvalues()[0];
  // Walk decay factor: second-largest eigenvalue of the symmetrized
  // propagation diag(1/d) - T, which for a regular chain equals
  // (1 - d * lambda) / d.
  out.decay = (1.0 - d * out.lambda) / d;

  // BFS diameter over the adjacency pattern.
  Index diameter = 0;
  std::vector<Index> dist(n);
  std::vector<Index> queue;
  for (Index s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), Index{-1});
    queue.assign(1, s);
    dist[s] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      Index u = queue[head];
      for (Index w : chain.transition.row_indices(u)) {
        if (dist[w] == -1) {
          dist[w] = dist[u] + 1;
          queue.push_back(w);
          diameter = std::max(diameter, dist[w]);
        }
      }
    }
  }
  out.diameter = diameter;

  double max_log = 0.0;
  for (Index i = 0; i < n; ++i)
    max_log = std::max(max_log, std::log(1.0 / chain.stationary[i]));
  if (out.decay <= 0.0) {
    out.bound = 1.0;  // walk positive after a single step
  } else if (out.decay >= 1.0) {
    out.bound = std::numeric_limits<double>::infinity();
  } else {
    out.bound = std::floor(2.0 * max_log / std::log(1.0 / out.decay)) + 1.0;
  }
  out.holds = out.bound >= static_cast<double>(out.diameter);
  return out;
}

}  // namespace dgl::markov
