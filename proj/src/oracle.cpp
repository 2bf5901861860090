#include "dgl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "dgl/threading.hpp"

namespace dgl::oracle {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Vector stationary_dense(const SparseMatrix& p) {
  Index n = p.rows;
  if (n > 500)
    throw Error(ErrorCode::InvalidArgument, "dense oracle capped at n <= 500");
  // (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
  Eigen::MatrixXd a = p.to_dense().transpose();
  a.diagonal().array() -= 1.0;
  a.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[n - 1] = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible())
    throw Error(ErrorCode::SingularSystem,
                "stationary system singular (chain not irreducible?)");
  Eigen::VectorXd pi = lu.solve(rhs);
  return pi;
}

Vector hitting_linear_system(const SparseMatrix& p, Index target) {
  Index n = p.rows;
  if (target < 0 || target >= n)
    throw Error(ErrorCode::InvalidArgument, "target out of range");
  std::vector<Index> keep;
  keep.reserve(n - 1);
  for (Index i = 0; i < n; ++i)
    if (i != target) keep.push_back(i);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n - 1, n - 1);
  std::vector<Index> pos(n, -1);
  for (std::size_t r = 0; r < keep.size(); ++r) pos[keep[r]] = r;
  for (std::size_t r = 0; r < keep.size(); ++r) {
    Index i = keep[r];
    a(r, r) += 1.0;
    for (Index k = p.indptr[i]; k < p.indptr[i + 1]; ++k) {
      Index j = p.indices[k];
      if (j == target) continue;
      a(r, pos[j]) -= p.values[k];
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible())
    throw Error(ErrorCode::SingularSystem, "hitting system singular");
  Eigen::VectorXd h = lu.solve(Eigen::VectorXd::Ones(n - 1));
  Vector full = Vector::Zero(n);
  for (std::size_t r = 0; r < keep.size(); ++r) full[keep[r]] = h[r];
  return full;
}

WalkEstimate monte_carlo_hitting(const SparseMatrix& p, Index source,
                                 Index target, Index walks,
                                 std::uint64_t seed, Index step_cap) {
  if (walks < 1) throw Error(ErrorCode::InvalidArgument, "walks < 1");
  std::vector<double> lengths(walks, -1.0);
  parallel_for(walks, [&](Index w) {
    std::mt19937_64 rng(splitmix64(seed ^ static_cast<std::uint64_t>(w)));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Index state = source;
    for (Index step = 1; step <= step_cap; ++step) {
      double r = unif(rng);
      double acc = 0.0;
      Index next = state;
      for (Index k = p.indptr[state]; k < p.indptr[state + 1]; ++k) {
        acc += p.values[k];
        if (r < acc) {
          next = p.indices[k];
          break;
        }
        next = p.indices[k];  // numerical slack lands on the last entry
      }
      state = next;
      if (state == target) {
        lengths[w] = static_cast<double>(step);
        return;
      }
    }
  });

  WalkEstimate est;
  double sum = 0.0, sum2 = 0.0;
  for (double len : lengths) {
    if (len < 0.0) {
      ++est.capped;
      continue;
    }
    sum += len;
    sum2 += len * len;
    ++est.walks_used;
  }
  if (est.walks_used == 0)
    throw Error(ErrorCode::InvalidArgument, "all walks hit the step cap");
  double m = sum / static_cast<double>(est.walks_used);
  double var =
      std::max(0.0, sum2 / static_cast<double>(est.walks_used) - m * m);
  est.mean = m;
  est.std_error = std::sqrt(var / static_cast<double>(est.walks_used));
  return est;
}

std::vector<std::vector<Index>> exact_knn(const DenseMatrix& x, Index k) {
  Index n = x.rows();
  std::vector<double> norms(n);
  for (Index i = 0; i < n; ++i) norms[i] = x.row(i).norm();
  std::vector<std::vector<Index>> out(n);
  std::vector<std::pair<double, Index>> cand;
  for (Index i = 0; i < n; ++i) {
    cand.clear();
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      double denom = norms[i] * norms[j];
      double cos = denom > 0.0 ? x.row(i).dot(x.row(j)) / denom : 0.0;
      cand.emplace_back(cos, j);
    }
    std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    Index take = std::min<Index>(k, static_cast<Index>(cand.size()));
    out[i].reserve(take);
    for (Index t = 0; t < take; ++t) out[i].push_back(cand[t].second);
  }
  return out;
}

OperatorReport dense_operator_check(const markov::PfprChain& chain) {
  Index n = chain.transition.rows;
  if (n > 300)
    throw Error(ErrorCode::InvalidArgument, "operator check capped at 300");
  // Independent dense construction of the normalized operator.
  Eigen::MatrixXd pd = chain.transition.to_dense();
  Eigen::VectorXd sq = chain.stationary.cwiseSqrt();
  Eigen::MatrixXd conj =
      sq.asDiagonal() * pd * sq.cwiseInverse().asDiagonal();
  Eigen::MatrixXd t = -0.5 * (conj + conj.transpose());
  for (Index i = 0; i < n; ++i) t(i, i) += 1.0 / chain.degrees[i];

  OperatorReport rep;
  rep.symmetry_residual =
      (t - t.transpose()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t);
  if (eig.info() != Eigen::Success)
    throw Error(ErrorCode::EigensolverFailure, "dense eigensolve failed");
  const Eigen::MatrixXd& u = eig.eigenvectors();
  rep.orthonormality_residual =
      (u.transpose() * u - Eigen::MatrixXd::Identity(n, n))
          .cwiseAbs()
          .maxCoeff();
  rep.reconstruction_residual =
      (u * eig.eigenvalues().asDiagonal() * u.transpose() - t)
          .cwiseAbs()
          .maxCoeff();
  rep.eig_min = eig.eigenvalues().minCoeff();
  rep.eig_max = eig.eigenvalues().maxCoeff();
  rep.box_lo = 1.0 / chain.degrees.maxCoeff() - 1.0;
  rep.box_hi = 1.0 / chain.degrees.minCoeff() + 1.0;
  rep.box_holds = rep.eig_min >= rep.box_lo - 1e-9 &&
                  rep.eig_max <= rep.box_hi + 1e-9;
  return rep;
}

}  // namespace dgl::oracle
