#include "dgl/svd.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace dgl {

namespace {

// Two classical Gram-Schmidt passes against the first `count` columns.
void reorthogonalize(const Eigen::MatrixXd& basis, Index count,
                     Eigen::VectorXd& w) {
  if (count == 0) return;
  auto block = basis.leftCols(count);
  for (int pass = 0; pass < 2; ++pass) {
    Eigen::VectorXd coef = block.transpose() * w;
    w.noalias() -= block * coef;
  }
}

Eigen::VectorXd random_unit(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(rng);
  double norm = v.norm();
  return norm > 0 ? Eigen::VectorXd(v / norm) : Eigen::VectorXd::Unit(n, 0);
}

Eigen::VectorXd spmv_eig(const SparseMatrix& a, const Eigen::VectorXd& x) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(a.rows);
  for (Index i = 0; i < a.rows; ++i) {
    double s = 0.0;
    for (Index k = a.indptr[i]; k < a.indptr[i + 1]; ++k)
      s += a.values[k] * x[a.indices[k]];
    y[i] = s;
  }
  return y;
}

}  // namespace

TruncatedSvd lanczos_svd(const SparseMatrix& m, Index rank, double tol,
                         std::uint64_t seed) {
  const Index n_rows = m.rows, n_cols = m.cols;
  const Index full = std::min(n_rows, n_cols);
  if (rank <= 0 || rank > full)
    throw Error(ErrorCode::InvalidArgument, "svd rank out of range");
  const SparseMatrix mt = m.transposed();
  std::mt19937_64 rng(seed);

  // Krylov budget: everything when the request is near-full, padded otherwise.
  Index max_dim = rank + 2 > full ? full
                                  : std::min<Index>(full, std::max<Index>(
                                        2 * rank + 10, 32));

  Eigen::MatrixXd vbase(n_cols, max_dim + 1);
  Eigen::MatrixXd ubase(n_rows, max_dim);
  std::vector<double> alphas, betas;

  Eigen::VectorXd v = random_unit(n_cols, rng);
  vbase.col(0) = v;
  Index dim = 0;
  double sigma_scale = 0.0;

  while (dim < max_dim) {
    // alpha_{j} u_j = M v_j - beta_{j-1} u_{j-1}
    Eigen::VectorXd s = spmv_eig(m, vbase.col(dim));
    if (dim > 0) s -= betas[dim - 1] * ubase.col(dim - 1);
    reorthogonalize(ubase, dim, s);
    double alpha = s.norm();
    sigma_scale = std::max(sigma_scale, alpha);
    if (alpha > 1e-14 * std::max(1.0, sigma_scale)) {
      ubase.col(dim) = s / alpha;
    } else {
      // Invariant left subspace: decouple and restart.
      alpha = 0.0;
      Eigen::VectorXd fresh = random_unit(n_rows, rng);
      reorthogonalize(ubase, dim, fresh);
      double norm = fresh.norm();
      if (norm < 1e-10) break;  // left space exhausted
      ubase.col(dim) = fresh / norm;
    }
    alphas.push_back(alpha);

    // beta_j v_{j+1} = M^T u_j - alpha_j v_j
    Eigen::VectorXd w = spmv_eig(mt, ubase.col(dim));
    w -= alphas[dim] * vbase.col(dim);
    reorthogonalize(vbase, dim + 1, w);
    double beta = w.norm();
    sigma_scale = std::max(sigma_scale, beta);
    if (beta > 1e-14 * std::max(1.0, sigma_scale)) {
      vbase.col(dim + 1) = w / beta;
    } else {
      beta = 0.0;
      Eigen::VectorXd fresh = random_unit(n_cols, rng);
      reorthogonalize(vbase, dim + 1, fresh);
      double norm = fresh.norm();
      if (norm < 1e-10) {
        betas.push_back(beta);
        ++dim;
        break;  // right space exhausted
      }
      vbase.col(dim + 1) = fresh / norm;
    }
    betas.push_back(beta);
    ++dim;
  }

  if (dim == 0)
    throw Error(ErrorCode::EigensolverFailure, "bidiagonalization collapsed");

  // Small SVD of the bidiagonal projection: M V = U B with B(j,j) = alpha_j
  // and B(j-1,j) = beta_{j-1} (upper bidiagonal).
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(dim, dim);
  for (Index j = 0; j < dim; ++j) {
    b(j, j) = alphas[j];
    if (j > 0) b(j - 1, j) = betas[j - 1];
  }
  Eigen::BDCSVD<Eigen::MatrixXd> small(
      b, Eigen::ComputeFullU | Eigen::ComputeFullV);

  Index keep = std::min<Index>(rank, dim);
  TruncatedSvd out;
  out.sigma = small.singularValues().head(keep);
  out.left = ubase.leftCols(dim) * small.matrixU().leftCols(keep);
  out.right = vbase.leftCols(dim) * small.matrixV().leftCols(keep);
  out.iterations = static_cast<int>(dim);

  // Ritz residual || M^T u - sigma v || = beta_dim * |last component of U|.
  double beta_last = betas.empty() ? 0.0 : betas.back();
  double sig_max = out.sigma.size() ? out.sigma[0] : 0.0;
  for (Index i = 0; i < keep; ++i) {
    double res = std::abs(beta_last * small.matrixU()(dim - 1, i));
    out.max_residual = std::max(out.max_residual, res);
  }
  if (dim < full && out.max_residual > tol * std::max(1.0, sig_max))
    throw Error(ErrorCode::EigensolverFailure,
                "svd not converged: residual " +
                    std::to_string(out.max_residual) + " after " +
                    std::to_string(dim) + " steps");
  return out;
}

DenseMatrix pseudoinverse(const SparseMatrix& m, Index rank, double rel_cut) {
  TruncatedSvd svd = lanczos_svd(m, rank);
  double cut = rel_cut * (svd.sigma.size() ? svd.sigma[0] : 0.0);
  DenseMatrix out = DenseMatrix::Zero(m.cols, m.rows);
  for (Index i = 0; i < svd.sigma.size(); ++i) {
    if (svd.sigma[i] <= cut) continue;
    out.noalias() +=
        (svd.right.col(i) / svd.sigma[i]) * svd.left.col(i).transpose();
  }
  return out;
}

}  // namespace dgl
