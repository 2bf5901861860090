#include <doctest.h>

#include <cmath>
#include <random>

#include "dgl/graph.hpp"
#include "dgl/markov.hpp"
#include "dgl/oracle.hpp"
#include "dgl/verify.hpp"
#include "helpers.hpp"

using namespace dgl;
using testutil::dm;
using testutil::vec;

namespace {

// bidirectional edge + self-loops on 2 nodes: P = [[.5,.5],[.5,.5]]
markov::PfprChain two_node_chain() {
  SparseMatrix at = add_self_loops(testutil::sp({{0, 1}, {1, 0}}));
  return markov::stationary_distribution(row_normalize(at), out_degrees(at),
                                         100, 1e-14);
}

markov::PfprChain chain_of(const SparseMatrix& adj, int iters = 300,
                           double tol = 1e-14) {
  SparseMatrix at = add_self_loops(adj);
  return markov::stationary_distribution(row_normalize(at), out_degrees(at),
                                         iters, tol);
}

}  // namespace

TEST_CASE("pagerank_transition") {
  SparseMatrix p = testutil::sp({{0, 1}, {1, 0}});
  CHECK(markov::pagerank_transition(p, 1.0) == p.to_dense());
  CHECK(markov::pagerank_transition(p, 0.0) ==
        DenseMatrix::Constant(2, 2, 0.5));
  DenseMatrix pr = markov::pagerank_transition(p, 0.85);
  for (Index i = 0; i < 2; ++i)
    CHECK(std::abs(pr.row(i).sum() - 1.0) < 1e-12);
  CHECK_THROWS_AS(markov::pagerank_transition(p, 1.5), Error);
  CHECK_THROWS_AS(markov::pagerank_transition(p, -0.1), Error);
}

TEST_CASE("stationary_distribution") {
  auto chain = two_node_chain();
  CHECK(testutil::max_abs_diff(chain.stationary, vec({0.5, 0.5})) < 1e-14);
  CHECK(chain.converged);

  // undirected chain: pi_i = d_i / sum d
  SparseMatrix path = testutil::sp(
      {{0, 1, 0, 0}, {1, 0, 1, 0}, {0, 1, 0, 1}, {0, 0, 1, 0}});
  auto pc = chain_of(path, 2000);
  Vector closed = pc.degrees / pc.degrees.sum();
  CHECK(testutil::max_abs_diff(pc.stationary, closed) < 1e-10);

  // directed 3-cycle with self-loops: uniform by symmetry
  SparseMatrix cyc = testutil::sp({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
  auto cc = chain_of(cyc);
  CHECK(testutil::max_abs_diff(cc.stationary, vec({1.0 / 3, 1.0 / 3, 1.0 / 3}))
        < 1e-12);
}

TEST_CASE("diglacian") {
  auto chain = two_node_chain();
  CHECK(markov::diglacian(chain).to_dense() == dm({{0, -0.25}, {-0.25, 0}}));

  // row sums equal pi_i (1/d_i - 1)
  SparseMatrix adj = testutil::sp(
      {{0, 1, 1, 0}, {0, 0, 1, 0}, {1, 0, 0, 1}, {0, 1, 0, 0}});
  auto c2 = chain_of(adj);
  DenseMatrix t = markov::diglacian(c2).to_dense();
  for (Index i = 0; i < t.rows(); ++i) {
    double expect = c2.stationary[i] * (1.0 / c2.degrees[i] - 1.0);
    CHECK(std::abs(t.row(i).sum() - expect) < 1e-12);
  }
}

TEST_CASE("normalized diglacian and propagation operator") {
  auto chain = two_node_chain();
  DenseMatrix tn = markov::normalized_diglacian(chain);
  CHECK(testutil::max_abs_diff(tn, dm({{0, -0.5}, {-0.5, 0}})) < 1e-15);
  DenseMatrix tp = markov::augmented_propagation(chain);
  CHECK(testutil::max_abs_diff(tp, dm({{1, 0.5}, {0.5, 1}})) < 1e-15);

  SparseMatrix adj = testutil::sp(
      {{0, 1, 1, 0, 0},
       {0, 0, 1, 0, 1},
       {1, 0, 0, 1, 0},
       {0, 1, 0, 0, 1},
       {1, 0, 0, 0, 0}});
  auto c2 = chain_of(adj);
  DenseMatrix t2 = markov::normalized_diglacian(c2);
  DenseMatrix p2 = markov::augmented_propagation(c2);
  CHECK((t2 - t2.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((p2 - p2.transpose()).cwiseAbs().maxCoeff() < 1e-12);

  // complement identity T + T^ = 2 diag(1/d)
  DenseMatrix sum = t2 + p2;
  sum.diagonal() -= 2.0 * c2.degrees.cwiseInverse();
  CHECK(sum.cwiseAbs().maxCoeff() < 1e-10);

  // sparse propagation agrees with the dense formula
  CHECK(testutil::max_abs_diff(
            markov::augmented_propagation_sparse(c2).to_dense(), p2) < 1e-14);

  // eigenvalue box
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig{Eigen::MatrixXd(t2)};
  CHECK(eig.eigenvalues().minCoeff() >=
        1.0 / c2.degrees.maxCoeff() - 1.0 - 1e-9);
  CHECK(eig.eigenvalues().maxCoeff() <=
        1.0 / c2.degrees.minCoeff() + 1.0 + 1e-9);
}

TEST_CASE("fundamental matrix, dense route") {
  auto chain = two_node_chain();
  DenseMatrix z = markov::fundamental_matrix_dense(chain);
  CHECK(z == dm({{0.5, -0.5}, {-0.5, 0.5}}));

  SparseMatrix adj = testutil::sp(
      {{0, 1, 1}, {1, 0, 0}, {0, 1, 0}});
  auto c2 = chain_of(adj);
  DenseMatrix z2 = markov::fundamental_matrix_dense(c2);
  CHECK((z2 * Vector::Ones(3)).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK((z2.transpose() * c2.stationary).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("fundamental matrix, sparse route equals the dense oracle") {
  std::mt19937_64 rng(97);
  for (int t = 0; t < 8; ++t) {
    verify::InstanceSpec spec;
    spec.n = 6 + 9 * t;
    spec.seed = 1000 + t;
    spec.negative_features = t % 2 == 1;
    auto inst = verify::random_instance(spec);
    SparseMatrix tl = markov::diglacian(inst.chain);
    DenseMatrix zd = markov::fundamental_matrix_dense(inst.chain);
    DenseMatrix zs = markov::fundamental_matrix_sparse(inst.chain, tl);
    CHECK((zd - zs).cwiseAbs().maxCoeff() < 1e-6);

    // both construction routes of the operator agree
    DenseMatrix m1 = markov::sparse_path_operator(inst.chain, tl).to_dense();
    DenseMatrix m2 =
        markov::sparse_path_operator_simplified(inst.chain).to_dense();
    CHECK((m1 - m2).cwiseAbs().maxCoeff() < 1e-12);

    // one-dimensional nullspace: right Pi^{1/2} e, left pi^{1/2}
    Vector sq = inst.chain.stationary.cwiseSqrt();
    CHECK((m1 * sq).lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK((m1.transpose() * sq).lpNorm<Eigen::Infinity>() < 1e-10);
  }
}

TEST_CASE("hitting and commute times") {
  auto chain = two_node_chain();
  DenseMatrix z = markov::fundamental_matrix_dense(chain);
  DenseMatrix h = markov::hitting_times(z, chain);
  CHECK(h == dm({{0, 2}, {2, 0}}));
  DenseMatrix c = markov::commute_times(h);
  CHECK(c(0, 1) == 4.0);
  CHECK(c == DenseMatrix(c.transpose()));

  // against the absorbing-system oracle, relative 1e-8
  std::mt19937_64 rng(55);
  for (int t = 0; t < 6; ++t) {
    verify::InstanceSpec spec;
    spec.n = 6 + 7 * t;
    spec.seed = 2000 + t;
    auto inst = verify::random_instance(spec);
    DenseMatrix zz = markov::fundamental_matrix_dense(inst.chain);
    DenseMatrix hh = markov::hitting_times(zz, inst.chain);
    DenseMatrix cc = markov::commute_times(hh);
    Index n = spec.n;
    for (Index j = 0; j < std::min<Index>(3, n); ++j) {
      Vector href = oracle::hitting_linear_system(inst.chain.transition, j);
      for (Index i = 0; i < n; ++i) {
        if (i == j) continue;
        CHECK(std::abs(hh(i, j) - href[i]) <=
              1e-8 * std::max(1.0, std::abs(href[i])));
        CHECK(hh(i, j) >= 0.0);
        CHECK(cc(i, j) > 0.0);
      }
    }
    // Monte Carlo agreement within 3 standard errors
    auto est = oracle::monte_carlo_hitting(inst.chain.transition, 0, n - 1,
                                           30000, 77 + t);
    CHECK(std::abs(hh(0, n - 1) - est.mean) <= 3.0 * est.std_error);
  }
}

TEST_CASE("sparsify_commute") {
  // mu small enough that floor(mu N) = 0: nothing dropped
  DenseMatrix c = dm({{0, 3, 1, 2},
                      {3, 0, 5, 4},
                      {1, 5, 0, 6},
                      {2, 4, 6, 0}});
  SparseMatrix kept = markov::sparsify_commute(c, 0.1);
  CHECK(kept.nnz() == 12);

  // N=10, mu=0.5: 5 dropped, 4 kept per row
  DenseMatrix c10(10, 10);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(1.0, 9.0);
  for (Index i = 0; i < 10; ++i)
    for (Index j = 0; j < 10; ++j) c10(i, j) = i == j ? 0.0 : unif(rng);
  SparseMatrix s10 = markov::sparsify_commute(c10, 0.5);
  for (Index i = 0; i < 10; ++i)
    CHECK(s10.indptr[i + 1] - s10.indptr[i] == 4);

  // N=100, mu=0.97: floor(mu N) = 97 dropped, so 99 - 97 = 2 positive
  // entries survive per row (the zero diagonal is never a candidate)
  DenseMatrix c100(100, 100);
  for (Index i = 0; i < 100; ++i)
    for (Index j = 0; j < 100; ++j) c100(i, j) = i == j ? 0.0 : unif(rng);
  SparseMatrix s100 = markov::sparsify_commute(c100, 0.97);
  for (Index i = 0; i < 100; ++i)
    CHECK(s100.indptr[i + 1] - s100.indptr[i] == 99 - 97);

  // ties at the cutoff keep the lower node index
  DenseMatrix tie = dm({{0, 7, 7, 1},
                        {7, 0, 1, 7},
                        {7, 1, 0, 7},
                        {1, 7, 7, 0}});
  // floor(0.3 * 4) = 1 dropped, 2 kept per row
  SparseMatrix st = markov::sparsify_commute(tie, 0.3);
  // row 0 keeps the value-1 entry and the lower-index 7 (column 1)
  CHECK(st.at(0, 3) == 1.0);
  CHECK(st.at(0, 1) == 7.0);
  CHECK(st.at(0, 2) == 0.0);

  CHECK_THROWS_AS(markov::sparsify_commute(c, 0.0), Error);
  CHECK_THROWS_AS(markov::sparsify_commute(c, 1.0), Error);
}

TEST_CASE("commute_propagation") {
  // single kept entry becomes probability 1
  SparseMatrix one = SparseMatrix::from_coo(2, 2, {{0, 1, 5.0}, {1, 0, 3.0}});
  SparseMatrix p1 = markov::commute_propagation(one);
  CHECK(p1.at(0, 1) == 1.0);
  CHECK(p1.at(1, 0) == 1.0);

  // kept values [1, 2] weight as exp(-1), exp(-2) normalized
  SparseMatrix two = SparseMatrix::from_coo(
      2, 2, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, 1.0}});
  SparseMatrix p2 = markov::commute_propagation(two);
  double e1 = std::exp(-1.0), e2 = std::exp(-2.0);
  CHECK(std::abs(p2.at(0, 0) - e1 / (e1 + e2)) < 1e-12);
  CHECK(std::abs(p2.at(0, 1) - e2 / (e1 + e2)) < 1e-12);
  CHECK(std::abs(p2.at(0, 0) - 0.7311) < 1e-4);
  CHECK(std::abs(p2.at(0, 1) - 0.2689) < 1e-4);

  // stabilized path agrees with direct exponentiation on moderate rows
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.5, 400.0);
  std::vector<std::tuple<Index, Index, double>> trip;
  for (Index i = 0; i < 20; ++i)
    for (Index j = 0; j < 20; ++j)
      if (i != j) trip.emplace_back(i, j, unif(rng));
  SparseMatrix cs = SparseMatrix::from_coo(20, 20, std::move(trip));
  SparseMatrix stab = markov::commute_propagation(cs);
  for (Index i = 0; i < 20; ++i) {
    double row_sum = 0.0;
    for (Index k = cs.indptr[i]; k < cs.indptr[i + 1]; ++k)
      row_sum += std::exp(-cs.values[k]);
    for (Index k = cs.indptr[i]; k < cs.indptr[i + 1]; ++k) {
      double direct = std::exp(-cs.values[k]) / row_sum;
      CHECK(std::abs(stab.values[k] - direct) < 1e-12);
    }
  }

  // a row that kept nothing is an error
  SparseMatrix empty_row(2, 2);
  CHECK_THROWS_AS(markov::commute_propagation(empty_row), Error);
}

TEST_CASE("slow chains come back flagged, not thrown") {
  // a long path mixes far too slowly for 3 iterations
  Index n = 60;
  std::vector<std::pair<Index, Index>> e;
  for (Index i = 0; i + 1 < n; ++i) {
    e.emplace_back(i, i + 1);
    e.emplace_back(i + 1, i);
  }
  SparseMatrix at = add_self_loops(DiGraph::from_edges(n, e).adj);
  auto chain = markov::stationary_distribution(row_normalize(at),
                                               out_degrees(at), 3, 1e-12);
  CHECK_FALSE(chain.converged);
  CHECK(chain.residual > 1e-6);
  CHECK(chain.iterations_used == 3);
}

TEST_CASE("rayleigh quotient") {
  SparseMatrix adj = testutil::sp(
      {{0, 1, 0, 1}, {1, 0, 1, 0}, {0, 0, 0, 1}, {1, 0, 1, 0}});
  auto chain = chain_of(adj);
  CHECK(markov::rayleigh_quotient(Vector::Ones(4), chain) == 0.0);

  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 25; ++t) {
    Vector f(4);
    for (Index i = 0; i < 4; ++i) f[i] = normal(rng);
    auto [def, closed] = markov::rayleigh_quotient_forms(f, chain);
    CHECK(def >= 0.0);
    CHECK(std::abs(def - closed) < 1e-10);
  }
}

TEST_CASE("diameter bound on regular graphs") {
  auto regular = [](Index n, const std::vector<std::pair<Index, Index>>& e) {
    SparseMatrix at = add_self_loops(DiGraph::from_edges(n, e).adj);
    return markov::stationary_distribution(row_normalize(at),
                                           out_degrees(at), 500, 1e-14);
  };

  SUBCASE("complete graph with self-loops") {
    std::vector<std::pair<Index, Index>> e;
    for (Index i = 0; i < 8; ++i)
      for (Index j = 0; j < 8; ++j)
        if (i != j) e.emplace_back(i, j);
    auto b = markov::diameter_bound_check(regular(8, e));
    CHECK(b.holds);
    CHECK(b.diameter == 1);
    CHECK(b.bound >= 1.0);
  }

  SUBCASE("regular ring of cliques") {
    // m cliques of size c joined by perfect matchings around a cycle
    for (auto [m, c] : std::vector<std::pair<Index, Index>>{{2, 4}, {4, 8}}) {
      std::vector<std::pair<Index, Index>> e;
      for (Index q = 0; q < m; ++q)
        for (Index i = 0; i < c; ++i) {
          for (Index j = 0; j < c; ++j)
            if (i != j) e.emplace_back(q * c + i, q * c + j);
          Index next = ((q + 1) % m) * c + i;
          e.emplace_back(q * c + i, next);
          e.emplace_back(next, q * c + i);
        }
      auto b = markov::diameter_bound_check(regular(m * c, e));
      CHECK(b.holds);
      CHECK(b.diameter >= 2);
    }
  }

  SUBCASE("non-regular input") {
    SparseMatrix path = testutil::sp(
        {{0, 1, 0}, {1, 0, 1}, {0, 1, 0}});
    auto chain = chain_of(path);
    CHECK_THROWS_AS(markov::diameter_bound_check(chain), Error);
    try {
      markov::diameter_bound_check(chain);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotRegular);
    }
  }
}

TEST_CASE("build_commute_model end to end") {
  verify::InstanceSpec spec;
  spec.n = 40;
  spec.seed = 4242;
  auto inst = verify::random_instance(spec);
  auto model = markov::build_commute_model(inst.chain, 0.5);
  CHECK(model.commute.diagonal().cwiseAbs().maxCoeff() == 0.0);
  for (Index i = 0; i < model.propagation.rows; ++i) {
    double s = 0;
    for (double v : model.propagation.row_values(i)) s += v;
    CHECK(std::abs(s - 1.0) < 1e-12);
  }
  // mu too large for the size leaves rows empty
  CHECK_THROWS_AS(markov::build_commute_model(inst.chain, 0.99), Error);
}
