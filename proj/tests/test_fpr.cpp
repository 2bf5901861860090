#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dgl/fpr.hpp"
#include "dgl/graph.hpp"
#include "dgl/oracle.hpp"
#include "helpers.hpp"

using namespace dgl;
using testutil::dm;
using testutil::vec;

TEST_CASE("l2_normalize_rows") {
  auto norm = fpr::l2_normalize_rows(dm({{3, 4}}));
  CHECK(norm.rows == dm({{0.6, 0.8}}));
  CHECK(norm.zero_rows.empty());

  auto with_zero = fpr::l2_normalize_rows(dm({{0, 0}, {1, 0}}));
  CHECK(with_zero.rows.row(0) == dm({{0, 0}}).row(0));
  CHECK(with_zero.zero_rows == std::vector<Index>{0});

  auto basis = fpr::l2_normalize_rows(dm({{1, 0}, {0, 1}}));
  CHECK(basis.rows == dm({{1, 0}, {0, 1}}));
}

TEST_CASE("mean_direction") {
  Vector m = fpr::mean_direction(dm({{1, 0}, {0, 1}}));
  CHECK(std::abs(m[0] - std::sqrt(2.0) / 2) < 1e-15);
  CHECK(std::abs(m[1] - std::sqrt(2.0) / 2) < 1e-15);

  CHECK(testutil::max_abs_diff(
            fpr::mean_direction(dm({{0.6, 0.8}, {0.6, 0.8}})),
            vec({0.6, 0.8})) < 1e-15);

  CHECK_THROWS_AS(fpr::mean_direction(dm({{1, 0}, {-1, 0}})), Error);
  try {
    fpr::mean_direction(dm({{1, 0}, {-1, 0}}));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroMean);
  }
}

TEST_CASE("auxiliary vector construction") {
  // explicit Gram-Schmidt step
  Vector a = fpr::gram_schmidt_unit(vec({1, 1}), vec({1, 0}));
  CHECK(testutil::max_abs_diff(a, vec({0, 1})) < 1e-15);

  // orthogonality across seeds
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 32; ++t) {
    Vector xbar(5);
    for (Index i = 0; i < 5; ++i) xbar[i] = normal(rng);
    xbar /= xbar.norm();
    Vector aux = fpr::auxiliary_vector(xbar, t);
    CHECK(std::abs(aux.dot(xbar)) < 1e-10);
    CHECK(std::abs(aux.norm() - 1.0) < 1e-12);
    // deterministic per seed
    CHECK(aux == fpr::auxiliary_vector(xbar, t));
  }

  // every 1-d draw is parallel to xbar, so the redraw loop runs out
  CHECK_THROWS_AS(fpr::auxiliary_vector(vec({1}), 0), Error);
  try {
    fpr::auxiliary_vector(vec({1}), 0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateAux);
  }
}

TEST_CASE("similarity_sort orders by cosine, ties by index") {
  auto deg = [](double d) { return d * M_PI / 180.0; };
  DenseMatrix x(3, 2);
  for (Index i = 0; i < 3; ++i) {
    double ang = deg(i == 0 ? 10 : i == 1 ? 50 : 80);
    x(i, 0) = std::cos(ang);
    x(i, 1) = std::sin(ang);
  }
  auto s = fpr::similarity_sort(x, vec({1, 0}));
  CHECK(s.order == std::vector<Index>{0, 1, 2});

  DenseMatrix same = dm({{1, 0}, {1, 0}, {1, 0}, {1, 0}});
  auto tie = fpr::similarity_sort(same, vec({1, 0}));
  CHECK(tie.order == std::vector<Index>{0, 1, 2, 3});
}

TEST_CASE("2-d sorting matches exact angular order in one quadrant") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> angle(0.0, M_PI / 2);
  for (int trial = 0; trial < 20; ++trial) {
    Index n = 4 + static_cast<Index>(rng() % 61);  // up to 64
    std::vector<double> angles(n);
    DenseMatrix x(n, 2);
    for (Index i = 0; i < n; ++i) {
      angles[i] = angle(rng);
      x(i, 0) = std::cos(angles[i]);
      x(i, 1) = std::sin(angles[i]);
    }
    double ref_angle = angle(rng);
    Vector a = vec({std::cos(ref_angle), std::sin(ref_angle)});
    auto s = fpr::similarity_sort(x, a);
    // expected: ascending angular distance to a
    std::vector<Index> expect(n);
    std::iota(expect.begin(), expect.end(), Index{0});
    std::stable_sort(expect.begin(), expect.end(), [&](Index i, Index j) {
      return std::abs(angles[i] - ref_angle) <
             std::abs(angles[j] - ref_angle);
    });
    CHECK(s.order == expect);
  }
}

TEST_CASE("sorting_graph") {
  fpr::SortedIndex s;
  s.order = {0, 1, 2, 3};
  s.scores = vec({4, 3, 2, 1});
  SparseMatrix w1 = fpr::sorting_graph(s, 1);
  CHECK(w1.to_dense() == dm({{0, 1, 0, 0},
                             {1, 0, 1, 0},
                             {0, 1, 0, 1},
                             {0, 0, 1, 0}}));
  SparseMatrix w2 = fpr::sorting_graph(s, 2);
  CHECK(w2.to_dense() == dm({{0, 1, 1, 0},
                             {1, 0, 1, 1},
                             {1, 1, 0, 1},
                             {0, 1, 1, 0}}));
  CHECK(is_strongly_connected(w1));

  fpr::SortedIndex two;
  two.order = {0, 1};
  two.scores = vec({1, 0});
  CHECK(fpr::sorting_graph(two, 3).to_dense() == dm({{0, 1}, {1, 0}}));
}

TEST_CASE("split_signs") {
  auto [pos, neg] = fpr::split_signs(dm({{1, -2}}));
  CHECK(pos == dm({{1, 0}}));
  CHECK(neg == dm({{0, -2}}));

  DenseMatrix nonneg = dm({{1, 2}, {0, 3}});
  auto [p2, n2] = fpr::split_signs(nonneg);
  CHECK(p2 == nonneg);
  CHECK(n2 == DenseMatrix::Zero(2, 2));

  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  DenseMatrix x(6, 4);
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 4; ++j) x(i, j) = normal(rng);
  auto [xp, xn] = fpr::split_signs(x);
  CHECK(xp + xn == x);  // bit-exact reconstruction
}

TEST_CASE("build_combinatorial on the 2-node empty graph") {
  DiGraph g = DiGraph::from_edges(2, {}, dm({{1, 0}, {0.6, 0.8}}));
  auto cg = fpr::build_combinatorial(g, 2, 7);
  CHECK(cg.merged.to_dense() == dm({{0, 1}, {1, 0}}));
  CHECK(cg.transition.to_dense() == dm({{0.5, 0.5}, {0.5, 0.5}}));
  CHECK(cg.window_size == 1);
}

TEST_CASE("build_combinatorial validates k") {
  DiGraph g = DiGraph::from_edges(2, {}, dm({{1, 0}, {0, 1}}));
  CHECK_THROWS_AS(fpr::build_combinatorial(g, 3, 0), Error);
  CHECK_THROWS_AS(fpr::build_combinatorial(g, 0, 0), Error);
}

TEST_CASE("merged adjacency is a superset and within the sparsity budget") {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 25; ++trial) {
    Index n = 6 + static_cast<Index>(rng() % 50);
    std::uniform_int_distribution<Index> node(0, n - 1);
    std::vector<std::pair<Index, Index>> edges;
    for (Index e = 0; e < 3 * n; ++e)
      edges.emplace_back(node(rng), node(rng));
    DenseMatrix x(n, 6);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < 6; ++j) x(i, j) = normal(rng);  // mixed signs
    DiGraph g = DiGraph::from_edges(n, edges, std::move(x));
    Index k = (trial % 2 == 0) ? 2 : 4;
    auto cg = fpr::build_combinatorial(g, k, trial);

    // superset of A
    for (Index i = 0; i < n; ++i)
      for (Index j : g.adj.row_indices(i)) CHECK(cg.merged.at(i, j) >= 1.0);
    // nnz(A~) <= |E| + 2Nk + N
    CHECK(cg.merged_loops.nnz() <= g.num_edges() + 2 * n * k + n);
    // rows of the transition sum to 1
    for (Index i = 0; i < n; ++i) {
      double s = 0;
      for (double v : cg.transition.row_values(i)) s += v;
      CHECK(std::abs(s - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("knn_combine") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> normal;
  Index n = 12;
  DenseMatrix x(n, 3);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < 3; ++j) x(i, j) = std::abs(normal(rng));
  DiGraph g = DiGraph::from_edges(n, {{0, 1}}, x);

  SUBCASE("k = n-1 merges the complete graph") {
    auto cg = fpr::knn_combine(g, n - 1);
    CHECK(cg.merged.nnz() == n * (n - 1));
  }

  SUBCASE("identical features break ties by index and stay connected") {
    DenseMatrix same = DenseMatrix::Ones(n, 3);
    DiGraph gs = DiGraph::from_edges(n, {{0, 1}}, same);
    auto cg = fpr::knn_combine(gs, 2);
    // node 5's top-2 by index tie-break are 0 and 1
    CHECK(cg.merged.at(5, 0) == 1.0);
    CHECK(cg.merged.at(5, 1) == 1.0);
    CHECK(is_strongly_connected(cg.merged_loops));
    CHECK(is_aperiodic(cg.merged_loops));
  }

  SUBCASE("sorting-graph recall against the exact kNN oracle is in [0,1]") {
    auto cg = fpr::build_combinatorial(g, 4, 3);
    auto knn = oracle::exact_knn(g.features, 4);
    Index hits = 0, total = 0;
    for (Index i = 0; i < n; ++i) {
      for (Index j : knn[i]) {
        ++total;
        if (cg.merged.at(i, j) > 0) ++hits;
      }
    }
    double recall = static_cast<double>(hits) / static_cast<double>(total);
    CHECK(recall >= 0.0);
    CHECK(recall <= 1.0);
    MESSAGE("sorting-graph recall vs exact kNN: ", recall);
  }
}
