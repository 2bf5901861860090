#include "dgl/graph.hpp"

#include <algorithm>
#include <numeric>

namespace dgl {

bool DiGraph::has_self_loops() const {
  for (Index i = 0; i < n; ++i)
    if (adj.at(i, i) != 0.0) return true;
  return false;
}

DiGraph DiGraph::from_edges(Index n,
                            const std::vector<std::pair<Index, Index>>& edges,
                            DenseMatrix features) {
  std::vector<std::tuple<Index, Index, double>> trip;
  trip.reserve(edges.size());
  for (auto [s, d] : edges) {
    if (s == d) continue;  // self-loops re-added uniformly later
    trip.emplace_back(s, d, 1.0);
  }
  DiGraph g;
  g.n = n;
  g.adj = SparseMatrix::from_coo(n, n, std::move(trip), SparseMatrix::Dup::Max);
  if (features.size() > 0 && features.rows() != n)
    throw Error(ErrorCode::InconsistentCounts, "feature row count != n");
  g.features = std::move(features);
  return g;
}

Vector out_degrees(const SparseMatrix& a) {
  Vector d = Vector::Zero(a.rows);
  for (Index i = 0; i < a.rows; ++i) {
    double s = 0.0;
    for (double v : a.row_values(i)) s += v;
    d[i] = s;
  }
  return d;
}

SparseMatrix add_self_loops(const SparseMatrix& a) {
  if (a.rows != a.cols)
    throw Error(ErrorCode::ShapeMismatch, "add_self_loops needs square input");
  return sparse_add(a, SparseMatrix::identity(a.rows));
}

SparseMatrix symmetrize(const SparseMatrix& a) {
  if (a.rows != a.cols)
    throw Error(ErrorCode::ShapeMismatch, "symmetrize needs square input");
  return sparse_add(a, a.transposed(), 0.5, 0.5);
}

SparseMatrix row_normalize(const SparseMatrix& a) {
  SparseMatrix p = a;
  for (Index i = 0; i < a.rows; ++i) {
    double s = 0.0;
    for (Index k = a.indptr[i]; k < a.indptr[i + 1]; ++k) s += a.values[k];
    if (s <= 0.0)
      throw Error(ErrorCode::DeadEndRow, "dead-end row " + std::to_string(i),
                  i);
    for (Index k = a.indptr[i]; k < a.indptr[i + 1]; ++k) p.values[k] /= s;
  }
  return p;
}

namespace {

// Iterative Tarjan; returns number of strongly connected components.
Index count_scc(const SparseMatrix& a) {
  Index n = a.rows;
  std::vector<Index> index(n, -1), lowlink(n, 0), stack;
  std::vector<char> on_stack(n, 0);
  Index next_index = 0, components = 0;

  struct Frame {
    Index v;
    Index edge;  // position into v's CSR row
  };
  std::vector<Frame> call;

  for (Index root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    call.push_back({root, a.indptr[root]});
    index[root] = lowlink[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& fr = call.back();
      Index v = fr.v;
      if (fr.edge < a.indptr[v + 1]) {
        Index w = a.indices[fr.edge++];
        if (index[w] == -1) {
          index[w] = lowlink[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, a.indptr[w]});
        } else if (on_stack[w]) {
          lowlink[v] = std::min(lowlink[v], index[w]);
        }
      } else {
        call.pop_back();
        if (!call.empty())
          lowlink[call.back().v] = std::min(lowlink[call.back().v],
                                            lowlink[v]);
        if (lowlink[v] == index[v]) {
          ++components;
          while (true) {
            Index w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            if (w == v) break;
          }
        }
      }
    }
  }
  return components;
}

}  // namespace

bool is_strongly_connected(const SparseMatrix& a) {
  if (a.rows != a.cols)
    throw Error(ErrorCode::ShapeMismatch, "connectivity needs square input");
  if (a.rows == 0) return false;
  if (a.rows == 1) return true;
  return count_scc(a) == 1;
}

bool is_aperiodic(const SparseMatrix& a) {
  if (!is_strongly_connected(a))
    throw Error(ErrorCode::NotIrreducible,
                "aperiodicity check needs a strongly connected graph");
  Index n = a.rows;
  for (Index i = 0; i < n; ++i)
    if (a.at(i, i) != 0.0) return true;  // irreducible + self-loop

  // Period = gcd over all edges (u, v) of level[u] + 1 - level[v], levels
  // from a BFS on the (strongly connected) graph.
  std::vector<Index> level(n, -1);
  std::vector<Index> queue{0};
  level[0] = 0;
  Index g = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Index u = queue[head];
    for (Index w : a.row_indices(u)) {
      if (level[w] == -1) {
        level[w] = level[u] + 1;
        queue.push_back(w);
      }
    }
  }
  for (Index u = 0; u < n; ++u)
    for (Index w : a.row_indices(u))
      g = std::gcd(g, std::abs(level[u] + 1 - level[w]));
  return g == 1;
}

}  // namespace dgl
