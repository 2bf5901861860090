#include "dgl/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace dgl::data {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

double parse_double(const std::string& tok, Index line_no) {
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    throw Error(ErrorCode::ParseError, "bad number at line " +
                std::to_string(line_no) + ": '" + tok + "'", line_no);
  return v;
}

Index parse_index(const std::string& tok, Index line_no) {
  Index v = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    throw Error(ErrorCode::ParseError, "bad integer at line " +
                std::to_string(line_no) + ": '" + tok + "'", line_no);
  return v;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<Index> json_index_array(const json& j, const char* key) {
  std::vector<Index> out;
  if (!j.contains(key) || !j[key].is_array())
    throw Error(ErrorCode::ParseError,
                std::string("splits file missing array '") + key + "'");
  for (const auto& v : j[key]) out.push_back(v.get<Index>());
  return out;
}

}  // namespace

Dataset load_dataset(const std::string& edge_path,
                     const std::string& feature_path,
                     const std::string& label_path,
                     const std::string& split_path) {
  Dataset ds;

  auto label_lines = read_lines(label_path);
  for (std::size_t i = 0; i < label_lines.size(); ++i) {
    if (label_lines[i].empty()) continue;
    ds.labels.push_back(parse_index(label_lines[i], static_cast<Index>(i + 1)));
  }
  Index n = static_cast<Index>(ds.labels.size());
  for (Index y : ds.labels) {
    if (y < 0) throw Error(ErrorCode::ParseError, "negative class label");
    ds.num_classes = std::max(ds.num_classes, y + 1);
  }

  DenseMatrix features;
  if (!feature_path.empty()) {
    auto lines = read_lines(feature_path);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      auto toks = split_tabs(lines[i]);
      std::vector<double> row;
      row.reserve(toks.size());
      for (const auto& t : toks)
        row.push_back(parse_double(t, static_cast<Index>(i + 1)));
      if (!rows.empty() && rows.front().size() != row.size())
        throw Error(ErrorCode::ParseError,
                    "ragged feature row at line " + std::to_string(i + 1),
                    static_cast<Index>(i + 1));
      rows.push_back(std::move(row));
    }
    if (static_cast<Index>(rows.size()) != n)
      throw Error(ErrorCode::InconsistentCounts,
                  "feature rows != label count");
    features = DenseMatrix(n, rows.empty() ? 0 : rows.front().size());
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < features.cols(); ++j)
        features(i, j) = rows[i][j];
  }

  auto edge_lines = read_lines(edge_path);
  std::vector<std::pair<Index, Index>> edges;
  std::set<std::pair<Index, Index>> seen;
  for (std::size_t i = 0; i < edge_lines.size(); ++i) {
    if (edge_lines[i].empty()) continue;
    auto toks = split_tabs(edge_lines[i]);
    if (toks.size() != 2)
      throw Error(ErrorCode::ParseError,
                  "edge line " + std::to_string(i + 1) + " needs src<TAB>dst",
                  static_cast<Index>(i + 1));
    Index s = parse_index(toks[0], static_cast<Index>(i + 1));
    Index d = parse_index(toks[1], static_cast<Index>(i + 1));
    if (s < 0 || s >= n || d < 0 || d >= n)
      throw Error(ErrorCode::InconsistentCounts,
                  "edge endpoint out of range at line " + std::to_string(i + 1),
                  static_cast<Index>(i + 1));
    if (s == d) {
      ++ds.self_loops_dropped;
      continue;
    }
    if (!seen.insert({s, d}).second) {
      ++ds.duplicate_edges_dropped;
      continue;
    }
    edges.emplace_back(s, d);
  }
  ds.graph = DiGraph::from_edges(n, edges, std::move(features));

  if (!split_path.empty()) {
    std::ifstream in(split_path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + split_path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError,
                  std::string("splits JSON: ") + e.what());
    }
    json arr = j.is_array() ? j : json::array({j});
    for (const auto& obj : arr) {
      Split sp;
      sp.train = json_index_array(obj, "train");
      sp.val = json_index_array(obj, "val");
      sp.test = json_index_array(obj, "test");
      for (const auto* part : {&sp.train, &sp.val, &sp.test})
        for (Index v : *part)
          if (v < 0 || v >= n)
            throw Error(ErrorCode::InconsistentCounts,
                        "split index out of range");
      ds.splits.push_back(std::move(sp));
    }
  }
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& edge_path,
                  const std::string& feature_path,
                  const std::string& label_path,
                  const std::string& split_path) {
  {
    std::ofstream out(edge_path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + edge_path);
    const SparseMatrix& a = ds.graph.adj;
    for (Index i = 0; i < a.rows; ++i)
      for (Index j : a.row_indices(i)) out << i << '\t' << j << '\n';
  }
  if (!feature_path.empty() && ds.graph.has_features()) {
    std::ofstream out(feature_path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + feature_path);
    const DenseMatrix& x = ds.graph.features;
    for (Index i = 0; i < x.rows(); ++i) {
      for (Index j = 0; j < x.cols(); ++j) {
        if (j) out << '\t';
        out << fmt(x(i, j));
      }
      out << '\n';
    }
  }
  {
    std::ofstream out(label_path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + label_path);
    for (Index y : ds.labels) out << y << '\n';
  }
  if (!split_path.empty() && !ds.splits.empty()) {
    json arr = json::array();
    for (const auto& sp : ds.splits) {
      json obj;
      obj["train"] = sp.train;
      obj["val"] = sp.val;
      obj["test"] = sp.test;
      arr.push_back(obj);
    }
    std::ofstream out(split_path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + split_path);
    out << arr.dump(2) << '\n';
  }
}

double edge_homophily(const DiGraph& g, const std::vector<Index>& labels) {
  if (g.num_edges() == 0)
    throw Error(ErrorCode::EmptyEdgeSet, "graph has no edges");
  if (static_cast<Index>(labels.size()) != g.n)
    throw Error(ErrorCode::InconsistentCounts, "label count != n");
  Index same = 0;
  for (Index i = 0; i < g.n; ++i)
    for (Index j : g.adj.row_indices(i))
      if (labels[i] == labels[j]) ++same;
  return static_cast<double>(same) / static_cast<double>(g.num_edges());
}

Dataset generate_synthetic(const SynthConfig& cfg) {
  if (cfg.n < cfg.classes || cfg.classes < 1)
    throw Error(ErrorCode::InvalidArgument, "need n >= classes >= 1");
  if (cfg.homophily < 0.0 || cfg.homophily > 1.0)
    throw Error(ErrorCode::InvalidArgument, "homophily outside [0, 1]");
  if (cfg.dim < 1 || cfg.mean_degree <= 0.0)
    throw Error(ErrorCode::InvalidArgument, "bad dimension or degree");
  if (cfg.classes == 1 && cfg.homophily < 1.0)
    throw Error(ErrorCode::InvalidArgument,
                "single class forces homophily 1");

  Dataset ds;
  ds.num_classes = cfg.classes;
  ds.labels.resize(cfg.n);
  std::vector<std::vector<Index>> members(cfg.classes);
  for (Index i = 0; i < cfg.n; ++i) {
    ds.labels[i] = i % cfg.classes;
    members[ds.labels[i]].push_back(i);
  }

  std::mt19937_64 rng(cfg.seed);
  std::poisson_distribution<Index> deg_dist(cfg.mean_degree);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto pick = [&rng](const std::vector<Index>& pool) {
    std::uniform_int_distribution<std::size_t> d(0, pool.size() - 1);
    return pool[d(rng)];
  };
  std::vector<std::pair<Index, Index>> edges;
  for (Index i = 0; i < cfg.n; ++i) {
    Index deg = deg_dist(rng);
    Index my_class = ds.labels[i];
    for (Index e = 0; e < deg; ++e) {
      Index target = i;
      if (cfg.classes == 1 || unif(rng) < cfg.homophily) {
        const auto& mine = members[my_class];
        if (mine.size() < 2) continue;
        do {
          target = pick(mine);
        } while (target == i);
      } else {
        std::uniform_int_distribution<Index> d(0, cfg.classes - 2);
        Index other = d(rng);
        if (other >= my_class) ++other;
        target = pick(members[other]);
      }
      edges.emplace_back(i, target);
    }
  }

  DenseMatrix x(cfg.n, cfg.dim);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (Index i = 0; i < cfg.n; ++i) {
    for (Index j = 0; j < cfg.dim; ++j) x(i, j) = noise(rng);
    x(i, ds.labels[i] % cfg.dim) += cfg.snr;
  }
  ds.graph = DiGraph::from_edges(cfg.n, edges, std::move(x));
  return ds;
}

std::vector<Split> make_splits(const std::vector<Index>& labels,
                               std::array<double, 3> ratios, int n_splits,
                               std::uint64_t seed) {
  double total = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(total - 1.0) > 1e-9)
    throw Error(ErrorCode::InvalidArgument, "split ratios must sum to 1");
  Index num_classes = 0;
  for (Index y : labels) num_classes = std::max(num_classes, y + 1);
  std::vector<std::vector<Index>> members(num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i)
    members[labels[i]].push_back(static_cast<Index>(i));

  std::vector<Split> splits;
  for (int s = 0; s < n_splits; ++s) {
    std::mt19937_64 rng(seed + 0x100000001ULL * static_cast<std::uint64_t>(s));
    Split sp;
    for (Index c = 0; c < num_classes; ++c) {
      std::vector<Index> order = members[c];
      std::shuffle(order.begin(), order.end(), rng);
      Index nc = static_cast<Index>(order.size());
      Index n_train = static_cast<Index>(std::floor(ratios[0] * nc + 0.5));
      Index n_val = static_cast<Index>(std::floor(ratios[1] * nc + 0.5));
      Index n_test = nc - n_train - n_val;
      if (n_train < 1 || n_val < 1 || n_test < 1)
        throw Error(ErrorCode::ClassTooSmall,
                    "class " + std::to_string(c) +
                        " cannot cover all three parts",
                    c);
      sp.train.insert(sp.train.end(), order.begin(), order.begin() + n_train);
      sp.val.insert(sp.val.end(), order.begin() + n_train,
                    order.begin() + n_train + n_val);
      sp.test.insert(sp.test.end(), order.begin() + n_train + n_val,
                     order.end());
    }
    std::sort(sp.train.begin(), sp.train.end());
    std::sort(sp.val.begin(), sp.val.end());
    std::sort(sp.test.begin(), sp.test.end());
    splits.push_back(std::move(sp));
  }
  return splits;
}

}  // namespace dgl::data
