#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dgl/graph.hpp"
#include "dgl/types.hpp"

namespace dgl::data {

struct Split {
  std::vector<Index> train, val, test;
};

struct Dataset {
  DiGraph graph;
  std::vector<Index> labels;
  Index num_classes = 0;
  std::vector<Split> splits;
  Index duplicate_edges_dropped = 0;
  Index self_loops_dropped = 0;
};

// On-disk formats: edges as "src<TAB>dst" integer lines, features as TSV
// doubles, labels as one integer per line, splits as a JSON array of
// {"train": [...], "val": [...], "test": [...]} objects (a bare object is
// accepted as a single split). Writers emit shortest round-trip decimals so
// save(load(x)) is byte-identical for canonical files.
Dataset load_dataset(const std::string& edge_path,
                     const std::string& feature_path,
                     const std::string& label_path,
                     const std::string& split_path = "");

void save_dataset(const Dataset& ds, const std::string& edge_path,
                  const std::string& feature_path,
                  const std::string& label_path,
                  const std::string& split_path = "");

// Fraction of directed edges whose endpoints share a class.
double edge_homophily(const DiGraph& g, const std::vector<Index>& labels);

struct SynthConfig {
  Index n = 1000;
  Index classes = 4;
  double homophily = 0.2;
  double mean_degree = 8.0;
  Index dim = 32;
  double snr = 2.0;  // class-mean magnitude against unit feature noise
  std::uint64_t seed = 0;
};

// Directed planted partition: per out-stub, intra-class with probability h,
// otherwise a uniform other class. Features are class means (snr * e_c
// embedded in `dim`) plus unit Gaussian noise.
Dataset generate_synthetic(const SynthConfig& cfg);

// Per-class stratified splits, deterministic in (seed, split index).
std::vector<Split> make_splits(const std::vector<Index>& labels,
                               std::array<double, 3> ratios, int n_splits,
                               std::uint64_t seed);

}  // namespace dgl::data
