#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dgl/data.hpp"
#include "dgl/fpr.hpp"
#include "dgl/markov.hpp"
#include "dgl/types.hpp"

namespace dgl::verify {

// One random pipeline instance: digraph with features, its feature-aware
// merge, and the chain with a tightly converged stationary vector.
struct Instance {
  DiGraph graph;
  fpr::CombinatorialGraph combinatorial;
  markov::PfprChain chain;
};

struct InstanceSpec {
  Index n = 50;
  double mean_degree = 8.0;
  Index k = 2;
  bool negative_features = false;
  std::uint64_t seed = 0;
  int power_iterations = 300;
  double power_tol = 1e-13;
};

Instance random_instance(const InstanceSpec& spec);

struct CheckResult {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  std::string details;
};

struct Options {
  std::uint64_t seed = 1;
  bool inject_pi_perturbation = false;  // negative-control hook
};

struct Report {
  std::vector<CheckResult> checks;
  bool all_pass = false;
  double theorem31_max_residual = 0.0;
};

// Runs every oracle cross-check and chain invariant on freshly generated
// random instances. Sized to finish within a few minutes.
Report run_suite(const Options& opts);

}  // namespace dgl::verify
