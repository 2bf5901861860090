#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dgl/graph.hpp"
#include "dgl/markov.hpp"
#include "dgl/sparse.hpp"
#include "dgl/types.hpp"

namespace dgl::gnn {

enum class ModelKind { Diglacian, DiglacianCt, AdaSage, Gcn, Mlp };

ModelKind model_kind_from_string(const std::string& name);
std::string to_string(ModelKind kind);

// Operators consumed by one layer. `undirected` is the row-normalized
// symmetrized combinatorial adjacency with self-loops (or the symmetric GCN
// normalization for the baseline); `directed` is the model-specific directed
// operator and stays empty for GCN / MLP.
struct PropagationSet {
  SparseMatrix undirected;
  SparseMatrix directed;
};

PropagationSet build_propagation(
    ModelKind kind, const DiGraph& g, const fpr::CombinatorialGraph& cg,
    const markov::PfprChain& chain,
    const markov::CommuteModel* commute = nullptr);

struct LayerParams {
  DenseMatrix w0;
  DenseMatrix w1;  // 0x0 for kinds without a propagation term
};

struct ModelParams {
  ModelKind kind = ModelKind::Diglacian;
  std::vector<LayerParams> layers;
  double alpha = 0.5;
  double beta = 0.5;
};

struct TrainConfig {
  int layers = 2;
  int hidden = 64;
  double lr = 0.01;
  double weight_decay = 5e-4;
  double dropout = 0.5;
  int patience = 500;
  int max_epochs = 1000;
  std::uint64_t seed = 0;
};

// Glorot-initialized parameters; alpha = beta = 0.5.
ModelParams init_params(ModelKind kind, Index in_dim, Index hidden,
                        Index classes, int layers, std::uint64_t seed);

struct LayerCache {
  DenseMatrix dropped;     // layer input after dropout
  DenseMatrix drop_mask;   // inverted-scaling factors; 0x0 when not dropping
  DenseMatrix prop_u;      // P_u * dropped
  DenseMatrix prop_m;      // M * dropped
  DenseMatrix preact;
};

struct ForwardResult {
  DenseMatrix logits;  // final pre-softmax activations
  DenseMatrix probs;   // row-softmax of logits
  std::vector<LayerCache> cache;
};

// All intermediate activations are retained for backward. Dropout applies to
// the input of every layer (including X) only when `rng` is provided.
ForwardResult forward(const DenseMatrix& x, const PropagationSet& props,
                      const ModelParams& params, double dropout = 0.0,
                      std::mt19937_64* rng = nullptr);

double loss(const ForwardResult& fwd, const std::vector<Index>& labels,
            const std::vector<Index>& mask, const ModelParams& params,
            double weight_decay);

struct Gradients {
  std::vector<LayerParams> layers;  // same shapes as params
  double alpha = 0.0;
  double beta = 0.0;
};

Gradients backward(const ForwardResult& fwd, const PropagationSet& props,
                   const ModelParams& params,
                   const std::vector<Index>& labels,
                   const std::vector<Index>& mask, double weight_decay);

struct EpochStats {
  double train_loss = 0.0;
  double train_acc = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

struct TrainResult {
  ModelParams best;             // best-validation snapshot, not last epoch
  std::vector<EpochStats> history;
  int best_epoch = -1;
  double best_val_acc = 0.0;
};

TrainResult train(ModelKind kind, const DenseMatrix& x,
                  const PropagationSet& props,
                  const std::vector<Index>& labels,
                  const std::vector<Index>& train_mask,
                  const std::vector<Index>& val_mask,
                  const TrainConfig& config);

// Fraction of masked nodes whose argmax prediction (ties to the lowest class
// index) matches the label. EmptyMask on an empty mask.
double evaluate(const ModelParams& params, const DenseMatrix& x,
                const PropagationSet& props, const std::vector<Index>& labels,
                const std::vector<Index>& mask);

}  // namespace dgl::gnn
