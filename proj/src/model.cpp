#include "dgl/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace dgl::gnn {

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "diglacian") return ModelKind::Diglacian;
  if (name == "diglacian-ct") return ModelKind::DiglacianCt;
  if (name == "adasage") return ModelKind::AdaSage;
  if (name == "gcn") return ModelKind::Gcn;
  if (name == "mlp") return ModelKind::Mlp;
  throw Error(ErrorCode::InvalidArgument, "unknown model kind: " + name);
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Diglacian: return "diglacian";
    case ModelKind::DiglacianCt: return "diglacian-ct";
    case ModelKind::AdaSage: return "adasage";
    case ModelKind::Gcn: return "gcn";
    case ModelKind::Mlp: return "mlp";
  }
  return "?";
}

namespace {

bool has_mixing(ModelKind kind) {
  return kind == ModelKind::Diglacian || kind == ModelKind::DiglacianCt ||
         kind == ModelKind::AdaSage;
}

}  // namespace

PropagationSet build_propagation(ModelKind kind, const DiGraph& g,
                                 const fpr::CombinatorialGraph& cg,
                                 const markov::PfprChain& chain,
                                 const markov::CommuteModel* commute) {
  PropagationSet props;
  switch (kind) {
    case ModelKind::Mlp:
      break;
    case ModelKind::Gcn: {
      // Symmetric normalization of the symmetrized original graph.
      SparseMatrix a_tilde = add_self_loops(symmetrize(g.adj));
      Vector d = out_degrees(a_tilde);
      Vector inv_sqrt = d.cwiseSqrt().cwiseInverse();
      props.undirected = scale_diag(a_tilde, inv_sqrt, inv_sqrt);
      break;
    }
    case ModelKind::Diglacian:
      props.undirected = row_normalize(symmetrize(cg.merged_loops));
      props.directed = markov::augmented_propagation_sparse(chain);
      break;
    case ModelKind::DiglacianCt:
      if (commute == nullptr)
        throw Error(ErrorCode::InvalidArgument,
                    "commute model required for diglacian-ct");
      props.undirected = row_normalize(symmetrize(cg.merged_loops));
      props.directed = commute->propagation;
      break;
    case ModelKind::AdaSage:
      props.undirected = row_normalize(symmetrize(cg.merged_loops));
      props.directed = row_normalize(cg.merged);
      break;
  }
  return props;
}

ModelParams init_params(ModelKind kind, Index in_dim, Index hidden,
                        Index classes, int layers, std::uint64_t seed) {
  if (layers < 1 || in_dim < 1 || hidden < 1 || classes < 1)
    throw Error(ErrorCode::InvalidArgument, "bad model dimensions");
  std::mt19937_64 rng(seed);
  auto glorot = [&rng](Index rows, Index cols) {
    double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
    std::uniform_real_distribution<double> unif(-a, a);
    DenseMatrix w(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) w(i, j) = unif(rng);
    return w;
  };
  ModelParams params;
  params.kind = kind;
  params.alpha = 0.5;
  params.beta = 0.5;
  for (int l = 0; l < layers; ++l) {
    Index d_in = l == 0 ? in_dim : hidden;
    Index d_out = l == layers - 1 ? classes : hidden;
    LayerParams lp;
    lp.w0 = glorot(d_in, d_out);
    if (has_mixing(kind)) lp.w1 = glorot(d_in, d_out);
    params.layers.push_back(std::move(lp));
  }
  return params;
}

ForwardResult forward(const DenseMatrix& x, const PropagationSet& props,
                      const ModelParams& params, double dropout,
                      std::mt19937_64* rng) {
  ForwardResult out;
  const int n_layers = static_cast<int>(params.layers.size());
  DenseMatrix h = x;
  for (int l = 0; l < n_layers; ++l) {
    const LayerParams& lp = params.layers[l];
    if (h.cols() != lp.w0.rows())
      throw Error(ErrorCode::ShapeMismatch,
                  "layer " + std::to_string(l) + " input width mismatch");
    LayerCache cache;
    if (rng != nullptr && dropout > 0.0) {
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      double keep_scale = 1.0 / (1.0 - dropout);
      cache.drop_mask = DenseMatrix(h.rows(), h.cols());
      for (Index i = 0; i < h.rows(); ++i)
        for (Index j = 0; j < h.cols(); ++j)
          cache.drop_mask(i, j) = unif(*rng) < dropout ? 0.0 : keep_scale;
      cache.dropped = h.cwiseProduct(cache.drop_mask);
    } else {
      cache.dropped = h;
    }

    DenseMatrix u;
    switch (params.kind) {
      case ModelKind::Mlp:
        u = cache.dropped * lp.w0;
        break;
      case ModelKind::Gcn:
        cache.prop_u = spmm(props.undirected, cache.dropped);
        u = cache.prop_u * lp.w0;
        break;
      default: {
        cache.prop_u = spmm(props.undirected, cache.dropped);
        cache.prop_m = spmm(props.directed, cache.dropped);
        DenseMatrix mixed =
            params.alpha * cache.prop_u + params.beta * cache.prop_m;
        u = cache.dropped * lp.w0 + mixed * lp.w1;
        break;
      }
    }
    cache.preact = u;
    if (l + 1 < n_layers) {
      h = u.cwiseMax(0.0);  // ReLU on hidden layers
    } else {
      out.logits = u;
    }
    out.cache.push_back(std::move(cache));
  }

  // Row softmax, shifted by the row max.
  out.probs = out.logits;
  for (Index i = 0; i < out.probs.rows(); ++i) {
    double mx = out.probs.row(i).maxCoeff();
    out.probs.row(i) = (out.probs.row(i).array() - mx).exp();
    out.probs.row(i) /= out.probs.row(i).sum();
  }
  return out;
}

double loss(const ForwardResult& fwd, const std::vector<Index>& labels,
            const std::vector<Index>& mask, const ModelParams& params,
            double weight_decay) {
  if (mask.empty()) throw Error(ErrorCode::EmptyMask, "empty loss mask");
  double ce = 0.0;
  for (Index i : mask) {
    // log-softmax from logits keeps tiny probabilities finite
    double mx = fwd.logits.row(i).maxCoeff();
    double lse = std::log((fwd.logits.row(i).array() - mx).exp().sum());
    ce -= fwd.logits(i, labels[i]) - mx - lse;
  }
  ce /= static_cast<double>(mask.size());
  double reg = 0.0;
  for (const auto& lp : params.layers) {
    reg += lp.w0.squaredNorm();
    if (lp.w1.size() > 0) reg += lp.w1.squaredNorm();
  }
  return ce + 0.5 * weight_decay * reg;
}

Gradients backward(const ForwardResult& fwd, const PropagationSet& props,
                   const ModelParams& params,
                   const std::vector<Index>& labels,
                   const std::vector<Index>& mask, double weight_decay) {
  if (mask.empty()) throw Error(ErrorCode::EmptyMask, "empty loss mask");
  const int n_layers = static_cast<int>(params.layers.size());
  Gradients grads;
  grads.layers.resize(n_layers);
  for (int l = 0; l < n_layers; ++l) {
    grads.layers[l].w0 = DenseMatrix::Zero(params.layers[l].w0.rows(),
                                           params.layers[l].w0.cols());
    if (params.layers[l].w1.size() > 0)
      grads.layers[l].w1 = DenseMatrix::Zero(params.layers[l].w1.rows(),
                                             params.layers[l].w1.cols());
  }

  // d(mean CE)/d(logits): (softmax - onehot) / |mask| on masked rows.
  DenseMatrix du = DenseMatrix::Zero(fwd.probs.rows(), fwd.probs.cols());
  double inv_m = 1.0 / static_cast<double>(mask.size());
  for (Index i : mask) {
    du.row(i) = fwd.probs.row(i) * inv_m;
    du(i, labels[i]) -= inv_m;
  }

  for (int l = n_layers - 1; l >= 0; --l) {
    const LayerParams& lp = params.layers[l];
    const LayerCache& cache = fwd.cache[l];
    LayerParams& g = grads.layers[l];

    DenseMatrix dh;  // gradient wrt the dropped layer input
    switch (params.kind) {
      case ModelKind::Mlp:
        g.w0 += cache.dropped.transpose() * du;
        dh = du * lp.w0.transpose();
        break;
      case ModelKind::Gcn:
        g.w0 += cache.prop_u.transpose() * du;
        dh = spmm_transposed(props.undirected, du * lp.w0.transpose());
        break;
      default: {
        g.w0 += cache.dropped.transpose() * du;
        DenseMatrix mixed =
            params.alpha * cache.prop_u + params.beta * cache.prop_m;
        g.w1 += mixed.transpose() * du;
        grads.alpha += (cache.prop_u * lp.w1).cwiseProduct(du).sum();
        grads.beta += (cache.prop_m * lp.w1).cwiseProduct(du).sum();
        DenseMatrix t1 = du * lp.w1.transpose();
        dh = du * lp.w0.transpose();
        dh += params.alpha * spmm_transposed(props.undirected, t1);
        dh += params.beta * spmm_transposed(props.directed, t1);
        break;
      }
    }
    if (cache.drop_mask.size() > 0) dh = dh.cwiseProduct(cache.drop_mask);
    if (l > 0) {
      const DenseMatrix& prev_pre = fwd.cache[l - 1].preact;
      du = dh.cwiseProduct(
          (prev_pre.array() > 0.0).cast<double>().matrix());
    }
  }

  for (int l = 0; l < n_layers; ++l) {
    grads.layers[l].w0 += weight_decay * params.layers[l].w0;
    if (params.layers[l].w1.size() > 0)
      grads.layers[l].w1 += weight_decay * params.layers[l].w1;
  }
  return grads;
}

namespace {

struct AdamState {
  std::vector<LayerParams> m, v;
  double m_alpha = 0.0, v_alpha = 0.0;
  double m_beta = 0.0, v_beta = 0.0;
  int step = 0;

  explicit AdamState(const ModelParams& params) {
    for (const auto& lp : params.layers) {
      LayerParams zm, zv;
      zm.w0 = DenseMatrix::Zero(lp.w0.rows(), lp.w0.cols());
      zv.w0 = zm.w0;
      if (lp.w1.size() > 0) {
        zm.w1 = DenseMatrix::Zero(lp.w1.rows(), lp.w1.cols());
        zv.w1 = zm.w1;
      }
      m.push_back(zm);
      v.push_back(zv);
    }
  }
};

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-8;

void adam_tensor(DenseMatrix& w, const DenseMatrix& g, DenseMatrix& m,
                 DenseMatrix& v, double lr, double bc1, double bc2) {
  m = kBeta1 * m + (1.0 - kBeta1) * g;
  v = kBeta2 * v + (1.0 - kBeta2) * g.cwiseProduct(g);
  DenseMatrix mhat = m / bc1;
  DenseMatrix vhat = v / bc2;
  w.array() -= lr * mhat.array() / (vhat.array().sqrt() + kEps);
}

void adam_scalar(double& w, double g, double& m, double& v, double lr,
                 double bc1, double bc2) {
  m = kBeta1 * m + (1.0 - kBeta1) * g;
  v = kBeta2 * v + (1.0 - kBeta2) * g * g;
  w -= lr * (m / bc1) / (std::sqrt(v / bc2) + kEps);
}

void adam_step(ModelParams& params, const Gradients& grads, AdamState& state,
               double lr) {
  ++state.step;
  double bc1 = 1.0 - std::pow(kBeta1, state.step);
  double bc2 = 1.0 - std::pow(kBeta2, state.step);
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    adam_tensor(params.layers[l].w0, grads.layers[l].w0, state.m[l].w0,
                state.v[l].w0, lr, bc1, bc2);
    if (params.layers[l].w1.size() > 0)
      adam_tensor(params.layers[l].w1, grads.layers[l].w1, state.m[l].w1,
                  state.v[l].w1, lr, bc1, bc2);
  }
  if (has_mixing(params.kind)) {
    adam_scalar(params.alpha, grads.alpha, state.m_alpha, state.v_alpha, lr,
                bc1, bc2);
    adam_scalar(params.beta, grads.beta, state.m_beta, state.v_beta, lr, bc1,
                bc2);
  }
}

double accuracy(const DenseMatrix& probs, const std::vector<Index>& labels,
                const std::vector<Index>& mask) {
  if (mask.empty()) throw Error(ErrorCode::EmptyMask, "empty evaluation mask");
  Index correct = 0;
  for (Index i : mask) {
    Index best = 0;
    for (Index c = 1; c < probs.cols(); ++c)
      if (probs(i, c) > probs(i, best)) best = c;  // ties keep lowest index
    if (best == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(mask.size());
}

}  // namespace

TrainResult train(ModelKind kind, const DenseMatrix& x,
                  const PropagationSet& props,
                  const std::vector<Index>& labels,
                  const std::vector<Index>& train_mask,
                  const std::vector<Index>& val_mask,
                  const TrainConfig& config) {
  Index classes = 0;
  for (Index y : labels) classes = std::max(classes, y + 1);
  ModelParams params = init_params(kind, x.cols(), config.hidden, classes,
                                   config.layers, config.seed);
  AdamState state(params);
  std::mt19937_64 dropout_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);

  TrainResult result;
  result.best = params;
  int since_best = 0;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    ForwardResult fwd =
        forward(x, props, params, config.dropout, &dropout_rng);
    double train_loss =
        loss(fwd, labels, train_mask, params, config.weight_decay);
    Gradients grads = backward(fwd, props, params, labels, train_mask,
                               config.weight_decay);
    adam_step(params, grads, state, config.lr);

    ForwardResult eval_fwd = forward(x, props, params);
    EpochStats stats;
    stats.train_loss = train_loss;
    stats.train_acc = accuracy(eval_fwd.probs, labels, train_mask);
    stats.val_loss = loss(eval_fwd, labels, val_mask, params, 0.0);
    stats.val_acc = accuracy(eval_fwd.probs, labels, val_mask);
    stats.alpha = params.alpha;
    stats.beta = params.beta;
    result.history.push_back(stats);

    if (stats.val_acc > result.best_val_acc || result.best_epoch < 0) {
      result.best_val_acc = stats.val_acc;
      result.best_epoch = epoch;
      result.best = params;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  return result;
}

double evaluate(const ModelParams& params, const DenseMatrix& x,
                const PropagationSet& props, const std::vector<Index>& labels,
                const std::vector<Index>& mask) {
  ForwardResult fwd = forward(x, props, params);
  return accuracy(fwd.probs, labels, mask);
}

}  // namespace dgl::gnn
