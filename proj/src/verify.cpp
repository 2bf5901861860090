#include "dgl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "dgl/graph.hpp"
#include "dgl/oracle.hpp"

namespace dgl::verify {

namespace {

DiGraph random_digraph(Index n, double mean_degree, Index dim,
                       bool negative_features, std::mt19937_64& rng) {
  std::poisson_distribution<Index> deg(mean_degree);
  std::uniform_int_distribution<Index> node(0, n - 1);
  std::vector<std::pair<Index, Index>> edges;
  for (Index i = 0; i < n; ++i) {
    Index d = deg(rng);
    for (Index e = 0; e < d; ++e) {
      Index j = node(rng);
      if (j != i) edges.emplace_back(i, j);
    }
  }
  DenseMatrix x(n, dim);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < dim; ++j) {
      double v = normal(rng);
      x(i, j) = negative_features ? v : std::abs(v);
    }
  return DiGraph::from_edges(n, edges, std::move(x));
}

struct Checker {
  Report report;

  void add(const std::string& name, bool pass, double residual,
           const std::string& details = "") {
    report.checks.push_back({name, pass, residual, details});
  }
};

std::string fmt_res(double r) {
  std::ostringstream out;
  out.precision(3);
  out << std::scientific << r;
  return out.str();
}

}  // namespace

Instance random_instance(const InstanceSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  Instance inst;
  inst.graph = random_digraph(spec.n, spec.mean_degree, 8,
                              spec.negative_features, rng);
  inst.combinatorial =
      fpr::build_combinatorial(inst.graph, spec.k, spec.seed);
  inst.chain = markov::make_chain(inst.combinatorial, spec.power_iterations,
                                  spec.power_tol);
  return inst;
}

Report run_suite(const Options& opts) {
  Checker c;

  // -- stationary distribution: power iteration vs dense solve, residual
  //    within the 30-iteration default, degree form on undirected chains
  {
    double worst_l1 = 0.0, worst_res = 0.0;
    int worst_iters = 0;
    bool pass_l1 = true, pass_res = true;
    for (int t = 0; t < 10; ++t) {
      InstanceSpec spec;
      spec.n = 20 + 17 * t;
      spec.seed = opts.seed + t;
      spec.negative_features = t % 2 == 1;
      spec.power_iterations = 30;
      spec.power_tol = 1e-12;
      Instance inst = random_instance(spec);
      Vector pi = inst.chain.stationary;
      if (opts.inject_pi_perturbation) {
        pi[0] += 1e-3;
        pi /= pi.sum();
      }
      Vector pi_oracle = oracle::stationary_dense(inst.chain.transition);
      worst_l1 = std::max(worst_l1, (pi - pi_oracle).lpNorm<1>());
      double res =
          (spmv_left(inst.chain.transition, pi) - pi).lpNorm<1>();
      worst_res = std::max(worst_res, res);
      worst_iters = std::max(worst_iters, inst.chain.iterations_used);
      pass_l1 = pass_l1 && worst_l1 < 1e-8;
      pass_res = pass_res && worst_res < 1e-8;
    }
    c.add("stationary_power_vs_dense", pass_l1, worst_l1);
    c.add("stationary_residual_30_iters", pass_res, worst_res,
          "max iterations used " + std::to_string(worst_iters));
  }
  {
    double worst = 0.0;
    for (int t = 0; t < 5; ++t) {
      std::mt19937_64 rng(opts.seed + 100 + t);
      DiGraph g = random_digraph(30 + 11 * t, 6.0, 4, false, rng);
      SparseMatrix und = add_self_loops(element_max(g.adj, g.adj.transposed()));
      Vector deg = out_degrees(und);
      auto chain = markov::stationary_distribution(row_normalize(und), deg,
                                                   400, 1e-14);
      Vector closed = deg / deg.sum();
      worst = std::max(
          worst, (chain.stationary - closed).lpNorm<Eigen::Infinity>());
    }
    c.add("stationary_undirected_degree_form", worst < 1e-10, worst);
  }

  // -- fundamental matrix: both routes, annihilators, operator simplification
  {
    double worst_eq = 0.0, worst_ann = 0.0, worst_simpl = 0.0,
           worst_null = 0.0;
    for (int t = 0; t < 12; ++t) {
      InstanceSpec spec;
      spec.n = 8 + 13 * t;
      spec.seed = opts.seed + 200 + t;
      spec.negative_features = t % 3 == 0;
      spec.k = t % 2 == 0 ? 2 : 4;
      Instance inst = random_instance(spec);
      SparseMatrix tl = markov::diglacian(inst.chain);
      DenseMatrix zd = markov::fundamental_matrix_dense(inst.chain);
      DenseMatrix zs = markov::fundamental_matrix_sparse(inst.chain, tl);
      worst_eq = std::max(worst_eq, (zd - zs).cwiseAbs().maxCoeff());

      const Vector& pi = inst.chain.stationary;
      for (const DenseMatrix* z : {&zd, &zs}) {
        worst_ann = std::max(worst_ann,
                             (*z * Vector::Ones(z->rows())).lpNorm<Eigen::Infinity>());
        worst_ann = std::max(
            worst_ann, (z->transpose() * pi).lpNorm<Eigen::Infinity>());
      }

      SparseMatrix m1 = markov::sparse_path_operator(inst.chain, tl);
      SparseMatrix m2 = markov::sparse_path_operator_simplified(inst.chain);
      worst_simpl = std::max(
          worst_simpl, (m1.to_dense() - m2.to_dense()).cwiseAbs().maxCoeff());

      Vector right = pi.cwiseSqrt();
      worst_null =
          std::max(worst_null, spmv(m1, right).lpNorm<Eigen::Infinity>());
      worst_null = std::max(worst_null,
                            spmv_left(m1, right).lpNorm<Eigen::Infinity>());
    }
    c.add("theorem31_sparse_vs_dense", worst_eq < 1e-6, worst_eq);
    c.report.theorem31_max_residual = worst_eq;
    c.add("fundamental_annihilators", worst_ann < 1e-8, worst_ann);
    c.add("sparse_operator_simplification", worst_simpl < 1e-12, worst_simpl);
    c.add("sparse_operator_nullspace", worst_null < 1e-10, worst_null);
  }

  // -- hitting times: closed form vs absorbing system vs walk simulation
  {
    double worst_rel = 0.0, worst_sigma = 0.0;
    for (int t = 0; t < 5; ++t) {
      InstanceSpec spec;
      spec.n = 8 + 5 * t;
      spec.seed = opts.seed + 300 + t;
      spec.mean_degree = 5.0;
      Instance inst = random_instance(spec);
      DenseMatrix z = markov::fundamental_matrix_dense(inst.chain);
      DenseMatrix h = markov::hitting_times(z, inst.chain);
      Index n = inst.chain.transition.rows;
      for (Index j = 0; j < std::min<Index>(n, 3); ++j) {
        Vector hj = oracle::hitting_linear_system(inst.chain.transition, j);
        for (Index i = 0; i < n; ++i) {
          if (i == j) continue;
          double rel = std::abs(h(i, j) - hj[i]) /
                       std::max(1.0, std::abs(hj[i]));
          worst_rel = std::max(worst_rel, rel);
        }
      }
      auto est = oracle::monte_carlo_hitting(inst.chain.transition, 0,
                                             n - 1, 20000,
                                             opts.seed + 900 + t);
      double sigma = std::abs(h(0, n - 1) - est.mean) /
                     std::max(est.std_error, 1e-12);
      worst_sigma = std::max(worst_sigma, sigma);
    }
    c.add("hitting_closed_vs_linear_system", worst_rel < 1e-8, worst_rel);
    c.add("hitting_vs_monte_carlo", worst_sigma < 3.0, worst_sigma,
          "max deviation in standard errors");
  }

  // -- spectral operator: spectrum box, complement identity, rayleigh
  {
    double worst_sym = 0.0, worst_comp = 0.0, worst_ray = 0.0;
    bool box = true, recon = true;
    std::mt19937_64 rng(opts.seed + 400);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int t = 0; t < 8; ++t) {
      InstanceSpec spec;
      spec.n = 15 + 20 * t;
      spec.seed = opts.seed + 400 + t;
      spec.negative_features = t % 2 == 0;
      Instance inst = random_instance(spec);
      auto rep = oracle::dense_operator_check(inst.chain);
      box = box && rep.box_holds;
      recon = recon && rep.reconstruction_residual < 1e-8;
      worst_sym = std::max(worst_sym, rep.symmetry_residual);

      DenseMatrix tn = markov::normalized_diglacian(inst.chain);
      DenseMatrix tp = markov::augmented_propagation(inst.chain);
      DenseMatrix sum = tn + tp;
      sum.diagonal() -= 2.0 * inst.chain.degrees.cwiseInverse();
      worst_comp = std::max(worst_comp, sum.cwiseAbs().maxCoeff());

      for (int r = 0; r < 4; ++r) {
        Vector f(inst.chain.transition.rows);
        for (Index i = 0; i < f.size(); ++i) f[i] = normal(rng);
        auto [def, closed] = markov::rayleigh_quotient_forms(f, inst.chain);
        worst_ray = std::max(worst_ray, std::abs(def - closed));
      }
    }
    c.add("operator_spectrum_box", box, worst_sym,
          "symmetry residual reported");
    c.add("operator_reconstruction", recon, 0.0);
    c.add("operator_complement_identity", worst_comp < 1e-10, worst_comp);
    c.add("rayleigh_identity", worst_ray < 1e-10, worst_ray);
  }

  // -- regular-chain diameter bound
  {
    bool holds = true;
    double worst_gap = 0.0;
    for (Index n : {8, 16, 24, 32}) {
      // complete graph with self-loops: regular with degree n
      std::vector<std::pair<Index, Index>> edges;
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
          if (i != j) edges.emplace_back(i, j);
      DiGraph g = DiGraph::from_edges(n, edges);
      SparseMatrix at = add_self_loops(g.adj);
      auto chain = markov::stationary_distribution(
          row_normalize(at), out_degrees(at), 200, 1e-14);
      auto bound = markov::diameter_bound_check(chain);
      holds = holds && bound.holds;
      worst_gap = std::max(
          worst_gap, static_cast<double>(bound.diameter) - bound.bound);
    }
    c.add("diameter_bound_regular", holds, worst_gap,
          "diameter minus bound (negative = slack)");
  }

  // -- construction invariants: connectivity, sparsity budget, stochastic
  //    commute propagation, auxiliary orthogonality
  {
    bool connected = true, aperiodic = true, sparsity = true;
    double worst_rows = 0.0;
    for (int t = 0; t < 20; ++t) {
      InstanceSpec spec;
      spec.n = 10 + 9 * t;
      spec.seed = opts.seed + 500 + t;
      spec.negative_features = t % 2 == 1;
      spec.k = t % 3 == 0 ? 4 : 2;
      spec.mean_degree = 3.0;
      Instance inst = random_instance(spec);
      connected =
          connected && is_strongly_connected(inst.combinatorial.merged_loops);
      aperiodic = aperiodic && is_aperiodic(inst.combinatorial.merged_loops);
      Index budget = inst.graph.num_edges() +
                     2 * inst.graph.n * inst.combinatorial.k + inst.graph.n;
      sparsity = sparsity && inst.combinatorial.merged_loops.nnz() <= budget;

      if (t < 6) {
        auto model = markov::build_commute_model(inst.chain, 0.5);
        for (Index i = 0; i < model.propagation.rows; ++i) {
          double s = 0.0;
          for (double v : model.propagation.row_values(i)) s += v;
          worst_rows = std::max(worst_rows, std::abs(s - 1.0));
        }
      }
    }
    c.add("pfpr_strongly_connected", connected, 0.0);
    c.add("pfpr_aperiodic", aperiodic, 0.0);
    c.add("pfpr_sparsity_budget", sparsity, 0.0,
          "nnz <= |E| + 2Nk + N on every build");
    c.add("commute_propagation_stochastic", worst_rows < 1e-12, worst_rows);
  }
  {
    double worst = 0.0;
    std::mt19937_64 rng(opts.seed + 600);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
      Vector xbar(6);
      for (Index i = 0; i < 6; ++i) xbar[i] = normal(rng);
      xbar /= xbar.norm();
      Vector a = fpr::auxiliary_vector(xbar, opts.seed + t);
      worst = std::max(worst, std::abs(a.dot(xbar)));
    }
    c.add("auxiliary_orthogonality", worst < 1e-10, worst);
  }

  c.report.all_pass = true;
  for (auto& check : c.report.checks) {
    if (check.details.empty()) check.details = "residual " + fmt_res(check.residual);
    c.report.all_pass = c.report.all_pass && check.pass;
  }
  return c.report;
}

}  // namespace dgl::verify
