// Command-line front end: solvers, identifiability analysis, and the Monte
// Carlo experiment families, all seed-reproducible.
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rsense/analysis.hpp"
#include "rsense/experiments.hpp"
#include "rsense/serialize.hpp"
#include "rsense/solvers.hpp"

namespace {

using namespace rsense;

int default_threads() {
  if (const char* env = std::getenv("ROBUST_SENSING_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

// Stage label included in runtime error messages so failures name the phase.
struct Stage {
  std::string name = "startup";
};

void add_solver_cfg(CLI::App* cmd, SolverConfig& cfg) {
  cmd->add_option("--delta", cfg.delta, "Reweighting offset (p2/p4)")
      ->capture_default_str();
  cmd->add_option("--epsilon", cfg.epsilon, "Relative-change stop threshold")
      ->capture_default_str();
  cmd->add_option("--rho", cfg.rho, "Splitting penalty (p1 family)")
      ->capture_default_str();
  cmd->add_option("--abs-tol", cfg.abs_tol, "Splitting absolute tolerance")
      ->capture_default_str();
  cmd->add_option("--rel-tol", cfg.rel_tol, "Splitting relative tolerance")
      ->capture_default_str();
  cmd->add_option("--max-iters", cfg.max_iters, "Iteration cap per pass")
      ->capture_default_str();
}

OutlierModel outlier_from_cli(const std::string& name) {
  if (name == "gaussian") return OutlierModel::kGaussianOutlier;
  if (name == "laplacian") return OutlierModel::kLaplacianOutlier;
  return outlier_model_from_name(name);
}

nlohmann::ordered_json subset_json(const SubsetSolution& sol) {
  nlohmann::ordered_json j;
  j["x_hat"] = std::vector<double>(sol.x.data(), sol.x.data() + sol.x.size());
  std::vector<int> support;
  for (int i : sol.support) support.push_back(i + 1);  // 1-based on disk
  j["support"] = support;
  j["s"] = sol.s;
  j["objective"] = sol.objective;
  j["had_rank_deficient_subset"] = sol.had_rank_deficient_subset;
  return j;
}

Matrix toeplitz_sigma(double sigma, double r, Eigen::Index dim) {
  Vector first_column(dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    first_column(j) = sigma * sigma * std::pow(r, static_cast<double>(j));
  return toeplitz_sqrt_pair(first_column).sigma;
}

double colored_lambda_auto(const Matrix& Sigma, int k, double factor) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(Sigma);
  const double trace_inv = es.eigenvalues().cwiseInverse().sum();
  return factor * std::sqrt(trace_inv / k);
}

struct SolveOpts {
  std::string method;
  std::string input;
  std::string out;
  std::string cov_path;
  double lambda = 0.0;
  bool lambda_auto = false;
  double sigma = 0.0;
  double factor = 1.34;
  double tau = 0.0;
  double toeplitz_r = 0.0;
  double feas_tol = 1e-8;
  int outer_iters = 1;
  int s = 0;
  std::vector<double> lambda_grid;
  SolverConfig cfg;
};

int run_solve(const SolveOpts& o, Stage& stage) {
  stage.name = "loading input";
  const SensingProblem p = load_problem(o.input);

  auto pick_lambda = [&](bool colored, const Matrix* Sigma) {
    if (o.lambda > 0.0) return o.lambda;
    if (!o.lambda_auto)
      throw ValidationError("pass --lambda or --lambda-auto with --sigma");
    if (!(o.sigma > 0.0))
      throw ValidationError("--lambda-auto requires --sigma > 0");
    if (colored) return colored_lambda_auto(*Sigma, p.k(), o.factor);
    return lambda_for_sigma(o.sigma, p.m(), o.factor);
  };

  stage.name = "solving";
  if (o.method == "p0-oracle") {
    const SubsetSolution sol = solve_p0_bruteforce(p, o.feas_tol);
    stage.name = "writing output";
    write_file(o.out, subset_json(sol).dump(2) + "\n");
    return 0;
  }
  if (o.method == "rsn-oracle") {
    if (o.s < 1) throw ValidationError("rsn-oracle requires --s >= 1");
    const SubsetSolution sol = solve_rsn_bruteforce(p, o.s);
    stage.name = "writing output";
    write_file(o.out, subset_json(sol).dump(2) + "\n");
    return 0;
  }
  if (o.method == "p3-path") {
    if (o.lambda_grid.empty())
      throw ValidationError("p3-path requires --lambda-grid");
    const std::vector<SolverOutput> path =
        solve_p3_path(p, o.lambda_grid, o.cfg);
    stage.name = "writing output";
    std::string body = "{\n\"lambda_grid\": [";
    for (size_t i = 0; i < o.lambda_grid.size(); ++i) {
      if (i) body += ", ";
      body += std::to_string(o.lambda_grid[i]);
    }
    body += "],\n\"path\": [\n";
    for (size_t i = 0; i < path.size(); ++i) {
      body += solver_output_to_json(path[i]);
      if (i + 1 < path.size()) body += ",";
      body += "\n";
    }
    body += "]\n}\n";
    write_file(o.out, body);
    return 0;
  }

  SolverOutput out;
  SolverConfig cfg = o.cfg;
  if (o.method == "ls") {
    out = solve_ls(p);
  } else if (o.method == "l1") {
    out = solve_l1(p, cfg);
  } else if (o.method == "huber") {
    double tau = o.tau;
    if (!(tau > 0.0)) {
      if (!(o.lambda_auto && o.sigma > 0.0))
        throw ValidationError("huber requires --tau or --lambda-auto --sigma");
      tau = o.factor * o.sigma;
    }
    out = solve_huber_scalar(p, tau, cfg);
  } else if (o.method == "p1") {
    out = solve_p1(p, cfg);
  } else if (o.method == "p2") {
    out = solve_p2(p, cfg, o.outer_iters);
  } else if (o.method == "p3" || o.method == "p4") {
    cfg.lambda = pick_lambda(false, nullptr);
    out = o.method == "p3" ? solve_p3(p, cfg) : solve_p4(p, cfg, o.outer_iters);
  } else if (o.method == "p3-colored" || o.method == "p4-colored") {
    Matrix Sigma;
    if (!o.cov_path.empty()) {
      stage.name = "loading covariance";
      Sigma = load_matrix(o.cov_path);
      if (o.lambda <= 0.0 && o.lambda_auto)
        cfg.lambda = colored_lambda_auto(Sigma, p.k(), o.factor);
    } else if (o.toeplitz_r > 0.0) {
      if (!(o.sigma > 0.0))
        throw ValidationError("--toeplitz-r requires --sigma > 0");
      Sigma = toeplitz_sigma(o.sigma, o.toeplitz_r,
                             static_cast<Eigen::Index>(p.k()) * p.m());
    } else {
      throw ValidationError("colored methods require --cov or --toeplitz-r");
    }
    stage.name = "solving";
    if (cfg.lambda <= 0.0) cfg.lambda = pick_lambda(true, &Sigma);
    out = o.method == "p3-colored"
              ? solve_p3_colored(p, Sigma, cfg)
              : solve_p4_colored(p, Sigma, cfg, o.outer_iters);
  } else {
    throw ValidationError("unknown method: " + o.method);
  }
  stage.name = "writing output";
  save_solver_output(out, o.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust sensing toolkit: estimators resilient to unreliable "
               "sensors, identifiability analysis, and reproducible "
               "experiment families."};
  app.require_subcommand(1);
  Stage stage;

  // ---- solve ----
  SolveOpts so;
  CLI::App* solve = app.add_subcommand("solve", "Run one estimator on a "
                                                "problem file");
  solve
      ->add_option("--method", so.method,
                   "ls|l1|huber|p1|p2|p3|p3-path|p4|p3-colored|p4-colored|"
                   "p0-oracle|rsn-oracle")
      ->required();
  solve->add_option("--input", so.input, "Problem JSON path")->required();
  solve->add_option("--out", so.out, "Output JSON path")->required();
  solve->add_option("--lambda", so.lambda, "Block penalty level");
  solve->add_flag("--lambda-auto", so.lambda_auto,
                  "Derive the penalty from --sigma (factor*sigma*sqrt(m); "
                  "colored: factor*sqrt(tr(Sigma^-1)/k))");
  solve->add_option("--sigma", so.sigma, "Noise level for --lambda-auto");
  solve->add_option("--factor", so.factor, "Penalty factor")
      ->capture_default_str();
  solve->add_option("--tau", so.tau, "Huber cutoff");
  solve->add_option("--outer-iters", so.outer_iters,
                    "Reweighting passes (p2/p4)")
      ->capture_default_str();
  solve->add_option("--lambda-grid", so.lambda_grid,
                    "Descending penalties for p3-path")
      ->delimiter(',');
  solve->add_option("--cov", so.cov_path, "Covariance matrix JSON (colored)");
  solve->add_option("--toeplitz-r", so.toeplitz_r,
                    "Toeplitz correlation for a sigma^2-scaled covariance");
  solve->add_option("--feas-tol", so.feas_tol, "Feasibility tolerance "
                                               "(p0-oracle)")
      ->capture_default_str();
  solve->add_option("--s", so.s, "Subset size (rsn-oracle)");
  add_solver_cfg(solve, so.cfg);
  solve->callback([&] { run_solve(so, stage); });

  // ---- check-unique ----
  struct {
    std::string input, out;
    int s = 0;
  } cu;
  CLI::App* check = app.add_subcommand(
      "check-unique", "Rank test: is the planted solution unique at this s?");
  check->add_option("--input", cu.input, "Problem JSON path")->required();
  check->add_option("--s", cu.s, "Reliable-subset size (requires s > k/2)")
      ->required();
  check->add_option("--out", cu.out, "Optional JSON report path");
  check->callback([&] {
    stage.name = "loading input";
    const SensingProblem p = load_problem(cu.input);
    stage.name = "rank check";
    const auto witness = check_uniqueness_rank(p, cu.s);
    nlohmann::ordered_json j;
    j["unique"] = !witness.has_value();
    if (witness) {
      std::vector<int> subset;
      for (int i : *witness) subset.push_back(i + 1);
      j["rank_deficient_subset"] = subset;
      std::cout << "non-unique: rank-deficient subset";
      for (int i : subset) std::cout << ' ' << i;
      std::cout << "\n";
    } else {
      std::cout << "unique\n";
    }
    if (!cu.out.empty()) {
      stage.name = "writing output";
      write_file(cu.out, j.dump(2) + "\n");
    }
  });

  // ---- falsify-range ----
  struct {
    std::string input, out;
    int s = 0;
    int trials = 1000;
    std::uint64_t seed = 0;
  } fr;
  CLI::App* falsify = app.add_subcommand(
      "falsify-range", "Randomized search for a range-condition violation");
  falsify->add_option("--input", fr.input, "Problem JSON path")->required();
  falsify->add_option("--s", fr.s, "Reliable-subset size")->required();
  falsify->add_option("--trials", fr.trials, "Sampling attempts")
      ->capture_default_str();
  falsify->add_option("--seed", fr.seed, "RNG seed")->required();
  falsify->add_option("--out", fr.out, "Optional JSON report path");
  falsify->callback([&] {
    stage.name = "loading input";
    const SensingProblem p = load_problem(fr.input);
    stage.name = "sampling";
    RngStream rng(fr.seed, 0);
    const auto ce = falsify_range_condition(p, fr.s, fr.trials, rng);
    nlohmann::ordered_json j;
    j["falsified"] = ce.has_value();
    if (ce) {
      std::vector<int> small;
      for (int i : ce->small_set) small.push_back(i + 1);
      j["small_set"] = small;
      j["v"] = std::vector<double>(ce->v.data(), ce->v.data() + ce->v.size());
      std::cout << "falsified: small set";
      for (int i : small) std::cout << ' ' << i;
      std::cout << "\n";
    } else {
      std::cout << "no counterexample found in " << fr.trials << " trials\n";
    }
    if (!fr.out.empty()) {
      stage.name = "writing output";
      write_file(fr.out, j.dump(2) + "\n");
    }
  });

  // ---- bound ----
  struct {
    int n = 0, m = 0, k = 0, s = 0;
    double alpha = 0.5;
  } bo;
  CLI::App* bound = app.add_subcommand(
      "bound", "Recovery-guarantee constants for one problem shape");
  bound->add_option("--n", bo.n)->required();
  bound->add_option("--m", bo.m)->required();
  bound->add_option("--k", bo.k)->required();
  bound->add_option("--s", bo.s)->required();
  bound->add_option("--alpha", bo.alpha, "Confidence split in (0,1)")
      ->capture_default_str();
  bound->callback([&] {
    stage.name = "bound";
    const RecoveryBound rb = recovery_bound_constants(bo.n, bo.m, bo.k, bo.s,
                                                      bo.alpha);
    std::cout << "beta " << rb.beta << "\ngamma " << rb.gamma << "\nbeta_star "
              << rb.beta_star << "\nc0 " << rb.c0 << "\napplicable "
              << (rb.applicable ? "yes" : "no") << "\n";
    if (rb.min_m)
      std::cout << "min_m " << *rb.min_m << "\n";
    else
      std::cout << "min_m n/a (beta <= beta_star)\n";
  });

  // ---- reduce-mcle ----
  struct {
    std::string input, out;
    int m = 0;
  } rm;
  CLI::App* reduce = app.add_subcommand(
      "reduce-mcle",
      "Embed a max-consistent-equations instance as a sensing problem");
  reduce->add_option("--input", rm.input, "Equation system JSON {C,d,m}")
      ->required();
  reduce->add_option("--out", rm.out, "Problem JSON path")->required();
  reduce->add_option("--m", rm.m, "Override block height (>= 2)");
  reduce->callback([&] {
    stage.name = "loading input";
    const EquationSystem eq = load_equation_system(rm.input);
    stage.name = "reduction";
    const SensingProblem p =
        mcle_to_rs(eq.C, eq.d, rm.m >= 2 ? rm.m : eq.m);
    stage.name = "writing output";
    save_problem(p, rm.out);
  });

  // ---- experiment families ----
  struct {
    std::vector<std::string> dims;
    int trials = 50;
    std::uint64_t seed = 0;
    int threads = default_threads();
    std::string out, manifest;
  } pd;
  CLI::App* phase = app.add_subcommand(
      "phase-diagram", "Recovery success over the (gamma, beta) grid");
  phase->add_option("--dims", pd.dims,
                    "Problem shapes NxM (repeatable; default 40x20 20x10)");
  phase->add_option("--trials", pd.trials, "Trials per cell")
      ->capture_default_str();
  phase->add_option("--seed", pd.seed, "RNG seed")->required();
  phase->add_option("--threads", pd.threads, "Worker threads")
      ->capture_default_str();
  phase->add_option("--out", pd.out, "CSV path")->required();
  phase->add_option("--manifest", pd.manifest,
                    "Manifest path (default: <out>.manifest.json)");
  phase->callback([&] {
    stage.name = "experiment setup";
    ExperimentSpec spec;
    spec.family = Family::kPhaseDiagram;
    for (const std::string& d : pd.dims) {
      const auto xpos = d.find('x');
      if (xpos == std::string::npos)
        throw ValidationError("--dims expects NxM, got: " + d);
      spec.phase_dims.emplace_back(std::stoi(d.substr(0, xpos)),
                                   std::stoi(d.substr(xpos + 1)));
    }
    spec.trials = pd.trials;
    spec.seed = pd.seed;
    spec.threads = pd.threads;
    stage.name = "running trials";
    const auto rows = run_phase_diagram(spec);
    stage.name = "writing output";
    write_file(pd.out, phase_csv(rows));
    write_file(pd.manifest.empty() ? pd.out + ".manifest.json" : pd.manifest,
               experiment_manifest(spec));
  });

  struct TableOpts {
    int n = 20, m = 4, k = 16;
    std::vector<int> s_list;
    std::vector<std::string> methods;
    int trials = 1000;
    std::uint64_t seed = 0;
    int threads = default_threads();
    double snr_db = 10.0;
    std::string outlier = "laplacian";
    double toeplitz_r = 0.0;
    std::string noise = "white";
    std::string out, manifest;
  };

  auto add_common = [&](CLI::App* cmd, TableOpts& t, bool noisy) {
    cmd->add_option("--n", t.n)->capture_default_str();
    cmd->add_option("--m", t.m)->capture_default_str();
    cmd->add_option("--k", t.k)->capture_default_str();
    cmd->add_option("--s-list", t.s_list, "Reliable counts to sweep")
        ->delimiter(',');
    cmd->add_option("--methods", t.methods, "Estimators to run")
        ->delimiter(',');
    cmd->add_option("--trials", t.trials, "Monte Carlo trials")
        ->capture_default_str();
    cmd->add_option("--seed", t.seed, "RNG seed")->required();
    cmd->add_option("--threads", t.threads, "Worker threads")
        ->capture_default_str();
    cmd->add_option("--out", t.out, "CSV path")->required();
    cmd->add_option("--manifest", t.manifest,
                    "Manifest path (default: <out>.manifest.json)");
    if (noisy) {
      cmd->add_option("--snr-db", t.snr_db, "Signal-to-noise ratio (dB)")
          ->capture_default_str();
      cmd->add_option("--outlier", t.outlier, "gaussian|laplacian")
          ->capture_default_str();
    }
  };

  auto fill_spec = [&](const TableOpts& t, Family family) {
    ExperimentSpec spec;
    spec.family = family;
    spec.n = t.n;
    spec.m = t.m;
    spec.k = t.k;
    spec.s_list = t.s_list;
    for (const std::string& name : t.methods)
      spec.methods.push_back(method_from_name(name));
    spec.trials = t.trials;
    spec.seed = t.seed;
    spec.threads = t.threads;
    spec.snr_db = t.snr_db;
    spec.outlier_model = outlier_from_cli(t.outlier);
    spec.toeplitz_r = t.toeplitz_r;
    return spec;
  };

  TableOpts rst;
  CLI::App* rs_table = app.add_subcommand(
      "rs-table", "Noise-free classification table (per-sensor %)");
  add_common(rs_table, rst, false);
  rs_table->callback([&] {
    stage.name = "experiment setup";
    ExperimentSpec spec = fill_spec(rst, Family::kRsTable);
    spec.outlier_model = OutlierModel::kNoiseFreeRandom;
    stage.name = "running trials";
    const auto rows = run_rs_table(spec);
    stage.name = "writing output";
    write_file(rst.out, table_csv(rows));
    write_file(rst.manifest.empty() ? rst.out + ".manifest.json" : rst.manifest,
               experiment_manifest(spec));
  });

  TableOpts rnt;
  rnt.n = 80;
  rnt.m = 8;
  rnt.k = 32;
  rnt.trials = 500;
  rnt.snr_db = 5.0;
  CLI::App* rsn_table = app.add_subcommand(
      "rsn-table", "Noisy classification table (per-sensor %)");
  add_common(rsn_table, rnt, true);
  rsn_table->callback([&] {
    stage.name = "experiment setup";
    const ExperimentSpec spec = fill_spec(rnt, Family::kRsnTable);
    stage.name = "running trials";
    const auto rows = run_rsn_table(spec);
    stage.name = "writing output";
    write_file(rnt.out, table_csv(rows));
    write_file(rnt.manifest.empty() ? rnt.out + ".manifest.json" : rnt.manifest,
               experiment_manifest(spec));
  });

  TableOpts mse;
  mse.outlier = "gaussian";
  CLI::App* mse_curve = app.add_subcommand(
      "mse-curve", "Estimation error E||x0 - x_hat||^2 per method and s");
  add_common(mse_curve, mse, true);
  mse_curve->add_option("--noise", mse.noise, "white|colored")
      ->capture_default_str();
  mse_curve->add_option("--toeplitz-r", mse.toeplitz_r,
                        "Correlation of the colored covariance (0.9 when "
                        "--noise colored and unset)");
  mse_curve->callback([&] {
    stage.name = "experiment setup";
    ExperimentSpec spec = fill_spec(mse, Family::kMseCurve);
    if (mse.noise == "colored") {
      if (spec.toeplitz_r <= 0.0) spec.toeplitz_r = 0.9;
    } else if (mse.noise != "white") {
      throw ValidationError("--noise must be white or colored");
    }
    stage.name = "running trials";
    const auto rows = run_mse_curve(spec);
    stage.name = "writing output";
    write_file(mse.out, mse_csv(rows));
    write_file(mse.manifest.empty() ? mse.out + ".manifest.json" : mse.manifest,
               experiment_manifest(spec));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error (" << stage.name << "): " << e.what() << "\n";
    return 1;
  }
  return 0;
}
