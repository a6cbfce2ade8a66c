#include "rsense/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "rsense/solvers.hpp"

namespace rsense {

namespace {

constexpr double kSuccessTol = 1e-4;  // recovery and residual-rule threshold

const std::pair<Method, const char*> kMethodNames[] = {
    {Method::kLs, "ls"},
    {Method::kGaLs, "ga-ls"},
    {Method::kL1, "l1"},
    {Method::kHuber, "huber"},
    {Method::kP1, "p1"},
    {Method::kP2, "p2"},
    {Method::kP3, "p3"},
    {Method::kP4, "p4"},
    {Method::kP3Colored, "p3-colored"},
    {Method::kP4Colored, "p4-colored"},
};

double sigma_from_snr(double snr_db) { return std::pow(10.0, -snr_db / 20.0); }

// Ten compression ratios evenly spaced in (0.1, 1].
std::vector<double> gamma_grid() {
  std::vector<double> g;
  for (int j = 1; j <= 10; ++j) g.push_back(0.1 + 0.09 * j);
  return g;
}

std::string family_name(Family f) {
  switch (f) {
    case Family::kPhaseDiagram: return "phase-diagram";
    case Family::kRsTable: return "rs-table";
    case Family::kMseCurve: return "mse-curve";
    case Family::kRsnTable: return "rsn-table";
  }
  throw std::logic_error("unknown family");
}

// Fill in the per-family default grids so runners and manifest agree.
ExperimentSpec resolved(ExperimentSpec spec) {
  switch (spec.family) {
    case Family::kPhaseDiagram:
      if (spec.phase_dims.empty()) spec.phase_dims = {{40, 20}, {20, 10}};
      break;
    case Family::kRsTable:
      if (spec.s_list.empty()) spec.s_list = {8, 10, 12, 14, 16};
      if (spec.methods.empty())
        spec.methods = {Method::kGaLs, Method::kLs, Method::kL1, Method::kP1,
                        Method::kP2};
      break;
    case Family::kRsnTable:
      if (spec.s_list.empty()) spec.s_list = {16, 20, 24, 28, 32};
      if (spec.methods.empty())
        spec.methods = {Method::kGaLs, Method::kLs,  Method::kL1,
                        Method::kHuber, Method::kP1, Method::kP2,
                        Method::kP3,    Method::kP4};
      break;
    case Family::kMseCurve:
      if (spec.s_list.empty())
        for (int s = 8; s <= 16; ++s) spec.s_list.push_back(s);
      if (spec.methods.empty()) {
        spec.methods = {Method::kGaLs, Method::kLs,  Method::kL1,
                        Method::kHuber, Method::kP1, Method::kP2,
                        Method::kP3,    Method::kP4};
        if (spec.toeplitz_r > 0.0) {
          spec.methods.push_back(Method::kP3Colored);
          spec.methods.push_back(Method::kP4Colored);
        }
      }
      break;
  }
  return spec;
}

SolverOutput genie_aided_ls(const SensingProblem& p) {
  if (!p.truth().has_value())
    throw ValidationError("genie-aided LS needs the planted reliable set");
  const auto& rel = p.truth()->reliable_set;
  const int m = p.m();
  Matrix A_S(static_cast<Eigen::Index>(rel.size()) * m, p.n());
  Vector b_S(static_cast<Eigen::Index>(rel.size()) * m);
  for (size_t j = 0; j < rel.size(); ++j) {
    A_S.middleRows(static_cast<Eigen::Index>(j) * m, m) = p.block_A(rel[j]);
    b_S.segment(static_cast<Eigen::Index>(j) * m, m) = p.block_b(rel[j]);
  }
  SolverOutput out;
  out.x_hat = least_squares(A_S, b_S);
  out.residual_norms = p.block_residual_norms(out.x_hat);
  out.converged = true;
  return out;
}

// Per-run penalty context shared by every method on one problem shape.
struct MethodParams {
  double sigma = 0.0;
  double lambda_factor = 1.34;
  const Matrix* Sigma = nullptr;  // colored aggregate covariance (km x km)
  double lambda_colored = 0.0;
};

SolverOutput run_method(const SensingProblem& p, Method method,
                        const MethodParams& mp) {
  SolverConfig cfg;
  switch (method) {
    case Method::kLs:
      return solve_ls(p);
    case Method::kGaLs:
      return genie_aided_ls(p);
    case Method::kL1:
      return solve_l1(p);
    case Method::kHuber:
      return solve_huber_scalar(p, mp.lambda_factor * mp.sigma);
    case Method::kP1:
      return solve_p1(p);
    case Method::kP2:
      return solve_p2(p, cfg, 1);
    case Method::kP3:
      cfg.lambda = lambda_for_sigma(mp.sigma, p.m(), mp.lambda_factor);
      return solve_p3(p, cfg);
    case Method::kP4:
      cfg.lambda = lambda_for_sigma(mp.sigma, p.m(), mp.lambda_factor);
      return solve_p4(p, cfg, 1);
    case Method::kP3Colored:
      if (!mp.Sigma)
        throw ValidationError("p3-colored requires a noise covariance");
      cfg.lambda = mp.lambda_colored;
      return solve_p3_colored(p, *mp.Sigma, cfg);
    case Method::kP4Colored:
      if (!mp.Sigma)
        throw ValidationError("p4-colored requires a noise covariance");
      cfg.lambda = mp.lambda_colored;
      return solve_p4_colored(p, *mp.Sigma, cfg, 1);
  }
  throw std::logic_error("unknown method");
}

void check_noise_free_methods(const std::vector<Method>& methods) {
  for (Method m : methods)
    if (m == Method::kHuber || m == Method::kP3 || m == Method::kP4 ||
        m == Method::kP3Colored || m == Method::kP4Colored)
      throw ValidationError("method " + method_name(m) +
                            " needs a noise level; not available in the "
                            "noise-free table family");
}

// Runs body(i) for i in [0, count) across the given thread count; exceptions
// are captured and rethrown on the caller thread. Aggregation stays with the
// caller, so scheduling cannot affect results.
void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr err;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!err) err = std::current_exception();
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

struct ColoredContext {
  Matrix Sigma;
  Matrix cov_sqrt;
  double lambda_colored = 0.0;
};

// sigma^2-scaled Toeplitz(r) aggregate covariance for a km-tall stack. The
// colored penalty mirrors the white-noise rule 1.34*sigma*sqrt(m): it is 1.34
// times the RMS norm of a reliable block of the whitened-domain gradient
// Sigma^{-1} e, i.e. 1.34*sqrt(tr(Sigma^{-1})/k), which reduces to exactly
// 1.34*sqrt(m)*sigma at Sigma = sigma^2 I.
ColoredContext colored_context(int m, int k, double sigma, double r,
                               double lambda_factor) {
  Vector first_column(static_cast<Eigen::Index>(k) * m);
  for (Eigen::Index j = 0; j < first_column.size(); ++j)
    first_column(j) = sigma * sigma * std::pow(r, static_cast<double>(j));
  ToeplitzSqrtPair tsp = toeplitz_sqrt_pair(first_column);
  ColoredContext ctx;
  ctx.Sigma = std::move(tsp.sigma);
  ctx.cov_sqrt = std::move(tsp.sqrt);
  ctx.lambda_colored =
      lambda_factor * std::sqrt(tsp.inverse_sqrt.squaredNorm() / k);
  return ctx;
}

std::string format_row(const char* fmt, ...) {
  char buf[256];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

}  // namespace

std::string method_name(Method m) {
  for (const auto& [method, name] : kMethodNames)
    if (method == m) return name;
  throw std::logic_error("unknown method");
}

Method method_from_name(const std::string& name) {
  for (const auto& [method, mname] : kMethodNames)
    if (name == mname) return method;
  throw ValidationError("unknown method name: " + name);
}

void ExperimentSpec::validate() const {
  if (trials < 1) throw ValidationError("experiment: trials must be >= 1");
  if (threads < 1) throw ValidationError("experiment: threads must be >= 1");
  if (family == Family::kPhaseDiagram) {
    for (const auto& [pn, pm] : phase_dims)
      if (pn < 1 || pm < 1)
        throw ValidationError("experiment: phase dims must be positive");
  } else {
    if (n < 1 || m < 1 || k < 1)
      throw ValidationError("experiment: dims must be positive");
    for (int s : s_list)
      if (s < 1 || s > k)
        throw ValidationError("experiment: s values must lie in [1, k]");
  }
  if (!std::isfinite(snr_db)) throw ValidationError("experiment: bad snr_db");
  if (toeplitz_r < 0.0 || toeplitz_r >= 1.0)
    throw ValidationError("experiment: toeplitz_r must lie in [0, 1)");
}

SensingProblem generate_rs_instance(int n, int m, int k, int s,
                                    RngStream& rng) {
  if (n < 1 || m < 1 || k < 1)
    throw ValidationError("generate_rs_instance: dims must be positive");
  if (s < 1 || s > k)
    throw ValidationError("generate_rs_instance: s must lie in [1, k]");
  const Eigen::Index km = static_cast<Eigen::Index>(k) * m;
  Matrix A = rng.gaussian_matrix(km, n);
  const Vector x0 = rng.gaussian_vector(n, 0.0, 1.0 / std::sqrt(n));
  Vector b(km);
  for (int i = 0; i < k; ++i) {
    if (i < s)
      b.segment(static_cast<Eigen::Index>(i) * m, m) =
          A.middleRows(static_cast<Eigen::Index>(i) * m, m) * x0;
    else
      b.segment(static_cast<Eigen::Index>(i) * m, m) = rng.gaussian_vector(m);
  }
  GroundTruth truth;
  truth.x0 = x0;
  for (int i = 0; i < s; ++i) truth.reliable_set.push_back(i);
  truth.sigma = 0.0;
  truth.model = OutlierModel::kNoiseFreeRandom;
  return SensingProblem(n, m, k, std::move(A), std::move(b), std::move(truth));
}

SensingProblem generate_rsn_instance(int n, int m, int k, int s, double sigma,
                                     OutlierModel model, RngStream& rng,
                                     const Matrix* cov_sqrt) {
  if (n < 1 || m < 1 || k < 1)
    throw ValidationError("generate_rsn_instance: dims must be positive");
  if (s < 1 || s > k)
    throw ValidationError("generate_rsn_instance: s must lie in [1, k]");
  if (!(sigma > 0.0))
    throw ValidationError("generate_rsn_instance: sigma must be > 0");
  if (model == OutlierModel::kNoiseFreeRandom)
    throw ValidationError(
        "generate_rsn_instance: pick an outlier model (gaussian or laplacian)");
  const Eigen::Index km = static_cast<Eigen::Index>(k) * m;
  if (cov_sqrt && (cov_sqrt->rows() != km || cov_sqrt->cols() != km))
    throw DimensionError("generate_rsn_instance: covariance must be km x km");

  Matrix A = rng.gaussian_matrix(km, n);
  const Vector x0 = Vector::Constant(n, 1.0 / std::sqrt(n));
  Vector b(km);
  const double outlier_std = std::sqrt(sigma * sigma + 1.0);
  if (cov_sqrt) {
    // One aggregate draw across the whole stack.
    const Vector noise = (*cov_sqrt) * rng.gaussian_vector(km);
    for (int i = 0; i < k; ++i) {
      const Eigen::Index off = static_cast<Eigen::Index>(i) * m;
      if (i < s)
        b.segment(off, m) = A.middleRows(off, m) * x0 + noise.segment(off, m);
      else if (model == OutlierModel::kGaussianOutlier)
        b.segment(off, m) = rng.gaussian_vector(m) + noise.segment(off, m);
      else
        b.segment(off, m) = rng.laplacian_vector(m, 0.0, outlier_std);
    }
  } else {
    for (int i = 0; i < k; ++i) {
      const Eigen::Index off = static_cast<Eigen::Index>(i) * m;
      if (i < s) {
        b.segment(off, m) =
            A.middleRows(off, m) * x0 + rng.gaussian_vector(m, 0.0, sigma);
      } else if (model == OutlierModel::kGaussianOutlier) {
        const Vector noise = rng.gaussian_vector(m, 0.0, sigma);
        b.segment(off, m) = rng.gaussian_vector(m) + noise;
      } else {
        b.segment(off, m) = rng.laplacian_vector(m, 0.0, outlier_std);
      }
    }
  }
  GroundTruth truth;
  truth.x0 = x0;
  for (int i = 0; i < s; ++i) truth.reliable_set.push_back(i);
  truth.sigma = sigma;
  truth.model = model;
  return SensingProblem(n, m, k, std::move(A), std::move(b), std::move(truth));
}

ClassifyRule default_rule(Method m) {
  switch (m) {
    case Method::kP3:
    case Method::kP4:
    case Method::kP3Colored:
    case Method::kP4Colored:
      return ClassifyRule::kUSupport;
    case Method::kHuber:
      return ClassifyRule::kScalarConsensus;
    default:
      return ClassifyRule::kResidualThreshold;
  }
}

ClassificationReport classify(const SensingProblem& p, const GroundTruth& truth,
                              const SolverOutput& out, ClassifyRule rule,
                              double threshold) {
  const int k = p.k();
  const int m = p.m();
  if ((rule == ClassifyRule::kUSupport ||
       rule == ClassifyRule::kScalarConsensus) &&
      !out.u_hat.has_value())
    throw ValidationError("classify: the u-support rule requires u_hat");

  ClassificationReport rep;
  rep.labeled_reliable.resize(k);
  std::vector<bool> truly_reliable(k, false);
  for (int i : truth.reliable_set) truly_reliable[i] = true;

  int correct = 0;
  for (int i = 0; i < k; ++i) {
    bool reliable;
    if (rule == ClassifyRule::kResidualThreshold) {
      const double r_inf = (p.block_b(i) - p.block_A(i) * out.x_hat)
                               .lpNorm<Eigen::Infinity>();
      reliable = r_inf <= threshold;
    } else {
      // Both u-based rules: no outlier variable active inside the sensor's
      // block of the stacked u (scalar solvers keep one entry per
      // measurement there).
      reliable =
          out.u_hat->segment(static_cast<Eigen::Index>(i) * m, m).isZero(0.0);
    }
    rep.labeled_reliable[i] = reliable;
    if (reliable == truly_reliable[i]) ++correct;
  }
  rep.per_sensor_correct = static_cast<double>(correct) / k;
  rep.whole_network_correct = correct == k;
  return rep;
}

std::vector<PhaseCell> run_phase_diagram(const ExperimentSpec& raw) {
  const ExperimentSpec spec = resolved(raw);
  spec.validate();
  if (spec.family != Family::kPhaseDiagram)
    throw ValidationError("run_phase_diagram: wrong family");

  struct Cell {
    int n, m, k, s;
  };
  std::vector<Cell> cells;
  for (const auto& [n, m] : spec.phase_dims) {
    std::vector<int> ks;
    for (double gamma : gamma_grid()) {
      const int k = static_cast<int>(std::lround(n / (gamma * m)));
      if (k < 1) continue;
      if (std::find(ks.begin(), ks.end(), k) == ks.end()) ks.push_back(k);
    }
    for (int k : ks)
      for (int s = (k + 1) / 2; s <= k; ++s) cells.push_back({n, m, k, s});
  }
  if (cells.empty())
    throw ValidationError("run_phase_diagram: empty grid after rounding");

  const int trials = spec.trials;
  const int jobs = static_cast<int>(cells.size()) * trials;
  std::vector<unsigned char> success(jobs, 0);
  parallel_for(jobs, spec.threads, [&](int j) {
    const Cell& c = cells[j / trials];
    RngStream rng(spec.seed, static_cast<std::uint64_t>(j));
    const SensingProblem p =
        generate_rs_instance(c.n, c.m, c.k, c.s, rng);
    const SolverOutput out = solve_p1(p);
    const double err =
        (out.x_hat - p.truth()->x0).lpNorm<Eigen::Infinity>();
    success[j] = err <= kSuccessTol ? 1 : 0;
  });

  std::vector<PhaseCell> rows;
  rows.reserve(cells.size());
  for (size_t c = 0; c < cells.size(); ++c) {
    int wins = 0;
    for (int t = 0; t < trials; ++t) wins += success[c * trials + t];
    PhaseCell row;
    row.n = cells[c].n;
    row.m = cells[c].m;
    row.k = cells[c].k;
    row.s = cells[c].s;
    row.gamma = static_cast<double>(cells[c].n) /
                (static_cast<double>(cells[c].k) * cells[c].m);
    row.beta = static_cast<double>(cells[c].s) / cells[c].k;
    row.trials = trials;
    row.success_rate = static_cast<double>(wins) / trials;
    rows.push_back(row);
  }
  return rows;
}

namespace {

// Shared trial loop of the three table/curve families: one generated instance
// per (s, trial) job, every method run on the same instance.
struct TrialRecord {
  double per_sensor = 0.0;
  bool whole = false;
  double sq_err = 0.0;
};

std::vector<std::vector<TrialRecord>> run_trials(
    const ExperimentSpec& spec, bool noisy, double lambda_factor) {
  const int trials = spec.trials;
  const int n_methods = static_cast<int>(spec.methods.size());
  const int jobs = static_cast<int>(spec.s_list.size()) * trials;
  const double sigma = noisy ? sigma_from_snr(spec.snr_db) : 0.0;

  ColoredContext colored;
  const bool is_colored = spec.toeplitz_r > 0.0;
  if (is_colored)
    colored = colored_context(spec.m, spec.k, sigma, spec.toeplitz_r,
                              lambda_factor);

  std::vector<std::vector<TrialRecord>> records(
      jobs, std::vector<TrialRecord>(n_methods));
  parallel_for(jobs, spec.threads, [&](int j) {
    const int s = spec.s_list[j / trials];
    RngStream rng(spec.seed, static_cast<std::uint64_t>(j));
    const SensingProblem p =
        noisy ? generate_rsn_instance(spec.n, spec.m, spec.k, s, sigma,
                                      spec.outlier_model, rng,
                                      is_colored ? &colored.cov_sqrt : nullptr)
              : generate_rs_instance(spec.n, spec.m, spec.k, s, rng);
    MethodParams mp;
    mp.sigma = sigma;
    mp.lambda_factor = lambda_factor;
    if (is_colored) {
      mp.Sigma = &colored.Sigma;
      mp.lambda_colored = colored.lambda_colored;
    }
    for (int mi = 0; mi < n_methods; ++mi) {
      const Method method = spec.methods[mi];
      const SolverOutput out = run_method(p, method, mp);
      const ClassificationReport rep =
          classify(p, *p.truth(), out, default_rule(method), kSuccessTol);
      TrialRecord& rec = records[j][mi];
      rec.per_sensor = rep.per_sensor_correct;
      rec.whole = rep.whole_network_correct;
      rec.sq_err = (out.x_hat - p.truth()->x0).squaredNorm();
    }
  });
  return records;
}

std::vector<TableCell> reduce_table(const ExperimentSpec& spec,
                                    const std::vector<std::vector<TrialRecord>>&
                                        records) {
  std::vector<TableCell> rows;
  for (size_t mi = 0; mi < spec.methods.size(); ++mi) {
    for (size_t si = 0; si < spec.s_list.size(); ++si) {
      double per_sensor = 0.0;
      int whole = 0;
      for (int t = 0; t < spec.trials; ++t) {
        const TrialRecord& rec = records[si * spec.trials + t][mi];
        per_sensor += rec.per_sensor;
        whole += rec.whole ? 1 : 0;
      }
      TableCell cell;
      cell.method = spec.methods[mi];
      cell.s = spec.s_list[si];
      cell.per_sensor_pct = 100.0 * per_sensor / spec.trials;
      cell.whole_network_pct = 100.0 * whole / spec.trials;
      rows.push_back(cell);
    }
  }
  return rows;
}

}  // namespace

std::vector<TableCell> run_rs_table(const ExperimentSpec& raw) {
  const ExperimentSpec spec = resolved(raw);
  spec.validate();
  if (spec.family != Family::kRsTable)
    throw ValidationError("run_rs_table: wrong family");
  check_noise_free_methods(spec.methods);
  return reduce_table(spec, run_trials(spec, /*noisy=*/false, 1.34));
}

std::vector<TableCell> run_rsn_table(const ExperimentSpec& raw) {
  const ExperimentSpec spec = resolved(raw);
  spec.validate();
  if (spec.family != Family::kRsnTable)
    throw ValidationError("run_rsn_table: wrong family");
  // Huber cutoff sigma, block penalty sigma*sqrt(m).
  return reduce_table(spec, run_trials(spec, /*noisy=*/true, 1.0));
}

std::vector<MseCell> run_mse_curve(const ExperimentSpec& raw) {
  const ExperimentSpec spec = resolved(raw);
  spec.validate();
  if (spec.family != Family::kMseCurve)
    throw ValidationError("run_mse_curve: wrong family");
  // Huber cutoff 1.34*sigma, block penalty 1.34*sigma*sqrt(m).
  const auto records = run_trials(spec, /*noisy=*/true, 1.34);
  std::vector<MseCell> rows;
  for (size_t mi = 0; mi < spec.methods.size(); ++mi) {
    for (size_t si = 0; si < spec.s_list.size(); ++si) {
      double sum = 0.0;
      for (int t = 0; t < spec.trials; ++t)
        sum += records[si * spec.trials + t][mi].sq_err;
      MseCell cell;
      cell.method = spec.methods[mi];
      cell.s = spec.s_list[si];
      cell.mse = sum / spec.trials;
      cell.trials = spec.trials;
      rows.push_back(cell);
    }
  }
  return rows;
}

std::string phase_csv(const std::vector<PhaseCell>& rows) {
  std::string out = "gamma,beta,n,m,k,s,trials,success_rate\n";
  for (const PhaseCell& r : rows)
    out += format_row("%.6f,%.6f,%d,%d,%d,%d,%d,%.6f\n", r.gamma, r.beta, r.n,
                      r.m, r.k, r.s, r.trials, r.success_rate);
  return out;
}

std::string table_csv(const std::vector<TableCell>& rows) {
  std::string out = "method,s,per_sensor_pct,whole_network_pct\n";
  for (const TableCell& r : rows)
    out += format_row("%s,%d,%.4f,%.4f\n", method_name(r.method).c_str(), r.s,
                      r.per_sensor_pct, r.whole_network_pct);
  return out;
}

std::string mse_csv(const std::vector<MseCell>& rows) {
  std::string out = "method,s,mse,trials\n";
  for (const MseCell& r : rows)
    out += format_row("%s,%d,%.10e,%d\n", method_name(r.method).c_str(), r.s,
                      r.mse, r.trials);
  return out;
}

std::string experiment_manifest(const ExperimentSpec& raw) {
  const ExperimentSpec spec = resolved(raw);
  spec.validate();
  nlohmann::ordered_json j;
  j["family"] = family_name(spec.family);
  j["version"] = kVersion;
  j["seed"] = spec.seed;
  j["trials"] = spec.trials;
  j["threads"] = spec.threads;
  if (spec.family == Family::kPhaseDiagram) {
    auto dims = nlohmann::ordered_json::array();
    for (const auto& [n, m] : spec.phase_dims) dims.push_back({n, m});
    j["dims"] = dims;
    j["gamma_grid"] = gamma_grid();
    // Overlay curve beta_star(gamma) = (sqrt(gamma)+1)/2 for plotting.
    auto curve = nlohmann::ordered_json::array();
    for (double gamma : gamma_grid())
      curve.push_back({gamma, 0.5 * (std::sqrt(gamma) + 1.0)});
    j["beta_star_curve"] = curve;
    j["success_tol"] = kSuccessTol;
  } else {
    j["n"] = spec.n;
    j["m"] = spec.m;
    j["k"] = spec.k;
    j["s_list"] = spec.s_list;
    std::vector<std::string> names;
    for (Method m : spec.methods) names.push_back(method_name(m));
    j["methods"] = names;
  }
  if (spec.family == Family::kRsnTable || spec.family == Family::kMseCurve) {
    j["snr_db"] = spec.snr_db;
    j["sigma"] = sigma_from_snr(spec.snr_db);
    j["outlier_model"] = outlier_model_name(spec.outlier_model);
    j["lambda_factor"] = spec.family == Family::kRsnTable ? 1.0 : 1.34;
    j["toeplitz_r"] = spec.toeplitz_r;
    if (spec.toeplitz_r > 0.0) {
      const ColoredContext ctx = colored_context(
          spec.m, spec.k, sigma_from_snr(spec.snr_db), spec.toeplitz_r,
          spec.family == Family::kRsnTable ? 1.0 : 1.34);
      j["lambda_colored"] = ctx.lambda_colored;
    }
  }
  return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("write_file: cannot open " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write_file: short write to " + path);
}

}  // namespace rsense
