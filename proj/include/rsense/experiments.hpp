#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rsense/problem.hpp"
#include "rsense/rng.hpp"

namespace rsense {

enum class Method {
  kLs,
  kGaLs,  // genie-aided LS on the true reliable blocks
  kL1,
  kHuber,
  kP1,
  kP2,
  kP3,
  kP4,
  kP3Colored,
  kP4Colored,
};

std::string method_name(Method m);
Method method_from_name(const std::string& name);

enum class Family { kPhaseDiagram, kRsTable, kMseCurve, kRsnTable };

struct ExperimentSpec {
  Family family = Family::kRsTable;
  int n = 20, m = 4, k = 16;
  // Phase diagram sweeps (n, m) pairs instead of a single triple.
  std::vector<std::pair<int, int>> phase_dims;
  std::vector<int> s_list;          // empty -> family default
  std::vector<Method> methods;      // empty -> family default
  int trials = 100;
  std::uint64_t seed = 0;
  double snr_db = 10.0;             // noisy families
  OutlierModel outlier_model = OutlierModel::kGaussianOutlier;
  double toeplitz_r = 0.0;          // > 0 -> colored aggregate noise
  int threads = 1;

  void validate() const;
};

// Noise-free instance: A i.i.d. N(0,1), x0 ~ n^{-1/2} N(0,I), blocks 1..s
// reliable (b_i = A_i x0), the rest b_i ~ N(0, I) so all sensors have equal
// output power E||b_i||^2 = m.
SensingProblem generate_rs_instance(int n, int m, int k, int s, RngStream& rng);

// Noisy instance: x0 = 1/sqrt(n), reliable b_i = A_i x0 + noise(sigma);
// unreliable blocks per the outlier model. When cov_sqrt (a km x km square
// root of the aggregate noise covariance) is given, the noise is drawn
// N(0, Sigma) across the whole stack instead of i.i.d.
SensingProblem generate_rsn_instance(int n, int m, int k, int s, double sigma,
                                     OutlierModel model, RngStream& rng,
                                     const Matrix* cov_sqrt = nullptr);

enum class ClassifyRule {
  kResidualThreshold,  // reliable iff ||b_i - A_i x_hat||_inf <= threshold
  kUSupport,           // reliable iff u_hat_i == 0
  kScalarConsensus,    // for solvers that model outliers per scalar
                       // measurement: reliable iff none of the sensor's m
                       // outlier variables is active (same segment test as
                       // kUSupport on the stacked u)
};

// Rule under which each method's published classification numbers are defined.
ClassifyRule default_rule(Method m);

struct ClassificationReport {
  std::vector<bool> labeled_reliable;  // k labels
  double per_sensor_correct = 0.0;     // fraction of correctly labeled sensors
  bool whole_network_correct = false;
};

ClassificationReport classify(const SensingProblem& p, const GroundTruth& truth,
                              const SolverOutput& out, ClassifyRule rule,
                              double threshold = 1e-4);

struct PhaseCell {
  double gamma = 0.0;  // realized n/(km)
  double beta = 0.0;   // s/k
  int n = 0, m = 0, k = 0, s = 0;
  int trials = 0;
  double success_rate = 0.0;
};

struct TableCell {
  Method method = Method::kLs;
  int s = 0;
  double per_sensor_pct = 0.0;
  double whole_network_pct = 0.0;
};

struct MseCell {
  Method method = Method::kLs;
  int s = 0;
  double mse = 0.0;
  int trials = 0;
};

// Recovery success (||x_hat - x0||_inf <= 1e-4) of the sum-of-norms solver over
// a (gamma, beta) grid: ten gamma values uniform in (0.1, 1] per (n, m) pair,
// k = round(n/(gamma*m)) deduplicated, s in [ceil(k/2), k].
std::vector<PhaseCell> run_phase_diagram(const ExperimentSpec& spec);

// Noise-free classification table (per-sensor and whole-network percentages).
std::vector<TableCell> run_rs_table(const ExperimentSpec& spec);

// Noisy classification table.
std::vector<TableCell> run_rsn_table(const ExperimentSpec& spec);

// Noisy estimation error curve, E||x0 - x_hat||^2 per method and s.
std::vector<MseCell> run_mse_curve(const ExperimentSpec& spec);

std::string phase_csv(const std::vector<PhaseCell>& rows);
std::string table_csv(const std::vector<TableCell>& rows);
std::string mse_csv(const std::vector<MseCell>& rows);

// JSON manifest describing a run: spec fields, seed, code version; the phase
// family also gets the beta_star overlay curve.
std::string experiment_manifest(const ExperimentSpec& spec);

void write_file(const std::string& path, const std::string& content);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rsense
