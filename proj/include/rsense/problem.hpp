#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rsense/linalg.hpp"

namespace rsense {

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class OutlierModel {
  kNoiseFreeRandom,   // unreliable b drawn N(0, I), no measurement noise
  kGaussianOutlier,   // unreliable b = n_w + noise, n_w ~ N(0, I)
  kLaplacianOutlier,  // unreliable entries i.i.d. Laplacian, variance sigma^2+1
};

std::string outlier_model_name(OutlierModel model);
OutlierModel outlier_model_from_name(const std::string& name);

struct GroundTruth {
  Vector x0;
  std::vector<int> reliable_set;  // 0-based block indices, sorted ascending
  double sigma = 0.0;
  OutlierModel model = OutlierModel::kNoiseFreeRandom;
};

// k sensor subsystems (A_i, b_i), each A_i of shape m x n, stored stacked.
// Block i occupies rows [i*m, (i+1)*m).
class SensingProblem {
 public:
  SensingProblem(int n, int m, int k, Matrix stacked_A, Vector stacked_b,
                 std::optional<GroundTruth> truth = std::nullopt);

  static SensingProblem from_blocks(const std::vector<Matrix>& As,
                                    const std::vector<Vector>& bs,
                                    std::optional<GroundTruth> truth = std::nullopt);

  int n() const { return n_; }
  int m() const { return m_; }
  int k() const { return k_; }
  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }
  auto block_A(int i) const { return A_.middleRows(static_cast<Eigen::Index>(i) * m_, m_); }
  auto block_b(int i) const { return b_.segment(static_cast<Eigen::Index>(i) * m_, m_); }

  // ||b_i - A_i x||_2 for every block.
  Vector block_residual_norms(const Vector& x) const;

  const std::optional<GroundTruth>& truth() const { return truth_; }
  void set_truth(std::optional<GroundTruth> truth);

 private:
  int n_, m_, k_;
  Matrix A_;  // (k*m) x n
  Vector b_;  // k*m
  std::optional<GroundTruth> truth_;
};

// Zero-pads heterogeneous blocks to the tallest height. Zero rows contribute
// nothing to any residual norm, so every solver's objective is unchanged.
SensingProblem pad_to_uniform(const std::vector<Matrix>& As,
                              const std::vector<Vector>& bs);

struct SolverConfig {
  double lambda = 0.0;    // block penalty (P3/P4)
  double delta = 1e-4;    // log-surrogate offset (P2/P4)
  double epsilon = 1e-6;  // relative-change stop threshold
  double rho = 1.0;       // splitting penalty (P1 family)
  double abs_tol = 1e-8;  // splitting absolute stop tolerance
  double rel_tol = 1e-6;  // splitting relative stop tolerance
  int max_iters = 5000;

  void validate() const;
};

// Per-block nonnegative weights for the weighted sum-of-norms problem.
using BlockWeights = Vector;

struct SolverOutput {
  Vector x_hat;
  std::optional<Vector> u_hat;  // stacked outlier estimate, k*m entries
  Vector residual_norms;        // k entries, ||b_i - A_i x_hat||_2
  std::vector<double> cost_trace;
  int iterations = 0;
  bool converged = false;
};

// Heuristic penalty level: factor * sigma * sqrt(m); factor 1.34 for the
// 95%-efficiency Huber tuning.
double lambda_for_sigma(double sigma, int m, double factor = 1.34);

}  // namespace rsense
