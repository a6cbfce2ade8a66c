#include "rsense/problem.hpp"

#include <algorithm>
#include <cmath>

namespace rsense {

std::string outlier_model_name(OutlierModel model) {
  switch (model) {
    case OutlierModel::kNoiseFreeRandom: return "noise-free-random";
    case OutlierModel::kGaussianOutlier: return "gaussian-outlier";
    case OutlierModel::kLaplacianOutlier: return "laplacian-outlier";
  }
  throw ValidationError("unknown outlier model tag");
}

OutlierModel outlier_model_from_name(const std::string& name) {
  if (name == "noise-free-random") return OutlierModel::kNoiseFreeRandom;
  if (name == "gaussian-outlier") return OutlierModel::kGaussianOutlier;
  if (name == "laplacian-outlier") return OutlierModel::kLaplacianOutlier;
  throw ValidationError("unknown outlier model \"" + name + "\"");
}

SensingProblem::SensingProblem(int n, int m, int k, Matrix stacked_A,
                               Vector stacked_b,
                               std::optional<GroundTruth> truth)
    : n_(n), m_(m), k_(k), A_(std::move(stacked_A)), b_(std::move(stacked_b)) {
  if (n_ < 1 || m_ < 1 || k_ < 1)
    throw ValidationError("SensingProblem: n, m, k must all be >= 1 (got n=" +
                          std::to_string(n_) + ", m=" + std::to_string(m_) +
                          ", k=" + std::to_string(k_) + ")");
  const Eigen::Index rows = static_cast<Eigen::Index>(m_) * k_;
  if (A_.rows() != rows || A_.cols() != n_)
    throw ValidationError("SensingProblem: stacked A must be (k*m) x n");
  if (b_.size() != rows)
    throw ValidationError("SensingProblem: stacked b must have k*m entries");
  if (!A_.allFinite() || !b_.allFinite())
    throw ValidationError("SensingProblem: entries must be finite");
  set_truth(std::move(truth));
}

SensingProblem SensingProblem::from_blocks(const std::vector<Matrix>& As,
                                           const std::vector<Vector>& bs,
                                           std::optional<GroundTruth> truth) {
  if (As.empty() || As.size() != bs.size())
    throw ValidationError("from_blocks: need one (A_i, b_i) pair per sensor");
  const int k = static_cast<int>(As.size());
  const Eigen::Index m = As[0].rows();
  const Eigen::Index n = As[0].cols();
  for (int i = 0; i < k; ++i) {
    if (As[i].rows() != m || As[i].cols() != n)
      throw ValidationError("from_blocks: block " + std::to_string(i) +
                            " has mismatched shape");
    if (bs[i].size() != m)
      throw ValidationError("from_blocks: b_" + std::to_string(i) +
                            " has wrong length");
  }
  Matrix A(m * k, n);
  Vector b(m * k);
  for (int i = 0; i < k; ++i) {
    A.middleRows(i * m, m) = As[i];
    b.segment(i * m, m) = bs[i];
  }
  return SensingProblem(static_cast<int>(n), static_cast<int>(m), k,
                        std::move(A), std::move(b), std::move(truth));
}

Vector SensingProblem::block_residual_norms(const Vector& x) const {
  if (x.size() != n_)
    throw ValidationError("block_residual_norms: x has wrong length");
  Vector r = b_ - A_ * x;
  Vector norms(k_);
  for (int i = 0; i < k_; ++i)
    norms(i) = r.segment(static_cast<Eigen::Index>(i) * m_, m_).norm();
  return norms;
}

void SensingProblem::set_truth(std::optional<GroundTruth> truth) {
  if (truth) {
    if (truth->x0.size() != n_)
      throw ValidationError("GroundTruth: x0 must have length n");
    if (truth->reliable_set.empty())
      throw ValidationError("GroundTruth: reliable_set must be nonempty");
    if (!std::is_sorted(truth->reliable_set.begin(), truth->reliable_set.end()))
      throw ValidationError("GroundTruth: reliable_set must be sorted");
    for (int idx : truth->reliable_set)
      if (idx < 0 || idx >= k_)
        throw ValidationError("GroundTruth: reliable index " +
                              std::to_string(idx) + " out of range");
    if (std::adjacent_find(truth->reliable_set.begin(),
                           truth->reliable_set.end()) !=
        truth->reliable_set.end())
      throw ValidationError("GroundTruth: duplicate reliable index");
    if (truth->sigma < 0.0)
      throw ValidationError("GroundTruth: sigma must be >= 0");
  }
  truth_ = std::move(truth);
}

SensingProblem pad_to_uniform(const std::vector<Matrix>& As,
                              const std::vector<Vector>& bs) {
  if (As.empty() || As.size() != bs.size())
    throw ValidationError("pad_to_uniform: need one (A_i, b_i) pair per sensor");
  const Eigen::Index n = As[0].cols();
  Eigen::Index m_max = 0;
  for (size_t i = 0; i < As.size(); ++i) {
    if (As[i].cols() != n)
      throw ValidationError("pad_to_uniform: block " + std::to_string(i) +
                            " has mismatched column count");
    if (As[i].rows() != bs[i].size())
      throw ValidationError("pad_to_uniform: block " + std::to_string(i) +
                            " has inconsistent heights");
    m_max = std::max(m_max, As[i].rows());
  }
  if (m_max == 0) throw ValidationError("pad_to_uniform: all blocks empty");
  std::vector<Matrix> As_padded(As.size());
  std::vector<Vector> bs_padded(As.size());
  for (size_t i = 0; i < As.size(); ++i) {
    As_padded[i] = Matrix::Zero(m_max, n);
    As_padded[i].topRows(As[i].rows()) = As[i];
    bs_padded[i] = Vector::Zero(m_max);
    bs_padded[i].head(bs[i].size()) = bs[i];
  }
  return SensingProblem::from_blocks(As_padded, bs_padded);
}

void SolverConfig::validate() const {
  if (lambda < 0.0) throw ValidationError("SolverConfig: lambda must be >= 0");
  if (delta <= 0.0) throw ValidationError("SolverConfig: delta must be > 0");
  if (epsilon <= 0.0) throw ValidationError("SolverConfig: epsilon must be > 0");
  if (rho <= 0.0) throw ValidationError("SolverConfig: rho must be > 0");
  if (abs_tol <= 0.0 || rel_tol <= 0.0)
    throw ValidationError("SolverConfig: stop tolerances must be > 0");
  if (max_iters < 1) throw ValidationError("SolverConfig: max_iters must be >= 1");
}

double lambda_for_sigma(double sigma, int m, double factor) {
  if (sigma <= 0.0) throw ValidationError("lambda_for_sigma: sigma must be > 0");
  if (m < 1) throw ValidationError("lambda_for_sigma: m must be >= 1");
  return factor * sigma * std::sqrt(static_cast<double>(m));
}

}  // namespace rsense
