#include "rsense/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rsense {

namespace {

// Lexicographic successor of a size-s index combination over {0..k-1}.
bool next_combination(std::vector<int>& idx, int k) {
  const int s = static_cast<int>(idx.size());
  for (int i = s - 1; i >= 0; --i) {
    if (idx[i] < k - s + i) {
      ++idx[i];
      for (int j = i + 1; j < s; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

double binomial(int k, int s) {
  double c = 1.0;
  for (int i = 0; i < s; ++i) c *= static_cast<double>(k - i) / (i + 1);
  return c;
}

void stack_subset(const SensingProblem& p, const std::vector<int>& idx,
                  Matrix& A_S, Vector& b_S) {
  const int m = p.m();
  A_S.resize(static_cast<Eigen::Index>(idx.size()) * m, p.n());
  b_S.resize(static_cast<Eigen::Index>(idx.size()) * m);
  for (size_t j = 0; j < idx.size(); ++j) {
    A_S.middleRows(static_cast<Eigen::Index>(j) * m, m) = p.block_A(idx[j]);
    b_S.segment(static_cast<Eigen::Index>(j) * m, m) = p.block_b(idx[j]);
  }
}

}  // namespace

SubsetSolution solve_p0_bruteforce(const SensingProblem& p, double feas_tol) {
  if (p.k() > 20)
    throw GuardError("solve_p0_bruteforce: k = " + std::to_string(p.k()) +
                     " exceeds the k <= 20 guard");
  if (feas_tol <= 0.0)
    throw ValidationError("solve_p0_bruteforce: feas_tol must be > 0");
  Matrix A_S;
  Vector b_S;
  for (int s = p.k(); s >= 1; --s) {
    std::vector<int> idx(s);
    std::iota(idx.begin(), idx.end(), 0);
    do {
      stack_subset(p, idx, A_S, b_S);
      const Vector x = least_squares(A_S, b_S);
      const double res = (b_S - A_S * x).norm();
      if (res <= feas_tol * (1.0 + b_S.norm())) {
        SubsetSolution sol;
        sol.x = x;
        sol.support = idx;
        sol.s = s;
        sol.objective = res;
        return sol;
      }
    } while (next_combination(idx, p.k()));
  }
  throw InfeasibleError(
      "solve_p0_bruteforce: no subset feasible at s=1 (overdetermined "
      "inconsistent blocks)");
}

SubsetSolution solve_rsn_bruteforce(const SensingProblem& p, int s) {
  if (s < 1 || s > p.k())
    throw ValidationError("solve_rsn_bruteforce: s must be in [1, k]");
  if (binomial(p.k(), s) > 1e6)
    throw GuardError("solve_rsn_bruteforce: C(k, s) exceeds the 1e6 guard");
  SubsetSolution best;
  best.objective = std::numeric_limits<double>::infinity();
  Matrix A_S;
  Vector b_S;
  std::vector<int> idx(s);
  std::iota(idx.begin(), idx.end(), 0);
  do {
    stack_subset(p, idx, A_S, b_S);
    const bool deficient = numerical_rank(A_S) < p.n();
    const Vector x = least_squares(A_S, b_S);
    const double obj = (b_S - A_S * x).squaredNorm();
    if (obj < best.objective) {
      best.x = x;
      best.support = idx;
      best.objective = obj;
      best.s = s;
    }
    best.had_rank_deficient_subset |= deficient;
  } while (next_combination(idx, p.k()));
  return best;
}

std::optional<std::vector<int>> check_uniqueness_rank(const SensingProblem& p,
                                                      int s) {
  if (2 * s <= p.k())
    throw ValidationError("check_uniqueness_rank: requires s > k/2");
  if (s > p.k())
    throw ValidationError("check_uniqueness_rank: s must be <= k");
  const int q = 2 * s - p.k();
  std::vector<int> idx(q);
  std::iota(idx.begin(), idx.end(), 0);
  // Dimension count: q*m rows can never reach rank n.
  if (static_cast<long>(q) * p.m() < p.n()) return idx;
  if (binomial(p.k(), q) > 1e6)
    throw GuardError("check_uniqueness_rank: C(k, 2s-k) exceeds the 1e6 guard");
  Matrix A_S;
  Vector b_S;
  do {
    stack_subset(p, idx, A_S, b_S);
    if (numerical_rank(A_S) < p.n()) return idx;
  } while (next_combination(idx, p.k()));
  return std::nullopt;
}

std::optional<RangeConditionCounterexample> falsify_range_condition(
    const SensingProblem& p, int s, int trials, RngStream& rng) {
  if (s < 1 || s > p.k())
    throw ValidationError("falsify_range_condition: s must be in [1, k]");
  if (trials < 1)
    throw ValidationError("falsify_range_condition: trials must be >= 1");
  const int k = p.k();
  const int m = p.m();
  const int n = p.n();
  // Largest block count whose stacked rows still leave a null space; zeroing
  // those blocks is where violations concentrate.
  const int q = std::min((n - 1) / m, k - 1);

  std::vector<int> pool(k);
  Matrix A_S;
  std::vector<std::pair<double, int>> order(k);
  for (int t = 0; t < trials; ++t) {
    Vector u;
    if (q >= 1 && t % 2 == 1) {
      // Random q-subset via partial Fisher-Yates.
      std::iota(pool.begin(), pool.end(), 0);
      for (int j = 0; j < q; ++j) {
        const int pick = j + static_cast<int>(rng.uniform() * (k - j));
        std::swap(pool[j], pool[std::min(pick, k - 1)]);
      }
      std::vector<int> subset(pool.begin(), pool.begin() + q);
      std::sort(subset.begin(), subset.end());
      A_S.resize(static_cast<Eigen::Index>(q) * m, n);
      for (int j = 0; j < q; ++j)
        A_S.middleRows(static_cast<Eigen::Index>(j) * m, m) =
            p.block_A(subset[j]);
      Eigen::JacobiSVD<Matrix> svd(A_S, Eigen::ComputeFullV);
      const Eigen::Index rank = numerical_rank(A_S);
      const Eigen::Index null_dim = n - rank;
      if (null_dim < 1) continue;
      const Matrix null_basis = svd.matrixV().rightCols(null_dim);
      u = null_basis * rng.gaussian_vector(null_dim);
    } else {
      u = rng.gaussian_vector(n);
    }
    const double norm = u.norm();
    if (norm == 0.0) continue;
    u /= norm;

    const Vector v = p.A() * u;
    if (v.norm() == 0.0) continue;
    for (int i = 0; i < k; ++i)
      order[i] = {v.segment(static_cast<Eigen::Index>(i) * m, m).norm(), i};
    std::sort(order.begin(), order.end());
    double small_sum = 0.0, rest_sum = 0.0;
    for (int i = 0; i < k; ++i)
      (i < s ? small_sum : rest_sum) += order[i].first;
    if (small_sum <= rest_sum) {
      RangeConditionCounterexample ce;
      ce.v = v;
      for (int i = 0; i < s; ++i) ce.small_set.push_back(order[i].second);
      std::sort(ce.small_set.begin(), ce.small_set.end());
      return ce;
    }
  }
  return std::nullopt;
}

RecoveryBound recovery_bound_constants(int n, int m, int k, int s,
                                       double alpha) {
  if (n < 1 || m < 1 || k < 1 || s < 1 || s > k)
    throw ValidationError("recovery_bound_constants: invalid dimensions");
  if (alpha <= 0.0 || alpha >= 1.0)
    throw ValidationError("recovery_bound_constants: alpha must be in (0,1)");
  RecoveryBound rb;
  rb.alpha = alpha;
  rb.beta = static_cast<double>(s) / k;
  rb.gamma = static_cast<double>(n) / (static_cast<double>(k) * m);
  rb.beta_star = 0.5 * (std::sqrt(rb.gamma) + 1.0);
  const double t = (2.0 * rb.beta - 1.0) / std::sqrt(rb.gamma) - 1.0;
  rb.c0 = 0.5 * t * t;
  rb.applicable = rb.beta > rb.beta_star;
  if (rb.applicable && rb.c0 > 0.0) {
    // log(e/beta) = 1 - log(beta)
    const double bound = rb.beta * (1.0 - std::log(rb.beta)) /
                         ((1.0 - alpha) * rb.c0 * rb.gamma);
    rb.min_m = static_cast<long>(std::ceil(bound));
  }
  return rb;
}

SensingProblem mcle_to_rs(const Matrix& C, const Vector& d, int m) {
  if (m < 2) throw ValidationError("mcle_to_rs: m must be >= 2");
  if (C.rows() != d.size())
    throw DimensionError("mcle_to_rs: C and d row counts disagree");
  if (C.rows() < 1 || C.cols() < 1)
    throw ValidationError("mcle_to_rs: C must be nonempty");
  const int k = static_cast<int>(C.rows());
  const int n = static_cast<int>(C.cols());
  Matrix A = Matrix::Zero(static_cast<Eigen::Index>(k) * m, n);
  Vector b = Vector::Zero(static_cast<Eigen::Index>(k) * m);
  for (int i = 0; i < k; ++i) {
    A.row(static_cast<Eigen::Index>(i) * m) = C.row(i);
    b(static_cast<Eigen::Index>(i) * m) = d(i);
  }
  return SensingProblem(n, m, k, std::move(A), std::move(b));
}

Vector AnnihilatorPair::recover_x(const Vector& r0) const {
  if (r0.size() != b.size())
    throw DimensionError("recover_x: residual has wrong length");
  return pinv_A * (b - r0);
}

AnnihilatorPair annihilator_pair(const Matrix& A, const Vector& b) {
  const Eigen::Index rows = A.rows();
  const Eigen::Index n = A.cols();
  if (rows <= n)
    throw DimensionError("annihilator_pair: requires strictly more rows than columns");
  if (b.size() != rows)
    throw DimensionError("annihilator_pair: b has wrong length");
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  if (sv(n - 1) <= kRankTol * sv(0))
    throw RankDeficientError("annihilator_pair: A is column-rank deficient");
  AnnihilatorPair out;
  out.C = svd.matrixU().rightCols(rows - n).transpose();
  out.d = out.C * b;
  out.pinv_A = svd.matrixV() * sv.cwiseInverse().asDiagonal() *
               svd.matrixU().leftCols(n).transpose();
  out.b = b;
  return out;
}

}  // namespace rsense
