#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "rsense/problem.hpp"
#include "rsense/rng.hpp"

namespace rsense {

// A guarded combinatorial routine was asked to run beyond its size limit.
struct GuardError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SubsetSolution {
  Vector x;
  std::vector<int> support;  // 0-based block indices, ascending
  int s = 0;
  double objective = 0.0;
  bool had_rank_deficient_subset = false;
};

// Exact maximizer of the number of consistent blocks: for s from k down to 1,
// tests every size-s subset in lexicographic order for LS-feasibility
// (residual <= feas_tol*(1 + ||b_S||)); returns the first feasible subset.
// Guard: k <= 20.
SubsetSolution solve_p0_bruteforce(const SensingProblem& p,
                                   double feas_tol = 1e-8);

// Exact minimizer of min_S,|S|=s  min_x ||b_S - A_S x||^2 by exhausting all
// C(k,s) subsets; ties broken by lexicographic subset order; rank-deficient
// subsets solved min-norm and flagged. Guard: C(k,s) <= 1e6.
SubsetSolution solve_rsn_bruteforce(const SensingProblem& p, int s);

// Lemma-style identifiability check: the planted solution is unique iff every
// stacked subset of 2s-k blocks has full column rank. Returns std::nullopt
// when unique, otherwise the first (lexicographic) rank-deficient subset.
// Pre: s > k/2. Guard: C(k, 2s-k) <= 1e6.
std::optional<std::vector<int>> check_uniqueness_rank(const SensingProblem& p,
                                                      int s);

struct RangeConditionCounterexample {
  Vector v;                    // element of range(A) violating the condition
  std::vector<int> small_set;  // indices of the s smallest block norms
};

// Randomized falsifier for the range-space recovery condition ("sum of the s
// smallest block norms exceeds the sum of the rest, for every v in range(A)").
// Samples unit directions u (uniform and, preferentially, from null spaces of
// stacked block subsets, where violations concentrate), forms v = A u, and
// checks the worst partition. A returned counterexample is certified; not
// finding one certifies nothing.
std::optional<RangeConditionCounterexample> falsify_range_condition(
    const SensingProblem& p, int s, int trials, RngStream& rng);

struct RecoveryBound {
  double beta = 0.0;       // s/k
  double gamma = 0.0;      // n/(km)
  double alpha = 0.0;
  double beta_star = 0.0;  // (sqrt(gamma)+1)/2
  double c0 = 0.0;         // (1/2)((2*beta-1)/sqrt(gamma) - 1)^2
  std::optional<long> min_m;
  bool applicable = false;  // beta > beta_star
};

// Exponent and minimum block height of the probabilistic recovery guarantee.
// Requires 0 < alpha < 1; flags inapplicable (instead of throwing) when
// beta <= beta_star.
RecoveryBound recovery_bound_constants(int n, int m, int k, int s, double alpha);

// Reduction from max-consistent-linear-equations to robust sensing: block i is
// m x n with first row = row i of C and b_i = (d_i, 0, ..., 0); the remaining
// rows are zero. Requires m >= 2.
SensingProblem mcle_to_rs(const Matrix& C, const Vector& d, int m);

struct AnnihilatorPair {
  Matrix C;  // (km-n) x km, orthonormal rows spanning range(A)^perp
  Vector d;  // C b

  // Back-map: x solving the annihilated system from its residual candidate.
  Vector recover_x(const Vector& r0) const;

  Matrix pinv_A;  // A^dagger, kept for recover_x
  Vector b;
};

// Orthonormal annihilator of range(A) (requires km > n and full column rank):
// C A = 0, C C^T = I, d = C b, and recover_x(r0) = A^dagger (b - r0).
AnnihilatorPair annihilator_pair(const Matrix& A, const Vector& b);

}  // namespace rsense
