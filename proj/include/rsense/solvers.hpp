#pragma once

#include <optional>
#include <vector>

#include "rsense/problem.hpp"

namespace rsense {

// Exact minimizer of (1/2)||v - u||^2 + lam*||u||_2 over u:
// 0 when ||v||_2 <= lam (ties included), else v*(1 - lam/||v||_2).
Vector block_soft_threshold(const Vector& v, double lam);

// Plain least squares on the stacked system; u_hat absent.
SolverOutput solve_ls(const SensingProblem& p);

// min_x sum_i w_i ||b_i - A_i x||_2 (w = 1 by default) by operator splitting
// on r = b - Ax: cached-QR least-squares x-update, per-block soft-threshold
// r-update at level w_i/rho, dual ascent, residual-balancing rho adaptation.
// converged=false with the best iterate when max_iters is hit.
SolverOutput solve_p1(const SensingProblem& p, const SolverConfig& cfg = {},
                      const std::optional<BlockWeights>& weights = std::nullopt);

// Reweighted sum-of-norms: w_i = 1/(||b_i - A_i x||_2 + delta), initialized at
// the unweighted solution. Stops after outer_iters passes or when the relative
// x-change drops below cfg.epsilon. outer_iters=0 reduces to solve_p1.
SolverOutput solve_p2(const SensingProblem& p, const SolverConfig& cfg = {},
                      int outer_iters = 1);

// min_{x,u} (1/2)||b - Ax - u||^2 + lambda*sum_i ||u_i||_2 by block coordinate
// descent on (x, u); x eliminated through the cached QR so each iteration is
// one projector application plus k thresholdings, O(kmn).
SolverOutput solve_p3(const SensingProblem& p, const SolverConfig& cfg);

// solve_p3 along a strictly descending lambda grid, warm-starting each run at
// the previous u_hat. Outputs are ordered with the grid.
std::vector<SolverOutput> solve_p3_path(const SensingProblem& p,
                                        const std::vector<double>& lambda_grid,
                                        const SolverConfig& cfg);

// Log-penalty sharpening of solve_p3: outer pass l reweights the block
// penalties to lambda_i = lambda/(||u_i||_2 + delta) around the previous u
// and re-solves warm-started. outer_iters=0 reduces to solve_p3.
SolverOutput solve_p4(const SensingProblem& p, const SolverConfig& cfg,
                      int outer_iters = 1);

// l1 regression: re-blocks into k*m height-1 blocks and delegates to solve_p1.
SolverOutput solve_l1(const SensingProblem& p, const SolverConfig& cfg = {});

// Scalar Huber M-estimation with cutoff tau: re-blocks into height-1 blocks
// and delegates to solve_p3 with lambda = tau. u_hat keeps one entry per
// scalar measurement.
SolverOutput solve_huber_scalar(const SensingProblem& p, double tau,
                                const SolverConfig& cfg = {});

// Colored-noise variant: prewhitens with Sigma^{-1/2} and minimizes
// (1/2)||b' - A'x - Sigma^{-1/2}u||^2 + lambda*sum_i ||u_i||_2, alternating an
// exact x-update with an inner proximal-gradient u-update (step 1/L,
// L = lambda_max(Sigma^{-1}), inner tolerance 1e-8, warm-started).
SolverOutput solve_p3_colored(const SensingProblem& p, const Matrix& Sigma,
                              const SolverConfig& cfg);

// Log-penalty reweighting on top of solve_p3_colored, same scheme as solve_p4.
SolverOutput solve_p4_colored(const SensingProblem& p, const Matrix& Sigma,
                              const SolverConfig& cfg, int outer_iters = 1);

// sum_i [ (1/2)||r_i||^2 if ||r_i|| <= lam else lam*||r_i|| - lam^2/2 ].
double vector_huber_cost(const Vector& residual_norms, double lam);

}  // namespace rsense
