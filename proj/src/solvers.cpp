#include "rsense/solvers.hpp"

#include <algorithm>
#include <cmath>

namespace rsense {

namespace {

void block_norms(const Vector& v, int m, int k, Vector& out) {
  for (int i = 0; i < k; ++i)
    out(i) = v.segment(static_cast<Eigen::Index>(i) * m, m).norm();
}

void check_weights(const Vector& w, int k) {
  if (w.size() != k)
    throw ValidationError("block weights must have one entry per sensor");
  if (!w.allFinite() || (w.array() < 0.0).any())
    throw ValidationError("block weights must be finite and nonnegative");
}

// Splitting solver for min_x sum_i w_i ||b_i - A_i x||_2 on the constraint
// r = b - Ax. The x-update is plain least squares against the cached QR (the
// weights enter only through the r-update thresholds), the r-update is a
// per-block shrinkage, and rho follows the usual 10x residual-balancing rule.
SolverOutput sum_of_norms_splitting(const Matrix& A, const Vector& b, int m,
                                    int k, const Vector& w,
                                    const SolverConfig& cfg,
                                    const Vector* x_init = nullptr) {
  cfg.validate();
  const Eigen::Index R = A.rows();
  const Eigen::Index n = A.cols();
  LeastSquaresSolver qr(A);

  Vector x = x_init ? *x_init : qr.solve(b);
  Vector Ax = A * x;
  Vector r = b - Ax;
  Vector y = Vector::Zero(R);
  Vector r_old(R), v(R), primal(R);
  Vector res_norms(k);
  double rho = cfg.rho;

  SolverOutput out;
  out.cost_trace.reserve(128);
  const double b_norm = b.norm();
  const double sqrt_R = std::sqrt(static_cast<double>(R));
  const double sqrt_n = std::sqrt(static_cast<double>(n));

  int iter = 0;
  for (iter = 1; iter <= cfg.max_iters; ++iter) {
    v = b - r - y / rho;
    x = qr.solve(v);
    Ax.noalias() = A * x;

    v = b - Ax - y / rho;
    r_old = r;
    for (int i = 0; i < k; ++i) {
      auto vi = v.segment(static_cast<Eigen::Index>(i) * m, m);
      auto ri = r.segment(static_cast<Eigen::Index>(i) * m, m);
      const double norm = vi.norm();
      const double level = w(i) / rho;
      if (norm <= level)
        ri.setZero();
      else
        ri = vi * (1.0 - level / norm);
    }

    primal = Ax + r - b;
    y.noalias() += rho * primal;

    block_norms(b - Ax, m, k, res_norms);
    out.cost_trace.push_back(w.dot(res_norms));

    const double primal_norm = primal.norm();
    const double dual_norm = rho * (A.transpose() * (r - r_old)).norm();
    const double eps_pri =
        sqrt_R * cfg.abs_tol +
        cfg.rel_tol * std::max({Ax.norm(), r.norm(), b_norm});
    const double eps_dual =
        sqrt_n * cfg.abs_tol + cfg.rel_tol * (A.transpose() * y).norm();
    if (primal_norm <= eps_pri && dual_norm <= eps_dual) {
      out.converged = true;
      break;
    }
    if (primal_norm > 10.0 * dual_norm)
      rho = std::min(rho * 2.0, 1e6);
    else if (dual_norm > 10.0 * primal_norm)
      rho = std::max(rho / 2.0, 1e-6);
  }
  out.iterations = std::min(iter, cfg.max_iters);
  out.x_hat = std::move(x);
  out.residual_norms = std::move(res_norms);  // norms of b - Ax at the final x
  return out;
}

// Block coordinate descent for
//   min_{x,u} (1/2)||b - Ax - u||^2 + sum_i lambda_i ||u_i||_2.
// x is eliminated: with z = P_perp b cached, each sweep is
// r = z + P u, then a per-block shrinkage of r. P u is applied as
// A * lsq(A, u), never as a dense projector.
SolverOutput block_descent(const Matrix& A, const Vector& b, int m, int k,
                           const Vector& lambda, const SolverConfig& cfg,
                           const Vector* u_init = nullptr) {
  cfg.validate();
  const Eigen::Index R = A.rows();
  LeastSquaresSolver qr(A);

  const Vector z = b - A * qr.solve(b);  // P_perp b
  Vector u = u_init ? *u_init : Vector::Zero(R);
  Vector Pu = u.isZero(0.0) ? Vector::Zero(R) : Vector(A * qr.solve(u));
  Vector r(R), u_new(R);

  SolverOutput out;
  out.cost_trace.reserve(64);
  int iter = 0;
  for (iter = 1; iter <= cfg.max_iters; ++iter) {
    r = z + Pu;
    double penalty = 0.0;
    for (int i = 0; i < k; ++i) {
      auto ri = r.segment(static_cast<Eigen::Index>(i) * m, m);
      auto ui = u_new.segment(static_cast<Eigen::Index>(i) * m, m);
      const double norm = ri.norm();
      if (norm <= lambda(i)) {
        ui.setZero();
      } else {
        ui = ri * (1.0 - lambda(i) / norm);
        penalty += lambda(i) * (norm - lambda(i));
      }
    }
    out.cost_trace.push_back(0.5 * (r - u_new).squaredNorm() + penalty);

    const double du = (u_new - u).norm();
    const double un = u_new.norm();
    u = u_new;
    if (du / std::max(un, 1e-12) < cfg.epsilon) {
      out.converged = true;
      break;
    }
    if (iter == cfg.max_iters) break;
    Pu.noalias() = A * qr.solve(u);
  }
  out.iterations = std::min(iter, cfg.max_iters);
  out.x_hat = qr.solve(b - u);
  out.u_hat = std::move(u);
  out.residual_norms.resize(k);
  block_norms(b - A * out.x_hat, m, k, out.residual_norms);
  return out;
}

// Whitened block-descent for colored noise. u keeps its original coordinates
// (where it is block sparse); the quadratic couples its entries through
// Sigma^{-1}, so the u-step is an inner proximal-gradient loop instead of a
// closed-form shrinkage.
SolverOutput colored_descent(const SensingProblem& p, const Matrix& Sigma,
                             const Vector& lambda, const SolverConfig& cfg,
                             const Vector* u_init = nullptr) {
  cfg.validate();
  const int m = p.m();
  const int k = p.k();
  const Eigen::Index R = p.A().rows();
  if (Sigma.rows() != R || Sigma.cols() != R)
    throw DimensionError("colored solver: Sigma must be km x km");
  if ((Sigma - Sigma.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * std::max(1.0, Sigma.cwiseAbs().maxCoeff()))
    throw NotPositiveDefiniteError("colored solver: Sigma is not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> es(Sigma);
  const Vector& ev = es.eigenvalues();
  if (ev(0) <= kRankTol * std::max(ev(R - 1), 0.0))
    throw NotPositiveDefiniteError(
        "colored solver: Sigma not positive definite (eigenvalue " +
        std::to_string(ev(0)) + ")");
  const Matrix W = es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
                   es.eigenvectors().transpose();  // Sigma^{-1/2}
  const Matrix Minv = es.eigenvectors() * ev.cwiseInverse().asDiagonal() *
                      es.eigenvectors().transpose();  // Sigma^{-1}
  const double step = ev(0);  // 1/L, L = 1/lambda_min(Sigma)

  const Matrix Ap = W * p.A();
  const Vector bp = W * p.b();
  LeastSquaresSolver qr(Ap);

  Vector u = u_init ? *u_init : Vector::Zero(R);
  Vector x(p.n()), c(R), d(R), grad(R), cand(R), u_next(R);
  constexpr double kInnerTol = 1e-8;
  constexpr int kInnerCap = 200000;

  SolverOutput out;
  int iter = 0;
  for (iter = 1; iter <= cfg.max_iters; ++iter) {
    x = qr.solve(bp - W * u);
    c = bp - Ap * x;
    d.noalias() = W * c;

    const Vector u_outer = u;
    for (int t = 0; t < kInnerCap; ++t) {
      grad.noalias() = Minv * u;
      grad -= d;
      cand = u - step * grad;
      for (int i = 0; i < k; ++i) {
        auto ci = cand.segment(static_cast<Eigen::Index>(i) * m, m);
        auto ui = u_next.segment(static_cast<Eigen::Index>(i) * m, m);
        const double norm = ci.norm();
        const double level = lambda(i) * step;
        if (norm <= level)
          ui.setZero();
        else
          ui = ci * (1.0 - level / norm);
      }
      const double du = (u_next - u).norm();
      const double un = u_next.norm();
      u = u_next;
      if (du / std::max(un, 1e-12) <= kInnerTol) break;
    }

    double penalty = 0.0;
    for (int i = 0; i < k; ++i)
      penalty +=
          lambda(i) * u.segment(static_cast<Eigen::Index>(i) * m, m).norm();
    out.cost_trace.push_back(0.5 * (c - W * u).squaredNorm() + penalty);

    const double du_outer = (u - u_outer).norm();
    if (du_outer / std::max(u.norm(), 1e-12) < cfg.epsilon) {
      out.converged = true;
      break;
    }
  }
  out.iterations = std::min(iter, cfg.max_iters);
  out.x_hat = qr.solve(bp - W * u);
  out.u_hat = std::move(u);
  out.residual_norms = p.block_residual_norms(out.x_hat);
  return out;
}

}  // namespace

Vector block_soft_threshold(const Vector& v, double lam) {
  if (lam < 0.0) throw ValidationError("block_soft_threshold: lam must be >= 0");
  const double norm = v.norm();
  if (norm <= lam) return Vector::Zero(v.size());
  return v * (1.0 - lam / norm);
}

SolverOutput solve_ls(const SensingProblem& p) {
  LeastSquaresSolver qr(p.A());
  SolverOutput out;
  out.x_hat = qr.solve(p.b());
  out.residual_norms = p.block_residual_norms(out.x_hat);
  out.iterations = 1;
  out.converged = true;
  return out;
}

SolverOutput solve_p1(const SensingProblem& p, const SolverConfig& cfg,
                      const std::optional<BlockWeights>& weights) {
  Vector w = weights ? *weights : Vector::Ones(p.k());
  check_weights(w, p.k());
  return sum_of_norms_splitting(p.A(), p.b(), p.m(), p.k(), w, cfg);
}

SolverOutput solve_p2(const SensingProblem& p, const SolverConfig& cfg,
                      int outer_iters) {
  if (outer_iters < 0) throw ValidationError("solve_p2: outer_iters must be >= 0");
  SolverOutput out = solve_p1(p, cfg);
  int total_iters = out.iterations;
  for (int pass = 0; pass < outer_iters; ++pass) {
    const Vector w =
        (out.residual_norms.array() + cfg.delta).inverse().matrix();
    const Vector x_prev = out.x_hat;
    SolverOutput next = sum_of_norms_splitting(p.A(), p.b(), p.m(), p.k(), w,
                                               cfg, &x_prev);
    total_iters += next.iterations;
    out = std::move(next);
    if ((out.x_hat - x_prev).norm() / std::max(out.x_hat.norm(), 1e-12) <
        cfg.epsilon)
      break;
  }
  out.iterations = total_iters;
  return out;
}

SolverOutput solve_p3(const SensingProblem& p, const SolverConfig& cfg) {
  if (cfg.lambda <= 0.0) throw ValidationError("solve_p3: lambda must be > 0");
  return block_descent(p.A(), p.b(), p.m(), p.k(),
                       Vector::Constant(p.k(), cfg.lambda), cfg);
}

std::vector<SolverOutput> solve_p3_path(const SensingProblem& p,
                                        const std::vector<double>& lambda_grid,
                                        const SolverConfig& cfg) {
  if (lambda_grid.empty())
    throw ValidationError("solve_p3_path: empty lambda grid");
  for (size_t i = 0; i < lambda_grid.size(); ++i) {
    if (lambda_grid[i] <= 0.0)
      throw ValidationError("solve_p3_path: grid must be strictly positive");
    if (i > 0 && lambda_grid[i] >= lambda_grid[i - 1])
      throw ValidationError("solve_p3_path: grid must be strictly descending");
  }
  std::vector<SolverOutput> outs;
  outs.reserve(lambda_grid.size());
  Vector warm_u;
  const Vector* warm = nullptr;
  for (double lam : lambda_grid) {
    outs.push_back(block_descent(p.A(), p.b(), p.m(), p.k(),
                                 Vector::Constant(p.k(), lam), cfg, warm));
    warm_u = *outs.back().u_hat;
    warm = &warm_u;
  }
  return outs;
}

SolverOutput solve_p4(const SensingProblem& p, const SolverConfig& cfg,
                      int outer_iters) {
  if (outer_iters < 0) throw ValidationError("solve_p4: outer_iters must be >= 0");
  SolverOutput out = solve_p3(p, cfg);
  int total_iters = out.iterations;
  Vector lam(p.k());
  for (int pass = 0; pass < outer_iters; ++pass) {
    const Vector& u = *out.u_hat;
    for (int i = 0; i < p.k(); ++i)
      lam(i) = cfg.lambda /
               (u.segment(static_cast<Eigen::Index>(i) * p.m(), p.m()).norm() +
                cfg.delta);
    SolverOutput next = block_descent(p.A(), p.b(), p.m(), p.k(), lam, cfg, &u);
    total_iters += next.iterations;
    out = std::move(next);
  }
  out.iterations = total_iters;
  return out;
}

SolverOutput solve_l1(const SensingProblem& p, const SolverConfig& cfg) {
  const int scalar_blocks = p.k() * p.m();
  SolverOutput out =
      sum_of_norms_splitting(p.A(), p.b(), 1, scalar_blocks,
                             Vector::Ones(scalar_blocks), cfg);
  out.residual_norms = p.block_residual_norms(out.x_hat);
  return out;
}

SolverOutput solve_huber_scalar(const SensingProblem& p, double tau,
                                const SolverConfig& cfg) {
  if (tau <= 0.0) throw ValidationError("solve_huber_scalar: tau must be > 0");
  const int scalar_blocks = p.k() * p.m();
  SolverOutput out = block_descent(p.A(), p.b(), 1, scalar_blocks,
                                   Vector::Constant(scalar_blocks, tau), cfg);
  out.residual_norms = p.block_residual_norms(out.x_hat);
  return out;
}

SolverOutput solve_p3_colored(const SensingProblem& p, const Matrix& Sigma,
                              const SolverConfig& cfg) {
  if (cfg.lambda <= 0.0)
    throw ValidationError("solve_p3_colored: lambda must be > 0");
  return colored_descent(p, Sigma, Vector::Constant(p.k(), cfg.lambda), cfg);
}

SolverOutput solve_p4_colored(const SensingProblem& p, const Matrix& Sigma,
                              const SolverConfig& cfg, int outer_iters) {
  if (outer_iters < 0)
    throw ValidationError("solve_p4_colored: outer_iters must be >= 0");
  SolverOutput out = solve_p3_colored(p, Sigma, cfg);
  int total_iters = out.iterations;
  Vector lam(p.k());
  for (int pass = 0; pass < outer_iters; ++pass) {
    const Vector& u = *out.u_hat;
    for (int i = 0; i < p.k(); ++i)
      lam(i) = cfg.lambda /
               (u.segment(static_cast<Eigen::Index>(i) * p.m(), p.m()).norm() +
                cfg.delta);
    SolverOutput next = colored_descent(p, Sigma, lam, cfg, &u);
    total_iters += next.iterations;
    out = std::move(next);
  }
  out.iterations = total_iters;
  return out;
}

double vector_huber_cost(const Vector& residual_norms, double lam) {
  if (lam < 0.0) throw ValidationError("vector_huber_cost: lam must be >= 0");
  if ((residual_norms.array() < 0.0).any())
    throw ValidationError("vector_huber_cost: norms must be >= 0");
  double total = 0.0;
  for (Eigen::Index i = 0; i < residual_norms.size(); ++i) {
    const double r = residual_norms(i);
    total += (r <= lam) ? 0.5 * r * r : lam * r - 0.5 * lam * lam;
  }
  return total;
}

}  // namespace rsense
