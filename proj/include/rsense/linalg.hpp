#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace rsense {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Relative cutoff under which singular values are treated as zero.
inline constexpr double kRankTol = 1e-10;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct RankDeficientError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotPositiveDefiniteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical column rank with threshold kRankTol relative to the largest
// singular value.
Eigen::Index numerical_rank(const Matrix& A);

// Minimizer of ||b - A x||_2. Householder QR when A has full column rank;
// falls back to the SVD pseudo-inverse (minimum-norm solution) when the rank
// is deficient or the system is underdetermined.
Vector least_squares(const Matrix& A, const Vector& b);

// Cached factorization for repeated least-squares solves against one fixed A.
// Requires full column rank; the hot loops of the iterative solvers depend on
// the factorization being computed exactly once.
class LeastSquaresSolver {
 public:
  explicit LeastSquaresSolver(const Matrix& A);
  // arg min_x ||A x - rhs||_2
  Vector solve(const Vector& rhs) const { return qr_.solve(rhs); }
  Eigen::Index rows() const { return qr_.rows(); }
  Eigen::Index cols() const { return qr_.cols(); }

 private:
  Eigen::ColPivHouseholderQR<Matrix> qr_;
};

struct ProjectionPair {
  Matrix onto;        // orthogonal projector onto range(A)
  Matrix complement;  // I - onto
};

// Both projectors for a full-column-rank A, built from the thin Q factor.
ProjectionPair projection_pair(const Matrix& A);

struct ToeplitzSqrtPair {
  Matrix sigma;         // symmetric Toeplitz matrix
  Matrix sqrt;          // sigma^{1/2}, symmetric (noise synthesis)
  Matrix inverse_sqrt;  // sigma^{-1/2}, symmetric (prewhitening)
};

// Symmetric Toeplitz matrix built from its first column, plus its square root
// and inverse square root via one eigendecomposition. Throws
// NotPositiveDefiniteError naming the offending eigenvalue when the matrix is
// not positive definite.
ToeplitzSqrtPair toeplitz_sqrt_pair(const Vector& first_column);

}  // namespace rsense
