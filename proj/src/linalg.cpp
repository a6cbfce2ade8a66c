#include "rsense/linalg.hpp"

#include <string>

namespace rsense {

Eigen::Index numerical_rank(const Matrix& A) {
  if (A.rows() == 0 || A.cols() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(A);
  const auto& sv = svd.singularValues();
  const double cutoff = kRankTol * sv(0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return rank;
}

Vector least_squares(const Matrix& A, const Vector& b) {
  if (A.rows() != b.size())
    throw DimensionError("least_squares: A has " + std::to_string(A.rows()) +
                         " rows but b has " + std::to_string(b.size()) +
                         " entries");
  if (A.cols() == 0) return Vector(0);
  if (A.rows() >= A.cols()) {
    Eigen::ColPivHouseholderQR<Matrix> qr(A);
    qr.setThreshold(kRankTol);
    if (qr.rank() == A.cols()) return qr.solve(b);
  }
  // Rank-deficient or underdetermined: minimum-norm solution via the SVD
  // pseudo-inverse.
  Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(kRankTol);
  return svd.solve(b);
}

LeastSquaresSolver::LeastSquaresSolver(const Matrix& A) : qr_(A) {
  if (A.rows() < A.cols())
    throw RankDeficientError("least-squares factorization: " +
                             std::to_string(A.rows()) + " rows < " +
                             std::to_string(A.cols()) + " columns");
  qr_.setThreshold(kRankTol);
  if (qr_.rank() != A.cols())
    throw RankDeficientError(
        "least-squares factorization: matrix has column rank " +
        std::to_string(qr_.rank()) + " < " + std::to_string(A.cols()));
}

ProjectionPair projection_pair(const Matrix& A) {
  if (A.rows() < A.cols())
    throw RankDeficientError("projection_pair: more columns than rows");
  Eigen::ColPivHouseholderQR<Matrix> qr(A);
  qr.setThreshold(kRankTol);
  if (qr.rank() != A.cols())
    throw RankDeficientError("projection_pair: column-rank deficiency");
  Matrix Q1 = qr.householderQ() * Matrix::Identity(A.rows(), A.cols());
  // Column pivoting permutes columns only; Q1 still spans range(A).
  ProjectionPair out;
  out.onto = Q1 * Q1.transpose();
  out.complement = Matrix::Identity(A.rows(), A.rows()) - out.onto;
  return out;
}

ToeplitzSqrtPair toeplitz_sqrt_pair(const Vector& first_column) {
  const Eigen::Index p = first_column.size();
  if (p == 0) throw DimensionError("toeplitz_sqrt_pair: empty first column");
  Matrix sigma(p, p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      sigma(i, j) = first_column(std::abs(i - j));

  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma);
  const Vector& ev = es.eigenvalues();
  const double lambda_min = ev(0);
  const double lambda_max = ev(p - 1);
  if (lambda_min <= kRankTol * std::max(lambda_max, 0.0))
    throw NotPositiveDefiniteError(
        "toeplitz_sqrt_pair: matrix not positive definite (eigenvalue " +
        std::to_string(lambda_min) + ")");

  ToeplitzSqrtPair out;
  out.sigma = std::move(sigma);
  out.sqrt = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
             es.eigenvectors().transpose();
  out.inverse_sqrt =
      es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
      es.eigenvectors().transpose();
  return out;
}

}  // namespace rsense
