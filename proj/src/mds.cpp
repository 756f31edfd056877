#include "dimbench/mds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dimbench {

namespace {

void check_dissimilarities(const Matrix& D) {
  if (D.rows() != D.cols()) throw InvalidInput("double_center: matrix must be square");
  if (!D.allFinite()) throw InvalidInput("double_center: non-finite dissimilarity");
  const double scale = 1.0 + D.cwiseAbs().maxCoeff();
  for (Index j = 0; j < D.cols(); ++j) {
    if (D(j, j) != 0.0) throw InvalidInput("double_center: diagonal must be zero");
    for (Index i = 0; i < D.rows(); ++i) {
      if (D(i, j) < 0.0) throw InvalidInput("double_center: negative dissimilarity");
      if (std::abs(D(i, j) - D(j, i)) > 1e-10 * scale) {
        throw InvalidInput("double_center: dissimilarities are not symmetric");
      }
    }
  }
}

}  // namespace

Matrix double_center(const Matrix& D) {
  check_dissimilarities(D);
  const Matrix D2 = D.cwiseProduct(D);
  // J D2 J expanded: subtract row and column means, add back the grand mean.
  const Vector row_means = D2.rowwise().mean();
  const Vector col_means = D2.colwise().mean().transpose();
  const double grand = D2.mean();
  Matrix B = D2;
  B.colwise() -= row_means;
  B.rowwise() -= col_means.transpose();
  B.array() += grand;
  B *= -0.5;
  return (B + B.transpose()) / 2.0;
}

MdsResult classical_mds(const Matrix& D, Index d) {
  const Index n = D.rows();
  if (d < 1 || d > n - 1) {
    std::ostringstream msg;
    msg << "classical_mds: target dimension " << d << " outside [1, " << n - 1 << "]";
    throw InvalidParameter(msg.str());
  }
  const Matrix B = double_center(D);
  const auto eig = jacobi_eigh(B);

  MdsResult out;
  const double scale = std::max(1.0, std::abs(eig.eigenvalues(0)));
  for (Index j = 0; j < n; ++j) {
    if (eig.eigenvalues(j) > 1e-12 * scale) ++out.positive_rank;
  }
  if (eig.eigenvalues(0) <= 0.0) {
    throw DegenerateGeometry("classical_mds: no positive eigenvalue among the top components");
  }
  out.eigenvalues = eig.eigenvalues.head(d);
  for (Index j = 0; j < d; ++j) {
    if (out.eigenvalues(j) < 0.0) {
      out.eigenvalues(j) = 0.0;
      ++out.clamped_count;
    }
  }
  out.X = eig.eigenvectors.leftCols(d) * out.eigenvalues.cwiseSqrt().asDiagonal();
  out.strain = strain(B, out.X);
  return out;
}

double strain(const Matrix& B, const Matrix& X) {
  if (B.rows() != B.cols() || X.rows() != B.rows()) throw InvalidInput("strain: inconsistent shapes");
  const double denom = B.squaredNorm();
  if (denom == 0.0) throw UndefinedValue("strain: B is identically zero");
  Matrix residual = B;
  residual.noalias() -= X * X.transpose();
  return std::sqrt(residual.squaredNorm() / denom);
}

}  // namespace dimbench
