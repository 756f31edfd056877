#pragma once

#include "dimbench/numerics.hpp"

namespace dimbench {

/// Torgerson double centering: B = -1/2 J (D o D) J with J = I - 11^T / n.
///
/// Requires D square, symmetric, nonnegative with a zero diagonal.
Matrix double_center(const Matrix& D);

struct MdsResult {
  Matrix X;            // n x d, column j scaled by sqrt(eigenvalues(j))
  Vector eigenvalues;  // the d largest, negatives clamped to zero
  Index positive_rank = 0;
  Index clamped_count = 0;  // how many of the d used eigenvalues were negative
  double strain = 0.0;
};

MdsResult classical_mds(const Matrix& D, Index d);

/// sqrt( sum (b_ij - <x_i, x_j>)^2 / sum b_ij^2 ).
double strain(const Matrix& B, const Matrix& X);

}  // namespace dimbench
