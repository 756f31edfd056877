#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include <Eigen/Core>

#include "dimbench/error.hpp"

namespace dimbench {

using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;
using RowVector = Eigen::RowVectorXd;

/// Squared Euclidean distance between two rows, summed in column order.
///
/// Every neighbor computation in the library goes through this function so
/// that equal geometric configurations produce bitwise-equal distances.
template <typename A, typename B>
typename A::Scalar sq_dist(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  typename A::Scalar acc(0);
  for (Index c = 0; c < a.size(); ++c) {
    const auto diff = a(c) - b(c);
    acc += diff * diff;
  }
  return acc;
}

/// All pairwise squared Euclidean distances between the rows of `X`.
///
/// The result is symmetric by construction with an exact zero diagonal.
template <typename Derived>
MatrixX<typename Derived::Scalar> pairwise_sq_dists(const Eigen::MatrixBase<Derived>& X) {
  using Scalar = typename Derived::Scalar;
  if (!X.allFinite()) throw InvalidInput("pairwise_sq_dists: input contains non-finite values");
  const Index n = X.rows();
  MatrixX<Scalar> D = MatrixX<Scalar>::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      const Scalar d = sq_dist(X.row(i), X.row(j));
      D(i, j) = d;
      D(j, i) = d;
    }
  }
  return D;
}

template <typename Scalar>
struct EighResult {
  VectorX<Scalar> eigenvalues;   // descending
  MatrixX<Scalar> eigenvectors;  // column j pairs with eigenvalues(j)
  int sweeps = 0;
};

struct JacobiOptions {
  // Converged when the off-diagonal Frobenius norm falls to tolerance * ||S||_F.
  double tolerance = 1e-10;
  int max_sweeps = 100;
};

namespace detail {

template <typename Scalar>
Scalar off_diagonal_norm(const MatrixX<Scalar>& A) {
  const Index n = A.rows();
  Scalar acc(0);
  for (Index q = 1; q < n; ++q) {
    const Scalar* col = A.data() + q * n;
    for (Index p = 0; p < q; ++p) acc += col[p] * col[p];
  }
  return std::sqrt(Scalar(2) * acc);
}

template <typename Scalar>
struct Rotation {
  Index p;
  Index q;
  Scalar c;
  Scalar s;
  Scalar app;  // diagonal entries after the rotation
  Scalar aqq;
};

// Computes A <- J^T A J and V <- V J, where J is the product of one round's
// rotations on pairwise disjoint index pairs. Disjoint rotations commute, so
// the columns can be mixed for every pair first and the rows afterwards.
template <typename Scalar>
void apply_round(MatrixX<Scalar>& A, MatrixX<Scalar>& V, const std::vector<Rotation<Scalar>>& round) {
  const Index n = A.rows();
  for (const auto& r : round) {
    Scalar* colp = A.data() + r.p * n;
    Scalar* colq = A.data() + r.q * n;
    for (Index k = 0; k < n; ++k) {
      const Scalar akp = colp[k];
      const Scalar akq = colq[k];
      colp[k] = r.c * akp - r.s * akq;
      colq[k] = r.s * akp + r.c * akq;
    }
  }
  for (Index j = 0; j < n; ++j) {
    Scalar* col = A.data() + j * n;
    for (const auto& r : round) {
      const Scalar a = col[r.p];
      const Scalar b = col[r.q];
      col[r.p] = r.c * a - r.s * b;
      col[r.q] = r.s * a + r.c * b;
    }
  }
  for (const auto& r : round) {
    A(r.p, r.p) = r.app;
    A(r.q, r.q) = r.aqq;
    A(r.p, r.q) = Scalar(0);
    A(r.q, r.p) = Scalar(0);
    Scalar* vp = V.data() + r.p * n;
    Scalar* vq = V.data() + r.q * n;
    for (Index k = 0; k < n; ++k) {
      const Scalar a = vp[k];
      const Scalar b = vq[k];
      vp[k] = r.c * a - r.s * b;
      vq[k] = r.s * a + r.c * b;
    }
  }
}

// Rotation annihilating A(p,q), p < q.
template <typename Scalar>
Rotation<Scalar> make_rotation(const MatrixX<Scalar>& A, Index p, Index q) {
  const Scalar apq = A(p, q);
  const Scalar app = A(p, p);
  const Scalar aqq = A(q, q);
  const Scalar theta = (aqq - app) / (Scalar(2) * apq);
  Scalar t = Scalar(1) / (std::abs(theta) + std::sqrt(theta * theta + Scalar(1)));
  if (theta < Scalar(0)) t = -t;
  const Scalar c = Scalar(1) / std::sqrt(t * t + Scalar(1));
  return {p, q, c, t * c, app - t * apq, aqq + t * apq};
}

}  // namespace detail

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// The input is symmetrized as (S + S^T) / 2 first. Eigenvalues come back in
/// descending order; each eigenvector is signed so that its largest-magnitude
/// component is positive (the first one wins on exact ties).
template <typename Derived>
EighResult<typename Derived::Scalar> jacobi_eigh(const Eigen::MatrixBase<Derived>& S,
                                                 const JacobiOptions& options = {}) {
  using Scalar = typename Derived::Scalar;
  if (S.rows() != S.cols()) {
    std::ostringstream msg;
    msg << "jacobi_eigh: matrix must be square, got " << S.rows() << "x" << S.cols();
    throw InvalidInput(msg.str());
  }
  if (!S.allFinite()) throw InvalidInput("jacobi_eigh: input contains non-finite values");

  const Index n = S.rows();
  MatrixX<Scalar> A = (S + S.transpose()) / Scalar(2);
  MatrixX<Scalar> V = MatrixX<Scalar>::Identity(n, n);
  const Scalar threshold = Scalar(options.tolerance) * A.norm();

  // Round-robin schedule over m slots (one padding slot when n is odd).
  const Index m = n + (n % 2);
  std::vector<Index> players(static_cast<std::size_t>(m));
  std::iota(players.begin(), players.end(), Index{0});
  std::vector<detail::Rotation<Scalar>> rotations;
  rotations.reserve(static_cast<std::size_t>(m / 2));

  EighResult<Scalar> result;
  bool converged = false;
  for (int sweep = 0; sweep <= options.max_sweeps; ++sweep) {
    if (detail::off_diagonal_norm(A) <= threshold) {
      converged = true;
      result.sweeps = sweep;
      break;
    }
    if (sweep == options.max_sweeps) break;
    // Round-robin ordering: each of the m - 1 rounds pairs every index with
    // a different partner, so one sweep visits every (p, q) exactly once.
    for (Index round = 0; round + 1 < m; ++round) {
      rotations.clear();
      for (Index k = 0; k < m / 2; ++k) {
        Index p = players[static_cast<std::size_t>(k)];
        Index q = players[static_cast<std::size_t>(m - 1 - k)];
        if (p >= n || q >= n) continue;  // padding slot for odd n
        if (p > q) std::swap(p, q);
        const Scalar apq = A(p, q);
        if (apq == Scalar(0)) continue;
        // Entries below the diagonals' resolution are dropped outright once
        // the early sweeps have removed the bulk of the off-diagonal mass.
        const Scalar g = Scalar(100) * std::abs(apq);
        if (sweep > 3 && std::abs(A(p, p)) + g == std::abs(A(p, p)) &&
            std::abs(A(q, q)) + g == std::abs(A(q, q))) {
          A(p, q) = Scalar(0);
          A(q, p) = Scalar(0);
          continue;
        }
        rotations.push_back(detail::make_rotation(A, p, q));
      }
      if (!rotations.empty()) detail::apply_round(A, V, rotations);
      std::rotate(players.begin() + 1, players.end() - 1, players.end());
    }
  }
  if (!converged) {
    const Scalar residual = detail::off_diagonal_norm(A);
    std::ostringstream msg;
    msg << "jacobi_eigh: no convergence after " << options.max_sweeps
        << " sweeps, off-diagonal norm " << residual;
    throw ConvergenceError(msg.str(), static_cast<double>(residual));
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return A(a, a) > A(b, b); });

  result.eigenvalues.resize(n);
  result.eigenvectors.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    const Index src = order[static_cast<std::size_t>(j)];
    result.eigenvalues(j) = A(src, src);
    auto v = result.eigenvectors.col(j);
    v = V.col(src);
    Index pivot = 0;
    for (Index k = 1; k < n; ++k) {
      if (std::abs(v(k)) > std::abs(v(pivot))) pivot = k;
    }
    if (v(pivot) < Scalar(0)) v = -v;
  }
  return result;
}

template <typename Scalar>
struct Standardized {
  MatrixX<Scalar> values;
  VectorX<Scalar> means;
  VectorX<Scalar> stds;  // population standard deviations of the input
};

/// Column-wise z-scores using population (1/n) variance.
///
/// Zero-variance columns map to all zeros.
template <typename Derived>
Standardized<typename Derived::Scalar> standardize(const Eigen::MatrixBase<Derived>& X) {
  using Scalar = typename Derived::Scalar;
  if (X.rows() < 2) throw InvalidInput("standardize: need at least 2 rows");
  if (!X.allFinite()) throw InvalidInput("standardize: input contains non-finite values");
  const Scalar n = static_cast<Scalar>(X.rows());

  Standardized<Scalar> out;
  out.means = X.colwise().sum().transpose() / n;
  out.values = X.rowwise() - out.means.transpose();
  out.stds = (out.values.colwise().squaredNorm().transpose() / n).cwiseSqrt();
  for (Index c = 0; c < X.cols(); ++c) {
    // A constant column can leave rounding residue after centering; anything
    // at that level counts as zero variance.
    const Scalar scale = X.col(c).cwiseAbs().maxCoeff();
    const Scalar floor = Scalar(64) * std::numeric_limits<Scalar>::epsilon() * scale;
    if (out.stds(c) > floor) {
      out.values.col(c) /= out.stds(c);
    } else {
      out.values.col(c).setZero();
    }
  }
  return out;
}

}  // namespace dimbench
