#include "dimbench/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dimbench/random.hpp"

namespace dimbench {

namespace {

constexpr int kMaxBracketSteps = 50;
constexpr int kMaxBisectionSteps = 200;
constexpr double kPerplexityTolerance = 1e-5;

struct RowEvaluation {
  double perplexity;
  double sum;
};

// Evaluates the conditional row for precision `beta` into `out`, with the
// distances shifted by their minimum so the largest weight is exp(0).
RowEvaluation evaluate_row(const Eigen::Ref<const Vector>& row, Index i, double dmin, double beta,
                           Vector& out) {
  double sum = 0.0;
  double weighted = 0.0;
  for (Index j = 0; j < row.size(); ++j) {
    if (j == i) {
      out(j) = 0.0;
      continue;
    }
    const double shifted = row(j) - dmin;
    const double w = std::exp(-beta * shifted);
    out(j) = w;
    sum += w;
    weighted += w * shifted;
  }
  out /= sum;
  // Entropy in nats: log(sum) + beta * E[shifted distance].
  const double entropy = std::log(sum) + beta * weighted / sum;
  return {std::exp(entropy), sum};
}

Matrix kernel_from_sq_dists(const Matrix& d2) {
  Matrix W = (1.0 + d2.array()).inverse().matrix();
  W.diagonal().setZero();
  return W;
}

// Scratch space for one descent iteration. Only the strict upper triangle of
// W is used: W(i, j) = (1 + |y_i - y_j|^2)^-1 for i < j.
struct DescentWorkspace {
  Matrix W;
  Eigen::ArrayXd column;
  Eigen::ArrayXd force;
  Eigen::ArrayXd diff;

  explicit DescentWorkspace(Index n) : W(n, n), column(n), force(n), diff(n) {}
};

// Rows are processed in segments of this many points so that the slices of
// Y and of the gradient touched by one segment stay in cache when the
// embedding dimension is large.
constexpr Index kRowBlock = 128;

// Fills the upper triangle of W for layout Y and returns Z. Distances are
// accumulated coordinate by coordinate down each column so the inner loop
// runs over contiguous memory.
double fill_kernel(const Matrix& Y, DescentWorkspace& ws) {
  const Index n = Y.rows();
  double half_z = 0.0;
  for (Index i0 = 0; i0 < n; i0 += kRowBlock) {
    const Index i1 = std::min(n, i0 + kRowBlock);
    for (Index j = i0 + 1; j < n; ++j) {
      const Index len = std::min(j, i1) - i0;
      auto d2 = ws.column.head(len);
      d2.setZero();
      for (Index c = 0; c < Y.cols(); ++c) {
        d2 += (Y.col(c).segment(i0, len).array() - Y(j, c)).square();
      }
      auto w = ws.W.col(j).segment(i0, len).array();
      w = (1.0 + d2).inverse();
      half_z += w.sum();
    }
  }
  return 2.0 * half_z;
}

// One pass over the pairs: accumulates sum_{i != j} p_ij log max(q_ij, floor)
// and writes the gradient for affinities scaled by `exaggeration`.
double pair_pass(const Matrix& P, const Matrix& Y, double Z, double exaggeration,
                 DescentWorkspace& ws, Matrix& grad) {
  const Index n = Y.rows();
  grad.setZero();
  double cross = 0.0;
  for (Index i0 = 0; i0 < n; i0 += kRowBlock) {
    const Index i1 = std::min(n, i0 + kRowBlock);
    for (Index j = i0 + 1; j < n; ++j) {
      const Index len = std::min(j, i1) - i0;
      const auto w = ws.W.col(j).segment(i0, len).array();
      const auto p = P.col(j).segment(i0, len).array();
      auto force = ws.force.head(len);
      auto diff = ws.diff.head(len);
      auto q = ws.column.head(len);
      q = w / Z;
      cross += (p * q.max(kAffinityFloor).log()).sum();
      // (exaggeration * p_ij - q_ij) * q_ij * Z, using q_ij * Z = w_ij.
      force = (exaggeration * p - q) * w;
      for (Index c = 0; c < Y.cols(); ++c) {
        diff = Y.col(c).segment(i0, len).array() - Y(j, c);
        grad.col(c).segment(i0, len).array() += force * diff;
        grad(j, c) -= (force * diff).sum();
      }
    }
  }
  grad *= 4.0;
  return 2.0 * cross;
}

double plogp_sum(const Matrix& P) {
  double acc = 0.0;
  for (Index j = 0; j < P.cols(); ++j) {
    for (Index i = 0; i < P.rows(); ++i) {
      const double p = P(i, j);
      if (i != j && p > 0.0) acc += p * std::log(std::max(p, kAffinityFloor));
    }
  }
  return acc;
}

}  // namespace

void TsneParams::validate() const {
  if (target_dim < 1) throw InvalidParameter("tsne: target_dim must be >= 1");
  if (!(perplexity >= 2.0)) throw InvalidParameter("tsne: perplexity must be >= 2");
  if (iterations < 1) throw InvalidParameter("tsne: iterations must be >= 1");
  if (!(learning_rate > 0.0)) throw InvalidParameter("tsne: learning_rate must be positive");
  if (!(init_scale > 0.0)) throw InvalidParameter("tsne: init_scale must be positive");
  if (!(exaggeration >= 1.0)) throw InvalidParameter("tsne: exaggeration must be >= 1");
  if (exaggeration_iterations < 0 || momentum_switch_iteration < 0) {
    throw InvalidParameter("tsne: phase lengths must be non-negative");
  }
}

double effective_perplexity(double requested, Index n) {
  return std::min(requested, static_cast<double>(n - 1) / 3.0);
}

RowCalibration calibrate_row(const Eigen::Ref<const Vector>& row, Index i, double perplexity) {
  const Index n = row.size();
  if (n < 2 || i < 0 || i >= n) throw InvalidInput("calibrate_row: bad row or index");
  if (!(perplexity > 0.0) || perplexity > static_cast<double>(n - 1)) {
    throw InvalidParameter("calibrate_row: perplexity must lie in (0, n-1]");
  }
  double dmin = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < n; ++j) {
    if (j != i) dmin = std::min(dmin, row(j));
  }

  RowCalibration out;
  out.probabilities.resize(n);
  const auto within = [&](double perp) {
    return std::abs(perp - perplexity) <= kPerplexityTolerance * perplexity;
  };
  const auto fail = [&](const char* why) {
    std::ostringstream msg;
    msg << "calibrate_row: " << why << " for point " << i << " (target perplexity "
        << perplexity << ")";
    return CalibrationError(msg.str(), static_cast<long>(i));
  };
  const auto finish = [&](double beta) {
    out.sigma = std::sqrt(1.0 / (2.0 * beta));
    return out;
  };

  double beta = 1.0;
  double perp = evaluate_row(row, i, dmin, beta, out.probabilities).perplexity;
  if (within(perp)) return finish(beta);

  // Perplexity decreases as beta grows.
  double lo = beta;
  double hi = beta;
  if (perp > perplexity) {
    int steps = 0;
    do {
      lo = hi;
      hi *= 2.0;
      perp = evaluate_row(row, i, dmin, hi, out.probabilities).perplexity;
      if (within(perp)) return finish(hi);
    } while (perp > perplexity && ++steps < kMaxBracketSteps);
    if (perp > perplexity) throw fail("no bracket within 50 doublings");
  } else {
    int steps = 0;
    do {
      hi = lo;
      lo /= 2.0;
      perp = evaluate_row(row, i, dmin, lo, out.probabilities).perplexity;
      if (within(perp)) return finish(lo);
    } while (perp < perplexity && ++steps < kMaxBracketSteps);
    if (perp < perplexity) throw fail("no bracket within 50 halvings");
  }

  for (int step = 0; step < kMaxBisectionSteps; ++step) {
    beta = std::sqrt(lo * hi);
    perp = evaluate_row(row, i, dmin, beta, out.probabilities).perplexity;
    if (within(perp)) return finish(beta);
    if (perp > perplexity) {
      lo = beta;
    } else {
      hi = beta;
    }
  }
  throw fail("bisection did not reach the perplexity tolerance");
}

Matrix conditional_affinities(const Matrix& sq_dists, double perplexity, Vector* sigmas) {
  const Index n = sq_dists.rows();
  Matrix P(n, n);
  if (sigmas) sigmas->resize(n);
  for (Index i = 0; i < n; ++i) {
    const Vector row = sq_dists.row(i).transpose();
    auto cal = calibrate_row(row, i, perplexity);
    P.row(i) = cal.probabilities.transpose();
    if (sigmas) (*sigmas)(i) = cal.sigma;
  }
  return P;
}

Matrix joint_affinities(const Matrix& conditional) {
  const Index n = conditional.rows();
  if (conditional.cols() != n) throw InvalidInput("joint_affinities: matrix must be square");
  Matrix P = (conditional + conditional.transpose()) / (2.0 * static_cast<double>(n));
  P = P.cwiseMax(kAffinityFloor);
  P.diagonal().setZero();
  P /= P.sum();
  return P;
}

LowDimAffinities low_dim_affinities(const Matrix& Y) {
  if (!Y.allFinite()) throw InvalidInput("low_dim_affinities: non-finite layout");
  const Matrix W = kernel_from_sq_dists(pairwise_sq_dists(Y));
  LowDimAffinities out;
  out.Z = W.sum();
  out.Q = W / out.Z;
  return out;
}

double kl_cost(const Matrix& P, const Matrix& Q) {
  double acc = 0.0;
  for (Index j = 0; j < P.cols(); ++j) {
    for (Index i = 0; i < P.rows(); ++i) {
      const double p = P(i, j);
      if (i == j || p <= 0.0) continue;
      acc += p * std::log(std::max(p, kAffinityFloor) / std::max(Q(i, j), kAffinityFloor));
    }
  }
  return acc;
}

Matrix kl_gradient(const Matrix& P, const Matrix& Q, double Z, const Matrix& Y) {
  const Index n = Y.rows();
  if (P.rows() != n || Q.rows() != n || P.cols() != n || Q.cols() != n) {
    throw InvalidInput("kl_gradient: inconsistent shapes");
  }
  // (p_ij - q_ij) * q_ij * Z per pair; diagonal terms vanish.
  Matrix M = ((P - Q).array() * Q.array() * Z).matrix();
  M.diagonal().setZero();
  const Vector row_sums = M.rowwise().sum();
  Matrix grad = row_sums.asDiagonal() * Y;
  grad.noalias() -= M * Y;
  return 4.0 * grad;
}

AffinityState input_affinities(const Matrix& X, double perplexity) {
  AffinityState state;
  const Matrix D = pairwise_sq_dists(X);
  state.P = joint_affinities(conditional_affinities(D, perplexity, &state.sigmas));
  return state;
}

Embedding tsne_embed(const Matrix& X, const TsneParams& params) {
  params.validate();
  const Index n = X.rows();
  if (n < 5) throw InvalidInput("tsne_embed: need at least 5 points");
  const Index d = params.target_dim;

  Embedding out;
  out.method = "tsne";
  out.perplexity = effective_perplexity(params.perplexity, n);
  const AffinityState state = input_affinities(X, out.perplexity);
  const Matrix& P = state.P;
  const double entropy_term = plogp_sum(P);

  RandomStream rng(params.seed);
  Matrix Y(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index c = 0; c < d; ++c) Y(i, c) = rng.gaussian(0.0, params.init_scale);
  }
  Matrix velocity = Matrix::Zero(n, d);
  Matrix grad(n, d);
  DescentWorkspace ws(n);
  out.cost_history.reserve(static_cast<std::size_t>(params.iterations));

  for (int t = 0; t < params.iterations; ++t) {
    const double Z = fill_kernel(Y, ws);
    const double exaggeration = t < params.exaggeration_iterations ? params.exaggeration : 1.0;
    // The cost uses the unexaggerated P: sum p log p - sum p log max(q, floor).
    const double cost = entropy_term - pair_pass(P, Y, Z, exaggeration, ws, grad);
    if (!std::isfinite(cost) || !std::isfinite(Z) || Z <= 0.0 || !grad.allFinite()) {
      std::ostringstream msg;
      msg << "tsne_embed: non-finite cost at iteration " << t << " (learning rate "
          << params.learning_rate << ")";
      throw DivergenceError(msg.str(), t, params.learning_rate);
    }
    out.cost_history.push_back(cost);

    const double momentum =
        t < params.momentum_switch_iteration ? params.initial_momentum : params.final_momentum;
    velocity = momentum * velocity - params.learning_rate * grad;
    Y += velocity;
  }

  if (!Y.allFinite()) {
    std::ostringstream msg;
    msg << "tsne_embed: layout diverged (learning rate " << params.learning_rate << ")";
    throw DivergenceError(msg.str(), params.iterations, params.learning_rate);
  }
  const auto low = low_dim_affinities(Y);
  out.final_cost = kl_cost(P, low.Q);
  out.Y = std::move(Y);
  return out;
}

}  // namespace dimbench
