#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dimbench/numerics.hpp"

namespace dimbench {

/// Optimizer settings for exact t-SNE.
struct TsneParams {
  int target_dim = 2;
  double perplexity = 30.0;  // capped at (n - 1) / 3 for small inputs
  int iterations = 1000;
  double learning_rate = 200.0;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  int momentum_switch_iteration = 250;
  double exaggeration = 4.0;
  int exaggeration_iterations = 100;
  double init_scale = 1e-4;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Floor applied to affinities entering a logarithm or a division.
inline constexpr double kAffinityFloor = 1e-12;

struct RowCalibration {
  double sigma = 0.0;
  Vector probabilities;  // p_{j|i}; entry i is zero
};

/// Bisection on the Gaussian precision of point `i` until the row's
/// perplexity 2^H matches `perplexity` to a relative 1e-5.
///
/// Throws CalibrationError naming `i` when no bracket is found within 50
/// doublings or halvings.
RowCalibration calibrate_row(const Eigen::Ref<const Vector>& sq_dists_row, Index i,
                             double perplexity);

/// Row-wise calibrated conditional affinities p_{j|i}; sigmas are optional.
Matrix conditional_affinities(const Matrix& sq_dists, double perplexity,
                              Vector* sigmas = nullptr);

/// Symmetrized joint affinities (p_{j|i} + p_{i|j}) / 2n, floored and
/// renormalized to sum to one.
Matrix joint_affinities(const Matrix& conditional);

struct LowDimAffinities {
  Matrix Q;        // Student-t joint affinities, sum to one
  double Z = 0.0;  // sum of (1 + |y_k - y_l|^2)^-1 over k != l
};

LowDimAffinities low_dim_affinities(const Matrix& Y);

/// KL(P || Q) over off-diagonal pairs, with 0 log 0 := 0.
double kl_cost(const Matrix& P, const Matrix& Q);

/// Gradient of kl_cost with respect to each embedded point.
Matrix kl_gradient(const Matrix& P, const Matrix& Q, double Z, const Matrix& Y);

struct AffinityState {
  Matrix P;
  Vector sigmas;
  Matrix Q;
  double Z = 0.0;
};

/// High-dimensional side of the affinity state (P and sigmas).
AffinityState input_affinities(const Matrix& X, double perplexity);

struct Embedding {
  Matrix Y;
  std::string method;
  double final_cost = 0.0;
  // Cost against the unexaggerated P, evaluated at the start of each iteration.
  std::vector<double> cost_history;
  // Diagnostic: perplexity actually used after the small-n cap.
  double perplexity = 0.0;
};

double effective_perplexity(double requested, Index n);

/// Exact O(n^2) t-SNE with momentum gradient descent and early exaggeration.
///
/// Deterministic for a given (X, params); throws DivergenceError when the
/// cost stops being finite.
Embedding tsne_embed(const Matrix& X, const TsneParams& params);

}  // namespace dimbench
