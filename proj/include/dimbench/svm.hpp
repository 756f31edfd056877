#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dimbench/numerics.hpp"

namespace dimbench {

struct SvmOptions {
  double C = 1.0;
  int max_epochs = 1000;
  // Stop once the largest single-coordinate change of alpha in an epoch is
  // at most this.
  double tolerance = 1e-6;
  std::uint64_t seed = 0;
};

/// Linear soft-margin SVM with the bias folded into the weights as a
/// constant feature of value 1 (so b is regularized along with w).
struct LinearModel {
  Vector u;  // weights, last entry is the bias
  double C = 1.0;
  Vector alphas;
  std::vector<double> primal_history;  // 1/2 |u|^2 + C sum hinge, per epoch
  std::vector<double> dual_history;    // sum alpha - 1/2 |u|^2, per epoch
  int epochs = 0;
  bool converged = false;

  auto weights() const { return u.head(u.size() - 1); }
  double bias() const { return u(u.size() - 1); }
  double decision(const Eigen::Ref<const RowVector>& x) const;
};

/// Dual coordinate ascent on the hinge-loss dual with box [0, C]. The visit
/// order is one permutation drawn from `seed` and reused every epoch.
LinearModel svm_train_binary(const Matrix& X, std::span<const int> y, const SvmOptions& options);

/// 1/2 |u|^2 + C sum_i max(0, 1 - y_i u . x~_i).
double svm_primal_objective(const Vector& u, const Matrix& X, std::span<const int> y, double C);

/// Geometric margin 2 / |w| (bias excluded).
double svm_margin(const LinearModel& model);

struct OvrModelSet {
  std::vector<LinearModel> models;  // one per class, class c against the rest
  int class_count = 0;
};

OvrModelSet svm_train_ovr(const Matrix& X, std::span<const int> labels, int class_count,
                          const SvmOptions& options);

/// Decision value of every class's model at x.
Vector svm_scores(const OvrModelSet& models, const Eigen::Ref<const RowVector>& x);

/// Class with the largest decision value; ties go to the lower id.
int svm_predict(const OvrModelSet& models, const Eigen::Ref<const RowVector>& x);

}  // namespace dimbench
