#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Core>

namespace dimbench {

/// counts(t, p): samples of true class t predicted as p.
struct ConfusionMatrix {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;

  int class_count() const { return static_cast<int>(counts.rows()); }
  std::int64_t total() const { return counts.sum(); }
};

struct ScoreRow {
  double accuracy = 0.0;
  double f_measure = 0.0;
  double g_mean = 0.0;
};

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred, int class_count);

double accuracy(const ConfusionMatrix& cm);

/// Unweighted mean over classes of the one-vs-rest F1; a class whose
/// precision and recall are both zero (or undefined) contributes 0.
double f_measure(const ConfusionMatrix& cm);

/// Geometric mean of per-class recalls; 0 if any recall is 0. Classes absent
/// from y_true are skipped.
double g_mean(const ConfusionMatrix& cm);

ScoreRow score(const ConfusionMatrix& cm);

}  // namespace dimbench
