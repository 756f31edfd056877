#include "dimbench/metrics.hpp"

#include <cmath>

#include "dimbench/error.hpp"

namespace dimbench {

namespace {

void require_nonempty(const ConfusionMatrix& cm) {
  if (cm.counts.size() == 0 || cm.total() <= 0) throw InvalidInput("empty confusion matrix");
}

}  // namespace

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred, int class_count) {
  if (y_true.size() != y_pred.size()) throw InvalidInput("confusion: length mismatch");
  if (class_count < 1) throw InvalidInput("confusion: class_count must be positive");
  ConfusionMatrix cm;
  cm.counts.setZero(class_count, class_count);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i];
    const int p = y_pred[i];
    if (t < 0 || t >= class_count || p < 0 || p >= class_count) {
      throw InvalidInput("confusion: label out of range");
    }
    ++cm.counts(t, p);
  }
  return cm;
}

double accuracy(const ConfusionMatrix& cm) {
  require_nonempty(cm);
  return static_cast<double>(cm.counts.trace()) / static_cast<double>(cm.total());
}

double f_measure(const ConfusionMatrix& cm) {
  require_nonempty(cm);
  const int N = cm.class_count();
  double acc = 0.0;
  for (int c = 0; c < N; ++c) {
    const auto tp = static_cast<double>(cm.counts(c, c));
    const auto predicted = static_cast<double>(cm.counts.col(c).sum());
    const auto actual = static_cast<double>(cm.counts.row(c).sum());
    const double precision = predicted > 0 ? tp / predicted : 0.0;
    const double recall = actual > 0 ? tp / actual : 0.0;
    if (precision + recall > 0.0) acc += 2.0 * precision * recall / (precision + recall);
  }
  return acc / N;
}

double g_mean(const ConfusionMatrix& cm) {
  require_nonempty(cm);
  double log_sum = 0.0;
  int present = 0;
  for (int c = 0; c < cm.class_count(); ++c) {
    const auto actual = cm.counts.row(c).sum();
    if (actual == 0) continue;
    const auto tp = cm.counts(c, c);
    if (tp == 0) return 0.0;
    log_sum += std::log(static_cast<double>(tp) / static_cast<double>(actual));
    ++present;
  }
  return std::exp(log_sum / present);
}

ScoreRow score(const ConfusionMatrix& cm) {
  return {accuracy(cm), f_measure(cm), g_mean(cm)};
}

}  // namespace dimbench
