#pragma once

#include <span>
#include <vector>

#include "dimbench/numerics.hpp"

namespace dimbench {

struct Neighbor {
  double sq_dist;
  Index index;
};

/// Orders neighbors by squared distance, then by row index.
inline bool nearer(const Neighbor& a, const Neighbor& b) {
  return a.sq_dist < b.sq_dist || (a.sq_dist == b.sq_dist && a.index < b.index);
}

/// The k nearest rows of `X` to `x`, skipping row `exclude` (pass -1 to
/// keep every row). Sorted nearest first.
std::vector<Neighbor> nearest_rows(const Matrix& X, const Eigen::Ref<const RowVector>& x, int k,
                                   Index exclude = -1);

/// Training data and statistics shared by the KNN and ENN predictors.
struct NeighborModel {
  Matrix train_X;
  std::vector<int> train_y;
  int k = 5;
  int class_count = 0;

  // ENN only: per-class statistic Q_i of the training sample.
  std::vector<double> enn_base_stats;
  // ENN only: per training row, its k nearest other training rows.
  std::vector<std::vector<Neighbor>> enn_neighbors;
  std::vector<Index> enn_class_sizes;
  // Per class i: number of (row of class i, neighbor of class i) pairs.
  std::vector<Index> enn_same_class_hits;

  Index size() const { return train_X.rows(); }
};

/// Validates and stores the training set. Requires 1 <= k <= n - 1 and
/// every class in [0, class_count) present.
NeighborModel fit_knn(Matrix X, std::vector<int> y, int k, int class_count);

/// fit_knn plus the neighbor lists and class statistics ENN queries reuse.
NeighborModel fit_enn(Matrix X, std::vector<int> y, int k, int class_count);

struct KnnPrediction {
  int label = 0;
  Vector posterior;  // vote share per class
};

KnnPrediction knn_predict(const NeighborModel& model, const Eigen::Ref<const RowVector>& x);

/// Fraction of class-i rows' k nearest neighbors (self excluded) that are
/// also of class i.
double enn_class_statistic(const Matrix& X, std::span<const int> y, int k, int class_id);

/// Assigns x to the class j maximizing sum_i Q_{i,j}, where Q_{i,j} is class
/// i's statistic once x joins class j. Ties go to the lower class id.
///
/// Only the neighbor lists that x can enter change, so a query costs one
/// pass over the training rows instead of a full rebuild per candidate.
int enn_predict(const NeighborModel& model, const Eigen::Ref<const RowVector>& x);

/// Sum_i Q_{i,j} for every candidate class j.
Vector enn_scores(const NeighborModel& model, const Eigen::Ref<const RowVector>& x);

}  // namespace dimbench
