#include "dimbench/neighbors.hpp"

#include <algorithm>
#include <sstream>

namespace dimbench {

namespace {

void check_query(const NeighborModel& model, const Eigen::Ref<const RowVector>& x) {
  if (x.size() != model.train_X.cols()) {
    std::ostringstream msg;
    msg << "query has dimension " << x.size() << ", model expects " << model.train_X.cols();
    throw InvalidInput(msg.str());
  }
}

double class_ratio(Index hits, Index class_size, int k) {
  return static_cast<double>(hits) / (static_cast<double>(class_size) * k);
}

}  // namespace

std::vector<Neighbor> nearest_rows(const Matrix& X, const Eigen::Ref<const RowVector>& x, int k,
                                   Index exclude) {
  std::vector<Neighbor> all;
  all.reserve(static_cast<std::size_t>(X.rows()));
  for (Index r = 0; r < X.rows(); ++r) {
    if (r == exclude) continue;
    all.push_back({sq_dist(X.row(r), x), r});
  }
  const auto take = std::min<std::size_t>(static_cast<std::size_t>(k), all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end(),
                    nearer);
  all.resize(take);
  return all;
}

NeighborModel fit_knn(Matrix X, std::vector<int> y, int k, int class_count) {
  const auto n = X.rows();
  if (static_cast<std::size_t>(n) != y.size()) throw InvalidInput("fit_knn: label count mismatch");
  if (k < 1 || k > n - 1) {
    std::ostringstream msg;
    msg << "neighbor count k=" << k << " must lie in [1, " << n - 1 << "]";
    throw InvalidParameter(msg.str());
  }
  if (!X.allFinite()) throw InvalidInput("fit_knn: non-finite training data");
  std::vector<Index> sizes(static_cast<std::size_t>(std::max(class_count, 0)), 0);
  for (const int label : y) {
    if (label < 0 || label >= class_count) throw InvalidInput("fit_knn: label out of range");
    ++sizes[static_cast<std::size_t>(label)];
  }
  for (const auto s : sizes) {
    if (s == 0) throw InvalidInput("fit_knn: every class needs a training sample");
  }
  NeighborModel model;
  model.train_X = std::move(X);
  model.train_y = std::move(y);
  model.k = k;
  model.class_count = class_count;
  model.enn_class_sizes = std::move(sizes);
  return model;
}

NeighborModel fit_enn(Matrix X, std::vector<int> y, int k, int class_count) {
  NeighborModel model = fit_knn(std::move(X), std::move(y), k, class_count);
  const Index n = model.size();
  model.enn_neighbors.resize(static_cast<std::size_t>(n));
  model.enn_same_class_hits.assign(static_cast<std::size_t>(class_count), 0);
  for (Index r = 0; r < n; ++r) {
    auto list = nearest_rows(model.train_X, model.train_X.row(r), k, r);
    const int own = model.train_y[static_cast<std::size_t>(r)];
    for (const auto& nb : list) {
      if (model.train_y[static_cast<std::size_t>(nb.index)] == own) {
        ++model.enn_same_class_hits[static_cast<std::size_t>(own)];
      }
    }
    model.enn_neighbors[static_cast<std::size_t>(r)] = std::move(list);
  }
  model.enn_base_stats.resize(static_cast<std::size_t>(class_count));
  for (int c = 0; c < class_count; ++c) {
    const auto cc = static_cast<std::size_t>(c);
    model.enn_base_stats[cc] =
        class_ratio(model.enn_same_class_hits[cc], model.enn_class_sizes[cc], k);
  }
  return model;
}

KnnPrediction knn_predict(const NeighborModel& model, const Eigen::Ref<const RowVector>& x) {
  check_query(model, x);
  const auto neighbors = nearest_rows(model.train_X, x, model.k);
  const auto N = static_cast<std::size_t>(model.class_count);
  std::vector<int> votes(N, 0);
  std::vector<double> summed(N, 0.0);
  for (const auto& nb : neighbors) {
    const auto c = static_cast<std::size_t>(model.train_y[static_cast<std::size_t>(nb.index)]);
    ++votes[c];
    summed[c] += nb.sq_dist;
  }
  KnnPrediction out;
  out.posterior = Vector::Zero(model.class_count);
  std::size_t best = 0;
  for (std::size_t c = 0; c < N; ++c) {
    out.posterior(static_cast<Index>(c)) = static_cast<double>(votes[c]) / model.k;
    if (votes[c] > votes[best] || (votes[c] == votes[best] && summed[c] < summed[best])) best = c;
  }
  out.label = static_cast<int>(best);
  return out;
}

double enn_class_statistic(const Matrix& X, std::span<const int> y, int k, int class_id) {
  Index hits = 0;
  Index members = 0;
  for (Index r = 0; r < X.rows(); ++r) {
    if (y[static_cast<std::size_t>(r)] != class_id) continue;
    ++members;
    for (const auto& nb : nearest_rows(X, X.row(r), k, r)) {
      if (y[static_cast<std::size_t>(nb.index)] == class_id) ++hits;
    }
  }
  if (members == 0) throw InvalidInput("enn_class_statistic: class has no samples");
  return class_ratio(hits, members, k);
}

Vector enn_scores(const NeighborModel& model, const Eigen::Ref<const RowVector>& x) {
  check_query(model, x);
  if (model.enn_neighbors.size() != static_cast<std::size_t>(model.size())) {
    throw InvalidInput("enn_scores: model was not fitted for ENN");
  }
  const auto N = static_cast<std::size_t>(model.class_count);
  const int k = model.k;

  // x's own neighbors among the training rows; self-exclusion is implicit.
  std::vector<Index> own_hits(N, 0);
  for (const auto& nb : nearest_rows(model.train_X, x, k)) {
    ++own_hits[static_cast<std::size_t>(model.train_y[static_cast<std::size_t>(nb.index)])];
  }

  // x would take index n, so it displaces a row's k-th neighbor only when
  // strictly nearer. The displaced neighbor's contribution goes away
  // regardless of the candidate class; x's contribution depends on it.
  std::vector<Index> evicted_same(N, 0);
  std::vector<Index> entered(N, 0);
  for (Index p = 0; p < model.size(); ++p) {
    const auto& list = model.enn_neighbors[static_cast<std::size_t>(p)];
    const double d = sq_dist(model.train_X.row(p), x);
    if (!(d < list.back().sq_dist)) continue;
    const int cp = model.train_y[static_cast<std::size_t>(p)];
    const auto cpi = static_cast<std::size_t>(cp);
    if (model.train_y[static_cast<std::size_t>(list.back().index)] == cp) ++evicted_same[cpi];
    ++entered[cpi];
  }

  Vector scores = Vector::Zero(model.class_count);
  for (std::size_t j = 0; j < N; ++j) {
    double total = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      Index hits = model.enn_same_class_hits[i] - evicted_same[i];
      Index size = model.enn_class_sizes[i];
      if (i == j) {
        hits += entered[i] + own_hits[i];
        size += 1;
      }
      total += class_ratio(hits, size, k);
    }
    scores(static_cast<Index>(j)) = total;
  }
  return scores;
}

int enn_predict(const NeighborModel& model, const Eigen::Ref<const RowVector>& x) {
  const Vector scores = enn_scores(model, x);
  Index best = 0;
  for (Index j = 1; j < scores.size(); ++j) {
    if (scores(j) > scores(best)) best = j;
  }
  return static_cast<int>(best);
}

}  // namespace dimbench
