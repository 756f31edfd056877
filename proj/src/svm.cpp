#include "dimbench/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dimbench/random.hpp"

namespace dimbench {

namespace {

Matrix augment(const Matrix& X) {
  Matrix A(X.rows(), X.cols() + 1);
  A.leftCols(X.cols()) = X;
  A.col(X.cols()).setOnes();
  return A;
}

}  // namespace

double LinearModel::decision(const Eigen::Ref<const RowVector>& x) const {
  if (x.size() + 1 != u.size()) throw InvalidInput("svm: query dimension mismatch");
  return weights().dot(x.transpose()) + bias();
}

double svm_primal_objective(const Vector& u, const Matrix& X, std::span<const int> y, double C) {
  const Index d = X.cols();
  double hinge = 0.0;
  for (Index i = 0; i < X.rows(); ++i) {
    const double f = X.row(i).dot(u.head(d)) + u(d);
    hinge += std::max(0.0, 1.0 - y[static_cast<std::size_t>(i)] * f);
  }
  return 0.5 * u.squaredNorm() + C * hinge;
}

LinearModel svm_train_binary(const Matrix& X, std::span<const int> y, const SvmOptions& options) {
  const Index n = X.rows();
  if (static_cast<std::size_t>(n) != y.size()) throw InvalidInput("svm: label count mismatch");
  if (!(options.C > 0.0)) throw InvalidParameter("svm: C must be positive");
  if (options.max_epochs < 1) throw InvalidParameter("svm: max_epochs must be >= 1");
  if (!X.allFinite()) throw InvalidInput("svm: non-finite training data");
  bool has_pos = false;
  bool has_neg = false;
  for (const int label : y) {
    if (label == 1) {
      has_pos = true;
    } else if (label == -1) {
      has_neg = true;
    } else {
      throw InvalidInput("svm: binary labels must be +1 or -1");
    }
  }
  if (!has_pos || !has_neg) throw InvalidInput("svm: both classes must be present");

  const Matrix A = augment(X);
  const Vector diag = A.rowwise().squaredNorm();

  LinearModel model;
  model.C = options.C;
  model.u = Vector::Zero(A.cols());
  model.alphas = Vector::Zero(n);

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  RandomStream rng(options.seed);
  rng.shuffle(order);

  for (int epoch = 0; epoch < options.max_epochs; ++epoch) {
    double largest_step = 0.0;
    for (const Index i : order) {
      const double yi = y[static_cast<std::size_t>(i)];
      const double grad = yi * A.row(i).dot(model.u) - 1.0;
      const double old = model.alphas(i);
      const double updated = std::clamp(old - grad / diag(i), 0.0, options.C);
      const double delta = updated - old;
      if (delta == 0.0) continue;
      model.alphas(i) = updated;
      model.u += (delta * yi) * A.row(i).transpose();
      largest_step = std::max(largest_step, std::abs(delta));
    }
    model.epochs = epoch + 1;
    const double half_norm = 0.5 * model.u.squaredNorm();
    model.dual_history.push_back(model.alphas.sum() - half_norm);
    model.primal_history.push_back(svm_primal_objective(model.u, X, y, options.C));
    if (largest_step <= options.tolerance) {
      model.converged = true;
      break;
    }
  }
  return model;
}

double svm_margin(const LinearModel& model) {
  const double norm = model.weights().norm();
  if (norm == 0.0) throw UndefinedValue("svm_margin: zero weight vector");
  return 2.0 / norm;
}

OvrModelSet svm_train_ovr(const Matrix& X, std::span<const int> labels, int class_count,
                          const SvmOptions& options) {
  if (class_count < 2) throw InvalidInput("svm: need at least two classes");
  OvrModelSet set;
  set.class_count = class_count;
  std::vector<int> binary(labels.size());
  for (int c = 0; c < class_count; ++c) {
    for (std::size_t i = 0; i < labels.size(); ++i) binary[i] = labels[i] == c ? 1 : -1;
    // Every class shares one visit order, so with two classes the second
    // model is the exact mirror of the first.
    set.models.push_back(svm_train_binary(X, binary, options));
  }
  return set;
}

Vector svm_scores(const OvrModelSet& models, const Eigen::Ref<const RowVector>& x) {
  Vector scores(models.class_count);
  for (int c = 0; c < models.class_count; ++c) {
    scores(c) = models.models[static_cast<std::size_t>(c)].decision(x);
  }
  return scores;
}

int svm_predict(const OvrModelSet& models, const Eigen::Ref<const RowVector>& x) {
  const Vector scores = svm_scores(models, x);
  Index best = 0;
  for (Index c = 1; c < scores.size(); ++c) {
    if (scores(c) > scores(best)) best = c;
  }
  return static_cast<int>(best);
}

}  // namespace dimbench
