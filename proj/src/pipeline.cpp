#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <mutex>
#include <thread>

#include "dimbench/harness.hpp"
#include "dimbench/mds.hpp"
#include "dimbench/metrics.hpp"
#include "dimbench/neighbors.hpp"
#include "dimbench/svm.hpp"

namespace dimbench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct CellResult {
  std::vector<EvalRow> rows;
  std::vector<Failure> failures;
};

std::uint64_t split_seed(const RunConfig& config, const std::string& dataset, int repeat) {
  return derive_seed(config.seed, "split/" + dataset, static_cast<std::uint64_t>(repeat));
}

Matrix select_rows(const Matrix& Y, const std::vector<Index>& idx) {
  Matrix out(static_cast<Index>(idx.size()), Y.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Index>(r)) = Y.row(idx[r]);
  return out;
}

std::vector<int> select_labels(const std::vector<int>& y, const std::vector<Index>& idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (const Index i : idx) out.push_back(y[static_cast<std::size_t>(i)]);
  return out;
}

// Splits the embedded rows for one repeat and scores every classifier.
void classify_repeat(const RunConfig& config, const Dataset& ds, DrMethod method, const Matrix& Y,
                     int repeat, const Diagnostics& diagnostics, double embed_seconds,
                     CellResult& out) {
  const auto seed = split_seed(config, ds.name, repeat);
  RandomStream rng(seed);
  const auto split = stratified_split(ds, config.test_fraction, rng);
  const Matrix train_X = select_rows(Y, split.train);
  const auto train_y = select_labels(ds.labels, split.train);
  const auto test_y = select_labels(ds.labels, split.test);
  const int N = ds.class_count();

  for (const auto kind : config.classifiers) {
    const auto start = Clock::now();
    std::vector<int> predicted;
    predicted.reserve(split.test.size());
    switch (kind) {
      case ClassifierKind::Knn: {
        const auto model = fit_knn(train_X, train_y, config.k, N);
        for (const Index i : split.test) predicted.push_back(knn_predict(model, Y.row(i)).label);
        break;
      }
      case ClassifierKind::Enn: {
        const auto model = fit_enn(train_X, train_y, config.k, N);
        for (const Index i : split.test) predicted.push_back(enn_predict(model, Y.row(i)));
        break;
      }
      case ClassifierKind::Svm: {
        SvmOptions options;
        options.C = config.svm_c;
        options.max_epochs = config.svm_epochs;
        options.tolerance = config.svm_tolerance;
        options.seed = derive_seed(config.seed, "svm/" + ds.name, static_cast<std::uint64_t>(repeat));
        const auto models = svm_train_ovr(train_X, train_y, N, options);
        for (const Index i : split.test) predicted.push_back(svm_predict(models, Y.row(i)));
        break;
      }
    }
    const auto scores = score(confusion(test_y, predicted, N));
    EvalRow row;
    row.dataset = ds.name;
    row.dr_method = method;
    row.classifier = kind;
    row.repeat = repeat;
    row.seed = seed;
    row.accuracy = scores.accuracy;
    row.f_measure = scores.f_measure;
    row.g_mean = scores.g_mean;
    row.embed_seconds = embed_seconds;
    row.classify_seconds = seconds_since(start);
    row.diagnostics = diagnostics;
    out.rows.push_back(std::move(row));
  }
}

Failure make_failure(const std::string& dataset, std::string stage, const Error& e) {
  const bool numerical = dynamic_cast<const NumericalError*>(&e) != nullptr;
  return {dataset, std::move(stage), numerical ? FailureKind::Numerical : FailureKind::Data, e.what()};
}

void run_tasks(std::vector<std::function<void()>>& tasks, unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(tasks.size()));
  if (threads <= 1) {
    for (auto& task : tasks) task();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < tasks.size(); i = next++) tasks[i]();
    });
  }
}

double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (const double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double acc = 0.0;
  for (const double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

}  // namespace

Index half_dimension(Index m) { return (m + 1) / 2; }

const AggregateRow* EvalReport::find(std::string_view dataset, DrMethod m, ClassifierKind c) const {
  for (const auto& a : aggregates) {
    if (a.dataset == dataset && a.dr_method == m && a.classifier == c) return &a;
  }
  return nullptr;
}

std::vector<AggregateRow> aggregate(const std::vector<EvalRow>& rows) {
  std::vector<AggregateRow> out;
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i;
    std::vector<double> acc, f, g;
    while (j < rows.size() && rows[j].dataset == rows[i].dataset &&
           rows[j].dr_method == rows[i].dr_method && rows[j].classifier == rows[i].classifier) {
      acc.push_back(rows[j].accuracy);
      f.push_back(rows[j].f_measure);
      g.push_back(rows[j].g_mean);
      ++j;
    }
    AggregateRow a;
    a.dataset = rows[i].dataset;
    a.dr_method = rows[i].dr_method;
    a.classifier = rows[i].classifier;
    a.runs = static_cast<int>(acc.size());
    a.accuracy_mean = mean_of(acc);
    a.accuracy_std = sample_std(acc, a.accuracy_mean);
    a.f_measure_mean = mean_of(f);
    a.f_measure_std = sample_std(f, a.f_measure_mean);
    a.g_mean_mean = mean_of(g);
    a.g_mean_std = sample_std(g, a.g_mean_mean);
    out.push_back(std::move(a));
    i = j;
  }
  return out;
}

EvalReport run_pipeline(const RunConfig& config, const std::vector<Dataset>& datasets) {
  config.validate();
  EvalReport report;
  report.config = config;

  std::vector<Matrix> standardized;
  standardized.reserve(datasets.size());
  for (const auto& ds : datasets) {
    require_benchmark_ready(ds);
    standardized.push_back(standardize(ds.features).values);
    DatasetSummary s;
    s.name = ds.name;
    s.rows = ds.size();
    s.features = ds.dimension();
    s.target_dim = half_dimension(ds.dimension());
    s.class_names = ds.class_names;
    s.class_sizes = ds.class_sizes();
    s.dropped_rows = ds.dropped_row_count;
    report.datasets.push_back(std::move(s));
  }

  // One cell per (dataset, MDS) and per (dataset, t-SNE, repeat); each cell
  // owns its output slot so scheduling cannot change the result.
  std::vector<CellResult> cells;
  std::vector<std::function<void()>> tasks;
  const auto has = [&](DrMethod m) {
    return std::find(config.dr_methods.begin(), config.dr_methods.end(), m) != config.dr_methods.end();
  };
  std::size_t cell_count = 0;
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    if (has(DrMethod::Tsne)) cell_count += static_cast<std::size_t>(config.repeats);
    if (has(DrMethod::Mds)) cell_count += 1;
  }
  cells.resize(cell_count);

  std::size_t slot = 0;
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    const Dataset& ds = datasets[d];
    const Matrix& X = standardized[d];
    const Index target = half_dimension(ds.dimension());
    if (has(DrMethod::Tsne)) {
      for (int r = 0; r < config.repeats; ++r) {
        CellResult& out = cells[slot++];
        tasks.emplace_back([&config, &ds, &X, &out, target, r] {
          try {
            TsneParams params = config.tsne;
            params.target_dim = static_cast<int>(target);
            params.seed = derive_seed(config.seed, "tsne/" + ds.name, static_cast<std::uint64_t>(r));
            const auto start = Clock::now();
            const auto embedding = tsne_embed(X, params);
            const double elapsed = seconds_since(start);
            Diagnostics diag{embedding.final_cost, 0, ds.dropped_row_count};
            classify_repeat(config, ds, DrMethod::Tsne, embedding.Y, r, diag, elapsed, out);
          } catch (const Error& e) {
            out.failures.push_back(make_failure(ds.name, "tsne repeat " + std::to_string(r), e));
          }
        });
      }
    }
    if (has(DrMethod::Mds)) {
      CellResult& out = cells[slot++];
      tasks.emplace_back([&config, &ds, &X, &out, target] {
        try {
          const auto start = Clock::now();
          Matrix D = pairwise_sq_dists(X).cwiseSqrt();
          const auto mds = classical_mds(D, target);
          const double elapsed = seconds_since(start);
          Diagnostics diag{mds.strain, mds.clamped_count, ds.dropped_row_count};
          for (int r = 0; r < config.repeats; ++r) {
            classify_repeat(config, ds, DrMethod::Mds, mds.X, r, diag, r == 0 ? elapsed : 0.0, out);
          }
        } catch (const Error& e) {
          out.failures.push_back(make_failure(ds.name, "mds", e));
        }
      });
    }
  }
  run_tasks(tasks, config.threads);

  for (auto& cell : cells) {
    for (auto& row : cell.rows) report.rows.push_back(std::move(row));
    for (auto& f : cell.failures) report.failures.push_back(std::move(f));
  }
  const auto position = [&](const std::string& name) {
    for (std::size_t d = 0; d < datasets.size(); ++d) {
      if (datasets[d].name == name) return d;
    }
    return datasets.size();
  };
  std::stable_sort(report.rows.begin(), report.rows.end(), [&](const EvalRow& a, const EvalRow& b) {
    const auto pa = position(a.dataset);
    const auto pb = position(b.dataset);
    if (pa != pb) return pa < pb;
    if (a.dr_method != b.dr_method) return a.dr_method < b.dr_method;
    if (a.classifier != b.classifier) return a.classifier < b.classifier;
    return a.repeat < b.repeat;
  });
  report.aggregates = aggregate(report.rows);
  return report;
}

EvalReport run_pipeline(const RunConfig& config) {
  config.validate();
  const auto entries = load_manifest(config.manifest);
  std::vector<DatasetManifestEntry> selected;
  if (config.datasets.empty()) {
    selected = entries;
  } else {
    for (const auto& name : config.datasets) {
      const auto it = std::find_if(entries.begin(), entries.end(),
                                   [&](const DatasetManifestEntry& e) { return e.name == name; });
      if (it == entries.end()) throw ConfigError("datasets: '" + name + "' is not in the manifest");
      selected.push_back(*it);
    }
  }

  std::vector<Dataset> loaded;
  std::vector<Failure> load_failures;
  for (const auto& entry : selected) {
    try {
      auto ds = load_dataset(entry);
      require_benchmark_ready(ds);
      loaded.push_back(std::move(ds));
    } catch (const Error& e) {
      load_failures.push_back(make_failure(entry.name, "load", e));
    }
  }
  EvalReport report = run_pipeline(config, loaded);
  report.failures.insert(report.failures.begin(), load_failures.begin(), load_failures.end());
  return report;
}

}  // namespace dimbench
