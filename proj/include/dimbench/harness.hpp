#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dimbench/dataset.hpp"
#include "dimbench/tsne.hpp"

namespace dimbench {

enum class DrMethod { Tsne, Mds };
enum class ClassifierKind { Knn, Enn, Svm };
enum class ReportFormat { Csv, Markdown };

std::string_view to_string(DrMethod m);
std::string_view to_string(ClassifierKind c);

struct RunConfig {
  std::filesystem::path manifest;
  std::vector<std::string> datasets;  // empty: every manifest entry, in manifest order
  std::vector<DrMethod> dr_methods{DrMethod::Tsne, DrMethod::Mds};
  std::vector<ClassifierKind> classifiers{ClassifierKind::Knn, ClassifierKind::Enn,
                                          ClassifierKind::Svm};
  int k = 5;
  double svm_c = 1.0;
  int svm_epochs = 1000;
  double svm_tolerance = 1e-6;
  TsneParams tsne;  // target_dim and seed are set per dataset and repeat
  double test_fraction = 0.1;
  int repeats = 10;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "results";
  std::vector<ReportFormat> formats{ReportFormat::Csv, ReportFormat::Markdown};
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const;
};

/// Key/value overrides with the same names the config file accepts.
using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;

/// Parses line-oriented `key = value` text (`#` starts a comment) on top of
/// the defaults, then applies `overrides`. Relative paths resolve against
/// `base_dir`. Unknown keys and malformed values raise ConfigError naming
/// the key.
RunConfig parse_config(std::string_view file_text, const ConfigOverrides& overrides = {},
                       const std::filesystem::path& base_dir = {});

/// Keys understood by parse_config, in documentation order.
const std::vector<std::string>& config_keys();

struct Diagnostics {
  double final_cost = 0.0;  // KL divergence for t-SNE, strain for MDS
  Index clamped_eigenvalues = 0;
  std::size_t dropped_rows = 0;
};

struct EvalRow {
  std::string dataset;
  DrMethod dr_method = DrMethod::Tsne;
  ClassifierKind classifier = ClassifierKind::Knn;
  int repeat = 0;
  std::uint64_t seed = 0;  // split seed of this repeat
  double accuracy = 0.0;
  double f_measure = 0.0;
  double g_mean = 0.0;
  // Wall-clock timings; written to timings.csv only, never to report.csv.
  double embed_seconds = 0.0;
  double classify_seconds = 0.0;
  Diagnostics diagnostics;
};

struct AggregateRow {
  std::string dataset;
  DrMethod dr_method = DrMethod::Tsne;
  ClassifierKind classifier = ClassifierKind::Knn;
  int runs = 0;
  double accuracy_mean = 0.0, accuracy_std = 0.0;
  double f_measure_mean = 0.0, f_measure_std = 0.0;
  double g_mean_mean = 0.0, g_mean_std = 0.0;
};

struct DatasetSummary {
  std::string name;
  Index rows = 0;
  Index features = 0;
  Index target_dim = 0;
  std::vector<std::string> class_names;
  std::vector<Index> class_sizes;
  std::size_t dropped_rows = 0;
};

enum class FailureKind { Data, Numerical };

struct Failure {
  std::string dataset;
  std::string stage;
  FailureKind kind = FailureKind::Data;
  std::string message;
};

struct EvalReport {
  RunConfig config;
  std::vector<DatasetSummary> datasets;
  std::vector<EvalRow> rows;  // sorted by (dataset, method, classifier, repeat)
  std::vector<AggregateRow> aggregates;
  std::vector<Failure> failures;

  const AggregateRow* find(std::string_view dataset, DrMethod m, ClassifierKind c) const;
};

/// Mean and sample standard deviation per (dataset, method, classifier).
std::vector<AggregateRow> aggregate(const std::vector<EvalRow>& rows);

/// Target dimension for a dataset with m features: ceil(m / 2).
Index half_dimension(Index m);

/// Ingestion, standardization, embedding of the full dataset to half its
/// dimension, then per repeat a stratified split of the embedded rows, one
/// row per classifier. t-SNE is rerun per repeat with a fresh seed; MDS is
/// computed once per dataset. A dataset that cannot be loaded is skipped and
/// recorded in `failures`.
EvalReport run_pipeline(const RunConfig& config);

/// Same, over an already-loaded dataset list (used by tests and synthetic runs).
EvalReport run_pipeline(const RunConfig& config, const std::vector<Dataset>& datasets);

/// Writes report.csv, aggregate.csv, tables.md, accuracy_<method>.dat and
/// timings.csv under the configured output directory. Every file except
/// timings.csv is a pure function of the configuration and the data.
void emit_report(const EvalReport& report, const std::vector<ReportFormat>& formats,
                 const std::filesystem::path& output_dir);

std::string render_csv(const EvalReport& report);
std::string render_aggregate_csv(const EvalReport& report);
std::string render_markdown(const EvalReport& report);
std::string render_plot_data(const EvalReport& report, DrMethod method);
std::string render_timings(const EvalReport& report);

/// Fixed 4-decimal rendering used by every score column.
std::string format_score(double value);

}  // namespace dimbench
