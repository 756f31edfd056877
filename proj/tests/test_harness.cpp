#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dimbench/harness.hpp"
#include "oracles.hpp"

using namespace dimbench;
using dimbench::testing::clusters;

namespace {

RunConfig small_config() {
  RunConfig config;
  config.repeats = 2;
  // Plain momentum without adaptive gains overshoots at the default rate of
  // 200 on a few dozen points.
  config.tsne.iterations = 500;
  config.tsne.learning_rate = 50.0;
  config.threads = 1;
  return config;
}

std::size_t count_lines(const std::string& text) {
  std::size_t lines = 0;
  for (const char c : text) lines += c == '\n';
  return lines;
}

}  // namespace

TEST_CASE("parse_config: empty text gives the defaults") {
  const auto c = parse_config("");
  CHECK(c.k == 5);
  CHECK(c.svm_c == 1.0);
  CHECK(c.repeats == 10);
  CHECK(c.test_fraction == 0.1);
  CHECK(c.tsne.perplexity == 30.0);
  CHECK(c.tsne.iterations == 1000);
  CHECK(c.tsne.learning_rate == 200.0);
  CHECK(c.dr_methods.size() == 2);
  CHECK(c.classifiers.size() == 3);
  CHECK(c.datasets.empty());
}

TEST_CASE("parse_config: command-line overrides beat the file") {
  const auto c = parse_config("repeats = 3\nk = 7  # comment\n", {{"repeats", "5"}});
  CHECK(c.repeats == 5);
  CHECK(c.k == 7);
}

TEST_CASE("parse_config: a misspelled key is named in the error") {
  try {
    (void)parse_config("preplexity = 20\n");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("preplexity") != std::string::npos);
  }
}

TEST_CASE("parse_config: malformed values and invalid settings") {
  try {
    (void)parse_config("repeats = many\n");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("repeats") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("repeats = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("dr = pca\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("perplexity = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("just text\n"), ConfigError);
}

TEST_CASE("parse_config: lists, paths and formats") {
  const auto c = parse_config(
      "datasets = seeds, pima\ndr = mds\nclassifiers = svm,knn\nmanifest = m.ini\nout = r\nformat = markdown\n",
      {}, "/base");
  CHECK(c.datasets == std::vector<std::string>{"seeds", "pima"});
  CHECK(c.dr_methods == std::vector<DrMethod>{DrMethod::Mds});
  CHECK(c.classifiers == std::vector<ClassifierKind>{ClassifierKind::Svm, ClassifierKind::Knn});
  CHECK(c.manifest == std::filesystem::path("/base/m.ini"));
  CHECK(c.output_dir == std::filesystem::path("/base/r"));
  CHECK(c.formats == std::vector<ReportFormat>{ReportFormat::Markdown});
  CHECK(parse_config("datasets = all\n").datasets.empty());
}

TEST_CASE("config_keys lists the accepted keys") {
  const auto& keys = config_keys();
  CHECK(keys.size() == 23);
  for (const char* key : {"manifest", "perplexity", "svm_c", "repeats", "seed", "out", "format"}) {
    CHECK(std::find(keys.begin(), keys.end(), key) != keys.end());
  }
}

TEST_CASE("half_dimension rounds up") {
  CHECK(half_dimension(7) == 4);
  CHECK(half_dimension(34) == 17);
  CHECK(half_dimension(1) == 1);
}

TEST_CASE("format_score keeps four decimals") {
  CHECK(format_score(0.8876) == "0.8876");
  CHECK(format_score(1.0) == "1.0000");
  CHECK(format_score(0.93825) == "0.9383");
}

TEST_CASE("aggregate: mean and sample standard deviation") {
  std::vector<EvalRow> rows(3);
  const double acc[3] = {0.5, 0.7, 0.9};
  for (int i = 0; i < 3; ++i) {
    rows[static_cast<std::size_t>(i)].dataset = "d";
    rows[static_cast<std::size_t>(i)].repeat = i;
    rows[static_cast<std::size_t>(i)].accuracy = acc[i];
  }
  const auto agg = aggregate(rows);
  REQUIRE(agg.size() == 1);
  CHECK(agg[0].runs == 3);
  CHECK(agg[0].accuracy_mean == doctest::Approx(0.7));
  CHECK(agg[0].accuracy_std == doctest::Approx(0.2));
}

TEST_CASE("run_pipeline: row counts, ordering and rendering") {
  const std::vector<Dataset> data{clusters("alpha", 15, 4, 2, 8.0, 1), clusters("beta", 10, 3, 3, 8.0, 2)};
  const auto config = small_config();
  const auto report = run_pipeline(config, data);
  CHECK(report.failures.empty());
  CHECK(report.rows.size() == 2u * 2u * 3u * 2u);
  CHECK(report.aggregates.size() == 2u * 2u * 3u);
  CHECK(report.rows.front().dataset == "alpha");
  CHECK(report.rows.back().dataset == "beta");
  CHECK(report.datasets[0].target_dim == 2);
  CHECK(report.datasets[1].target_dim == 2);
  for (const auto& a : report.aggregates) CHECK(a.accuracy_mean >= 0.9);

  CHECK(count_lines(render_csv(report)) == report.rows.size() + 1);
  const std::string md = render_markdown(report);
  CHECK(md.find("Performance evaluation with t-SNE") != std::string::npos);
  CHECK(md.find("Performance evaluation with MDS") != std::string::npos);
  // Each score table: header, separator, one row per dataset.
  std::istringstream lines(md);
  std::string line;
  std::size_t table_rows = 0;
  bool in_table = false;
  while (std::getline(lines, line)) {
    if (line.rfind("## Performance evaluation with t-SNE", 0) == 0) {
      in_table = true;
      continue;
    }
    if (in_table && line.rfind("|", 0) == 0) ++table_rows;
    if (in_table && line.rfind("## ", 0) == 0) break;
  }
  CHECK(table_rows == data.size() + 2);
  const std::string dat = render_plot_data(report, DrMethod::Tsne);
  CHECK(count_lines(dat) == 1 + 2 * 3);
}

TEST_CASE("run_pipeline: deterministic, thread-count independent, and per-dataset independent") {
  const std::vector<Dataset> both{clusters("alpha", 12, 4, 2, 6.0, 3), clusters("beta", 12, 5, 2, 6.0, 4)};
  auto config = small_config();
  const auto a = run_pipeline(config, both);
  const auto b = run_pipeline(config, both);
  CHECK(render_csv(a) == render_csv(b));
  CHECK(render_markdown(a) == render_markdown(b));

  config.threads = 3;
  const auto threaded = run_pipeline(config, both);
  CHECK(render_csv(threaded) == render_csv(a));

  const auto beta_only = run_pipeline(config, {both[1]});
  std::size_t matched = 0;
  for (const auto& row : a.rows) {
    if (row.dataset != "beta") continue;
    for (const auto& other : beta_only.rows) {
      if (other.dr_method == row.dr_method && other.classifier == row.classifier && other.repeat == row.repeat) {
        CHECK(other.accuracy == row.accuracy);
        CHECK(other.seed == row.seed);
        CHECK(other.diagnostics.final_cost == row.diagnostics.final_cost);
        ++matched;
      }
    }
  }
  CHECK(matched == beta_only.rows.size());
}

TEST_CASE("run_pipeline: MDS embeds once, only the split changes across repeats") {
  const std::vector<Dataset> data{clusters("gamma", 15, 4, 2, 5.0, 5)};
  auto config = small_config();
  config.dr_methods = {DrMethod::Mds};
  config.repeats = 3;
  const auto report = run_pipeline(config, data);
  REQUIRE(report.rows.size() == 9);
  for (const auto& row : report.rows) {
    CHECK(row.diagnostics.final_cost == report.rows[0].diagnostics.final_cost);
  }
  CHECK(report.rows[0].seed != report.rows[1].seed);
}

TEST_CASE("run_pipeline: a dataset below the benchmark floor is rejected") {
  auto tiny = clusters("tiny", 5, 2, 2, 5.0, 6);
  CHECK_THROWS_AS(run_pipeline(small_config(), {tiny}), InvalidDataset);
}

TEST_CASE("run_pipeline from a manifest: missing files are recorded, unknown names are config errors") {
  const auto dir = std::filesystem::temp_directory_path() / "dimbench_harness_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  {
    std::ofstream data(dir / "ok.csv");
    const auto ds = clusters("ok", 15, 3, 2, 6.0, 7);
    for (Index i = 0; i < ds.size(); ++i) {
      for (Index j = 0; j < ds.dimension(); ++j) data << ds.features(i, j) << ',';
      data << ds.class_names[static_cast<std::size_t>(ds.labels[static_cast<std::size_t>(i)])] << '\n';
    }
    std::ofstream(dir / "manifest.ini") << "[ok]\npath = ok.csv\nexpected_rows = 30\n\n[gone]\npath = gone.csv\n";
  }
  auto config = small_config();
  config.manifest = dir / "manifest.ini";
  config.dr_methods = {DrMethod::Mds};
  const auto report = run_pipeline(config);
  REQUIRE(report.failures.size() == 1);
  CHECK(report.failures[0].dataset == "gone");
  CHECK(report.failures[0].kind == FailureKind::Data);
  CHECK(report.rows.size() == 3u * 2u);

  config.output_dir = dir / "out";
  emit_report(report, config.formats, config.output_dir);
  for (const char* file : {"report.csv", "aggregate.csv", "tables.md", "accuracy_mds.dat", "timings.csv"}) {
    CHECK(std::filesystem::exists(config.output_dir / file));
  }
  CHECK_FALSE(std::filesystem::exists(config.output_dir / "accuracy_tsne.dat"));
  CHECK_THROWS_AS(emit_report(report, config.formats, dir / "ok.csv" / "sub"), IoError);

  config.datasets = {"nope"};
  CHECK_THROWS_AS(run_pipeline(config), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("emit_report: a single-row report gives a two-line csv") {
  EvalReport report;
  report.config.dr_methods = {DrMethod::Mds};
  EvalRow row;
  row.dataset = "one";
  row.dr_method = DrMethod::Mds;
  row.accuracy = 0.8876;
  report.rows.push_back(row);
  report.aggregates = aggregate(report.rows);
  const std::string csv = render_csv(report);
  CHECK(count_lines(csv) == 2);
  CHECK(csv.find(",0.8876,") != std::string::npos);
  CHECK_THROWS_AS(emit_report(EvalReport{}, {ReportFormat::Csv}, std::filesystem::temp_directory_path()), InvalidInput);
}
