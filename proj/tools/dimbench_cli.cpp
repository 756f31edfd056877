// Command-line front end: `run` executes the benchmark matrix and writes the
// report files, `validate-data` loads every selected dataset and prints its
// shape without running anything.
//
// Exit codes: 0 success, 1 configuration error, 2 data error, 3 numerical failure.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dimbench/harness.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

dimbench::RunConfig load_config(const std::string& path, const dimbench::ConfigOverrides& overrides) {
  const std::filesystem::path file(path);
  const std::string text = dimbench::read_text_file(file);
  return dimbench::parse_config(text, overrides, file.parent_path());
}

int exit_code_for(const dimbench::Error& e) {
  if (dynamic_cast<const dimbench::ConfigError*>(&e)) return kExitConfig;
  if (dynamic_cast<const dimbench::NumericalError*>(&e)) return kExitNumerical;
  return kExitData;
}

int validate_data(const dimbench::RunConfig& config) {
  const auto entries = dimbench::load_manifest(config.manifest);
  int status = 0;
  for (const auto& entry : entries) {
    if (!config.datasets.empty() &&
        std::find(config.datasets.begin(), config.datasets.end(), entry.name) == config.datasets.end()) {
      continue;
    }
    try {
      const auto ds = dimbench::load_dataset(entry);
      dimbench::require_benchmark_ready(ds);
      std::cout << entry.name << ": n=" << ds.size() << " m=" << ds.dimension()
                << " d=" << dimbench::half_dimension(ds.dimension())
                << " classes=" << ds.class_count() << " dropped_rows=" << ds.dropped_row_count
                << " counts=[";
      const auto sizes = ds.class_sizes();
      for (std::size_t c = 0; c < sizes.size(); ++c) {
        std::cout << (c ? " " : "") << ds.class_names[c] << ":" << sizes[c];
      }
      std::cout << "]\n";
    } catch (const dimbench::Error& e) {
      std::cout << entry.name << ": ERROR " << e.what() << '\n';
      status = kExitData;
    }
  }
  return status;
}

int run(const dimbench::RunConfig& config) {
  const auto report = dimbench::run_pipeline(config);
  bool numerical = false;
  for (const auto& f : report.failures) {
    std::cerr << "skipped " << f.dataset << " (" << f.stage << "): " << f.message << '\n';
    numerical = numerical || f.kind == dimbench::FailureKind::Numerical;
  }
  if (report.rows.empty()) {
    std::cerr << "no dataset produced results\n";
    return numerical ? kExitNumerical : kExitData;
  }
  dimbench::emit_report(report, config.formats, config.output_dir);
  std::cout << "wrote " << report.rows.size() << " rows and " << report.aggregates.size()
            << " aggregates to " << config.output_dir.string() << '\n';
  for (const auto& a : report.aggregates) {
    std::cout << "  " << a.dataset << ' ' << dimbench::to_string(a.dr_method) << ' '
              << dimbench::to_string(a.classifier) << " accuracy "
              << dimbench::format_score(a.accuracy_mean) << " +- "
              << dimbench::format_score(a.accuracy_std) << '\n';
  }
  return numerical ? kExitNumerical : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"t-SNE / classical MDS + KNN / ENN / linear SVM benchmark"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> datasets, dr, classifiers, out, format;
  std::optional<int> repeats;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;

  auto* run_cmd = app.add_subcommand("run", "Run the benchmark and write the report files");
  run_cmd->add_option("--config", config_path, "Run configuration file")->required();
  run_cmd->add_option("--datasets", datasets, "Comma-separated dataset names");
  run_cmd->add_option("--dr", dr, "Comma-separated methods: tsne,mds");
  run_cmd->add_option("--classifiers", classifiers, "Comma-separated classifiers: knn,enn,svm");
  run_cmd->add_option("--repeats", repeats, "Number of seeded repeats");
  run_cmd->add_option("--seed", seed, "Base seed");
  run_cmd->add_option("--out", out, "Output directory");
  run_cmd->add_option("--format", format, "csv, markdown, or both comma-separated");
  run_cmd->add_option("--threads", threads, "Worker threads (0: all cores)");

  auto* validate_cmd =
      app.add_subcommand("validate-data", "Load every selected dataset and print its shape");
  validate_cmd->add_option("--config", config_path, "Run configuration file")->required();
  validate_cmd->add_option("--datasets", datasets, "Comma-separated dataset names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  dimbench::ConfigOverrides overrides;
  const auto add = [&](const char* key, const auto& value) {
    if (value) {
      std::ostringstream text;
      text << *value;
      overrides.emplace_back(key, text.str());
    }
  };
  add("datasets", datasets);
  add("dr", dr);
  add("classifiers", classifiers);
  add("repeats", repeats);
  add("seed", seed);
  add("out", out);
  add("format", format);
  add("threads", threads);

  try {
    const auto config = load_config(config_path, overrides);
    if (*run_cmd) return run(config);
    return validate_data(config);
  } catch (const dimbench::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    // An unreadable config or manifest is a configuration problem; an
    // unwritable output directory is reported the same way.
    return kExitConfig;
  } catch (const dimbench::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}
