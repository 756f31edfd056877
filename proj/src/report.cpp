#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "dimbench/harness.hpp"

namespace dimbench {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return out;
}

std::string_view display_name(DrMethod m) { return m == DrMethod::Tsne ? "t-SNE" : "MDS"; }

std::string format_general(double value) {
  std::ostringstream out;
  out << std::setprecision(10) << value;
  return out.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void write_metadata(std::ostringstream& md, const EvalReport& report) {
  const auto& c = report.config;
  const auto& t = c.tsne;
  md << "Run metadata\n\n";
  md << "- base seed: " << c.seed << "; repeats: " << c.repeats
     << "; test fraction: " << c.test_fraction << " (stratified per class)\n";
  md << "- KNN/ENN k: " << c.k << "; SVM: linear, one-vs-rest, C = " << c.svm_c
     << ", bias as a regularized constant feature\n";
  md << "- t-SNE: perplexity " << t.perplexity << " (capped at (n-1)/3), " << t.iterations
     << " iterations, learning rate " << t.learning_rate << ", momentum " << t.initial_momentum
     << " -> " << t.final_momentum << " at iteration " << t.momentum_switch_iteration
     << ", exaggeration " << t.exaggeration << " for " << t.exaggeration_iterations
     << " iterations, init scale " << t.init_scale << "\n";
  md << "- Protocol: features are standardized (population variance), then each dataset is\n"
        "  embedded in full to ceil(m/2) dimensions before the train/test split. Both methods\n"
        "  are transductive, so test rows take part in the (label-free) embedding. t-SNE is\n"
        "  rerun for every repeat; MDS is computed once per dataset and only the split changes.\n";
  md << "- Rows containing the missing-value token are dropped, not imputed.\n";
  md << "- F-measure: unweighted mean over classes of one-vs-rest F1. G-mean: geometric mean of\n"
        "  per-class recalls. Cells show means over repeats.\n\n";
}

std::string cell(const EvalReport& report, const std::string& dataset, DrMethod m,
                 ClassifierKind c, double AggregateRow::*field) {
  const auto* a = report.find(dataset, m, c);
  return a ? format_score(a->*field) : std::string("-");
}

}  // namespace

std::string format_score(double value) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << value;
  return out.str();
}

std::string render_csv(const EvalReport& report) {
  std::ostringstream csv;
  csv << "dataset,dr_method,classifier,repeat,seed,accuracy,f_measure,g_mean,final_cost,"
         "clamped_eigenvalues,dropped_rows\n";
  for (const auto& r : report.rows) {
    csv << r.dataset << ',' << to_string(r.dr_method) << ',' << to_string(r.classifier) << ','
        << r.repeat << ',' << r.seed << ',' << format_score(r.accuracy) << ','
        << format_score(r.f_measure) << ',' << format_score(r.g_mean) << ','
        << format_general(r.diagnostics.final_cost) << ',' << r.diagnostics.clamped_eigenvalues
        << ',' << r.diagnostics.dropped_rows << '\n';
  }
  return csv.str();
}

std::string render_aggregate_csv(const EvalReport& report) {
  std::ostringstream csv;
  csv << "dataset,dr_method,classifier,runs,accuracy_mean,accuracy_std,f_measure_mean,"
         "f_measure_std,g_mean_mean,g_mean_std\n";
  for (const auto& a : report.aggregates) {
    csv << a.dataset << ',' << to_string(a.dr_method) << ',' << to_string(a.classifier) << ','
        << a.runs << ',' << format_score(a.accuracy_mean) << ',' << format_score(a.accuracy_std)
        << ',' << format_score(a.f_measure_mean) << ',' << format_score(a.f_measure_std) << ','
        << format_score(a.g_mean_mean) << ',' << format_score(a.g_mean_std) << '\n';
  }
  return csv.str();
}

std::string render_markdown(const EvalReport& report) {
  const auto& config = report.config;
  std::ostringstream md;
  md << "# Dimensionality reduction and classification benchmark\n\n";
  write_metadata(md, report);

  md << "## Datasets\n\n";
  md << "| Data set | n | m | d | classes | dropped rows |\n";
  md << "|---|---|---|---|---|---|\n";
  for (const auto& s : report.datasets) {
    md << "| " << s.name << " | " << s.rows << " | " << s.features << " | " << s.target_dim
       << " | " << s.class_names.size() << " | " << s.dropped_rows << " |\n";
  }
  md << '\n';

  if (!report.failures.empty()) {
    md << "## Failures\n\n";
    for (const auto& f : report.failures) {
      md << "- " << f.dataset << " (" << f.stage << ", "
         << (f.kind == FailureKind::Numerical ? "numerical" : "data") << "): " << f.message << '\n';
    }
    md << '\n';
  }

  for (const auto method : config.dr_methods) {
    md << "## Performance evaluation with " << display_name(method) << "\n\n";
    md << "| Data set |";
    for (const auto c : config.classifiers) md << " F-measure " << upper(to_string(c)) << " |";
    for (const auto c : config.classifiers) md << " G-mean " << upper(to_string(c)) << " |";
    md << "\n|---|";
    for (std::size_t i = 0; i < 2 * config.classifiers.size(); ++i) md << "---|";
    md << '\n';
    for (const auto& s : report.datasets) {
      md << "| " << s.name << " |";
      for (const auto c : config.classifiers) {
        md << ' ' << cell(report, s.name, method, c, &AggregateRow::f_measure_mean) << " |";
      }
      for (const auto c : config.classifiers) {
        md << ' ' << cell(report, s.name, method, c, &AggregateRow::g_mean_mean) << " |";
      }
      md << '\n';
    }
    md << '\n';
  }

  for (const auto method : config.dr_methods) {
    md << "## Classification accuracy with " << display_name(method) << " (mean +- std)\n\n";
    md << "| Data set |";
    for (const auto c : config.classifiers) md << ' ' << upper(to_string(c)) << " |";
    md << "\n|---|";
    for (std::size_t i = 0; i < config.classifiers.size(); ++i) md << "---|";
    md << '\n';
    for (const auto& s : report.datasets) {
      md << "| " << s.name << " |";
      for (const auto c : config.classifiers) {
        const auto* a = report.find(s.name, method, c);
        if (a) {
          md << ' ' << format_score(a->accuracy_mean) << " +- " << format_score(a->accuracy_std)
             << " |";
        } else {
          md << " - |";
        }
      }
      md << '\n';
    }
    md << '\n';
  }
  return md.str();
}

std::string render_plot_data(const EvalReport& report, DrMethod method) {
  std::ostringstream dat;
  dat << "# dataset classifier mean_accuracy (" << display_name(method) << ")\n";
  for (const auto& a : report.aggregates) {
    if (a.dr_method != method) continue;
    dat << a.dataset << ' ' << to_string(a.classifier) << ' ' << format_score(a.accuracy_mean)
        << '\n';
  }
  return dat.str();
}

std::string render_timings(const EvalReport& report) {
  std::ostringstream csv;
  csv << "dataset,dr_method,classifier,repeat,embed_seconds,classify_seconds\n";
  csv << std::fixed << std::setprecision(3);
  for (const auto& r : report.rows) {
    csv << r.dataset << ',' << to_string(r.dr_method) << ',' << to_string(r.classifier) << ','
        << r.repeat << ',' << r.embed_seconds << ',' << r.classify_seconds << '\n';
  }
  return csv.str();
}

void emit_report(const EvalReport& report, const std::vector<ReportFormat>& formats,
                 const std::filesystem::path& output_dir) {
  if (report.rows.empty()) throw InvalidInput("emit_report: report has no rows");
  std::error_code ec;
  std::filesystem::create_directories(output_dir, ec);
  if (ec || !std::filesystem::is_directory(output_dir)) {
    throw IoError("cannot create output directory '" + output_dir.string() + "'");
  }
  const auto wants = [&](ReportFormat f) {
    return std::find(formats.begin(), formats.end(), f) != formats.end();
  };
  if (wants(ReportFormat::Csv)) {
    write_file(output_dir / "report.csv", render_csv(report));
    write_file(output_dir / "aggregate.csv", render_aggregate_csv(report));
  }
  if (wants(ReportFormat::Markdown)) write_file(output_dir / "tables.md", render_markdown(report));
  for (const auto method : report.config.dr_methods) {
    write_file(output_dir / ("accuracy_" + std::string(to_string(method)) + ".dat"),
               render_plot_data(report, method));
  }
  write_file(output_dir / "timings.csv", render_timings(report));
}

}  // namespace dimbench
