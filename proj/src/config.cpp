#include <algorithm>
#include <functional>
#include <limits>

#include "dimbench/harness.hpp"
#include "text.hpp"

namespace dimbench {

std::string_view to_string(DrMethod m) {
  switch (m) {
    case DrMethod::Tsne: return "tsne";
    case DrMethod::Mds: return "mds";
  }
  return "?";
}

std::string_view to_string(ClassifierKind c) {
  switch (c) {
    case ClassifierKind::Knn: return "knn";
    case ClassifierKind::Enn: return "enn";
    case ClassifierKind::Svm: return "svm";
  }
  return "?";
}

void RunConfig::validate() const {
  if (repeats < 1) throw ConfigError("repeats: must be >= 1");
  if (dr_methods.empty()) throw ConfigError("dr: selection is empty");
  if (classifiers.empty()) throw ConfigError("classifiers: selection is empty");
  if (formats.empty()) throw ConfigError("format: selection is empty");
  if (k < 1) throw ConfigError("k: must be >= 1");
  if (!(svm_c > 0.0)) throw ConfigError("svm_c: must be positive");
  if (svm_epochs < 1) throw ConfigError("svm_epochs: must be >= 1");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test_fraction: must lie in (0, 1)");
  }
  try {
    TsneParams probe = tsne;
    probe.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
}

namespace {

using Setter = std::function<void(RunConfig&, std::string_view, const std::filesystem::path&)>;

[[noreturn]] void malformed(std::string_view key, std::string_view value) {
  throw ConfigError("malformed value '" + std::string(value) + "' for key '" + std::string(key) + "'");
}

template <typename Int>
Setter int_setter(Int RunConfig::*field, std::string_view key) {
  return [field, key](RunConfig& c, std::string_view v, const std::filesystem::path&) {
    const auto parsed = text::parse_int<Int>(v);
    if (!parsed) malformed(key, v);
    c.*field = *parsed;
  };
}

Setter double_setter(double RunConfig::*field, std::string_view key) {
  return [field, key](RunConfig& c, std::string_view v, const std::filesystem::path&) {
    const auto parsed = text::parse_double(v);
    if (!parsed) malformed(key, v);
    c.*field = *parsed;
  };
}

Setter tsne_double(double TsneParams::*field, std::string_view key) {
  return [field, key](RunConfig& c, std::string_view v, const std::filesystem::path&) {
    const auto parsed = text::parse_double(v);
    if (!parsed) malformed(key, v);
    c.tsne.*field = *parsed;
  };
}

Setter tsne_int(int TsneParams::*field, std::string_view key) {
  return [field, key](RunConfig& c, std::string_view v, const std::filesystem::path&) {
    const auto parsed = text::parse_int<int>(v);
    if (!parsed) malformed(key, v);
    c.tsne.*field = *parsed;
  };
}

std::filesystem::path resolve(std::string_view value, const std::filesystem::path& base) {
  std::filesystem::path p{std::string(value)};
  if (p.is_absolute() || base.empty()) return p;
  return base / p;
}

template <typename T, typename Lookup>
std::vector<T> parse_list(std::string_view key, std::string_view value, Lookup lookup) {
  std::vector<T> out;
  for (const auto part : text::split(value, ',')) {
    const auto name = text::to_lower(text::trim(part));
    if (name.empty()) continue;
    const auto item = lookup(name);
    if (!item) malformed(key, value);
    if (std::find(out.begin(), out.end(), *item) == out.end()) out.push_back(*item);
  }
  if (out.empty()) malformed(key, value);
  return out;
}

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"manifest",
       [](RunConfig& c, std::string_view v, const std::filesystem::path& base) {
         c.manifest = resolve(v, base);
       }},
      {"datasets",
       [](RunConfig& c, std::string_view v, const std::filesystem::path&) {
         c.datasets.clear();
         if (text::trim(v) == "all") return;
         for (const auto part : text::split(v, ',')) {
           const auto name = text::trim(part);
           if (!name.empty()) c.datasets.emplace_back(name);
         }
       }},
      {"dr",
       [](RunConfig& c, std::string_view v, const std::filesystem::path&) {
         c.dr_methods = parse_list<DrMethod>("dr", v, [](const std::string& s) -> std::optional<DrMethod> {
           if (s == "tsne" || s == "t-sne") return DrMethod::Tsne;
           if (s == "mds") return DrMethod::Mds;
           return std::nullopt;
         });
       }},
      {"classifiers",
       [](RunConfig& c, std::string_view v, const std::filesystem::path&) {
         c.classifiers = parse_list<ClassifierKind>(
             "classifiers", v, [](const std::string& s) -> std::optional<ClassifierKind> {
               if (s == "knn") return ClassifierKind::Knn;
               if (s == "enn") return ClassifierKind::Enn;
               if (s == "svm") return ClassifierKind::Svm;
               return std::nullopt;
             });
       }},
      {"k", int_setter(&RunConfig::k, "k")},
      {"svm_c", double_setter(&RunConfig::svm_c, "svm_c")},
      {"svm_epochs", int_setter(&RunConfig::svm_epochs, "svm_epochs")},
      {"svm_tolerance", double_setter(&RunConfig::svm_tolerance, "svm_tolerance")},
      {"perplexity", tsne_double(&TsneParams::perplexity, "perplexity")},
      {"tsne_iterations", tsne_int(&TsneParams::iterations, "tsne_iterations")},
      {"learning_rate", tsne_double(&TsneParams::learning_rate, "learning_rate")},
      {"initial_momentum", tsne_double(&TsneParams::initial_momentum, "initial_momentum")},
      {"final_momentum", tsne_double(&TsneParams::final_momentum, "final_momentum")},
      {"momentum_switch_iteration",
       tsne_int(&TsneParams::momentum_switch_iteration, "momentum_switch_iteration")},
      {"exaggeration", tsne_double(&TsneParams::exaggeration, "exaggeration")},
      {"exaggeration_iterations",
       tsne_int(&TsneParams::exaggeration_iterations, "exaggeration_iterations")},
      {"init_scale", tsne_double(&TsneParams::init_scale, "init_scale")},
      {"test_fraction", double_setter(&RunConfig::test_fraction, "test_fraction")},
      {"repeats", int_setter(&RunConfig::repeats, "repeats")},
      {"seed", int_setter(&RunConfig::seed, "seed")},
      {"out",
       [](RunConfig& c, std::string_view v, const std::filesystem::path& base) {
         c.output_dir = resolve(v, base);
       }},
      {"format",
       [](RunConfig& c, std::string_view v, const std::filesystem::path&) {
         c.formats = parse_list<ReportFormat>(
             "format", v, [](const std::string& s) -> std::optional<ReportFormat> {
               if (s == "csv") return ReportFormat::Csv;
               if (s == "markdown" || s == "md") return ReportFormat::Markdown;
               return std::nullopt;
             });
       }},
      {"threads", int_setter(&RunConfig::threads, "threads")},
  };
  return table;
}

void apply(RunConfig& config, std::string_view key, std::string_view value,
           const std::filesystem::path& base) {
  const auto& table = setters();
  const auto it = std::find_if(table.begin(), table.end(),
                               [&](const auto& entry) { return entry.first == key; });
  if (it == table.end()) throw ConfigError("unknown key '" + std::string(key) + "'");
  it->second(config, text::trim(value), base);
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& entry : setters()) out.push_back(entry.first);
    return out;
  }();
  return keys;
}

RunConfig parse_config(std::string_view file_text, const ConfigOverrides& overrides,
                       const std::filesystem::path& base_dir) {
  RunConfig config;
  const auto all_lines = text::lines(file_text);
  for (std::size_t ln = 0; ln < all_lines.size(); ++ln) {
    auto line = all_lines[ln];
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(ln + 1) + ": expected key = value");
    }
    apply(config, text::to_lower(text::trim(line.substr(0, eq))), line.substr(eq + 1), base_dir);
  }
  for (const auto& [key, value] : overrides) apply(config, text::to_lower(key), value, {});
  config.validate();
  return config;
}

}  // namespace dimbench
