#include "dimbench/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "text.hpp"

namespace dimbench {

namespace {

std::string located(std::string_view what, std::size_t line, std::size_t column) {
  std::ostringstream msg;
  msg << what << " at line " << line << ", column " << column;
  return msg.str();
}

}  // namespace

void DatasetManifestEntry::validate() const {
  if (name.empty()) throw ConfigError("manifest entry without a name");
  if (label_column &&
      std::find(drop_columns.begin(), drop_columns.end(), *label_column) != drop_columns.end()) {
    throw ConfigError("manifest entry '" + name + "': label_column is listed in drop_columns");
  }
}

std::vector<Index> Dataset::class_sizes() const {
  std::vector<Index> sizes(class_names.size(), 0);
  for (const int y : labels) ++sizes[static_cast<std::size_t>(y)];
  return sizes;
}

Dataset load_dataset(const DatasetManifestEntry& entry, std::string_view raw_text) {
  entry.validate();

  std::vector<std::vector<std::string_view>> rows;
  std::vector<std::size_t> row_lines;
  std::size_t skipped = 0;
  bool header_pending = entry.has_header;
  const auto all_lines = text::lines(raw_text);
  for (std::size_t ln = 0; ln < all_lines.size(); ++ln) {
    if (skipped < entry.skip_lines) {
      ++skipped;
      continue;
    }
    const auto line = text::trim(all_lines[ln]);
    if (line.empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    auto cells = entry.whitespace ? text::split_whitespace(line) : text::split(line, entry.delimiter);
    for (auto& c : cells) c = text::trim(c);
    rows.push_back(std::move(cells));
    row_lines.push_back(ln + 1);
  }
  if (rows.empty()) throw InvalidDataset("dataset '" + entry.name + "': no data rows");

  const std::size_t width = rows.front().size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      std::ostringstream msg;
      msg << "dataset '" << entry.name << "': expected " << width << " columns, found "
          << rows[r].size();
      throw ParseError(located(msg.str(), row_lines[r], rows[r].size()));
    }
  }
  if (entry.expected_rows && *entry.expected_rows != rows.size()) {
    std::ostringstream msg;
    msg << "dataset '" << entry.name << "': expected " << *entry.expected_rows << " rows, found "
        << rows.size();
    throw InvalidDataset(msg.str());
  }
  if (entry.expected_columns && *entry.expected_columns != width) {
    std::ostringstream msg;
    msg << "dataset '" << entry.name << "': expected " << *entry.expected_columns
        << " columns, found " << width;
    throw InvalidDataset(msg.str());
  }

  const std::size_t label_col = entry.label_column.value_or(width - 1);
  if (label_col >= width) {
    throw ConfigError("dataset '" + entry.name + "': label_column beyond the row width");
  }
  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < width; ++c) {
    if (c == label_col) continue;
    if (std::find(entry.drop_columns.begin(), entry.drop_columns.end(), c) !=
        entry.drop_columns.end()) {
      continue;
    }
    feature_cols.push_back(c);
  }

  Dataset ds;
  ds.name = entry.name;
  std::map<std::string, int, std::less<>> class_ids;
  std::vector<double> values;
  values.reserve(rows.size() * feature_cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    const bool missing =
        cells[label_col] == entry.missing_token ||
        std::any_of(feature_cols.begin(), feature_cols.end(),
                    [&](std::size_t c) { return cells[c] == entry.missing_token; });
    if (!entry.missing_token.empty() && missing) {
      ++ds.dropped_row_count;
      continue;
    }
    for (const std::size_t c : feature_cols) {
      const auto v = text::parse_double(cells[c]);
      if (!v || !std::isfinite(*v)) {
        throw ParseError(located("dataset '" + entry.name + "': non-numeric cell '" +
                                     std::string(cells[c]) + "'",
                                 row_lines[r], c + 1));
      }
      values.push_back(*v);
    }
    const std::string label(cells[label_col]);
    auto it = class_ids.find(label);
    if (it == class_ids.end()) {
      it = class_ids.emplace(label, static_cast<int>(ds.class_names.size())).first;
      ds.class_names.push_back(label);
    }
    ds.labels.push_back(it->second);
  }

  if (ds.class_names.size() < 2) {
    throw InvalidDataset("dataset '" + entry.name + "': fewer than 2 classes after filtering");
  }
  const auto n = static_cast<Index>(ds.labels.size());
  const auto m = static_cast<Index>(feature_cols.size());
  ds.features = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), n, m);
  return ds;
}

std::string read_text_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open '" + file.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Dataset load_dataset(const DatasetManifestEntry& entry) {
  if (entry.paths.empty()) throw ConfigError("dataset '" + entry.name + "': no path given");
  std::string combined;
  for (const auto& path : entry.paths) {
    if (!std::filesystem::exists(path)) {
      throw IoError("dataset '" + entry.name + "': file not found: " + path.string());
    }
    // Header and skip lines apply to every file, so strip them per file.
    const std::string raw = read_text_file(path);
    const auto file_lines = text::lines(raw);
    std::size_t skipped = 0;
    bool header_pending = entry.has_header;
    for (const auto line : file_lines) {
      if (skipped < entry.skip_lines) {
        ++skipped;
        continue;
      }
      if (text::trim(line).empty()) continue;
      if (header_pending) {
        header_pending = false;
        continue;
      }
      combined.append(line);
      combined.push_back('\n');
    }
  }
  DatasetManifestEntry stripped = entry;
  stripped.has_header = false;
  stripped.skip_lines = 0;
  return load_dataset(stripped, combined);
}

void require_benchmark_ready(const Dataset& ds) {
  if (ds.size() < 20) {
    throw InvalidDataset("dataset '" + ds.name + "': needs at least 20 rows, has " +
                         std::to_string(ds.size()));
  }
  const auto sizes = ds.class_sizes();
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    if (sizes[c] < 2) {
      throw InvalidDataset("dataset '" + ds.name + "': class '" + ds.class_names[c] +
                           "' has fewer than 2 samples");
    }
  }
}

SplitIndices stratified_split(std::span<const int> labels, int class_count, double test_fraction,
                              RandomStream& rng) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InvalidParameter("stratified_split: test_fraction must lie in (0, 1)");
  }
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(class_count));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    if (y < 0 || y >= class_count) throw InvalidInput("stratified_split: label out of range");
    members[static_cast<std::size_t>(y)].push_back(static_cast<Index>(i));
  }
  SplitIndices split;
  split.seed = rng.seed();
  for (std::size_t c = 0; c < members.size(); ++c) {
    auto& idx = members[c];
    if (idx.size() < 2) {
      throw InvalidDataset("stratified_split: class " + std::to_string(c) +
                           " has fewer than 2 members");
    }
    const auto n_c = static_cast<long>(idx.size());
    const long n_test =
        std::clamp(std::lround(test_fraction * static_cast<double>(n_c)), 0L, n_c - 1);
    rng.shuffle(idx);
    split.test.insert(split.test.end(), idx.begin(), idx.begin() + n_test);
    split.train.insert(split.train.end(), idx.begin() + n_test, idx.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

SplitIndices stratified_split(const Dataset& ds, double test_fraction, RandomStream& rng) {
  return stratified_split(ds.labels, ds.class_count(), test_fraction, rng);
}

std::vector<DatasetManifestEntry> parse_manifest(std::string_view raw,
                                                 const std::filesystem::path& base_dir) {
  std::vector<DatasetManifestEntry> entries;
  const auto all_lines = text::lines(raw);
  for (std::size_t ln = 0; ln < all_lines.size(); ++ln) {
    auto line = all_lines[ln];
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const auto where = " (manifest line " + std::to_string(ln + 1) + ")";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header" + where);
      DatasetManifestEntry entry;
      entry.name = std::string(text::trim(line.substr(1, line.size() - 2)));
      entries.push_back(std::move(entry));
      continue;
    }
    if (entries.empty()) throw ConfigError("key outside of a [dataset] section" + where);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key = value" + where);
    const auto key = text::to_lower(text::trim(line.substr(0, eq)));
    const auto value = text::trim(line.substr(eq + 1));
    auto& e = entries.back();
    const auto bad = [&]() { return ConfigError("invalid value for '" + key + "'" + where); };

    if (key == "path") {
      for (const auto part : text::split(value, ';')) {
        const auto p = text::trim(part);
        if (p.empty()) continue;
        std::filesystem::path path(p);
        e.paths.push_back(path.is_absolute() ? path : base_dir / path);
      }
    } else if (key == "delimiter") {
      if (value == "whitespace") {
        e.whitespace = true;
      } else if (value == "tab") {
        e.delimiter = '\t';
      } else if (value == "comma" || value == ",") {
        e.delimiter = ',';
      } else if (value.size() == 1) {
        e.delimiter = value.front();
      } else {
        throw bad();
      }
    } else if (key == "header") {
      const auto b = text::parse_bool(value);
      if (!b) throw bad();
      e.has_header = *b;
    } else if (key == "skip_lines") {
      const auto v = text::parse_int<std::size_t>(value);
      if (!v) throw bad();
      e.skip_lines = *v;
    } else if (key == "label_column") {
      if (value == "last") {
        e.label_column.reset();
      } else {
        const auto v = text::parse_int<std::size_t>(value);
        if (!v) throw bad();
        e.label_column = *v;
      }
    } else if (key == "drop_columns") {
      e.drop_columns.clear();
      for (const auto part : text::split(value, ',')) {
        if (text::trim(part).empty()) continue;
        const auto v = text::parse_int<std::size_t>(part);
        if (!v) throw bad();
        e.drop_columns.push_back(*v);
      }
    } else if (key == "missing_token") {
      e.missing_token = std::string(value);
    } else if (key == "expected_rows") {
      const auto v = text::parse_int<std::size_t>(value);
      if (!v) throw bad();
      e.expected_rows = *v;
    } else if (key == "expected_columns") {
      const auto v = text::parse_int<std::size_t>(value);
      if (!v) throw bad();
      e.expected_columns = *v;
    } else {
      throw ConfigError("unknown manifest key '" + key + "'" + where);
    }
  }
  for (const auto& e : entries) e.validate();
  return entries;
}

std::vector<DatasetManifestEntry> load_manifest(const std::filesystem::path& file) {
  return parse_manifest(read_text_file(file), file.parent_path());
}

}  // namespace dimbench
