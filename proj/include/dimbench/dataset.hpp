#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dimbench/numerics.hpp"
#include "dimbench/random.hpp"

namespace dimbench {

/// How to read one dataset from disk.
struct DatasetManifestEntry {
  std::string name;
  // Files are concatenated in order (Image Segmentation ships as two files).
  std::vector<std::filesystem::path> paths;
  char delimiter = ',';
  // Split on runs of spaces/tabs instead of `delimiter`.
  bool whitespace = false;
  bool has_header = false;
  // Lines skipped at the top of each file before the optional header.
  std::size_t skip_lines = 0;
  // Column index of the label in the raw file; nullopt means the last column.
  std::optional<std::size_t> label_column;
  std::vector<std::size_t> drop_columns;
  std::string missing_token = "?";
  // Raw data rows and columns (before dropping anything), checked at load.
  std::optional<std::size_t> expected_rows;
  std::optional<std::size_t> expected_columns;

  void validate() const;
};

struct Dataset {
  std::string name;
  Matrix features;
  std::vector<int> labels;               // 0-based class ids
  std::vector<std::string> class_names;  // class id -> original label text
  std::size_t dropped_row_count = 0;

  Index size() const { return features.rows(); }
  Index dimension() const { return features.cols(); }
  int class_count() const { return static_cast<int>(class_names.size()); }
  std::vector<Index> class_sizes() const;
};

/// Parses delimiter-separated text into a Dataset.
///
/// Rows holding the missing token in any retained column are dropped and
/// counted. Labels are numbered by first appearance. Throws ParseError on a
/// non-numeric feature cell (with 1-based line and column) or a ragged row,
/// InvalidDataset when fewer than two classes survive filtering or the raw
/// shape disagrees with the expected counts.
Dataset load_dataset(const DatasetManifestEntry& entry, std::string_view raw_text);

/// Reads and concatenates the entry's files, then parses them.
Dataset load_dataset(const DatasetManifestEntry& entry);

/// Structural checks the benchmark relies on: n >= 20 and every class with
/// at least two samples.
void require_benchmark_ready(const Dataset& ds);

struct SplitIndices {
  std::vector<Index> train;  // ascending
  std::vector<Index> test;   // ascending
  std::uint64_t seed = 0;
};

/// Per-class shuffled split; class c contributes round(test_fraction * n_c)
/// samples to the test side, clamped to [0, n_c - 1].
SplitIndices stratified_split(std::span<const int> labels, int class_count, double test_fraction,
                              RandomStream& rng);
SplitIndices stratified_split(const Dataset& ds, double test_fraction, RandomStream& rng);

/// Reads a manifest file. Sections `[name]` introduce entries; keys inside:
///   path            one or more files separated by ';' (relative to base_dir)
///   delimiter       single character, `tab`, or `whitespace`
///   header          true/false
///   skip_lines      count
///   label_column    0-based index or `last`
///   drop_columns    comma-separated 0-based indices
///   missing_token   string
///   expected_rows / expected_columns
std::vector<DatasetManifestEntry> parse_manifest(std::string_view text,
                                                 const std::filesystem::path& base_dir);
std::vector<DatasetManifestEntry> load_manifest(const std::filesystem::path& file);

std::string read_text_file(const std::filesystem::path& file);

}  // namespace dimbench
