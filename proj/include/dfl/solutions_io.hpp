#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dfl/brent.hpp"
#include "dfl/deflation.hpp"

namespace dfl {

inline constexpr int kSolutionSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;

/// On-disk bilinear scheme. See docs/solution-format.md for the schema.
struct SolutionFile {
  BilinearScheme scheme;
  std::string label;
  std::string source;
};

/// Throws ParseError (malformed JSON, with line/column) or SchemaError
/// (well-formed but inconsistent with the declared shape, naming the field).
SolutionFile parse_solution_text(const std::string& text);
SolutionFile read_solution_file(const std::filesystem::path& path);
BilinearScheme parse_solution(const std::filesystem::path& path);

/// Canonical rendering: fixed key order, one rank-one factor per line,
/// real scalars as plain numbers and the rest as [re, im], shortest
/// round-trip decimal for every double.
std::string write_solution(const SolutionFile& file);
void write_solution_file(const std::filesystem::path& path, const SolutionFile& file);

/// One line of a report.
struct ReportRecord {
  std::string label;
  std::string file;
  std::optional<BrentShape> shape;
  /// "ok", "incomplete", "not_a_solution", "parse_error" or "error".
  std::string status = "ok";
  std::vector<Index> sequence;
  std::optional<std::int64_t> orbit_lower_bound;
  std::optional<std::int64_t> underdetermined_bound;
  /// n_s minus the orbit lower bound.
  std::optional<std::int64_t> gap;
  double residual = 0.0;
  bool borderline = false;
  /// Some rank cut was moved off the threshold to a decisive gap.
  bool rank_adjusted = false;
  /// Smallest gap ratio over all rank cuts.
  double min_gap_ratio = 0.0;
  bool monotone = true;
  bool first_columns_ok = true;
  /// n - rank of the first n columns of each level Jacobian.
  std::vector<Index> first_columns_nullity;
  std::uint64_t seed = 0;
  double seconds = 0.0;
  std::vector<double> level_seconds;
  std::string error;
};

ReportRecord make_record(const std::string& label, const std::string& file,
                         const std::optional<BrentShape>& shape, const DeflationReport& report);

/// Counts of d_k = n_{k-1} - n_k by value, for k = 1, 2, ...
struct Histogram {
  std::vector<std::map<std::int64_t, std::size_t>> steps;
  /// Number of negative d_k at each step (monotonicity failures).
  std::vector<std::size_t> negatives;
};

Histogram histogram(const std::vector<ReportRecord>& records);

struct BatchReport {
  std::vector<ReportRecord> records;
  Histogram histogram;
};

struct BatchOptions {
  /// Use cfg.rng_seed for every file instead of a per-file seed.
  bool shared_borders = false;
  /// Worker threads; 0 means std::thread::hardware_concurrency().
  unsigned jobs = 0;
};

/// Per-file seed used by batch_run when borders are not shared.
std::uint64_t derive_seed(std::uint64_t base, const std::string& name);

/// Deflates every *.json solution file in `dir`. Per-file failures become
/// records with a non-"ok" status; records come back sorted by label.
BatchReport batch_run(const std::filesystem::path& dir, const DeflationConfig& cfg,
                      const BatchOptions& opts = {});

nlohmann::ordered_json record_to_json(const ReportRecord& rec);
nlohmann::ordered_json report_to_json(const BatchReport& report);
/// Header plus one row per record; same fields, same order as the JSON.
std::string report_to_csv(const std::vector<ReportRecord>& records);
std::string report_to_text(const BatchReport& report);

/// Splits one CSV line honouring double-quoted cells.
std::vector<std::string> split_csv_line(const std::string& line);
/// The CSV cell a JSON field value renders to.
std::string csv_cell(const nlohmann::ordered_json& value);

}  // namespace dfl
