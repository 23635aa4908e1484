#include "dfl/solutions_io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace dfl {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(where + ": missing field '" + key + "'");
  return *it;
}

int positive_int(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 1 ||
      v.get<std::int64_t>() > std::numeric_limits<int>::max()) {
    throw SchemaError(where + ": expected a positive integer");
  }
  return v.get<int>();
}

Complex parse_scalar(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw SchemaError(where + ": scalar must be a number or a [re, im] pair");
}

ordered_json scalar_to_json(Complex c) {
  if (c.imag() == 0.0) return c.real();
  return ordered_json::array({c.real(), c.imag()});
}

template <class Setter>
void parse_factor(const json& root, const char* name, int terms, int rows, int cols, Setter set) {
  const json& arr = require(root, name, "solution");
  const std::string base(name);
  if (!arr.is_array() || arr.size() != static_cast<std::size_t>(terms)) {
    throw SchemaError(base + ": expected " + std::to_string(terms) + " terms, got " +
                      (arr.is_array() ? std::to_string(arr.size()) : std::string("non-array")));
  }
  for (int t = 0; t < terms; ++t) {
    const json& mat = arr[static_cast<std::size_t>(t)];
    const std::string mw = base + "[" + std::to_string(t) + "]";
    if (!mat.is_array() || mat.size() != static_cast<std::size_t>(rows)) {
      throw SchemaError(mw + ": expected " + std::to_string(rows) + " rows");
    }
    for (int i = 0; i < rows; ++i) {
      const json& row = mat[static_cast<std::size_t>(i)];
      const std::string rw = mw + "[" + std::to_string(i) + "]";
      if (!row.is_array() || row.size() != static_cast<std::size_t>(cols)) {
        throw SchemaError(rw + ": expected " + std::to_string(cols) + " entries, got " +
                          (row.is_array() ? std::to_string(row.size()) : std::string("non-array")));
      }
      for (int j = 0; j < cols; ++j) {
        set(t, i, j, parse_scalar(row[static_cast<std::size_t>(j)], rw + "[" + std::to_string(j) + "]"));
      }
    }
  }
}

template <class Getter>
void write_factor(std::ostream& os, const char* name, int terms, int rows, int cols, Getter get) {
  os << "  \"" << name << "\": [\n";
  for (int t = 0; t < terms; ++t) {
    ordered_json mat = ordered_json::array();
    for (int i = 0; i < rows; ++i) {
      ordered_json row = ordered_json::array();
      for (int j = 0; j < cols; ++j) row.push_back(scalar_to_json(get(t, i, j)));
      mat.push_back(std::move(row));
    }
    os << "    " << mat.dump() << (t + 1 < terms ? ",\n" : "\n");
  }
  os << "  ],\n";
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ordered_json optional_int(const std::optional<std::int64_t>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json finite_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::string sequence_string(const std::vector<Index>& seq) {
  std::ostringstream os;
  os << "(";
  for (std::size_t k = 0; k < seq.size(); ++k) os << (k ? "," : "") << seq[k];
  os << ")";
  return os.str();
}

}  // namespace

SolutionFile parse_solution_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError("malformed solution file at line " + std::to_string(line) + ", column " +
                     std::to_string(col) + ": " + e.what());
  }
  if (!root.is_object()) throw SchemaError("solution: top level must be an object");

  const json& version = require(root, "schema_version", "solution");
  if (!version.is_number_integer() || version.get<int>() != kSolutionSchemaVersion) {
    throw SchemaError("schema_version: unsupported version " + version.dump());
  }
  if (auto it = root.find("field"); it != root.end() && *it != "complex") {
    throw SchemaError("field: only \"complex\" is supported, got " + it->dump());
  }

  const json& sh = require(root, "shape", "solution");
  if (!sh.is_object()) throw SchemaError("shape: expected an object with m, n, p, r");
  const BrentShape shape{positive_int(require(sh, "m", "shape"), "shape.m"),
                         positive_int(require(sh, "n", "shape"), "shape.n"),
                         positive_int(require(sh, "p", "shape"), "shape.p"),
                         positive_int(require(sh, "r", "shape"), "shape.r")};

  SolutionFile out;
  out.scheme = BilinearScheme(shape);
  auto& s = out.scheme;
  parse_factor(root, "alpha", shape.r, shape.m, shape.n,
               [&](int t, int i, int j, Complex c) { s.alpha(t, i, j) = c; });
  parse_factor(root, "beta", shape.r, shape.n, shape.p,
               [&](int t, int i, int j, Complex c) { s.beta(t, i, j) = c; });
  parse_factor(root, "gamma", shape.r, shape.p, shape.m,
               [&](int t, int i, int j, Complex c) { s.gamma(t, i, j) = c; });

  if (auto it = root.find("metadata"); it != root.end()) {
    if (!it->is_object()) throw SchemaError("metadata: expected an object");
    if (auto l = it->find("label"); l != it->end() && l->is_string()) out.label = l->get<std::string>();
    if (auto src = it->find("source"); src != it->end() && src->is_string()) {
      out.source = src->get<std::string>();
    }
  }
  return out;
}

SolutionFile read_solution_file(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return parse_solution_text(text);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

BilinearScheme parse_solution(const std::filesystem::path& path) {
  return read_solution_file(path).scheme;
}

std::string write_solution(const SolutionFile& file) {
  const auto& s = file.scheme;
  const BrentShape& sh = s.shape();
  std::ostringstream os;
  os << "{\n";
  os << "  \"schema_version\": " << kSolutionSchemaVersion << ",\n";
  os << "  \"field\": \"complex\",\n";
  ordered_json shape_json{{"m", sh.m}, {"n", sh.n}, {"p", sh.p}, {"r", sh.r}};
  os << "  \"shape\": " << shape_json.dump() << ",\n";
  write_factor(os, "alpha", sh.r, sh.m, sh.n, [&](int t, int i, int j) { return s.alpha(t, i, j); });
  write_factor(os, "beta", sh.r, sh.n, sh.p, [&](int t, int i, int j) { return s.beta(t, i, j); });
  write_factor(os, "gamma", sh.r, sh.p, sh.m, [&](int t, int i, int j) { return s.gamma(t, i, j); });
  ordered_json meta = ordered_json::object();
  if (!file.label.empty()) meta["label"] = file.label;
  if (!file.source.empty()) meta["source"] = file.source;
  os << "  \"metadata\": " << meta.dump() << "\n";
  os << "}\n";
  return os.str();
}

void write_solution_file(const std::filesystem::path& path, const SolutionFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << write_solution(file);
}

ReportRecord make_record(const std::string& label, const std::string& file,
                         const std::optional<BrentShape>& shape, const DeflationReport& report) {
  ReportRecord rec;
  rec.label = label;
  rec.file = file;
  rec.shape = shape;
  rec.status = report.complete ? "ok" : "incomplete";
  rec.error = report.error;
  rec.sequence = report.sequence;
  if (shape) {
    rec.orbit_lower_bound = orbit_lower_bound(*shape);
    rec.underdetermined_bound = underdetermined_bound(*shape);
    if (!rec.sequence.empty()) rec.gap = rec.sequence.back() - *rec.orbit_lower_bound;
  }
  rec.residual = report.input_residual;
  rec.borderline = report.any_borderline();
  rec.min_gap_ratio = std::numeric_limits<double>::infinity();
  for (const auto& l : report.levels) {
    rec.min_gap_ratio = std::min(rec.min_gap_ratio, l.rank.gap_ratio);
    rec.first_columns_ok = rec.first_columns_ok && l.first_columns_ok;
    if (l.first_columns_nullity >= 0) rec.first_columns_nullity.push_back(l.first_columns_nullity);
    rec.rank_adjusted = rec.rank_adjusted || l.rank.gap_adjusted;
    rec.level_seconds.push_back(l.seconds);
  }
  rec.monotone = !report.monotonicity_violation;
  rec.seed = report.seed;
  rec.seconds = report.total_seconds;
  return rec;
}

Histogram histogram(const std::vector<ReportRecord>& records) {
  Histogram h;
  for (const auto& rec : records) {
    for (std::size_t k = 1; k < rec.sequence.size(); ++k) {
      if (h.steps.size() < k) {
        h.steps.resize(k);
        h.negatives.resize(k, 0);
      }
      const std::int64_t d = rec.sequence[k - 1] - rec.sequence[k];
      ++h.steps[k - 1][d];
      if (d < 0) ++h.negatives[k - 1];
    }
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t base, const std::string& name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(base ^ h);
}

BatchReport batch_run(const std::filesystem::path& dir, const DeflationConfig& cfg,
                      const BatchOptions& opts) {
  cfg.validate();
  if (!std::filesystem::is_directory(dir)) throw InputError(dir.string() + " is not a directory");

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<ReportRecord> records(files.size());
  auto process = [&](std::size_t idx) {
    const auto& path = files[idx];
    const std::string name = path.filename().string();
    DeflationConfig local = cfg;
    local.rng_seed = opts.shared_borders ? cfg.rng_seed : derive_seed(cfg.rng_seed, name);

    ReportRecord rec;
    rec.file = name;
    rec.label = path.stem().string();
    rec.seed = local.rng_seed;
    try {
      const SolutionFile sol = read_solution_file(path);
      if (!sol.label.empty()) rec.label = sol.label;
      rec.shape = sol.scheme.shape();
      auto sys = std::make_shared<BrentSystem>(sol.scheme.shape());
      const DeflationReport report = deflation_sequence(sys, sol.scheme.flatten(), local);
      const std::string label = rec.label;
      rec = make_record(label, name, sol.scheme.shape(), report);
    } catch (const NotASolutionError& e) {
      rec.status = "not_a_solution";
      rec.residual = e.residual();
      rec.error = e.what();
    } catch (const ParseError& e) {
      rec.status = "parse_error";
      rec.error = e.what();
    } catch (const SchemaError& e) {
      rec.status = "parse_error";
      rec.error = e.what();
    } catch (const std::exception& e) {
      rec.status = "error";
      rec.error = e.what();
    }
    if (rec.shape && rec.status != "ok" && rec.status != "incomplete") {
      rec.orbit_lower_bound = orbit_lower_bound(*rec.shape);
      rec.underdetermined_bound = underdetermined_bound(*rec.shape);
    }
    records[idx] = std::move(rec);
  };

  unsigned jobs = opts.jobs ? opts.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(files.size(), 1)));
  if (jobs <= 1) {
    for (std::size_t k = 0; k < files.size(); ++k) process(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < files.size(); k = next++) process(k);
      });
    }
    for (auto& t : pool) t.join();
  }

  std::stable_sort(records.begin(), records.end(), [](const ReportRecord& a, const ReportRecord& b) {
    return a.label != b.label ? a.label < b.label : a.file < b.file;
  });
  BatchReport out;
  out.histogram = histogram(records);
  out.records = std::move(records);
  return out;
}

ordered_json record_to_json(const ReportRecord& rec) {
  ordered_json j;
  j["label"] = rec.label;
  j["file"] = rec.file;
  j["shape"] = rec.shape ? ordered_json(rec.shape->to_string()) : ordered_json(nullptr);
  j["status"] = rec.status;
  j["sequence"] = rec.sequence;
  j["orbit_lower_bound"] = optional_int(rec.orbit_lower_bound);
  j["underdetermined_bound"] = optional_int(rec.underdetermined_bound);
  j["gap"] = optional_int(rec.gap);
  j["residual"] = finite_or_null(rec.residual);
  j["borderline"] = rec.borderline;
  j["rank_adjusted"] = rec.rank_adjusted;
  j["min_gap_ratio"] = finite_or_null(rec.min_gap_ratio);
  j["monotone"] = rec.monotone;
  j["first_columns_ok"] = rec.first_columns_ok;
  j["first_columns_nullity"] = rec.first_columns_nullity;
  j["seed"] = rec.seed;
  j["seconds"] = rec.seconds;
  j["level_seconds"] = rec.level_seconds;
  j["error"] = rec.error;
  return j;
}

ordered_json report_to_json(const BatchReport& report) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["records"] = ordered_json::array();
  for (const auto& rec : report.records) j["records"].push_back(record_to_json(rec));
  ordered_json hist = ordered_json::array();
  for (std::size_t k = 0; k < report.histogram.steps.size(); ++k) {
    ordered_json step;
    step["step"] = k + 1;
    ordered_json counts = ordered_json::object();
    for (const auto& [d, c] : report.histogram.steps[k]) counts[std::to_string(d)] = c;
    step["counts"] = counts;
    step["negative"] = report.histogram.negatives[k];
    hist.push_back(step);
  }
  j["histogram"] = hist;
  return j;
}

std::string csv_cell(const ordered_json& value) {
  std::string cell;
  if (value.is_null()) {
    cell = "";
  } else if (value.is_string()) {
    cell = value.get<std::string>();
  } else if (value.is_array()) {
    for (std::size_t k = 0; k < value.size(); ++k) {
      if (k) cell += ';';
      cell += csv_cell(value[k]);
    }
  } else {
    cell = value.dump();
  }
  return cell;
}

namespace {

std::string quote_csv(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string report_to_csv(const std::vector<ReportRecord>& records) {
  std::ostringstream os;
  const ordered_json header_source = record_to_json(ReportRecord{});
  bool first = true;
  for (const auto& item : header_source.items()) {
    os << (first ? "" : ",") << item.key();
    first = false;
  }
  os << "\n";
  for (const auto& rec : records) {
    first = true;
    const ordered_json row = record_to_json(rec);
    for (const auto& item : row.items()) {
      os << (first ? "" : ",") << quote_csv(csv_cell(item.value()));
      first = false;
    }
    os << "\n";
  }
  return os.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells(1);
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        cells.back() += '"';
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        cells.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back();
    } else {
      cells.back() += c;
    }
  }
  return cells;
}

std::string report_to_text(const BatchReport& report) {
  std::ostringstream os;
  for (const auto& rec : report.records) {
    os << rec.label;
    if (rec.shape) os << "  " << rec.shape->to_string();
    os << "  " << rec.status;
    if (!rec.sequence.empty()) os << "  " << sequence_string(rec.sequence);
    if (rec.orbit_lower_bound) os << "  orbit bound " << *rec.orbit_lower_bound;
    if (rec.gap) os << "  gap " << *rec.gap;
    if (rec.borderline) {
      os << (rec.rank_adjusted ? "  [borderline threshold cut, moved to a clear gap]"
                               : "  [borderline rank cut]");
    }
    if (!rec.error.empty()) os << "  (" << rec.error << ")";
    os << "\n";
  }
  const auto& h = report.histogram;
  for (std::size_t k = 0; k < h.steps.size(); ++k) {
    os << "d" << k + 1 << " = n" << k << " - n" << k + 1 << ":";
    for (const auto& [d, c] : h.steps[k]) os << "  " << d << ":" << c;
    if (h.negatives[k]) os << "  (negative: " << h.negatives[k] << ")";
    os << "\n";
  }
  return os.str();
}

}  // namespace dfl
