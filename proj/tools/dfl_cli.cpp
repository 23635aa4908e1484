// dfl: deflation sequences for polynomial systems and Brent equations.
//
// Exit codes: 0 success, 1 usage error, 2 input is not a solution,
// 3 numerical failure (incomplete report), 4 unreadable or malformed file.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dfl/brent.hpp"
#include "dfl/deflation.hpp"
#include "dfl/poly_parser.hpp"
#include "dfl/solutions_io.hpp"

namespace {

using namespace dfl;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotSolution = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::size_t steps = 3;
  std::optional<std::uint64_t> seed;
  double rank_tol = 1e-8;
  std::string format = "text";
  std::string out;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_deflation) {
  if (with_deflation) {
    cmd->add_option("--steps", o.steps, "Number of deflation steps")->capture_default_str();
    cmd->add_option("--seed", o.seed, "RNG seed for the random borders (default: $DEFLATE_SEED or 0)");
    cmd->add_option("--rank-tol", o.rank_tol, "Relative singular-value cutoff")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--quiet", o.quiet, "No per-level progress on stderr");
  }
  cmd->add_option("--format", o.format, "Output format")
      ->capture_default_str()
      ->check(CLI::IsMember({"json", "csv", "text"}));
  cmd->add_option("--out", o.out, "Write output to this file instead of stdout");
}

std::uint64_t resolve_seed(const CommonOptions& o) {
  if (o.seed) return *o.seed;
  if (const char* env = std::getenv("DEFLATE_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("DEFLATE_SEED is not an unsigned integer: ") + env);
  }
  return 0;
}

DeflationConfig make_config(const CommonOptions& o) {
  DeflationConfig cfg;
  cfg.max_steps = o.steps;
  cfg.rng_seed = resolve_seed(o);
  cfg.rank_rel_tol = o.rank_tol;
  return cfg;
}

void emit(const CommonOptions& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw Error("cannot write " + o.out);
  f << text;
}

std::string render(const CommonOptions& o, const BatchReport& report) {
  if (o.format == "json") return report_to_json(report).dump(2) + "\n";
  if (o.format == "csv") return report_to_csv(report.records);
  std::string text = report_to_text(report);
  for (const auto& rec : report.records) {
    if (rec.orbit_lower_bound) {
      text += "(orbit bound assumes a finite stabilizer)\n";
      break;
    }
  }
  return text;
}

LevelCallback progress(const CommonOptions& o, const std::string& label) {
  if (o.quiet) return {};
  return [label](const LevelRecord& l) {
    std::cerr << "[dfl] " << label << " level " << l.level << ": " << l.rows << "x" << l.cols
              << " rank " << l.rank.rank << " nullity " << l.nullity() << " ("
              << l.seconds << " s)";
    if (l.borderline) {
      std::cerr << " borderline";
      if (l.rank.gap_adjusted) std::cerr << " (threshold rank " << l.rank.threshold_rank << ")";
    }
    std::cerr << "\n";
  };
}

int error_exit(const CommonOptions& o, const std::string& kind, const std::string& message,
               int code, std::optional<double> residual = std::nullopt) {
  if (o.format == "json") {
    ordered_json err;
    err["kind"] = kind;
    err["message"] = message;
    if (residual) err["residual"] = *residual;
    std::cout << ordered_json{{"error", err}}.dump(2) << "\n";
  }
  std::cerr << "dfl: " << message << "\n";
  return code;
}

int exit_for(const BatchReport& report) {
  for (const auto& rec : report.records) {
    if (rec.status == "incomplete" || rec.status == "error") return kExitNumerical;
  }
  return kExitOk;
}

struct Fixture {
  std::string label;
  SystemPtr system;
  CVector point;
  std::optional<BrentShape> shape;
};

std::vector<Fixture> polynomial_fixtures(const std::string& name, const std::string& system_text,
                                         const std::vector<std::string>& points) {
  auto sys = std::make_shared<SymbolicSystem>(parse_polynomial_system(system_text));
  std::vector<Fixture> out;
  for (const auto& p : points) {
    Fixture f{name + " at (" + p + ")", sys, parse_point(p), std::nullopt};
    if (f.point.size() != sys->n_vars()) {
      throw UsageError("point (" + p + ") has " + std::to_string(f.point.size()) +
                       " coordinates, system has " + std::to_string(sys->n_vars()) + " variables");
    }
    out.push_back(std::move(f));
  }
  return out;
}

Fixture scheme_fixture(const std::string& label, const BilinearScheme& s) {
  return {label, std::make_shared<BrentSystem>(s.shape()), s.flatten(), s.shape()};
}

std::array<int, 3> parse_mnp(const std::string& text) {
  try {
    const BrentShape s = BrentShape::parse(text + ":1");
    return {s.m, s.n, s.p};
  } catch (const InputError&) {
    throw UsageError("malformed dimensions '" + text + "', expected MxNxP such as 2x2x3");
  }
}

std::vector<Fixture> named_fixtures(const std::string& name) {
  if (name == "cusp") return polynomial_fixtures("cusp", "x2^2 - x1^3", {"0,0", "1,1"});
  if (name == "whitney") {
    return polynomial_fixtures("whitney", "x1^2 - x2^2*x3", {"2,2,1", "0,0,1", "0,0,0"});
  }
  if (name == "strassen") return {scheme_fixture("strassen", strassen_scheme())};
  if (name.rfind("natural:", 0) == 0) {
    const std::string dims = name.substr(8);
    const auto [m, n, p] = parse_mnp(dims);
    return {scheme_fixture("natural " + dims, natural_algorithm(m, n, p))};
  }
  throw UsageError("unknown fixture '" + name +
                   "'; available: cusp, whitney, strassen, natural:MxNxP");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int cmd_examples(const CommonOptions& o, const std::string& name, const std::string& system_path,
                 const std::vector<std::string>& at) {
  std::vector<Fixture> fixtures;
  if (!system_path.empty()) {
    if (at.empty()) throw UsageError("--system needs at least one --at point");
    fixtures = polynomial_fixtures(name.empty() ? system_path : name, read_file(system_path), at);
  } else {
    if (name.empty()) throw UsageError("examples: name a fixture (cusp, whitney, strassen, natural:MxNxP)");
    fixtures = named_fixtures(name);
  }

  const DeflationConfig cfg = make_config(o);
  BatchReport report;
  for (const auto& f : fixtures) {
    const DeflationReport r = deflation_sequence(f.system, f.point, cfg, progress(o, f.label));
    report.records.push_back(make_record(f.label, "", f.shape, r));
  }
  report.histogram = histogram(report.records);
  emit(o, render(o, report));
  return exit_for(report);
}

int cmd_gen_natural(const std::string& what, const std::string& out) {
  SolutionFile file;
  if (what == "strassen") {
    file.scheme = strassen_scheme();
    file.label = "strassen";
  } else {
    const auto [m, n, p] = parse_mnp(what);
    file.scheme = natural_algorithm(m, n, p);
    file.label = "natural " + what;
  }
  file.source = "dfl gen-natural";
  const std::string text = write_solution(file);
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw Error("cannot write " + out);
    f << text;
  }
  return kExitOk;
}

int cmd_verify(const CommonOptions& o, const std::string& path, double tol) {
  const SolutionFile sol = read_solution_file(path);
  const double res = residual(sol.scheme);
  const bool ok = res <= tol;
  if (o.format == "json") {
    ordered_json j{{"file", path},
                   {"shape", sol.scheme.shape().to_string()},
                   {"residual", res},
                   {"tolerance", tol},
                   {"is_solution", ok}};
    emit(o, j.dump(2) + "\n");
  } else if (o.format == "csv") {
    std::ostringstream os;
    os << "file,shape,residual,tolerance,is_solution\n"
       << path << "," << sol.scheme.shape().to_string() << "," << ordered_json(res).dump() << ","
       << ordered_json(tol).dump() << "," << (ok ? "true" : "false") << "\n";
    emit(o, os.str());
  } else {
    std::ostringstream os;
    os << path << ": " << sol.scheme.shape().to_string() << " residual " << res
       << (ok ? " (solution)" : " (NOT a solution)") << "\n";
    emit(o, os.str());
  }
  return ok ? kExitOk : kExitNotSolution;
}

int cmd_deflate(const CommonOptions& o, const std::string& path) {
  const SolutionFile sol = read_solution_file(path);
  const std::string label = sol.label.empty() ? std::filesystem::path(path).stem().string() : sol.label;
  const DeflationConfig cfg = make_config(o);
  auto sys = std::make_shared<BrentSystem>(sol.scheme.shape());
  const DeflationReport r = deflation_sequence(sys, sol.scheme.flatten(), cfg, progress(o, label));
  BatchReport report;
  report.records.push_back(
      make_record(label, std::filesystem::path(path).filename().string(), sol.scheme.shape(), r));
  report.histogram = histogram(report.records);
  emit(o, render(o, report));
  return exit_for(report);
}

int cmd_bound(const CommonOptions& o, const std::string& text) {
  BrentShape shape;
  try {
    shape = BrentShape::parse(text);
  } catch (const InputError& e) {
    throw UsageError(e.what());
  }
  const auto orbit = orbit_lower_bound(shape);
  const auto under = underdetermined_bound(shape);
  std::ostringstream os;
  if (o.format == "json") {
    ordered_json j{{"shape", shape.to_string()},
                   {"n_vars", shape.n_vars()},
                   {"n_eqs", shape.n_eqs()},
                   {"orbit_lower_bound", orbit},
                   {"underdetermined_bound", under},
                   {"assumes_finite_stabilizer", true}};
    os << j.dump(2) << "\n";
  } else if (o.format == "csv") {
    os << "shape,n_vars,n_eqs,orbit_lower_bound,underdetermined_bound\n"
       << shape.to_string() << "," << shape.n_vars() << "," << shape.n_eqs() << "," << orbit << ","
       << under << "\n";
  } else {
    os << "shape " << shape.to_string() << ": " << shape.n_vars() << " variables, "
       << shape.n_eqs() << " equations\n"
       << "orbit lower bound " << orbit << " (when the stabilizer is finite)\n"
       << "underdetermined bound " << under << "\n";
  }
  emit(o, os.str());
  return kExitOk;
}

int cmd_batch(const CommonOptions& o, const std::string& dir, bool shared, unsigned jobs) {
  const DeflationConfig cfg = make_config(o);
  BatchOptions opts;
  opts.shared_borders = shared;
  opts.jobs = jobs;
  const BatchReport report = batch_run(dir, cfg, opts);
  emit(o, render(o, report));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deflation sequences (Jacobian nullity chains) for polynomial systems and Brent equations"};
  app.require_subcommand(1);

  CommonOptions ex_o, gen_o, ver_o, def_o, bnd_o, bat_o;

  auto* ex = app.add_subcommand("examples", "Run a built-in fixture or a hand-entered system");
  std::string ex_name, ex_system;
  std::vector<std::string> ex_at;
  ex->add_option("name", ex_name, "cusp | whitney | strassen | natural:MxNxP");
  ex->add_option("--system", ex_system, "Polynomial system file (one polynomial per line)");
  ex->add_option("--at", ex_at, "Point on the system, comma separated (repeatable)");
  add_common(ex, ex_o, true);

  auto* gen = app.add_subcommand("gen-natural", "Write the natural algorithm N(m,n,p) (or 'strassen') as a solution file");
  std::string gen_what, gen_out;
  gen->add_option("dims", gen_what, "MxNxP, or strassen")->required();
  gen->add_option("--out", gen_out, "Output file (default stdout)");

  auto* ver = app.add_subcommand("verify", "Check that a solution file satisfies its Brent system");
  std::string ver_path;
  double ver_tol = 1e-6;
  ver->add_option("file", ver_path, "Solution file")->required();
  ver->add_option("--tol", ver_tol, "Residual tolerance")->capture_default_str();
  add_common(ver, ver_o, false);

  auto* def = app.add_subcommand("deflate", "Deflation sequence of one solution file");
  std::string def_path;
  def->add_option("file", def_path, "Solution file")->required();
  add_common(def, def_o, true);

  auto* bnd = app.add_subcommand("bound", "Orbit and underdetermined lower bounds for a shape");
  std::string bnd_shape;
  bnd->add_option("shape", bnd_shape, "MxNxP:R")->required();
  add_common(bnd, bnd_o, false);

  auto* bat = app.add_subcommand("batch", "Deflate every *.json solution file in a directory");
  std::string bat_dir;
  bool bat_shared = false;
  unsigned bat_jobs = 0;
  bat->add_option("dir", bat_dir, "Directory of solution files")->required();
  bat->add_flag("--shared-borders", bat_shared, "Use the same seed for every file");
  bat->add_option("--jobs", bat_jobs, "Worker threads (default: available parallelism)");
  add_common(bat, bat_o, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CommonOptions* active = &ex_o;
  if (gen->parsed()) active = &gen_o;
  if (ver->parsed()) active = &ver_o;
  if (def->parsed()) active = &def_o;
  if (bnd->parsed()) active = &bnd_o;
  if (bat->parsed()) active = &bat_o;

  try {
    if (ex->parsed()) return cmd_examples(ex_o, ex_name, ex_system, ex_at);
    if (gen->parsed()) return cmd_gen_natural(gen_what, gen_out);
    if (ver->parsed()) return cmd_verify(ver_o, ver_path, ver_tol);
    if (def->parsed()) return cmd_deflate(def_o, def_path);
    if (bnd->parsed()) return cmd_bound(bnd_o, bnd_shape);
    if (bat->parsed()) return cmd_batch(bat_o, bat_dir, bat_shared, bat_jobs);
  } catch (const UsageError& e) {
    return error_exit(*active, "usage", e.what(), kExitUsage);
  } catch (const NotASolutionError& e) {
    return error_exit(*active, "not_a_solution", e.what(), kExitNotSolution, e.residual());
  } catch (const ParseError& e) {
    return error_exit(*active, "parse_error", e.what(), kExitIo);
  } catch (const SchemaError& e) {
    return error_exit(*active, "schema_error", e.what(), kExitIo);
  } catch (const InputError& e) {
    return error_exit(*active, "input_error", e.what(), kExitUsage);
  } catch (const Error& e) {
    return error_exit(*active, "numerical_error", e.what(), kExitNumerical);
  }
  return kExitUsage;
}
