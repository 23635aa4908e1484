// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//
//   dfl_acceptance                 criteria 1-7, default suite
//   dfl_acceptance --slow          only the slow natural-algorithm row N(3,3,3)
//   dfl_acceptance --laderman F    also check a Laderman solution file
//                                  (or set DFL_LADERMAN_FILE)

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dfl/brent.hpp"
#include "dfl/deflation.hpp"
#include "dfl/solutions_io.hpp"
#include "support/fixtures.hpp"

using namespace dfl;
using namespace dfl::testing;

namespace {

using Seq = std::vector<Index>;
using Clock = std::chrono::steady_clock;

int failures = 0;

void report(const std::string& id, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::cout << (ok ? "PASS" : "FAIL") << "  [" << id << "] " << detail << std::endl;
}

std::string str(const Seq& s) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << ")";
  return os.str();
}

double seconds(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Run {
  DeflationReport report;
  double seconds = 0.0;
};

Run deflate(const PointFixture& f, std::uint64_t seed = 0) {
  DeflationConfig cfg;
  cfg.rng_seed = seed;
  const auto t = Clock::now();
  Run r{deflation_sequence(f.system, f.point, cfg), 0.0};
  r.seconds = seconds(t);
  if (!r.report.complete) std::cerr << f.label << ": " << r.report.error << "\n";
  return r;
}

// Every fixture run in this gate, for the property checks of criterion 6.
struct Observed {
  std::string label;
  DeflationReport report;
};
std::vector<Observed> observed;

bool sequences_match(const std::vector<PointFixture>& fixtures, const std::vector<Seq>& expected,
                     double limit, const std::string& id, const std::string& name) {
  const auto t = Clock::now();
  bool ok = true;
  std::ostringstream detail;
  detail << name << ":";
  for (std::size_t i = 0; i < fixtures.size(); ++i) {
    const Run r = deflate(fixtures[i]);
    observed.push_back({fixtures[i].label, r.report});
    const bool hit = r.report.complete && r.report.sequence == expected[i];
    ok = ok && hit;
    detail << " " << fixtures[i].label << " " << str(r.report.sequence)
           << (hit ? "" : " expected " + str(expected[i])) << ";";
  }
  const double s = seconds(t);
  ok = ok && s < limit;
  detail << " " << s << " s (limit " << limit << " s)";
  report(id, ok, detail.str());
  return ok;
}

void criterion_naturals(bool slow) {
  struct Row {
    int m, n, p;
    Seq expected;
  };
  const std::vector<Row> rows =
      slow ? std::vector<Row>{{3, 3, 3, {216, 216, 72, 72}}}
           : std::vector<Row>{{2, 2, 2, {40, 40, 32, 22}},
                              {2, 2, 3, {72, 72, 48, 34}},
                              {2, 3, 3, {126, 126, 54, 50}}};
  const auto t = Clock::now();
  bool ok = true;
  std::ostringstream detail;
  detail << (slow ? "natural algorithm (slow suite):" : "natural algorithms:");
  for (const auto& row : rows) {
    std::ostringstream name;
    name << "N(" << row.m << "," << row.n << "," << row.p << ")";
    const PointFixture f = scheme_fixture(name.str(), natural_algorithm(row.m, row.n, row.p));
    DeflationConfig cfg;
    const auto rt = Clock::now();
    const DeflationReport r = deflation_sequence(
        f.system, f.point, cfg, [&](const LevelRecord& l) {
          std::cerr << name.str() << " level " << l.level << ": nullity " << l.nullity() << " ("
                    << l.seconds << " s)\n";
        });
    observed.push_back({f.label, r});
    const bool hit = r.complete && r.sequence == row.expected;
    ok = ok && hit;
    detail << " " << name.str() << " " << str(r.sequence)
           << (hit ? "" : " expected " + str(row.expected)) << " in " << seconds(rt) << " s;";
  }
  const double s = seconds(t);
  if (!slow) {
    ok = ok && s < 300.0;
    detail << " total " << s << " s (limit 300 s)";
  }
  report(slow ? "4-slow" : "4", ok, detail.str());
}

void criterion_bounds() {
  const std::int64_t a = orbit_lower_bound({2, 2, 2, 7}), b = orbit_lower_bound({3, 3, 3, 23}),
                     c = orbit_lower_bound({4, 4, 4, 49}), u = underdetermined_bound({2, 2, 2, 7});
  std::ostringstream d;
  d << "orbit bounds " << a << " / " << b << " / " << c << " (expected 23 / 70 / 143), "
    << "underdetermined bound " << u << " (expected 20)";
  report("5", a == 23 && b == 70 && c == 143 && u == 20, d.str());
}

void criterion_properties() {
  std::mt19937_64 rng(2024);
  std::vector<PointFixture> randoms;
  for (int i = 0; i < 50; ++i) randoms.push_back(random_singular_system(rng, i));

  // 6a monotonicity on every fixture and 50 random systems
  {
    std::vector<Observed> all = observed;
    for (const auto& f : randoms) all.push_back({f.label, deflate(f).report});
    std::size_t bad = 0;
    std::string first;
    for (const auto& o : all) {
      if (!o.report.complete || o.report.monotonicity_violation) {
        if (!bad++) first = o.label + " " + str(o.report.sequence) + " " + o.report.error;
      }
    }
    std::ostringstream d;
    d << "monotone n_{i+1} <= n_i: " << all.size() - bad << "/" << all.size() << " runs"
      << (bad ? ", first failure: " + first : "");
    report("6a", bad == 0, d.str());
  }

  // 6b first-columns check at every level of every fixture
  {
    std::size_t levels = 0, bad = 0, above = 0;
    std::string first;
    for (const auto& o : observed) {
      for (const auto& l : o.report.levels) {
        ++levels;
        if (l.first_columns_nullity > l.nullity()) ++above;
        if (!l.first_columns_ok && !bad++) {
          first = o.label + " level " + std::to_string(l.level) + ": n - rank(first n columns) = " +
                  std::to_string(l.first_columns_nullity) + ", n_i = " + std::to_string(l.nullity());
        }
      }
    }
    std::ostringstream d;
    d << "first-columns nullity equals n_i: " << levels - bad << "/" << levels << " levels"
      << (bad ? ", first failure: " + first : "") << "; bound n - rank <= n_i held at "
      << levels - above << "/" << levels;
    report("6b", bad == 0 && levels > 0, d.str());
  }

  std::vector<PointFixture> small = cusp_fixtures();
  for (auto& f : whitney_fixtures()) small.push_back(f);
  small.push_back(scheme_fixture("B(1,1,1|1)", natural_algorithm(1, 1, 1)));
  small.push_back(scheme_fixture("N(1,1,2)", natural_algorithm(1, 1, 2)));
  small.insert(small.end(), randoms.begin(), randoms.end());

  // 6c block assembly against the symbolic oracle, <= 8 base variables, 2 levels
  {
    double worst = 0.0;
    std::size_t checked = 0;
    for (const auto& f : small) {
      if (f.system->n_vars() > 8) continue;
      DeflationConfig cfg;
      cfg.max_steps = 2;
      const auto levels = replay(f.system, f.point, cfg);
      for (std::size_t i = 1; i < levels.size(); ++i) {
        const PolySystem oracle = symbolic_chain(levels[i].system);
        const CVector& x = levels[i].point;
        const CVector y = x + random_vector(rng, x.size());
        worst = std::max({worst, rel_diff(levels[i].jacobian, jacobian(oracle, x)),
                          rel_diff(levels[i].system->jac(y), jacobian(oracle, y)),
                          rel_diff(levels[i].system->eval(x), eval_system(oracle, x))});
        ++checked;
      }
    }
    std::ostringstream d;
    d << "block Jacobians vs symbolic oracle: " << checked << " deflated systems, worst relative "
      << "difference " << worst << " (limit 1e-10)";
    report("6c", worst <= 1e-10 && checked > 0, d.str());
  }

  // 6d finite differences at every level of every fixture
  {
    std::vector<PointFixture> fixtures = cusp_fixtures();
    for (auto& f : whitney_fixtures()) fixtures.push_back(f);
    fixtures.push_back(scheme_fixture("strassen", strassen_scheme()));
    fixtures.push_back(scheme_fixture("N(2,2,2)", natural_algorithm(2, 2, 2)));
    fixtures.push_back(scheme_fixture("N(2,2,3)", natural_algorithm(2, 2, 3)));
    fixtures.push_back(scheme_fixture("N(2,3,3)", natural_algorithm(2, 3, 3)));
    double worst = 0.0;
    std::size_t checked = 0;
    std::string where;
    for (const auto& f : fixtures) {
      const auto levels = replay(f.system, f.point, DeflationConfig{});
      for (std::size_t i = 0; i < levels.size(); ++i) {
        const double dev = fd_deviation(*levels[i].system, levels[i].point, rng);
        if (dev > worst) {
          worst = dev;
          where = f.label + " level " + std::to_string(i);
        }
        ++checked;
      }
    }
    std::ostringstream d;
    d << "analytic vs finite-difference Jacobians: " << checked << " levels, worst relative "
      << "difference " << worst << " at " << where << " (limit 1e-5)";
    report("6d", worst <= 1e-5, d.str());
  }

  // 6e seed invariance over 10 seeds
  {
    std::vector<PointFixture> fixtures = cusp_fixtures();
    for (auto& f : whitney_fixtures()) fixtures.push_back(f);
    fixtures.push_back(scheme_fixture("strassen", strassen_scheme()));
    bool ok = true;
    std::ostringstream d;
    d << "sequences identical for seeds 0..9:";
    for (const auto& f : fixtures) {
      const Seq ref = deflate(f, 0).report.sequence;
      bool same = true;
      for (std::uint64_t seed = 1; seed < 10; ++seed) {
        const Seq s = deflate(f, seed).report.sequence;
        if (s != ref) {
          same = false;
          d << " " << f.label << " seed " << seed << " gave " << str(s) << " vs " << str(ref) << ";";
        }
      }
      ok = ok && same;
      if (same) d << " " << f.label << " " << str(ref) << ";";
    }
    report("6e", ok, d.str());
  }
}

void criterion_laderman(const std::string& path) {
  if (path.empty()) {
    std::cout << "SKIP  [7] Laderman (76,76,76,76): no solution file supplied "
                 "(pass --laderman FILE or set DFL_LADERMAN_FILE)"
              << std::endl;
    return;
  }
  try {
    const SolutionFile sol = read_solution_file(path);
    const PointFixture f = scheme_fixture("laderman", sol.scheme);
    const Run r = deflate(f);
    const bool ok = sol.scheme.shape() == BrentShape{3, 3, 3, 23} && r.report.complete &&
                    r.report.sequence == Seq{76, 76, 76, 76};
    report("7", ok, "Laderman " + path + ": " + str(r.report.sequence) + " expected (76,76,76,76)");
  } catch (const Error& e) {
    report("7", false, "Laderman " + path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  bool slow = false;
  std::string laderman;
  if (const char* env = std::getenv("DFL_LADERMAN_FILE")) laderman = env;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--slow") {
      slow = true;
    } else if (a == "--laderman" && i + 1 < argc) {
      laderman = argv[++i];
    } else {
      std::cerr << "usage: dfl_acceptance [--slow] [--laderman FILE]\n";
      return 2;
    }
  }

  try {
    if (slow) {
      criterion_naturals(true);
    } else {
      sequences_match(cusp_fixtures(), {{2, 1, 1, 0}, {1, 1, 1, 1}}, 1.0, "1", "cusp");
      sequences_match(whitney_fixtures(), {{2, 2, 2, 2}, {3, 2, 1, 1}, {3, 2, 2, 1}}, 1.0, "2",
                      "Whitney umbrella");
      {
        const PointFixture f = scheme_fixture("strassen", strassen_scheme());
        const Run r = deflate(f);
        observed.push_back({f.label, r.report});
        const ReportRecord rec = make_record("strassen", "", BrentShape{2, 2, 2, 7}, r.report);
        const bool ok = r.report.complete && r.report.sequence == Seq{23, 23, 23, 23} &&
                        rec.orbit_lower_bound == 23 && rec.gap == 0 && r.seconds < 30.0;
        std::ostringstream d;
        d << "Strassen B(2,2,2|7): " << str(r.report.sequence) << " orbit bound "
          << rec.orbit_lower_bound.value_or(-1) << " gap " << rec.gap.value_or(-1) << "; "
          << r.seconds << " s (limit 30 s)";
        report("3", ok, d.str());
      }
      criterion_naturals(false);
      criterion_bounds();
      criterion_properties();
      criterion_laderman(laderman);
    }
  } catch (const std::exception& e) {
    report("!", false, std::string("unexpected exception: ") + e.what());
  }

  std::cout << (failures ? "ACCEPTANCE FAILED" : "ACCEPTANCE PASSED") << " (" << failures
            << " failing)" << std::endl;
  return failures ? 1 : 0;
}
