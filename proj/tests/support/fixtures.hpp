#pragma once

// Fixture systems and a level-by-level replay of the deflation loop that
// keeps every intermediate system, used by the tests and the acceptance gate.

#include <random>
#include <string>
#include <vector>

#include "dfl/brent.hpp"
#include "dfl/deflation.hpp"
#include "dfl/poly_parser.hpp"
#include "support/oracles.hpp"

namespace dfl::testing {

struct PointFixture {
  std::string label;
  SystemPtr system;
  CVector point;
};

inline SystemPtr parsed(const char* text) {
  return std::make_shared<SymbolicSystem>(parse_polynomial_system(text));
}

inline std::vector<PointFixture> cusp_fixtures() {
  const SystemPtr s = parsed("x2^2 - x1^3");
  return {{"cusp (0,0)", s, parse_point("0,0")}, {"cusp (1,1)", s, parse_point("1,1")}};
}

inline std::vector<PointFixture> whitney_fixtures() {
  const SystemPtr s = parsed("x1^2 - x2^2 x3");
  return {{"whitney (2,2,1)", s, parse_point("2,2,1")},
          {"whitney (0,0,1)", s, parse_point("0,0,1")},
          {"whitney (0,0,0)", s, parse_point("0,0,0")}};
}

inline PointFixture scheme_fixture(const std::string& label, const BilinearScheme& s) {
  return {label, std::make_shared<BrentSystem>(s.shape()), s.flatten()};
}

// Random system with a known singular zero p: each polynomial is a sum of
// monomials in z = x - p whose degrees lie in [low, 3], with small integer
// coefficients. low = 2 makes that row of the Jacobian vanish at p.
inline PointFixture random_singular_system(std::mt19937_64& rng, int id) {
  std::uniform_int_distribution<int> nvars(2, 3), neqs(1, 3), low(1, 2), coord(-1, 2),
      coeff(-3, 3), count(1, 4);
  const int n = nvars(rng), m = neqs(rng);
  CVector p(n);
  std::vector<Polynomial> z;
  for (int j = 0; j < n; ++j) {
    p[j] = coord(rng);
    z.push_back(Polynomial::variable(n, j) - Polynomial::constant(n, p[j]));
  }
  std::vector<Polynomial> polys;
  for (int i = 0; i < m; ++i) {
    Polynomial f(n);
    const int lo = low(rng);
    while (f.is_zero()) {
      for (int t = count(rng); t > 0; --t) {
        std::uniform_int_distribution<int> deg(lo, 3), var(0, n - 1);
        Polynomial mono = Polynomial::constant(n, 1.0);
        for (int d = deg(rng); d > 0; --d) mono = mono * z[static_cast<std::size_t>(var(rng))];
        const int c = coeff(rng);
        f += mono * Complex(c == 0 ? 1 : c);
      }
    }
    polys.push_back(std::move(f));
  }
  return {"random system " + std::to_string(id),
          std::make_shared<SymbolicSystem>(PolySystem(std::move(polys), n)), p};
}

struct Level {
  SystemPtr system;
  CVector point;
  CMatrix jacobian;
  RankResult rank;
};

// Same border draws as deflation_sequence with the same config.
inline std::vector<Level> replay(const SystemPtr& sys, const CVector& x, const DeflationConfig& cfg) {
  std::mt19937_64 rng(cfg.rng_seed);
  std::vector<Level> out;
  Level l{sys, x, sys->jac(x), {}};
  l.rank = level_rank(l.jacobian, cfg);
  out.push_back(l);
  for (std::size_t i = 0; i < cfg.max_steps; ++i) {
    const Level& prev = out.back();
    DeflationStep step = deflate_once(prev.system, prev.point, prev.jacobian, prev.rank, rng, cfg);
    out.push_back({step.system, std::move(step.point), std::move(step.jacobian), step.rank});
  }
  return out;
}

inline std::vector<Index> sequence_of(const std::vector<Level>& levels) {
  std::vector<Index> s;
  for (const auto& l : levels) s.push_back(l.rank.nullity());
  return s;
}

// Symbolic counterpart of a chain of DeflatedSystems: symbolic_deflate
// applied with the same borders, over the expanded base polynomials.
inline PolySystem symbolic_chain(const SystemPtr& sys) {
  if (const auto* d = dynamic_cast<const DeflatedSystem*>(sys.get())) {
    return symbolic_deflate(symbolic_chain(d->child_ptr()), d->border(), d->rhs());
  }
  if (const auto* s = dynamic_cast<const SymbolicSystem*>(sys.get())) return s->polys();
  if (const auto* b = dynamic_cast<const BrentSystem*>(sys.get())) return brent_polysystem(b->shape());
  throw std::logic_error("symbolic_chain: unknown system type");
}

inline double rel_diff(const CMatrix& a, const CMatrix& b) {
  return (a - b).norm() / (1.0 + b.norm());
}

// Largest relative deviation between the analytic Jacobian and central
// differences at `probes` random points near x. Narrow systems are
// differenced column by column; wide ones through random directions
// (J·v against (F(x+hv) - F(x-hv))/2h), which sees every column.
inline double fd_deviation(const DeflatableSystem& sys, const CVector& x, std::mt19937_64& rng,
                           int probes = 5, Index full_limit = 700) {
  double worst = 0.0;
  auto F = [&](const CVector& z) { return sys.eval(z); };
  for (int k = 0; k < probes; ++k) {
    const CVector y = x + 1e-2 * random_vector(rng, x.size());
    const CMatrix J = sys.jac(y);
    if (x.size() <= full_limit) {
      worst = std::max(worst, rel_diff(J, fd_jacobian(F, y)));
    } else {
      CVector v = random_vector(rng, x.size());
      v /= v.norm();
      const double h = 1e-6;
      const CVector fd = (F(y + h * v) - F(y - h * v)) / (2 * h);
      worst = std::max(worst, rel_diff(J * v, fd));
    }
  }
  return worst;
}

}  // namespace dfl::testing
