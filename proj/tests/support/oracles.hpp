#pragma once

// Independent reference implementations used only by the tests.

#include <complex>
#include <random>

#include "dfl/brent.hpp"
#include "dfl/polysys.hpp"
#include "dfl/system.hpp"

namespace dfl::testing {

inline CVector random_vector(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> g;
  CVector v(n);
  for (Index i = 0; i < n; ++i) v[i] = Complex{g(rng), g(rng)};
  return v;
}

inline CMatrix random_matrix(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> g;
  CMatrix A(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) A(i, j) = Complex{g(rng), g(rng)};
  return A;
}

// Brent equations written out monomial by monomial, straight from the
// definition sum_t alpha_t[i1][i2] beta_t[j1][j2] gamma_t[k1][k2] - δδδ.
inline PolySystem brent_polysystem(const BrentShape& s) {
  const auto N = static_cast<std::size_t>(s.n_vars());
  const std::uint32_t beta0 = static_cast<std::uint32_t>(s.mn() * s.r);
  const std::uint32_t gamma0 = static_cast<std::uint32_t>((s.mn() + s.np()) * s.r);
  std::vector<Polynomial> polys;
  for (int i1 = 0; i1 < s.m; ++i1)
    for (int i2 = 0; i2 < s.n; ++i2)
      for (int j1 = 0; j1 < s.n; ++j1)
        for (int j2 = 0; j2 < s.p; ++j2)
          for (int k1 = 0; k1 < s.p; ++k1)
            for (int k2 = 0; k2 < s.m; ++k2) {
              Polynomial f(N);
              for (int t = 0; t < s.r; ++t) {
                const auto a = static_cast<std::uint32_t>((t * s.m + i1) * s.n + i2);
                const auto b = beta0 + static_cast<std::uint32_t>((t * s.n + j1) * s.p + j2);
                const auto c = gamma0 + static_cast<std::uint32_t>((t * s.p + k1) * s.m + k2);
                f.add_term(Monomial({{a, 1}, {b, 1}, {c, 1}}), 1.0);
              }
              if (i2 == j1 && j2 == k1 && k2 == i1) f.add_term(Monomial(), -1.0);
              polys.push_back(std::move(f));
            }
  return PolySystem(std::move(polys), N);
}

// Central finite-difference Jacobian; exact up to O(h^2) for smooth F.
template <class F>
CMatrix fd_jacobian(F&& f, const CVector& x, double h = 1e-6) {
  const CVector f0 = f(x);
  CMatrix J(f0.size(), x.size());
  for (Index j = 0; j < x.size(); ++j) {
    CVector xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    J.col(j) = (f(xp) - f(xm)) / (2 * h);
  }
  return J;
}

}  // namespace dfl::testing
