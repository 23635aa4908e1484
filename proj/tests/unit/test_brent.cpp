#include <doctest.h>

#include <random>

#include "dfl/brent.hpp"
#include "dfl/linalg.hpp"
#include "support/oracles.hpp"

using namespace dfl;
using dfl::testing::brent_polysystem;
using dfl::testing::random_vector;

TEST_SUITE("brent") {
  TEST_CASE("matrix multiplication tensor") {
    const MMTensor t1 = mm_tensor(1, 1, 1);
    CHECK(t1.nonzero_count() == 1);
    CHECK(t1.entry(0, 0, 0) == 1);
    CHECK(mm_tensor(3, 3, 3).nonzero_count() == 27);
    CHECK(mm_tensor(2, 3, 4).nonzero_count() == 24);
  }

  TEST_CASE("tensor equals the contraction of Strassen and of natural algorithms") {
    auto same = [](const MMTensor& t, const std::vector<Complex>& c) {
      REQUIRE(c.size() == t.dense().size());
      for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i] != Complex(t.dense()[i])) return false;
      return true;
    };
    CHECK(same(mm_tensor(2, 2, 2), contract(strassen_scheme())));
    for (auto [m, n, p] : {std::array{1, 1, 1}, {2, 2, 2}, {2, 3, 4}, {3, 3, 3}}) {
      CHECK(same(mm_tensor(m, n, p), contract(natural_algorithm(m, n, p))));
    }
  }

  TEST_CASE("system sizes") {
    CHECK(BrentSystem({2, 2, 2, 7}).n_vars() == 84);
    CHECK(BrentSystem({2, 2, 2, 7}).n_eqs() == 64);
    CHECK(BrentSystem({3, 3, 3, 23}).n_vars() == 621);
    CHECK(BrentSystem({3, 3, 3, 23}).n_eqs() == 729);
  }

  TEST_CASE("residuals") {
    CHECK(residual(strassen_scheme()) <= 1e-12);
    CHECK(residual(natural_algorithm(2, 2, 2)) == 0.0);
    CHECK(residual(BilinearScheme(BrentShape{1, 1, 1, 1})) == 1.0);
    const BilinearScheme n = natural_algorithm(2, 2, 2);
    CHECK(n.shape().r == 8);
  }

  TEST_CASE("Strassen jacobian rank") {
    const BilinearScheme s = strassen_scheme();
    const RankResult r = numerical_rank(BrentSystem(s.shape()).jac(s.flatten()), 1e-8);
    CHECK(r.rank == 61);
    CHECK(r.nullity() == 23);
  }

  TEST_CASE("closed form agrees with the expanded polynomial system") {
    std::mt19937_64 rng(21);
    for (int m = 1; m <= 2; ++m)
      for (int n = 1; n <= 2; ++n)
        for (int p = 1; p <= 2; ++p)
          for (int r = 1; r <= 3; ++r) {
            const BrentShape shape{m, n, p, r};
            const BrentSystem B(shape);
            const SymbolicSystem S(brent_polysystem(shape));
            for (int trial = 0; trial < 20; ++trial) {
              const CVector x = random_vector(rng, shape.n_vars());
              CHECK((B.eval(x) - S.eval(x)).norm() <= 1e-12 * (1.0 + S.eval(x).norm()));
              CHECK((B.jac(x) - S.jac(x)).norm() <= 1e-12 * (1.0 + S.jac(x).norm()));
            }
          }
  }

  TEST_CASE("higher actions agree with the expanded polynomial system") {
    std::mt19937_64 rng(22);
    const BrentShape shape{2, 2, 2, 3};
    const BrentSystem B(shape);
    const SymbolicSystem S(brent_polysystem(shape));
    const Index N = shape.n_vars();
    std::vector<CVector> dirs;
    for (int k = 0; k < 4; ++k) dirs.push_back(random_vector(rng, N));
    const CVector x = random_vector(rng, N);
    for (std::size_t k = 0; k <= 4; ++k) {
      const std::span<const CVector> d(dirs.data(), k);
      CHECK((B.directional(x, d) - S.directional(x, d)).norm() <= 1e-12 * (1.0 + S.directional(x, d).norm()));
      CHECK((B.directional_jacobian(x, d) - S.directional_jacobian(x, d)).norm() <= 1e-12);
    }
  }

  TEST_CASE("trilinearity") {
    std::mt19937_64 rng(23);
    const BrentShape shape{2, 2, 3, 4};
    const BrentSystem B(shape);
    const CVector x = random_vector(rng, shape.n_vars());
    CVector T = CVector::Zero(shape.n_eqs());
    for (std::size_t i = 0; i < mm_tensor(2, 2, 3).dense().size(); ++i)
      T[static_cast<Index>(i)] = mm_tensor(2, 2, 3).dense()[i];
    const Complex lambda{1.5, -0.25};
    const Index offsets[4] = {0, shape.mn() * shape.r, (shape.mn() + shape.np()) * shape.r,
                              shape.n_vars()};
    for (int block = 0; block < 3; ++block) {
      CVector y = x;
      y.segment(offsets[block], offsets[block + 1] - offsets[block]) *= lambda;
      const CVector lhs = B.eval(y) + T;
      const CVector rhs = lambda * (B.eval(x) + T);
      CHECK((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }
  }

  TEST_CASE("derivative actions are symmetric and vanish past order three") {
    std::mt19937_64 rng(24);
    const BilinearScheme s = strassen_scheme();
    const BrentSystem B(s.shape());
    const Index N = s.shape().n_vars();
    const CVector x = s.flatten(), x2 = random_vector(rng, N);
    const CVector u = random_vector(rng, N), v = random_vector(rng, N), w = random_vector(rng, N);

    // second action symmetric; djvp(x,y)u = djvp(x,u)y
    const std::vector<CVector> uv{u, v}, vu{v, u};
    CHECK((B.directional(x, uv) - B.directional(x, vu)).norm() <= 1e-12);
    CHECK((B.djvp(x, u) * v - B.djvp(x, v) * u).norm() <= 1e-12);

    // third action symmetric and constant in x
    const std::vector<CVector> uvw{u, v, w}, wuv{w, u, v};
    CHECK((B.directional(x, uvw) - B.directional(x, wuv)).norm() <= 1e-12);
    CHECK((B.directional(x, uvw) - B.directional(x2, uvw)).norm() <= 1e-12);
    CHECK((B.t3(x, u, v) - B.t3(x2, u, v)).norm() <= 1e-12);

    // fourth action zero
    CHECK(B.t4(x, u, v, w).isZero(0.0));
    const std::vector<CVector> four{u, v, w, u};
    CHECK(B.directional(x, four).isZero(0.0));
  }

  TEST_CASE("bounds") {
    CHECK(orbit_lower_bound({2, 2, 2, 7}) == 23);
    CHECK(orbit_lower_bound({3, 3, 3, 23}) == 70);
    CHECK(orbit_lower_bound({4, 4, 4, 49}) == 143);
    CHECK(underdetermined_bound({2, 2, 2, 7}) == 20);
    CHECK(underdetermined_bound({3, 3, 3, 23}) == 0);
    CHECK(underdetermined_bound({1, 1, 1, 1}) == 2);
  }

  TEST_CASE("shape strings") {
    CHECK(BrentShape::parse("2x3x4:5") == BrentShape{2, 3, 4, 5});
    CHECK(BrentShape::parse("2X2X2:7").to_string() == "2x2x2:7");
    CHECK_THROWS_AS(BrentShape::parse("2x2:7"), InputError);
    CHECK_THROWS_AS(BrentShape::parse("2x2x0:7"), InputError);
    CHECK_THROWS_AS(BrentShape::parse("2x2x2:7junk"), InputError);
  }

  TEST_CASE("flattening order") {
    BilinearScheme s(BrentShape{2, 3, 1, 2});
    s.alpha(1, 1, 2) = 5.0;  // term 1, row 1, col 2 -> 1*6 + 1*3 + 2
    s.beta(0, 2, 0) = 7.0;   // beta block starts at 12; term 0, row 2 -> 12 + 2
    s.gamma(1, 0, 1) = 9.0;  // gamma block starts at 12 + 6; term 1 -> 18 + 2 + 1
    const CVector x = s.flatten();
    CHECK(x[11] == Complex(5.0));
    CHECK(x[14] == Complex(7.0));
    CHECK(x[21] == Complex(9.0));
    CHECK(BilinearScheme::from_flat(s.shape(), x) == s);
  }
}
