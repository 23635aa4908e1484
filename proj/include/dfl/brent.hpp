#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dfl/system.hpp"
#include "dfl/types.hpp"

namespace dfl {

/// Dimensions of the product (m x n)·(n x p) and the number of rank-one
/// terms r. Variables: (mn+np+pm)·r; equations: (mnp)^2.
struct BrentShape {
  int m = 1, n = 1, p = 1, r = 1;

  Index mn() const { return Index{m} * n; }
  Index np() const { return Index{n} * p; }
  Index pm() const { return Index{p} * m; }
  Index n_vars() const { return (mn() + np() + pm()) * r; }
  Index n_eqs() const { return mn() * np() * pm(); }

  /// Throws InputError unless every field is positive.
  void validate() const;
  /// "MxNxP:R".
  std::string to_string() const;
  /// Parses "MxNxP:R"; throws InputError on malformed text.
  static BrentShape parse(std::string_view text);

  bool operator==(const BrentShape&) const = default;
};

/// r rank-one terms alpha_i ⊗ beta_i ⊗ gamma_i with alpha_i m x n,
/// beta_i n x p and gamma_i p x m.
///
/// Flattened variable order: every alpha entry, then every beta, then every
/// gamma. Inside a block the term index is outermost and matrix entries are
/// row-major, so alpha^{(i)}_{i1,i2} sits at i·mn + i1·n + i2.
class BilinearScheme {
 public:
  BilinearScheme() = default;
  /// All-zero scheme of the given shape.
  explicit BilinearScheme(BrentShape shape);

  const BrentShape& shape() const { return shape_; }

  Complex& alpha(int term, int row, int col) { return alpha_[a_index(term, row, col)]; }
  Complex& beta(int term, int row, int col) { return beta_[b_index(term, row, col)]; }
  Complex& gamma(int term, int row, int col) { return gamma_[c_index(term, row, col)]; }
  Complex alpha(int term, int row, int col) const { return alpha_[a_index(term, row, col)]; }
  Complex beta(int term, int row, int col) const { return beta_[b_index(term, row, col)]; }
  Complex gamma(int term, int row, int col) const { return gamma_[c_index(term, row, col)]; }

  CVector flatten() const;
  static BilinearScheme from_flat(const BrentShape& shape, const CVector& x);

  bool operator==(const BilinearScheme&) const = default;

 private:
  std::size_t a_index(int t, int i, int j) const {
    return static_cast<std::size_t>((t * shape_.m + i) * shape_.n + j);
  }
  std::size_t b_index(int t, int i, int j) const {
    return static_cast<std::size_t>((t * shape_.n + i) * shape_.p + j);
  }
  std::size_t c_index(int t, int i, int j) const {
    return static_cast<std::size_t>((t * shape_.p + i) * shape_.m + j);
  }

  BrentShape shape_;
  std::vector<Complex> alpha_, beta_, gamma_;
};

/// The structural tensor <m,n,p> = Σ e_ij ⊗ e_jk ⊗ e_ki as a 0/1 array
/// of shape (mn) x (np) x (pm).
class MMTensor {
 public:
  MMTensor(int m, int n, int p);

  int m() const { return m_; }
  int n() const { return n_; }
  int p() const { return p_; }

  /// Flat positions a·(np·pm) + b·pm + c of the ones, in (i,j,k) row-major order.
  const std::vector<Index>& support() const { return support_; }
  std::size_t nonzero_count() const { return support_.size(); }
  /// Dense entries in the same flat layout as the Brent equations.
  const std::vector<std::uint8_t>& dense() const { return dense_; }
  std::uint8_t entry(Index a, Index b, Index c) const;

 private:
  int m_, n_, p_;
  std::vector<std::uint8_t> dense_;
  std::vector<Index> support_;
};

MMTensor mm_tensor(int m, int n, int p);

/// Σ_i alpha_i ⊗ beta_i ⊗ gamma_i, flat in the MMTensor layout.
std::vector<Complex> contract(const BilinearScheme& scheme);

/// Closed-form Brent system B(m,n,p|r). Equation (i1,i2,j1,j2,k1,k2), in
/// row-major order, is
///   Σ_i alpha^{(i)}_{i1,i2} beta^{(i)}_{j1,j2} gamma^{(i)}_{k1,k2}
///       - δ(i2,j1) δ(j2,k1) δ(k2,i1).
class BrentSystem final : public DeflatableSystem {
 public:
  explicit BrentSystem(BrentShape shape);

  const BrentShape& shape() const { return shape_; }

  Index n_vars() const override { return shape_.n_vars(); }
  Index n_eqs() const override { return shape_.n_eqs(); }
  unsigned degree_bound() const override { return 3; }

  CVector directional(const CVector& x, std::span<const CVector> dirs) const override;
  CMatrix directional_jacobian(const CVector& x, std::span<const CVector> dirs) const override;

 private:
  BrentShape shape_;
  std::vector<std::uint8_t> rhs_;
};

BrentSystem brent_system(const BrentShape& shape);

/// ‖F(flatten(scheme))‖_∞ for the Brent system of the scheme's shape.
double residual(const BilinearScheme& scheme);

/// N(m,n,p): r = mnp, term t enumerates (i,j,k) row-major with
/// alpha = e_ij, beta = e_jk, gamma = e_ki.
BilinearScheme natural_algorithm(int m, int n, int p);

/// Strassen's seven-term decomposition of <2,2,2>, exact ±1 coefficients.
BilinearScheme strassen_scheme();

/// m^2 + n^2 + p^2 + 2r - 3: dimension of the connected symmetry group,
/// a local-dimension lower bound when the stabilizer of the point is finite.
std::int64_t orbit_lower_bound(const BrentShape& shape);

/// max(n_vars - n_eqs, 0).
std::int64_t underdetermined_bound(const BrentShape& shape);

}  // namespace dfl
