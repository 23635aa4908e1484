#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dfl/types.hpp"

namespace dfl {

/// Sparse monomial: (variable index, exponent) pairs sorted by variable,
/// every exponent positive.
class Monomial {
 public:
  using Factor = std::pair<std::uint32_t, std::uint32_t>;

  Monomial() = default;
  /// Accepts factors in any order; repeated variables are merged and zero
  /// exponents dropped.
  explicit Monomial(std::vector<Factor> factors);

  static Monomial variable(std::uint32_t var, std::uint32_t exponent = 1);

  const std::vector<Factor>& factors() const { return factors_; }
  std::uint32_t degree() const { return degree_; }
  std::uint32_t exponent(std::uint32_t var) const;
  /// One past the largest variable index, 0 for the constant monomial.
  std::uint32_t min_ambient_dim() const;
  bool is_constant() const { return factors_.empty(); }

  Monomial operator*(const Monomial& other) const;
  /// Lowers the exponent of `var` by one; precondition exponent(var) > 0.
  Monomial divided_by_variable(std::uint32_t var) const;

  Complex eval(const CVector& x) const;

  bool operator==(const Monomial& other) const { return factors_ == other.factors_; }

 private:
  std::vector<Factor> factors_;
  std::uint32_t degree_ = 0;
};

/// Graded lexicographic order: higher total degree first, ties broken by
/// comparing exponents of x0, x1, ... in turn (larger exponent first).
struct GrlexOrder {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

class Polynomial {
 public:
  using TermMap = std::map<Monomial, Complex, GrlexOrder>;

  explicit Polynomial(std::size_t ambient_dim = 0) : ambient_dim_(ambient_dim) {}

  static Polynomial constant(std::size_t ambient_dim, Complex c);
  static Polynomial variable(std::size_t ambient_dim, std::uint32_t var);

  std::size_t ambient_dim() const { return ambient_dim_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::uint32_t degree() const;

  /// Accumulates c·mono. A coefficient that sums to exactly zero is removed.
  void add_term(const Monomial& mono, Complex c);

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(Complex c);
  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator*(Complex c) const;
  Polynomial operator-() const;

  Polynomial partial(std::uint32_t var) const;
  /// ∇_u f = Σ_j u_j ∂f/∂x_j.
  Polynomial directional(const CVector& u) const;
  /// Same terms, viewed in a space with more variables.
  Polynomial lifted(std::size_t new_ambient_dim) const;

  Complex eval(const CVector& x) const;

  bool operator==(const Polynomial& other) const;
  std::string to_string() const;

 private:
  std::size_t ambient_dim_;
  TermMap terms_;
};

/// F : C^n -> C^m given by an ordered list of polynomials.
class PolySystem {
 public:
  PolySystem() = default;
  PolySystem(std::vector<Polynomial> polys, std::size_t n_vars);

  std::size_t n_vars() const { return n_vars_; }
  std::size_t n_eqs() const { return polys_.size(); }
  const std::vector<Polynomial>& polys() const { return polys_; }
  const Polynomial& operator[](std::size_t i) const { return polys_[i]; }
  std::uint32_t degree() const;

  bool operator==(const PolySystem& other) const = default;

 private:
  std::vector<Polynomial> polys_;
  std::size_t n_vars_ = 0;
};

CVector eval_system(const PolySystem& sys, const CVector& x);
CMatrix jacobian(const PolySystem& sys, const CVector& x);

/// The system x -> J(x)·u, i.e. every polynomial replaced by ∇_u f_i.
PolySystem shift(const PolySystem& sys, const CVector& u);

/// One fully symbolic deflation step: the 2n-variable system
/// [F(x1); J(x1)·x2; R·x2 - d].
PolySystem symbolic_deflate(const PolySystem& sys, const CMatrix& border,
                            const CVector& rhs);

}  // namespace dfl
