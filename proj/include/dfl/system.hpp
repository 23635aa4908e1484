#pragma once

#include <memory>
#include <span>
#include <vector>

#include "dfl/polysys.hpp"
#include "dfl/types.hpp"

namespace dfl {

/// A polynomial map F : C^N -> C^M that can report its derivative actions.
///
/// Two primitives cover everything the deflation recursion needs:
///
///   directional(x, {d1..dk})           = ∇_{d1} ... ∇_{dk} F (x)        (length M)
///   directional_jacobian(x, {d1..dk})  = J(∇_{d1} ... ∇_{dk} F, x)      (M x N)
///
/// With no directions these are F(x) and J(x). One direction gives the
/// matrix ∂_x(J(x)·y); two give the third-derivative action; and so on. All
/// actions of total order above degree_bound() are identically zero, and
/// implementations may rely on that to stop early.
class DeflatableSystem {
 public:
  virtual ~DeflatableSystem() = default;

  virtual Index n_vars() const = 0;
  virtual Index n_eqs() const = 0;
  virtual unsigned degree_bound() const = 0;

  virtual CVector directional(const CVector& x, std::span<const CVector> dirs) const = 0;
  virtual CMatrix directional_jacobian(const CVector& x,
                                       std::span<const CVector> dirs) const = 0;

  CVector eval(const CVector& x) const { return directional(x, {}); }
  CMatrix jac(const CVector& x) const { return directional_jacobian(x, {}); }
  /// ∂_x(J(x)·y).
  CMatrix djvp(const CVector& x, const CVector& y) const;
  /// J(∇_y ∇_u F, x).
  CMatrix t3(const CVector& x, const CVector& y, const CVector& u) const;
  /// J(∇_y ∇_u ∇_v F, x); zero whenever degree_bound() <= 3.
  CMatrix t4(const CVector& x, const CVector& y, const CVector& u, const CVector& v) const;

 protected:
  void check_point(const CVector& x, std::span<const CVector> dirs) const;
};

using SystemPtr = std::shared_ptr<const DeflatableSystem>;

/// DeflatableSystem backed by explicit polynomials; derivative actions are
/// obtained by symbolic shifting. This is the brute-force reference path.
class SymbolicSystem final : public DeflatableSystem {
 public:
  explicit SymbolicSystem(PolySystem sys) : sys_(std::move(sys)) {}

  const PolySystem& polys() const { return sys_; }

  Index n_vars() const override { return static_cast<Index>(sys_.n_vars()); }
  Index n_eqs() const override { return static_cast<Index>(sys_.n_eqs()); }
  unsigned degree_bound() const override { return sys_.degree(); }

  CVector directional(const CVector& x, std::span<const CVector> dirs) const override;
  CMatrix directional_jacobian(const CVector& x, std::span<const CVector> dirs) const override;

 private:
  PolySystem shifted(std::span<const CVector> dirs) const;

  PolySystem sys_;
};

}  // namespace dfl
