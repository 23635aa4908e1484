#include "dfl/system.hpp"

#include <array>
#include <string>

namespace dfl {

void DeflatableSystem::check_point(const CVector& x, std::span<const CVector> dirs) const {
  if (x.size() != n_vars()) {
    throw InputError("point has length " + std::to_string(x.size()) + ", system has " +
                     std::to_string(n_vars()) + " variables");
  }
  for (const auto& d : dirs) {
    if (d.size() != n_vars()) {
      throw InputError("direction has length " + std::to_string(d.size()) + ", system has " +
                       std::to_string(n_vars()) + " variables");
    }
  }
}

CMatrix DeflatableSystem::djvp(const CVector& x, const CVector& y) const {
  const std::array<CVector, 1> dirs{y};
  return directional_jacobian(x, dirs);
}

CMatrix DeflatableSystem::t3(const CVector& x, const CVector& y, const CVector& u) const {
  const std::array<CVector, 2> dirs{y, u};
  return directional_jacobian(x, dirs);
}

CMatrix DeflatableSystem::t4(const CVector& x, const CVector& y, const CVector& u,
                             const CVector& v) const {
  const std::array<CVector, 3> dirs{y, u, v};
  return directional_jacobian(x, dirs);
}

PolySystem SymbolicSystem::shifted(std::span<const CVector> dirs) const {
  PolySystem out = sys_;
  for (const auto& d : dirs) out = shift(out, d);
  return out;
}

CVector SymbolicSystem::directional(const CVector& x, std::span<const CVector> dirs) const {
  check_point(x, dirs);
  if (dirs.size() > degree_bound()) return CVector::Zero(n_eqs());
  return eval_system(shifted(dirs), x);
}

CMatrix SymbolicSystem::directional_jacobian(const CVector& x,
                                             std::span<const CVector> dirs) const {
  check_point(x, dirs);
  if (dirs.size() + 1 > degree_bound()) return CMatrix::Zero(n_eqs(), n_vars());
  return jacobian(shifted(dirs), x);
}

}  // namespace dfl
