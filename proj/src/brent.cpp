#include "dfl/brent.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace dfl {

void BrentShape::validate() const {
  if (m < 1 || n < 1 || p < 1 || r < 1) {
    throw InputError("invalid shape " + to_string() + ": all of m, n, p, r must be positive");
  }
}

std::string BrentShape::to_string() const {
  std::ostringstream os;
  os << m << "x" << n << "x" << p << ":" << r;
  return os.str();
}

BrentShape BrentShape::parse(std::string_view text) {
  const std::string original(text);
  auto bad = [&]() -> InputError {
    return InputError("malformed shape '" + original + "', expected MxNxP:R such as 2x2x2:7");
  };
  int fields[4] = {0, 0, 0, 0};
  const char separators[3] = {'x', 'x', ':'};
  const char* cur = text.data();
  const char* end = text.data() + text.size();
  for (int k = 0; k < 4; ++k) {
    auto [ptr, ec] = std::from_chars(cur, end, fields[k]);
    if (ec != std::errc() || ptr == cur) throw bad();
    cur = ptr;
    if (k < 3) {
      if (cur == end || (*cur != separators[k] && !(k < 2 && *cur == 'X'))) throw bad();
      ++cur;
    }
  }
  if (cur != end) throw bad();
  BrentShape s{fields[0], fields[1], fields[2], fields[3]};
  s.validate();
  return s;
}

BilinearScheme::BilinearScheme(BrentShape shape) : shape_(shape) {
  shape_.validate();
  alpha_.assign(static_cast<std::size_t>(shape_.mn() * shape_.r), Complex{});
  beta_.assign(static_cast<std::size_t>(shape_.np() * shape_.r), Complex{});
  gamma_.assign(static_cast<std::size_t>(shape_.pm() * shape_.r), Complex{});
}

CVector BilinearScheme::flatten() const {
  CVector x(shape_.n_vars());
  Index k = 0;
  for (auto v : alpha_) x[k++] = v;
  for (auto v : beta_) x[k++] = v;
  for (auto v : gamma_) x[k++] = v;
  return x;
}

BilinearScheme BilinearScheme::from_flat(const BrentShape& shape, const CVector& x) {
  BilinearScheme s(shape);
  if (x.size() != shape.n_vars()) {
    throw InputError("flat vector of length " + std::to_string(x.size()) + " does not match " +
                     shape.to_string());
  }
  Index k = 0;
  for (auto& v : s.alpha_) v = x[k++];
  for (auto& v : s.beta_) v = x[k++];
  for (auto& v : s.gamma_) v = x[k++];
  return s;
}

MMTensor::MMTensor(int m, int n, int p) : m_(m), n_(n), p_(p) {
  BrentShape{m, n, p, 1}.validate();
  const Index np = Index{n} * p, pm = Index{p} * m;
  dense_.assign(static_cast<std::size_t>(Index{m} * n * np * pm), 0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < p; ++k) {
        const Index a = Index{i} * n + j, b = Index{j} * p + k, c = Index{k} * m + i;
        const Index flat = (a * np + b) * pm + c;
        dense_[static_cast<std::size_t>(flat)] = 1;
        support_.push_back(flat);
      }
    }
  }
}

std::uint8_t MMTensor::entry(Index a, Index b, Index c) const {
  const Index np = Index{n_} * p_, pm = Index{p_} * m_;
  return dense_[static_cast<std::size_t>((a * np + b) * pm + c)];
}

MMTensor mm_tensor(int m, int n, int p) { return MMTensor(m, n, p); }

std::vector<Complex> contract(const BilinearScheme& scheme) {
  const BrentShape& s = scheme.shape();
  std::vector<Complex> out(static_cast<std::size_t>(s.n_eqs()), Complex{});
  for (int t = 0; t < s.r; ++t) {
    std::size_t e = 0;
    for (int i1 = 0; i1 < s.m; ++i1)
      for (int i2 = 0; i2 < s.n; ++i2)
        for (int j1 = 0; j1 < s.n; ++j1)
          for (int j2 = 0; j2 < s.p; ++j2) {
            const Complex ab = scheme.alpha(t, i1, i2) * scheme.beta(t, j1, j2);
            for (int k1 = 0; k1 < s.p; ++k1)
              for (int k2 = 0; k2 < s.m; ++k2) out[e++] += ab * scheme.gamma(t, k1, k2);
          }
  }
  return out;
}

namespace {

// One of the three factor blocks (alpha, beta, gamma) of some vector.
struct Block {
  const Complex* data;
  Index size;  // entries per term

  Complex operator()(Index term, Index idx) const { return data[term * size + idx]; }
};

struct Layout {
  Index size[3];
  Index offset[3];
  Index r;

  explicit Layout(const BrentShape& s) : r(s.r) {
    size[0] = s.mn();
    size[1] = s.np();
    size[2] = s.pm();
    offset[0] = 0;
    offset[1] = s.mn() * s.r;
    offset[2] = (s.mn() + s.np()) * s.r;
  }

  Block block(const CVector& v, int slot) const { return {v.data() + offset[slot], size[slot]}; }
};

// Ordered selections of k distinct slots out of `slots`.
std::vector<std::vector<int>> injections(std::size_t k, const std::vector<int>& slots) {
  std::vector<std::vector<int>> out;
  if (k == 0) {
    out.push_back({});
    return out;
  }
  for (std::size_t idx = 0; idx < slots.size(); ++idx) {
    std::vector<int> rest = slots;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(idx));
    for (auto tail : injections(k - 1, rest)) {
      tail.insert(tail.begin(), slots[idx]);
      out.push_back(std::move(tail));
    }
  }
  return out;
}

}  // namespace

BrentSystem::BrentSystem(BrentShape shape) : shape_(shape) {
  shape_.validate();
  rhs_ = mm_tensor(shape_.m, shape_.n, shape_.p).dense();
}

CVector BrentSystem::directional(const CVector& x, std::span<const CVector> dirs) const {
  check_point(x, dirs);
  const Index M = n_eqs();
  CVector out = CVector::Zero(M);
  if (dirs.size() > 3) return out;

  const Layout L(shape_);
  const Index np = L.size[1], pm = L.size[2];

  // Product rule on a trilinear form: each direction replaces a distinct factor.
  for (const auto& slots : injections(dirs.size(), {0, 1, 2})) {
    Block src[3] = {L.block(x, 0), L.block(x, 1), L.block(x, 2)};
    for (std::size_t k = 0; k < slots.size(); ++k) src[slots[k]] = L.block(dirs[k], slots[k]);

    std::vector<Complex> ab(static_cast<std::size_t>(L.r));
    for (Index a = 0; a < L.size[0]; ++a) {
      for (Index b = 0; b < np; ++b) {
        for (Index t = 0; t < L.r; ++t) ab[static_cast<std::size_t>(t)] = src[0](t, a) * src[1](t, b);
        Complex* row = out.data() + (a * np + b) * pm;
        for (Index c = 0; c < pm; ++c) {
          Complex acc{};
          for (Index t = 0; t < L.r; ++t) acc += ab[static_cast<std::size_t>(t)] * src[2](t, c);
          row[c] += acc;
        }
      }
    }
  }
  if (dirs.empty()) {
    for (Index e = 0; e < M; ++e) out[e] -= static_cast<double>(rhs_[static_cast<std::size_t>(e)]);
  }
  return out;
}

CMatrix BrentSystem::directional_jacobian(const CVector& x, std::span<const CVector> dirs) const {
  check_point(x, dirs);
  CMatrix J = CMatrix::Zero(n_eqs(), n_vars());
  if (dirs.size() >= 3) return J;

  const Layout L(shape_);
  const Index np = L.size[1], pm = L.size[2];

  for (int diff = 0; diff < 3; ++diff) {
    std::vector<int> others;
    for (int s = 0; s < 3; ++s)
      if (s != diff) others.push_back(s);

    for (const auto& slots : injections(dirs.size(), others)) {
      Block src[3] = {L.block(x, 0), L.block(x, 1), L.block(x, 2)};
      for (std::size_t k = 0; k < slots.size(); ++k) src[slots[k]] = L.block(dirs[k], slots[k]);

      for (Index t = 0; t < L.r; ++t) {
        for (Index a = 0; a < L.size[0]; ++a) {
          for (Index b = 0; b < np; ++b) {
            for (Index c = 0; c < pm; ++c) {
              const Index e = (a * np + b) * pm + c;
              const Index idx[3] = {a, b, c};
              const Complex coeff = src[others[0]](t, idx[others[0]]) *
                                    src[others[1]](t, idx[others[1]]);
              if (coeff == Complex{}) continue;
              J(e, L.offset[diff] + t * L.size[diff] + idx[diff]) += coeff;
            }
          }
        }
      }
    }
  }
  return J;
}

BrentSystem brent_system(const BrentShape& shape) { return BrentSystem(shape); }

double residual(const BilinearScheme& scheme) {
  const BrentSystem sys(scheme.shape());
  const CVector f = sys.eval(scheme.flatten());
  return f.size() == 0 ? 0.0 : f.cwiseAbs().maxCoeff();
}

BilinearScheme natural_algorithm(int m, int n, int p) {
  BilinearScheme s(BrentShape{m, n, p, m * n * p});
  int t = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < p; ++k, ++t) {
        s.alpha(t, i, j) = 1.0;
        s.beta(t, j, k) = 1.0;
        s.gamma(t, k, i) = 1.0;
      }
  return s;
}

BilinearScheme strassen_scheme() {
  using M2 = std::array<std::array<int, 2>, 2>;
  struct Term {
    M2 a, b, c;  // coefficients on A, on B, and of the product in C = AB
  };
  // M1 = (A11+A22)(B11+B22)  M2 = (A21+A22)B11      M3 = A11(B12-B22)
  // M4 = A22(B21-B11)        M5 = (A11+A12)B22      M6 = (A21-A11)(B11+B12)
  // M7 = (A12-A22)(B21+B22)
  // C11 = M1+M4-M5+M7  C12 = M3+M5  C21 = M2+M4  C22 = M1-M2+M3+M6
  static constexpr Term terms[7] = {
      {{{{1, 0}, {0, 1}}}, {{{1, 0}, {0, 1}}}, {{{1, 0}, {0, 1}}}},
      {{{{0, 0}, {1, 1}}}, {{{1, 0}, {0, 0}}}, {{{0, 0}, {1, -1}}}},
      {{{{1, 0}, {0, 0}}}, {{{0, 1}, {0, -1}}}, {{{0, 1}, {0, 1}}}},
      {{{{0, 0}, {0, 1}}}, {{{-1, 0}, {1, 0}}}, {{{1, 0}, {1, 0}}}},
      {{{{1, 1}, {0, 0}}}, {{{0, 0}, {0, 1}}}, {{{-1, 1}, {0, 0}}}},
      {{{{-1, 0}, {1, 0}}}, {{{1, 1}, {0, 0}}}, {{{0, 0}, {0, 1}}}},
      {{{{0, 1}, {0, -1}}}, {{{0, 0}, {1, 1}}}, {{{1, 0}, {0, 0}}}},
  };
  BilinearScheme s(BrentShape{2, 2, 2, 7});
  for (int t = 0; t < 7; ++t) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        s.alpha(t, i, j) = terms[t].a[i][j];
        s.beta(t, i, j) = terms[t].b[i][j];
        // The tensor pairs C_{ik} with gamma_{k,i}.
        s.gamma(t, j, i) = terms[t].c[i][j];
      }
    }
  }
  return s;
}

std::int64_t orbit_lower_bound(const BrentShape& shape) {
  shape.validate();
  const std::int64_t m = shape.m, n = shape.n, p = shape.p, r = shape.r;
  return m * m + n * n + p * p + 2 * r - 3;
}

std::int64_t underdetermined_bound(const BrentShape& shape) {
  shape.validate();
  return std::max<std::int64_t>(shape.n_vars() - shape.n_eqs(), 0);
}

}  // namespace dfl
