#include "dfl/polysys.hpp"

#include <algorithm>
#include <sstream>

namespace dfl {

namespace {

Complex ipow(Complex base, std::uint32_t e) {
  Complex acc{1.0, 0.0};
  while (e > 0) {
    if (e & 1u) acc *= base;
    base *= base;
    e >>= 1u;
  }
  return acc;
}

void check_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    std::ostringstream os;
    os << what << ": expected length " << want << ", got " << got;
    throw InputError(os.str());
  }
}

std::string format_coefficient(Complex c) {
  std::ostringstream os;
  os.precision(17);
  if (c.imag() == 0.0) {
    os << c.real();
  } else if (c.real() == 0.0) {
    os << c.imag() << "i";
  } else {
    os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
  }
  return os.str();
}

}  // namespace

Monomial::Monomial(std::vector<Factor> factors) {
  std::sort(factors.begin(), factors.end());
  for (const auto& [var, e] : factors) {
    if (e == 0) continue;
    if (!factors_.empty() && factors_.back().first == var) {
      factors_.back().second += e;
    } else {
      factors_.emplace_back(var, e);
    }
    degree_ += e;
  }
}

Monomial Monomial::variable(std::uint32_t var, std::uint32_t exponent) {
  return Monomial({{var, exponent}});
}

std::uint32_t Monomial::exponent(std::uint32_t var) const {
  auto it = std::lower_bound(factors_.begin(), factors_.end(), Factor{var, 0});
  return (it != factors_.end() && it->first == var) ? it->second : 0;
}

std::uint32_t Monomial::min_ambient_dim() const {
  return factors_.empty() ? 0 : factors_.back().first + 1;
}

Monomial Monomial::operator*(const Monomial& other) const {
  std::vector<Factor> all = factors_;
  all.insert(all.end(), other.factors_.begin(), other.factors_.end());
  return Monomial(std::move(all));
}

Monomial Monomial::divided_by_variable(std::uint32_t var) const {
  std::vector<Factor> out = factors_;
  for (auto& f : out) {
    if (f.first == var) --f.second;
  }
  return Monomial(std::move(out));
}

Complex Monomial::eval(const CVector& x) const {
  Complex acc{1.0, 0.0};
  for (const auto& [var, e] : factors_) acc *= ipow(x[var], e);
  return acc;
}

bool GrlexOrder::operator()(const Monomial& a, const Monomial& b) const {
  if (a.degree() != b.degree()) return a.degree() > b.degree();
  const auto& fa = a.factors();
  const auto& fb = b.factors();
  std::size_t i = 0, j = 0;
  while (i < fa.size() || j < fb.size()) {
    const std::uint32_t va = i < fa.size() ? fa[i].first : UINT32_MAX;
    const std::uint32_t vb = j < fb.size() ? fb[j].first : UINT32_MAX;
    const std::uint32_t v = std::min(va, vb);
    const std::uint32_t ea = va == v ? fa[i].second : 0;
    const std::uint32_t eb = vb == v ? fb[j].second : 0;
    if (ea != eb) return ea > eb;
    if (va == v) ++i;
    if (vb == v) ++j;
  }
  return false;
}

Polynomial Polynomial::constant(std::size_t ambient_dim, Complex c) {
  Polynomial p(ambient_dim);
  p.add_term(Monomial(), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t ambient_dim, std::uint32_t var) {
  if (var >= ambient_dim) throw InputError("variable index out of range");
  Polynomial p(ambient_dim);
  p.add_term(Monomial::variable(var), 1.0);
  return p;
}

std::uint32_t Polynomial::degree() const {
  // Grlex puts the highest degree first.
  return terms_.empty() ? 0 : terms_.begin()->first.degree();
}

void Polynomial::add_term(const Monomial& mono, Complex c) {
  if (mono.min_ambient_dim() > ambient_dim_) {
    throw InputError("monomial uses a variable outside the ambient dimension");
  }
  if (c == Complex{}) return;
  auto [it, inserted] = terms_.try_emplace(mono, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex{}) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  check_dim(other.ambient_dim_, ambient_dim_, "polynomial addition");
  for (const auto& [mono, c] : other.terms_) add_term(mono, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  check_dim(other.ambient_dim_, ambient_dim_, "polynomial subtraction");
  for (const auto& [mono, c] : other.terms_) add_term(mono, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(Complex c) {
  if (c == Complex{}) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= c;
    it = it->second == Complex{} ? terms_.erase(it) : std::next(it);
  }
  return *this;
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  Polynomial out = *this;
  out += other;
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& other) const {
  Polynomial out = *this;
  out -= other;
  return out;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  check_dim(other.ambient_dim_, ambient_dim_, "polynomial product");
  Polynomial out(ambient_dim_);
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : other.terms_) out.add_term(ma * mb, ca * cb);
  }
  return out;
}

Polynomial Polynomial::operator*(Complex c) const {
  Polynomial out = *this;
  out *= c;
  return out;
}

Polynomial Polynomial::operator-() const { return *this * Complex{-1.0, 0.0}; }

Polynomial Polynomial::partial(std::uint32_t var) const {
  Polynomial out(ambient_dim_);
  for (const auto& [mono, c] : terms_) {
    const std::uint32_t e = mono.exponent(var);
    if (e > 0) out.add_term(mono.divided_by_variable(var), c * static_cast<double>(e));
  }
  return out;
}

Polynomial Polynomial::directional(const CVector& u) const {
  check_dim(static_cast<std::size_t>(u.size()), ambient_dim_, "directional derivative");
  Polynomial out(ambient_dim_);
  for (const auto& [mono, c] : terms_) {
    for (const auto& [var, e] : mono.factors()) {
      out.add_term(mono.divided_by_variable(var), c * static_cast<double>(e) * u[var]);
    }
  }
  return out;
}

Polynomial Polynomial::lifted(std::size_t new_ambient_dim) const {
  if (new_ambient_dim < ambient_dim_) throw InputError("cannot lift to a smaller space");
  Polynomial out(new_ambient_dim);
  out.terms_ = terms_;
  return out;
}

Complex Polynomial::eval(const CVector& x) const {
  check_dim(static_cast<std::size_t>(x.size()), ambient_dim_, "polynomial evaluation");
  Complex acc{};
  for (const auto& [mono, c] : terms_) acc += c * mono.eval(x);
  return acc;
}

bool Polynomial::operator==(const Polynomial& other) const {
  return ambient_dim_ == other.ambient_dim_ && terms_ == other.terms_;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [mono, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    const bool unit = c == Complex{1.0, 0.0};
    if (!unit || mono.is_constant()) os << format_coefficient(c);
    bool need_star = !unit;
    for (const auto& [var, e] : mono.factors()) {
      if (need_star) os << "*";
      os << "x" << (var + 1);
      if (e > 1) os << "^" << e;
      need_star = true;
    }
  }
  return os.str();
}

PolySystem::PolySystem(std::vector<Polynomial> polys, std::size_t n_vars)
    : polys_(std::move(polys)), n_vars_(n_vars) {
  for (const auto& p : polys_) {
    if (p.ambient_dim() != n_vars_) {
      throw InputError("PolySystem: polynomial ambient dimension differs from n_vars");
    }
  }
}

std::uint32_t PolySystem::degree() const {
  std::uint32_t d = 0;
  for (const auto& p : polys_) d = std::max(d, p.degree());
  return d;
}

CVector eval_system(const PolySystem& sys, const CVector& x) {
  check_dim(static_cast<std::size_t>(x.size()), sys.n_vars(), "eval_system");
  CVector out(static_cast<Index>(sys.n_eqs()));
  for (std::size_t i = 0; i < sys.n_eqs(); ++i) out[static_cast<Index>(i)] = sys[i].eval(x);
  return out;
}

CMatrix jacobian(const PolySystem& sys, const CVector& x) {
  check_dim(static_cast<std::size_t>(x.size()), sys.n_vars(), "jacobian");
  CMatrix jac = CMatrix::Zero(static_cast<Index>(sys.n_eqs()), static_cast<Index>(sys.n_vars()));
  for (std::size_t i = 0; i < sys.n_eqs(); ++i) {
    for (const auto& [mono, c] : sys[i].terms()) {
      for (const auto& [var, e] : mono.factors()) {
        jac(static_cast<Index>(i), var) +=
            c * static_cast<double>(e) * mono.divided_by_variable(var).eval(x);
      }
    }
  }
  return jac;
}

PolySystem shift(const PolySystem& sys, const CVector& u) {
  check_dim(static_cast<std::size_t>(u.size()), sys.n_vars(), "shift");
  std::vector<Polynomial> out;
  out.reserve(sys.n_eqs());
  for (const auto& p : sys.polys()) out.push_back(p.directional(u));
  return PolySystem(std::move(out), sys.n_vars());
}

PolySystem symbolic_deflate(const PolySystem& sys, const CMatrix& border, const CVector& rhs) {
  const std::size_t n = sys.n_vars();
  check_dim(static_cast<std::size_t>(border.cols()), n, "symbolic_deflate border columns");
  check_dim(static_cast<std::size_t>(rhs.size()), static_cast<std::size_t>(border.rows()),
            "symbolic_deflate rhs");
  const std::size_t dim = 2 * n;
  std::vector<Polynomial> rows;
  rows.reserve(2 * sys.n_eqs() + static_cast<std::size_t>(border.rows()));

  for (const auto& f : sys.polys()) rows.push_back(f.lifted(dim));

  // J(x1)·x2, row by row: Σ_j ∂f/∂x_j · x_{n+j}.
  for (const auto& f : sys.polys()) {
    Polynomial row(dim);
    for (const auto& [mono, c] : f.terms()) {
      for (const auto& [var, e] : mono.factors()) {
        const Monomial m = mono.divided_by_variable(var) *
                           Monomial::variable(static_cast<std::uint32_t>(n) + var);
        row.add_term(m, c * static_cast<double>(e));
      }
    }
    rows.push_back(std::move(row));
  }

  for (Index k = 0; k < border.rows(); ++k) {
    Polynomial row(dim);
    for (std::size_t j = 0; j < n; ++j) {
      row.add_term(Monomial::variable(static_cast<std::uint32_t>(n + j)),
                   border(k, static_cast<Index>(j)));
    }
    row.add_term(Monomial(), -rhs[k]);
    rows.push_back(std::move(row));
  }
  return PolySystem(std::move(rows), dim);
}

}  // namespace dfl
