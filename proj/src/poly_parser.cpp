#include "dfl/poly_parser.hpp"

#include <cctype>
#include <charconv>
#include <sstream>
#include <string>
#include <vector>

namespace dfl {

namespace {

class Parser {
 public:
  Parser(std::string_view text, std::size_t n_vars) : text_(text), n_vars_(n_vars) {}

  Polynomial parse_all() {
    Polynomial p = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << "column " << (pos_ + 1) << ": " << msg;
    throw ParseError(os.str());
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool starts_primary(char c) const {
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'x' || c == 'i' ||
           c == '(';
  }

  Polynomial expr() {
    Polynomial acc(n_vars_);
    bool negate = false;
    if (peek() == '+' || peek() == '-') negate = text_[pos_++] == '-';
    Polynomial t = term();
    acc += negate ? -t : t;
    while (peek() == '+' || peek() == '-') {
      negate = text_[pos_++] == '-';
      t = term();
      acc += negate ? -t : t;
    }
    return acc;
  }

  Polynomial term() {
    Polynomial acc = factor();
    for (;;) {
      char c = peek();
      if (c == '*') {
        ++pos_;
        acc = acc * factor();
      } else if (starts_primary(c)) {
        acc = acc * factor();
      } else {
        return acc;
      }
    }
  }

  Polynomial factor() {
    Polynomial base = primary();
    if (peek() == '^') {
      ++pos_;
      skip_ws();
      const std::uint32_t e = unsigned_int("exponent");
      Polynomial acc = Polynomial::constant(n_vars_, 1.0);
      for (std::uint32_t k = 0; k < e; ++k) acc = acc * base;
      return acc;
    }
    return base;
  }

  std::uint32_t unsigned_int(const char* what) {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail(std::string("expected ") + what);
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc()) fail(std::string(what) + " out of range");
    return v;
  }

  Polynomial primary() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Polynomial inner = expr();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (c == 'x') {
      ++pos_;
      const std::uint32_t idx = unsigned_int("variable index after 'x'");
      if (idx == 0) fail("variables are numbered from x1");
      if (idx > n_vars_) fail("variable x" + std::to_string(idx) + " exceeds declared dimension");
      return Polynomial::variable(n_vars_, idx - 1);
    }
    if (c == 'i') {
      ++pos_;
      return Polynomial::constant(n_vars_, Complex{0.0, 1.0});
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const double v = number();
      if (pos_ < text_.size() && text_[pos_] == 'i') {
        ++pos_;
        return Polynomial::constant(n_vars_, Complex{0.0, v});
      }
      return Polynomial::constant(n_vars_, Complex{v, 0.0});
    }
    if (c == '\0') fail("unexpected end of input");
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  double number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      const std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      const std::size_t exp_start = pos_;
      digits();
      if (exp_start == pos_) pos_ = save;
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return v;
  }

  std::string_view text_;
  std::size_t n_vars_;
  std::size_t pos_ = 0;
};

std::size_t max_variable_index(std::string_view text) {
  std::size_t best = 0;
  for (std::size_t k = 0; k < text.size(); ++k) {
    if (text[k] != 'x') continue;
    std::size_t j = k + 1;
    std::size_t v = 0;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
      v = v * 10 + static_cast<std::size_t>(text[j] - '0');
      ++j;
    }
    best = std::max(best, v);
  }
  return best;
}

bool skippable(std::string_view line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Polynomial parse_polynomial(std::string_view text, std::size_t n_vars) {
  return Parser(text, n_vars).parse_all();
}

PolySystem parse_polynomial_system(std::string_view text, std::optional<std::size_t> n_vars) {
  std::vector<std::string_view> lines;
  std::vector<std::size_t> line_numbers;
  std::size_t start = 0, lineno = 1;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!skippable(line)) {
      lines.push_back(line);
      line_numbers.push_back(lineno);
    }
    start = end + 1;
    ++lineno;
  }

  std::size_t dim = n_vars.value_or(0);
  if (!n_vars) {
    for (auto line : lines) dim = std::max(dim, max_variable_index(line));
  }

  std::vector<Polynomial> polys;
  polys.reserve(lines.size());
  for (std::size_t k = 0; k < lines.size(); ++k) {
    try {
      polys.push_back(parse_polynomial(lines[k], dim));
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_numbers[k]) + ", " + e.what());
    }
  }
  return PolySystem(std::move(polys), dim);
}

CVector parse_point(std::string_view text) {
  std::vector<Complex> values;
  std::size_t start = 0;
  for (;;) {
    std::size_t end = text.find(',', start);
    const std::string_view part =
        text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    const Polynomial p = parse_polynomial(part, 0);
    values.push_back(p.is_zero() ? Complex{} : p.terms().begin()->second);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  CVector out(static_cast<Index>(values.size()));
  for (std::size_t k = 0; k < values.size(); ++k) out[static_cast<Index>(k)] = values[k];
  return out;
}

}  // namespace dfl
