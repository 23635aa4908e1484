#pragma once

#include <optional>
#include <string_view>

#include "dfl/polysys.hpp"

namespace dfl {

// Text format for hand-entered systems. One polynomial per line; blank lines
// and lines starting with '#' are skipped.
//
//   expr    := ['+'|'-'] term { ('+'|'-') term }
//   term    := factor { ['*'] factor }          juxtaposition multiplies
//   factor  := primary [ '^' unsigned-int ]
//   primary := number ['i'] | 'i' | 'x' index | '(' expr ')'
//   number  := digits ['.' digits] [('e'|'E') ['+'|'-'] digits]
//
// Variables are x1, x2, ... (1-based in text, 0-based internally). The
// imaginary unit is `i`, so complex coefficients read as `(1+2i)*x1^2` or
// `2.5i x2`. Whitespace is insignificant.

/// Parses a single polynomial. Throws ParseError with column context.
Polynomial parse_polynomial(std::string_view text, std::size_t n_vars);

/// Parses a whole system. When n_vars is absent it is the largest variable
/// index that appears. Throws ParseError with line and column context.
PolySystem parse_polynomial_system(std::string_view text,
                                   std::optional<std::size_t> n_vars = std::nullopt);

/// Comma-separated list of constant expressions, e.g. "1, 2-0.5i, 0".
CVector parse_point(std::string_view text);

}  // namespace dfl
