#pragma once

#include <functional>
#include <string>

#include "spexact/types.hpp"

namespace spexact {

// Parses a one-variable complex-coefficient expression into an evaluator.
// Supported: numbers (decimal/scientific, optional trailing 'i'), the
// imaginary unit 'i', the variable 'x' (alias 'r'), + - * / ^, parentheses,
// and the functions abs, sgn, sin, cos, exp, sqrt.
// Example: "(1+1i)*x^2 + 1", "i*sgn(x)*abs(x)^3 - 0.5*abs(x)^3".
std::function<Complex(double)> parse_expression(const std::string& text);

}  // namespace spexact
