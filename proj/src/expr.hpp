#pragma once

#include <map>
#include <string>

namespace ibplab::detail {

/// Evaluates + - * / with parentheses, unary minus, numbers and named
/// parameters. Throws InputError on syntax errors or unknown names.
double evaluate_expression(const std::string& text, const std::map<std::string, double>& params);

}  // namespace ibplab::detail
