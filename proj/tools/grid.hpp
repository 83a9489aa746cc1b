#pragma once

#include <string>
#include <vector>

namespace wml::cli {

// Arithmetic over numbers, K and L: + - * / ^, parentheses, log(), sqrt(), exp().
double eval_expr(const std::string& text, double K, double L);

// "lin:a:b:n", "log:a:b:n" (endpoints included) or a comma-separated list of expressions.
std::vector<double> parse_grid(const std::string& spec, double K, double L);

}  // namespace wml::cli
