#pragma once

#include <span>
#include <string>

namespace taxsim {

/// printf-style fixed notation, "%.{digits}f".
std::string fixed(double value, int digits);

/// Rounds to two decimals and prints the shortest form with at least one
/// fractional digit: 4744.90 -> "4744.9", 0 -> "0.0", 11.26 -> "11.26".
std::string short_decimal(double value);

/// "[a, b, c]" with each element rendered by short_decimal.
std::string short_decimal_list(std::span<const double> values);

/// "[a, b, c]" with each element in fixed notation.
std::string fixed_list(std::span<const double> values, int digits);

}  // namespace taxsim
