#include "taxsim/format.hpp"

#include <cmath>
#include <cstdio>

namespace taxsim {

std::string fixed(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, value);
    return buf;
}

std::string short_decimal(double value) {
    std::string text = fixed(value, 2);
    if (text == "-0.00") text = "0.00";
    while (text.back() == '0' && text[text.size() - 2] != '.') text.pop_back();
    return text;
}

std::string short_decimal_list(std::span<const double> values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += short_decimal(values[i]);
    }
    return out + "]";
}

std::string fixed_list(std::span<const double> values, int digits) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += fixed(values[i], digits);
    }
    return out + "]";
}

}  // namespace taxsim
