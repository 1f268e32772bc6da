#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace mlsroute {

/// Exact link capacities and flow demands, in flow-size units.
using Capacity = boost::rational<std::int64_t>;

class CapacityParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::int64_t parse_digits(std::string_view digits, std::string_view whole) {
  if (digits.empty()) {
    throw CapacityParseError("empty numeral in '" + std::string(whole) + "'");
  }
  std::int64_t value = 0;
  for (char ch : digits) {
    if (ch < '0' || ch > '9') {
      throw CapacityParseError("invalid character in '" + std::string(whole) + "'");
    }
    if (value > (std::numeric_limits<std::int64_t>::max() - (ch - '0')) / 10) {
      throw CapacityParseError("numeral out of range: '" + std::string(whole) + "'");
    }
    value = value * 10 + (ch - '0');
  }
  return value;
}

}  // namespace detail

/// Parses "12", "2.5", "-0.75" or "7/3".
inline Capacity parse_capacity(std::string_view text) {
  const std::string_view whole = text;
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  Capacity result;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto num = detail::parse_digits(text.substr(0, slash), whole);
    const auto den = detail::parse_digits(text.substr(slash + 1), whole);
    if (den == 0) throw CapacityParseError("zero denominator in '" + std::string(whole) + "'");
    result = Capacity(num, den);
  } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
    const auto int_part = text.substr(0, dot);
    const auto frac_part = text.substr(dot + 1);
    if (int_part.empty() && frac_part.empty()) {
      throw CapacityParseError("empty numeral in '" + std::string(whole) + "'");
    }
    if (frac_part.size() > 17) {
      throw CapacityParseError("too many decimal places in '" + std::string(whole) + "'");
    }
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
    const auto ip = int_part.empty() ? 0 : detail::parse_digits(int_part, whole);
    const auto fp = frac_part.empty() ? 0 : detail::parse_digits(frac_part, whole);
    if (ip > (std::numeric_limits<std::int64_t>::max() - fp) / scale) {
      throw CapacityParseError("numeral out of range: '" + std::string(whole) + "'");
    }
    result = Capacity(ip * scale + fp, scale);
  } else {
    result = Capacity(detail::parse_digits(text, whole));
  }
  return negative ? -result : result;
}

/// Decimal text when the value has a terminating expansion, "p/q" otherwise.
inline std::string format_capacity(const Capacity& value) {
  std::int64_t den = value.denominator();
  int twos = 0;
  int fives = 0;
  while (den % 2 == 0) { den /= 2; ++twos; }
  while (den % 5 == 0) { den /= 5; ++fives; }
  if (den != 1) {
    return std::to_string(value.numerator()) + "/" + std::to_string(value.denominator());
  }
  const int places = std::max(twos, fives);
  if (places == 0) return std::to_string(value.numerator());
  if (places > 18) {
    return std::to_string(value.numerator()) + "/" + std::to_string(value.denominator());
  }

  // Scale to a power-of-ten denominator; the magnitude check keeps this exact.
  std::int64_t scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  const std::int64_t factor = scale / value.denominator();
  const std::int64_t num = value.numerator();
  const std::uint64_t mag = num < 0 ? 0 - static_cast<std::uint64_t>(num) : static_cast<std::uint64_t>(num);
  if (mag > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max() / factor)) {
    return std::to_string(value.numerator()) + "/" + std::to_string(value.denominator());
  }
  const std::uint64_t scaled = mag * static_cast<std::uint64_t>(factor);
  std::string frac = std::to_string(scaled % static_cast<std::uint64_t>(scale));
  frac.insert(0, static_cast<std::size_t>(places) - frac.size(), '0');
  while (!frac.empty() && frac.back() == '0') frac.pop_back();
  std::string out = (num < 0 ? "-" : "") + std::to_string(scaled / static_cast<std::uint64_t>(scale));
  if (!frac.empty()) out += "." + frac;
  return out;
}

inline double to_double(const Capacity& value) {
  return boost::rational_cast<double>(value);
}

}  // namespace mlsroute
