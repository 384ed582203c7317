#include "afshar/units.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "afshar/errors.hpp"

namespace afshar::units {

namespace {

struct Suffix {
  std::string_view text;
  double divisor;  // value_in_SI = number / divisor
  double multiplier;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::pair<double, std::string_view> split_number(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  // from_chars rejects a leading '+'.
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr == first) {
    throw ConfigError(fmt::format("cannot parse a number from '{}'", text));
  }
  if (!std::isfinite(value)) throw ConfigError(fmt::format("non-finite value '{}'", text));
  return {value, trim(std::string_view(ptr, static_cast<std::size_t>(last - ptr)))};
}

// Division by an exact power of ten keeps "670nm" and "6.7e-7m" bit-identical.
template <std::size_t N>
double parse_with(std::string_view text, const std::array<Suffix, N>& table,
                  std::string_view kind, bool allow_bare) {
  auto [value, suffix] = split_number(text);
  if (suffix.empty()) {
    if (allow_bare) return value;
    throw ConfigError(fmt::format("{} '{}' needs a unit suffix", kind, text));
  }
  for (const auto& s : table) {
    if (s.text == suffix) return value / s.divisor * s.multiplier;
  }
  throw ConfigError(fmt::format("unknown {} unit '{}' in '{}'", kind, suffix, text));
}

constexpr std::array<Suffix, 7> kLength{{{"m", 1.0, 1.0},
                                         {"mm", 1e3, 1.0},
                                         {"um", 1e6, 1.0},
                                         {"\xC2\xB5m", 1e6, 1.0},  // µm (micro sign)
                                         {"\xCE\xBCm", 1e6, 1.0},  // μm (greek mu)
                                         {"nm", 1e9, 1.0},
                                         {"pm", 1e12, 1.0}}};
constexpr std::array<Suffix, 5> kTime{
    {{"s", 1.0, 1.0}, {"ms", 1e3, 1.0}, {"us", 1e6, 1.0}, {"\xC2\xB5s", 1e6, 1.0}, {"ns", 1e9, 1.0}}};
constexpr std::array<Suffix, 4> kFrequency{
    {{"Hz", 1.0, 1.0}, {"kHz", 1.0, 1e3}, {"MHz", 1.0, 1e6}, {"GHz", 1.0, 1e9}}};
constexpr std::array<Suffix, 4> kAngle{
    {{"rad", 1.0, 1.0}, {"mrad", 1e3, 1.0}, {"urad", 1e6, 1.0}, {"\xC2\xB5rad", 1e6, 1.0}}};

}  // namespace

double parse_length(std::string_view text) { return parse_with(text, kLength, "length", false); }
double parse_time(std::string_view text) { return parse_with(text, kTime, "time", false); }
double parse_frequency(std::string_view text) {
  return parse_with(text, kFrequency, "frequency", false);
}
double parse_angle(std::string_view text) { return parse_with(text, kAngle, "angle", true); }

double parse_number(std::string_view text) {
  auto [value, rest] = split_number(text);
  if (!rest.empty()) throw ConfigError(fmt::format("unexpected trailing text in '{}'", text));
  return value;
}

std::string format_exact(double value, std::string_view suffix) {
  return fmt::format("{}{}", value, suffix);
}

}  // namespace afshar::units
