#pragma once

#include <string>
#include <string_view>

// Unit-suffixed quantity parsing. Everything is converted to SI internally
// (metres, seconds, hertz, radians).
namespace afshar::units {

// "670nm", "0.67um", "0.67µm", "6.7e-7m", "2mm". A suffix is mandatory.
double parse_length(std::string_view text);

// "3s", "500ms", "20us", "10ns".
double parse_time(std::string_view text);

// "4MHz", "180Hz", "2.5kHz", "1GHz".
double parse_frequency(std::string_view text);

// "7.5e-3rad", "7.5mrad", or a bare number meaning radians.
double parse_angle(std::string_view text);

// Plain dimensionless number with full-string validation.
double parse_number(std::string_view text);

// Shortest decimal that reads back to exactly `value`, followed by `suffix`.
std::string format_exact(double value, std::string_view suffix = {});

}  // namespace afshar::units
