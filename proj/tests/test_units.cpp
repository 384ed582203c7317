#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "afshar/errors.hpp"
#include "afshar/units.hpp"

using namespace afshar;
using namespace afshar::units;

TEST_CASE("length spellings agree") {
  CHECK(std::abs(parse_length("670nm") - parse_length("0.67um")) < 1e-12);
  CHECK(std::abs(parse_length("670nm") - parse_length("6.7e-7m")) < 1e-12);
  CHECK(parse_length("670nm") == parse_length("6.7e-7m"));
  CHECK(parse_length("0.67µm") == parse_length("0.67um"));
  CHECK(parse_length("0.67μm") == parse_length("0.67um"));
  CHECK(parse_length("2mm") == doctest::Approx(2e-3));
  CHECK(parse_length("80 um") == doctest::Approx(80e-6));
  CHECK(parse_length("1500pm") == doctest::Approx(1.5e-9));
}

TEST_CASE("time, frequency and angle") {
  CHECK(parse_time("3s") == 3.0);
  CHECK(parse_time("500ms") == doctest::Approx(0.5));
  CHECK(parse_time("20us") == doctest::Approx(20e-6));
  CHECK(parse_time("10ns") == doctest::Approx(10e-9));
  CHECK(parse_frequency("4MHz") == 4e6);
  CHECK(parse_frequency("2.5kHz") == 2500.0);
  CHECK(parse_frequency("180Hz") == 180.0);
  CHECK(parse_frequency("1GHz") == 1e9);
  CHECK(parse_angle("7.5mrad") == parse_angle("7.5e-3rad"));
  CHECK(parse_angle("7.5e-3") == 7.5e-3);
  CHECK(parse_angle("30urad") == doctest::Approx(30e-6));
}

TEST_CASE("malformed quantities are rejected") {
  CHECK_THROWS_AS(parse_length("670"), ConfigError);
  CHECK_THROWS_AS(parse_length("670furlong"), ConfigError);
  CHECK_THROWS_AS(parse_length("nm"), ConfigError);
  CHECK_THROWS_AS(parse_length(""), ConfigError);
  CHECK_THROWS_AS(parse_time("3Hz"), ConfigError);
  CHECK_THROWS_AS(parse_frequency("4M"), ConfigError);
  CHECK_THROWS_AS(parse_number("1.5x"), ConfigError);
  CHECK_THROWS_AS(parse_number("1,5"), ConfigError);
}

TEST_CASE("format_exact round-trips every double") {
  std::mt19937_64 engine(3);
  std::uniform_real_distribution<double> mantissa(1.0, 10.0);
  std::uniform_int_distribution<int> exponent(-12, 9);
  for (int i = 0; i < 2000; ++i) {
    const double v = mantissa(engine) * std::pow(10.0, exponent(engine));
    CHECK(parse_length(format_exact(v, "m")) == v);
    CHECK(parse_number(format_exact(v)) == v);
  }
  CHECK(format_exact(3.0, "s") == "3s");
}
