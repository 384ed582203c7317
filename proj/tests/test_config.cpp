#include <doctest.h>

#include <fstream>
#include <random>

#include "afshar/config.hpp"
#include "afshar/errors.hpp"
#include "test_support.hpp"

using namespace afshar;

namespace {

constexpr const char* kReferenceIni = R"([setup]
wavelength = 670nm
refractive_index = 1.51
summit_angle = 7.5mrad

[grating]
slit_count = 20
slit_widths = 20um, 50um, 70um, 80um

[campaign]
mode = monte_carlo
seed = 42
)";

RunConfig random_config(std::mt19937_64& engine) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> small(16, 400);
  RunConfig c;
  c.wavelength_m = 400e-9 + 400e-9 * unit(engine);
  c.refractive_index = 1.3 + unit(engine);
  c.summit_angle_rad = 1e-3 + 1e-2 * unit(engine);
  c.slit_count = small(engine);
  c.slit_widths_m.clear();
  for (int i = 0; i < 1 + small(engine) % 6; ++i) c.slit_widths_m.push_back(1e-4 * unit(engine));
  if (unit(engine) < 0.5) c.period_override_m = 1e-4 * (0.5 + unit(engine));
  c.protocol.x_start_m = 1e-5 * unit(engine);
  c.protocol.x_step_m = 1e-6 * (1.0 + 9.0 * unit(engine));
  c.protocol.n_points = small(engine) % 2 ? 0 : small(engine);
  c.protocol.bin_time_s = 0.1 + 10.0 * unit(engine);
  c.protocol.blocked_bin_time_s = 0.1 + 10.0 * unit(engine);
  c.protocol.dark_run_factor = 1.0 + 20.0 * unit(engine);
  c.protocol.max_reduced_chi2 = 2.0 + 20.0 * unit(engine);
  c.source.repetition_rate_hz = 1e5 + 1e7 * unit(engine);
  c.source.emission_probability = unit(engine);
  c.source.background_mean = 0.1 * unit(engine);
  c.source.collection_efficiency = unit(engine);
  c.detectors.dark_rate_hz = 1000.0 * unit(engine);
  c.detectors.quantum_efficiency = unit(engine);
  c.detectors.acceptance_half_angle_rad = 1e-4 * unit(engine);
  c.mode = static_cast<CampaignMode>(small(engine) % 3);
  c.seed = engine();
  c.hbt_triggers = 10'000 + engine() % 10'000'000;
  if (unit(engine) < 0.5) c.hbt_target_alpha = 0.5 * unit(engine);
  c.map_n_u = small(engine);
  c.map_n_x = small(engine);
  c.output_directory = "out_" + std::to_string(small(engine));
  c.output_formats = unit(engine) < 0.5 ? std::vector<std::string>{"csv"}
                                        : std::vector<std::string>{"csv", "json"};
  c.verbosity = small(engine) % 3;
  return c;
}

}  // namespace

TEST_CASE("parsing a minimal configuration") {
  const auto c = parse_config(kReferenceIni);
  REQUIRE(c.has_setup());
  CHECK(*c.wavelength_m == 670e-9);
  CHECK(*c.summit_angle_rad == 7.5e-3);
  CHECK(c.slit_widths_m == std::vector<double>{20e-6, 50e-6, 70e-6, 80e-6});
  CHECK(c.mode == CampaignMode::monte_carlo);
  CHECK(c.seed == 42);
  CHECK(c.protocol == ScanProtocol{});
  CHECK(c.setup().interfringe_m() == doctest::Approx(test::kReferenceInterfringe).epsilon(1e-14));
  const auto campaign = c.campaign();
  CHECK(campaign.slit_widths_m.size() == 4);
  CHECK(campaign.seed == 42);
}

TEST_CASE("emit then parse reproduces the configuration") {
  std::mt19937_64 engine(17);
  for (int i = 0; i < 200; ++i) {
    const auto c = random_config(engine);
    const auto text = emit_config(c);
    CHECK(parse_config(text) == c);
    CHECK(emit_config(parse_config(text)) == text);
  }
  CHECK(parse_config(emit_config(RunConfig{})) == RunConfig{});
}

TEST_CASE("unknown sections and keys are rejected") {
  CHECK_THROWS_AS(parse_config("[setup]\nwavelenght = 670nm\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[optics]\nwavelength = 670nm\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("wavelength = 670nm\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[setup]\nwavelength = 670\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[campaign]\nmode = often\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[grating]\nslit_count = twenty\n"), ConfigError);
}

TEST_CASE("missing setup is reported by name") {
  const auto c = parse_config("[setup]\nwavelength = 670nm\nrefractive_index = 1.51\n");
  CHECK(!c.has_setup());
  try {
    (void)c.setup();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("summit_angle") != std::string::npos);
  }
}

TEST_CASE("optional keys accept none") {
  const auto c = parse_config("[grating]\nperiod_override = none\n[hbt]\ntarget_alpha = none\n");
  CHECK(!c.period_override_m);
  CHECK(!c.hbt_target_alpha);
}

TEST_CASE("loading from disk") {
  const auto dir = test::scratch_dir("config");
  {
    std::ofstream(dir / "run.ini") << kReferenceIni;
  }
  CHECK(load_config(dir / "run.ini") == parse_config(kReferenceIni));
  CHECK_THROWS_AS(load_config(dir / "absent.ini"), ConfigError);
}
