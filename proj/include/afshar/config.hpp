#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "afshar/experiment.hpp"

// Run configuration: an INI file with one section per module. Physical
// quantities carry unit suffixes ("670nm", "3s", "4MHz", "7.5mrad").
//
//   [setup]     wavelength, refractive_index, summit_angle
//   [grating]   slit_count, slit_widths (comma list), period_override
//   [scan]      x_start, x_step, n_points, bin_time, blocked_bin_time,
//               dark_run_factor, max_reduced_chi2
//   [source]    repetition_rate, emission_probability, background_mean,
//               collection_efficiency
//   [detector]  dark_rate, quantum_efficiency, acceptance_half_angle
//   [campaign]  mode, seed
//   [hbt]       triggers, target_alpha
//   [map]       n_u, n_x
//   [output]    directory, formats (comma list), verbosity
//
// Unknown sections and keys are rejected.
namespace afshar {

struct RunConfig {
  std::optional<double> wavelength_m;
  std::optional<double> refractive_index;
  std::optional<double> summit_angle_rad;

  int slit_count = 20;
  std::vector<double> slit_widths_m{20e-6, 50e-6, 70e-6, 80e-6};
  std::optional<double> period_override_m;

  ScanProtocol protocol;
  SourceModel source;
  DetectorModel detectors;

  CampaignMode mode = CampaignMode::both;
  std::uint64_t seed = 1;

  std::uint64_t hbt_triggers = 1'000'000;
  std::optional<double> hbt_target_alpha;

  int map_n_u = 301;
  int map_n_x = 129;

  std::string output_directory = ".";
  std::vector<std::string> output_formats{"csv", "json"};
  int verbosity = 1;

  bool operator==(const RunConfig&) const = default;

  bool has_setup() const { return wavelength_m && refractive_index && summit_angle_rad; }
  // Throws ConfigError naming the first missing setup key.
  OpticalSetup setup() const;
  Campaign campaign() const;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
std::string emit_config(const RunConfig& config);

}  // namespace afshar
