#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "afshar/photon_stats.hpp"
#include "afshar/wave_optics.hpp"

namespace afshar {

enum class CampaignMode { analytic, monte_carlo, both };

std::string_view to_string(CampaignMode mode);
CampaignMode parse_campaign_mode(std::string_view text);

struct ScanProtocol {
  double x_start_m = 0.0;
  double x_step_m = 4e-6;
  int n_points = 0;  // 0: cover kDefaultScanPeriods interfringes
  double bin_time_s = 3.0;
  double blocked_bin_time_s = 3.0;
  double dark_run_factor = 10.0;
  double max_reduced_chi2 = 10.0;

  bool operator==(const ScanProtocol&) const = default;
};

inline constexpr double kDefaultScanPeriods = 2.5;

// Point count used for a scan of the given interfringe.
int scan_points(const ScanProtocol& protocol, double interfringe_m);

struct Campaign {
  OpticalSetup setup;
  std::vector<double> slit_widths_m;
  int slit_count = 20;
  std::optional<double> period_override_m;  // explores a mismatched grating
  ScanProtocol protocol;
  SourceModel source;
  DetectorModel detectors;
  std::uint64_t seed = 1;
  CampaignMode mode = CampaignMode::both;
};

struct WidthReport {
  double slit_width_m = 0.0;
  std::uint64_t seed = 0;
  ComplementarityRecord analytic;
  std::optional<ComplementarityRecord> estimated;
  std::optional<ScanResult> scan;
  std::optional<VisibilityFit> fit;
  std::optional<BlockedRun> path1_blocked;
  std::optional<BlockedRun> path2_blocked;

  // Estimated record when present, otherwise the analytic one.
  const ComplementarityRecord& primary() const;
};

struct Aggregate {
  std::size_t count = 0;
  double mean_sum_sq = 0.0;
  double sem_sum_sq = 0.0;  // standard error of the mean
};

struct CampaignReport {
  CampaignMode mode = CampaignMode::both;
  std::uint64_t seed = 0;
  std::vector<WidthReport> widths;
  Aggregate aggregate;
};

// Grating for one slit width of the campaign.
GratingSpec campaign_grating(const Campaign& campaign, double slit_width_m);

// Per slit width: analytic V and D, and in Monte Carlo mode a translation
// scan with cosine fit plus the two blocked-path runs. Widths run
// concurrently with per-width derived seeds. Sub-module failures are
// rethrown as CampaignError naming the slit width.
CampaignReport run_campaign(const Campaign& campaign);

// Unweighted mean of V^2 + D^2 over the records with its standard error. For
// a single record the SEM falls back to that record's propagated error.
Aggregate aggregate_sum_of_squares(const std::vector<WidthReport>& widths);

class CampaignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Intensity over u in [-3 u0, 3 u0] (columns) and x in [0, 2 Lambda] (rows).
struct IntensityMap {
  double slit_width_m = 0.0;
  std::vector<double> u_per_m;
  std::vector<double> x_m;
  std::vector<double> values;  // row-major, values[ix * n_u + iu]

  std::size_t n_u() const { return u_per_m.size(); }
  std::size_t n_x() const { return x_m.size(); }
  double at(std::size_t ix, std::size_t iu) const { return values[ix * n_u() + iu]; }
};

inline constexpr int kMinMapAxisPoints = 16;

IntensityMap generate_intensity_map(const OpticalSetup& setup, double slit_width_m, int n_u,
                                    int n_x, int slit_count = 20);

struct ComplementarityCheck {
  double sum_of_squares = 0.0;
  double sum_err = 0.0;
  double margin = 0.0;  // 1 - (V^2 + D^2)
  double z_score = 0.0;
  bool violation = false;
};

inline constexpr double kViolationZ = 5.0;

// z = (V^2 + D^2 - 1) / sigma; flags a violation only above kViolationZ.
// Without uncertainties any excess beyond rounding counts as a violation.
ComplementarityCheck complementarity_check(const ComplementarityRecord& record,
                                           double z_threshold = kViolationZ);

}  // namespace afshar
