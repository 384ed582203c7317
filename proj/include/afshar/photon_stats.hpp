#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "afshar/wave_optics.hpp"

// Single-photon counting layer: pulsed source, Poisson shot noise and dark
// counts at the two detectors, count-based V and D estimators, and the
// trigger-gated anticorrelation (alpha) measurement.
namespace afshar {

struct SourceModel {
  double repetition_rate_hz = 4e6;
  double emission_probability = 0.02;  // signal photon per pulse
  double background_mean = 0.004;      // Poissonian background photons per pulse
  double collection_efficiency = 1.0;

  // Detected-before-QE signal photon rate R * p * eta_c.
  double signal_rate_hz() const;

  bool operator==(const SourceModel&) const = default;
};

struct DetectorModel {
  double dark_rate_hz = 180.0;
  double quantum_efficiency = 1.0;
  double acceptance_half_angle_rad = 0.0;  // 0 = point detector

  DetectorAperture aperture(const OpticalSetup& setup) const;

  bool operator==(const DetectorModel&) const = default;
};

void validate(const SourceModel& source);
void validate(const DetectorModel& detectors);

enum class NoiseMode {
  poisson,
  none,  // counts are the rounded expectations; the dark estimate is exact
};

struct ScanRequest {
  double x_start_m = 0.0;
  double x_step_m = 4e-6;
  int n_points = 55;
  double bin_time_s = 3.0;
  // Shutter-closed dark run lasts this many bin times.
  double dark_run_factor = 10.0;
  std::uint64_t seed = 1;
  NoiseMode noise = NoiseMode::poisson;
};

inline constexpr int kMinScanPoints = 8;

struct ScanResult {
  std::vector<double> positions_m;
  std::vector<std::uint64_t> counts_p1;
  std::vector<std::uint64_t> counts_p2;
  // Noise-free total rates (signal + dark) in counts/s.
  std::vector<double> expected_rate_p1_hz;
  std::vector<double> expected_rate_p2_hz;
  double bin_time_s = 0.0;
  double dark_estimate_hz = 0.0;
  // Dark-run exposure behind dark_estimate_hz; 0 means the estimate is exact.
  double dark_run_time_s = 0.0;
  std::uint64_t rng_seed = 0;

  std::span<const std::uint64_t> counts(Detector detector) const;
  std::span<const double> expected_rate(Detector detector) const;
};

// Scale factor from detector intensity to signal counts/s. With the grating
// removed each detector sees R * p * eta_c * eta_q / 2.
double rate_per_unit_intensity(const OpticalSetup& setup, const GratingSpec& grating,
                               const SourceModel& source, const DetectorModel& detectors);

// Grating translation scan. The grating position of `grating_template` is
// ignored; positions are x_start + i * x_step.
ScanResult simulate_scan(const OpticalSetup& setup, const GratingSpec& grating_template,
                         const SourceModel& source, const DetectorModel& detectors,
                         const ScanRequest& request);

// Which of the scan series to fit.
enum class FitSeries { observed, expected };

struct FitOptions {
  Detector detector = Detector::p1;
  FitSeries series = FitSeries::observed;
  double max_reduced_chi2 = 10.0;
};

struct VisibilityFit {
  double visibility = 0.0;
  double visibility_err = 0.0;
  double phase_rad = 0.0;
  double offset = 0.0;     // A, counts per bin after dark subtraction
  double offset_err = 0.0;
  double amplitude = 0.0;  // |B|
  double reduced_chi2 = 0.0;
  int dof = 0;

  double visibility_clamped() const;
};

// Weighted linear least squares of y = A + Bc cos(2 pi x / P) + Bs sin(2 pi x / P)
// with the period P fixed; V = sqrt(Bc^2 + Bs^2) / A. `offset_variance` is an
// extra variance on A shared by every point (e.g. from the dark estimate).
// Throws FitError on A <= 0 or reduced chi^2 above the bound.
VisibilityFit fit_cosine(std::span<const double> x, std::span<const double> y,
                         std::span<const double> variance, double period_m,
                         double offset_variance = 0.0, double max_reduced_chi2 = 10.0);

// Subtracts the scan's dark estimate from the chosen detector series and fits.
// Requires the scan to cover at least 1.5 periods.
VisibilityFit fit_visibility(const ScanResult& scan, double known_period_m,
                             FitOptions options = {});

struct BlockedRun {
  Path blocked = Path::two;
  std::uint64_t n1 = 0;
  std::uint64_t n2 = 0;
  double expected_rate_p1_hz = 0.0;
  double expected_rate_p2_hz = 0.0;
  double bin_time_s = 0.0;
};

BlockedRun simulate_blocked_run(const OpticalSetup& setup, const GratingSpec& grating,
                                Path blocked, const SourceModel& source,
                                const DetectorModel& detectors, double bin_time_s,
                                std::uint64_t seed, NoiseMode noise = NoiseMode::poisson);

// Detector counts of one blocked-path run, optionally dark-subtracted, with
// their variances.
struct NetCounts {
  double n1 = 0.0;
  double n2 = 0.0;
  double var1 = 0.0;
  double var2 = 0.0;

  static NetCounts raw(std::uint64_t n1, std::uint64_t n2);
  static NetCounts from(const BlockedRun& run);
  // Subtracts `dark_counts` from both detectors; `dark_variance` is the
  // variance of that estimate.
  NetCounts minus_dark(double dark_counts, double dark_variance) const;
};

struct DistinguishabilityEstimate {
  double d1 = 0.0;
  double d1_err = 0.0;
  double d2 = 0.0;
  double d2_err = 0.0;
  double d = 0.0;
  double d_err = 0.0;

  double d_clamped() const;
};

// D1 = |N1 - N2| / (2 (N1 + N2)) from the path-2-blocked run, D2 likewise from
// the path-1-blocked run. Errors propagate the count variances (binomial for
// raw counts). Throws DegenerateError if a run has no net counts.
DistinguishabilityEstimate estimate_distinguishability(const NetCounts& path2_blocked,
                                                       const NetCounts& path1_blocked);

struct HbtResult {
  std::uint64_t n_triggers = 0;
  std::uint64_t n1 = 0;  // triggers with at least one count on P1
  std::uint64_t n2 = 0;
  std::uint64_t n_coincidence = 0;

  // alpha = N_C N_T / (N1 N2); 0 when there are no coincidences.
  double alpha() const;
  // Multinomial delta-method standard error.
  double alpha_err() const;

  bool operator==(const HbtResult&) const = default;
};

inline constexpr std::uint64_t kMinHbtTriggers = 10'000;

// Trigger-gated coincidence measurement without the grating. Each pulse
// carries a Bernoulli signal photon plus Poisson background; every photon goes
// to P1 or P2 with probability 1/2 and is detected with eta_c * eta_q.
HbtResult simulate_hbt(const SourceModel& source, const DetectorModel& detectors,
                       std::uint64_t n_triggers, std::uint64_t seed);

// Exact alpha implied by the source and detector model.
double expected_alpha(const SourceModel& source, const DetectorModel& detectors);

// Source with background_mean chosen so that expected_alpha == target.
// Requires 0 <= target < 1 and emission_probability > 0.
SourceModel calibrate_background_for_alpha(SourceModel source, const DetectorModel& detectors,
                                           double target_alpha);

}  // namespace afshar
