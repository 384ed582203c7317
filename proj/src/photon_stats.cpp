#include "afshar/photon_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "afshar/errors.hpp"
#include "afshar/rng.hpp"

namespace afshar {

namespace {

bool in_unit_interval(double p) { return p >= 0.0 && p <= 1.0; }

std::uint64_t draw_counts(rng::Engine& engine, double mean, NoiseMode noise) {
  if (mean <= 0.0) return 0;
  if (noise == NoiseMode::none) return static_cast<std::uint64_t>(std::llround(mean));
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(engine);
}

double detection_efficiency(const SourceModel& source, const DetectorModel& detectors) {
  return source.collection_efficiency * detectors.quantum_efficiency;
}

}  // namespace

double SourceModel::signal_rate_hz() const {
  return repetition_rate_hz * emission_probability * collection_efficiency;
}

DetectorAperture DetectorModel::aperture(const OpticalSetup& setup) const {
  return {acceptance_half_angle_rad / setup.wavelength_m()};
}

void validate(const SourceModel& s) {
  if (!(std::isfinite(s.repetition_rate_hz) && s.repetition_rate_hz > 0.0)) {
    throw DomainError("repetition rate must be positive");
  }
  if (!in_unit_interval(s.emission_probability)) {
    throw DomainError("emission probability must lie in [0, 1]");
  }
  if (!(std::isfinite(s.background_mean) && s.background_mean >= 0.0)) {
    throw DomainError("background mean must be >= 0");
  }
  if (!(s.collection_efficiency > 0.0 && s.collection_efficiency <= 1.0)) {
    throw DomainError("collection efficiency must lie in (0, 1]");
  }
}

void validate(const DetectorModel& d) {
  if (!(std::isfinite(d.dark_rate_hz) && d.dark_rate_hz >= 0.0)) {
    throw DomainError("dark rate must be >= 0");
  }
  if (!(d.quantum_efficiency > 0.0 && d.quantum_efficiency <= 1.0)) {
    throw DomainError("quantum efficiency must lie in (0, 1]");
  }
  if (!(std::isfinite(d.acceptance_half_angle_rad) && d.acceptance_half_angle_rad >= 0.0)) {
    throw DomainError("acceptance half-angle must be >= 0");
  }
}

std::span<const std::uint64_t> ScanResult::counts(Detector detector) const {
  return detector == Detector::p1 ? counts_p1 : counts_p2;
}

std::span<const double> ScanResult::expected_rate(Detector detector) const {
  return detector == Detector::p1 ? expected_rate_p1_hz : expected_rate_p2_hz;
}

double rate_per_unit_intensity(const OpticalSetup& setup, const GratingSpec& grating,
                               const SourceModel& source, const DetectorModel& detectors) {
  const double reference = detector_intensity(setup, without_grating(grating), Detector::p1,
                                              Illumination::both_paths,
                                              detectors.aperture(setup));
  const double per_detector = 0.5 * source.signal_rate_hz() * detectors.quantum_efficiency;
  return per_detector / reference;
}

ScanResult simulate_scan(const OpticalSetup& setup, const GratingSpec& grating_template,
                         const SourceModel& source, const DetectorModel& detectors,
                         const ScanRequest& request) {
  validate(grating_template);
  validate(source);
  validate(detectors);
  if (request.n_points < kMinScanPoints) {
    throw DomainError(fmt::format("a scan needs at least {} points", kMinScanPoints));
  }
  if (!(request.bin_time_s > 0.0) || !std::isfinite(request.bin_time_s)) {
    throw DomainError("bin time must be positive");
  }
  if (!(request.x_step_m > 0.0) || !std::isfinite(request.x_step_m) ||
      !std::isfinite(request.x_start_m)) {
    throw DomainError("scan step must be positive");
  }
  if (!(request.dark_run_factor > 0.0)) throw DomainError("dark run factor must be positive");

  const double scale = rate_per_unit_intensity(setup, grating_template, source, detectors);
  const auto aperture = detectors.aperture(setup);
  const auto n = static_cast<std::size_t>(request.n_points);

  ScanResult scan;
  scan.bin_time_s = request.bin_time_s;
  scan.rng_seed = request.seed;
  scan.positions_m.resize(n);
  scan.counts_p1.resize(n);
  scan.counts_p2.resize(n);
  scan.expected_rate_p1_hz.resize(n);
  scan.expected_rate_p2_hz.resize(n);

  GratingSpec grating = grating_template;
  for (std::size_t i = 0; i < n; ++i) {
    grating.position_m = request.x_start_m + static_cast<double>(i) * request.x_step_m;
    const double r1 = scale * detector_intensity(setup, grating, Detector::p1,
                                                 Illumination::both_paths, aperture) +
                      detectors.dark_rate_hz;
    const double r2 = scale * detector_intensity(setup, grating, Detector::p2,
                                                 Illumination::both_paths, aperture) +
                      detectors.dark_rate_hz;
    auto engine = rng::make_engine(request.seed, rng::Stream::scan_point, i);
    scan.positions_m[i] = grating.position_m;
    scan.expected_rate_p1_hz[i] = r1;
    scan.expected_rate_p2_hz[i] = r2;
    scan.counts_p1[i] = draw_counts(engine, r1 * request.bin_time_s, request.noise);
    scan.counts_p2[i] = draw_counts(engine, r2 * request.bin_time_s, request.noise);
  }

  if (request.noise == NoiseMode::none) {
    scan.dark_estimate_hz = detectors.dark_rate_hz;
    scan.dark_run_time_s = 0.0;
  } else {
    // Shutter closed: both detectors see dark counts only; pooled estimate.
    const double duration = request.dark_run_factor * request.bin_time_s;
    auto engine = rng::make_engine(request.seed, rng::Stream::dark_run, 0);
    const double mean = detectors.dark_rate_hz * duration;
    const auto total = draw_counts(engine, mean, request.noise) +
                       draw_counts(engine, mean, request.noise);
    scan.dark_run_time_s = 2.0 * duration;
    scan.dark_estimate_hz = static_cast<double>(total) / scan.dark_run_time_s;
  }
  return scan;
}

double VisibilityFit::visibility_clamped() const { return std::clamp(visibility, 0.0, 1.0); }

VisibilityFit fit_cosine(std::span<const double> x, std::span<const double> y,
                         std::span<const double> variance, double period_m,
                         double offset_variance, double max_reduced_chi2) {
  if (x.size() != y.size() || x.size() != variance.size()) {
    throw FitError("fit inputs have mismatched lengths");
  }
  if (x.size() < 4) throw FitError("cosine fit needs at least 4 points");
  if (!(period_m > 0.0)) throw FitError("fit period must be positive");

  const double k = 2.0 * std::numbers::pi / period_m;
  Eigen::Matrix3d normal = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Eigen::Vector3d basis(1.0, std::cos(k * x[i]), std::sin(k * x[i]));
    const double w = 1.0 / std::max(variance[i], 1.0);
    normal += w * basis * basis.transpose();
    rhs += w * y[i] * basis;
  }
  const Eigen::LDLT<Eigen::Matrix3d> ldlt(normal);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw FitError("cosine fit design matrix is singular");
  }
  const Eigen::Vector3d beta = ldlt.solve(rhs);
  Eigen::Matrix3d cov = ldlt.solve(Eigen::Matrix3d::Identity());
  cov(0, 0) += offset_variance;

  double chi2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double model = beta(0) + beta(1) * std::cos(k * x[i]) + beta(2) * std::sin(k * x[i]);
    chi2 += std::pow(y[i] - model, 2) / std::max(variance[i], 1.0);
  }

  VisibilityFit fit;
  fit.dof = static_cast<int>(x.size()) - 3;
  fit.reduced_chi2 = chi2 / fit.dof;
  fit.offset = beta(0);
  fit.offset_err = std::sqrt(cov(0, 0));
  fit.amplitude = std::hypot(beta(1), beta(2));
  // A + B cos(kx + phi) = A + B cos(phi) cos(kx) - B sin(phi) sin(kx)
  fit.phase_rad = std::atan2(-beta(2), beta(1));

  if (!(fit.offset > 0.0)) {
    throw FitError(fmt::format("fitted offset {} is not positive", fit.offset));
  }
  if (fit.reduced_chi2 > max_reduced_chi2) {
    throw FitError(fmt::format("reduced chi2 {:.3g} exceeds bound {:.3g}", fit.reduced_chi2,
                               max_reduced_chi2));
  }

  const double a = fit.offset;
  const double r = fit.amplitude;
  fit.visibility = r / a;
  Eigen::Vector3d grad;
  if (r > 0.0) {
    grad << -r / (a * a), beta(1) / (r * a), beta(2) / (r * a);
  } else {
    // Gradient of |B| is undefined at 0; use the isotropic spread of (Bc, Bs).
    grad << 0.0, std::sqrt(0.5) / a, std::sqrt(0.5) / a;
  }
  fit.visibility_err = std::sqrt(std::max(0.0, grad.dot(cov * grad)));
  return fit;
}

VisibilityFit fit_visibility(const ScanResult& scan, double known_period_m, FitOptions options) {
  const auto n = scan.positions_m.size();
  if (n < static_cast<std::size_t>(kMinScanPoints) || scan.counts_p1.size() != n ||
      scan.counts_p2.size() != n) {
    throw FitError("scan is too short or has inconsistent series");
  }
  const double step = n > 1 ? (scan.positions_m.back() - scan.positions_m.front()) /
                                  static_cast<double>(n - 1)
                            : 0.0;
  const double coverage = step * static_cast<double>(n);
  if (coverage < 1.5 * known_period_m) {
    throw FitError(fmt::format("scan covers {:.3g} periods; at least 1.5 are needed",
                               coverage / known_period_m));
  }

  const double dark_per_bin = scan.dark_estimate_hz * scan.bin_time_s;
  const double dark_var = scan.dark_run_time_s > 0.0
                              ? scan.dark_estimate_hz / scan.dark_run_time_s *
                                    scan.bin_time_s * scan.bin_time_s
                              : 0.0;

  std::vector<double> y(n);
  std::vector<double> var(n);
  const auto counts = scan.counts(options.detector);
  const auto rates = scan.expected_rate(options.detector);
  for (std::size_t i = 0; i < n; ++i) {
    const double raw = options.series == FitSeries::observed
                           ? static_cast<double>(counts[i])
                           : rates[i] * scan.bin_time_s;
    y[i] = raw - dark_per_bin;
    var[i] = raw;
  }
  return fit_cosine(scan.positions_m, y, var, known_period_m, dark_var, options.max_reduced_chi2);
}

BlockedRun simulate_blocked_run(const OpticalSetup& setup, const GratingSpec& grating,
                                Path blocked, const SourceModel& source,
                                const DetectorModel& detectors, double bin_time_s,
                                std::uint64_t seed, NoiseMode noise) {
  validate(grating);
  validate(source);
  validate(detectors);
  if (!(bin_time_s > 0.0) || !std::isfinite(bin_time_s)) {
    throw DomainError("bin time must be positive");
  }
  const double scale = rate_per_unit_intensity(setup, grating, source, detectors);
  const auto aperture = detectors.aperture(setup);
  const auto open = blocking(blocked);

  BlockedRun run;
  run.blocked = blocked;
  run.bin_time_s = bin_time_s;
  run.expected_rate_p1_hz =
      scale * detector_intensity(setup, grating, Detector::p1, open, aperture) +
      detectors.dark_rate_hz;
  run.expected_rate_p2_hz =
      scale * detector_intensity(setup, grating, Detector::p2, open, aperture) +
      detectors.dark_rate_hz;
  const auto stream =
      blocked == Path::one ? rng::Stream::blocked_path1 : rng::Stream::blocked_path2;
  auto engine = rng::make_engine(seed, stream, 0);
  run.n1 = draw_counts(engine, run.expected_rate_p1_hz * bin_time_s, noise);
  run.n2 = draw_counts(engine, run.expected_rate_p2_hz * bin_time_s, noise);
  return run;
}

NetCounts NetCounts::raw(std::uint64_t n1, std::uint64_t n2) {
  const auto a = static_cast<double>(n1);
  const auto b = static_cast<double>(n2);
  return {a, b, a, b};
}

NetCounts NetCounts::from(const BlockedRun& run) { return raw(run.n1, run.n2); }

NetCounts NetCounts::minus_dark(double dark_counts, double dark_variance) const {
  return {n1 - dark_counts, n2 - dark_counts, var1 + dark_variance, var2 + dark_variance};
}

double DistinguishabilityEstimate::d_clamped() const { return std::clamp(d, 0.0, 1.0); }

namespace {

struct HalfContrast {
  double value;
  double err;
};

// 1/2 |n1 - n2| / (n1 + n2) with delta-method error.
HalfContrast half_contrast(const NetCounts& c, const char* which) {
  const double total = c.n1 + c.n2;
  if (!(total > 0.0)) {
    throw DegenerateError(fmt::format("{} run has no net counts", which));
  }
  const double value = 0.5 * std::abs(c.n1 - c.n2) / total;
  // d/dn1 = n2 / T^2, d/dn2 = -n1 / T^2 for (n1 - n2) / T.
  const double err =
      std::sqrt(c.n2 * c.n2 * c.var1 + c.n1 * c.n1 * c.var2) / (total * total);
  return {value, err};
}

}  // namespace

DistinguishabilityEstimate estimate_distinguishability(const NetCounts& path2_blocked,
                                                       const NetCounts& path1_blocked) {
  const auto first = half_contrast(path2_blocked, "path-2-blocked");
  const auto second = half_contrast(path1_blocked, "path-1-blocked");
  DistinguishabilityEstimate e;
  e.d1 = first.value;
  e.d1_err = first.err;
  e.d2 = second.value;
  e.d2_err = second.err;
  e.d = e.d1 + e.d2;
  e.d_err = std::hypot(e.d1_err, e.d2_err);
  return e;
}

double HbtResult::alpha() const {
  if (n_coincidence == 0) return 0.0;
  return static_cast<double>(n_coincidence) * static_cast<double>(n_triggers) /
         (static_cast<double>(n1) * static_cast<double>(n2));
}

double HbtResult::alpha_err() const {
  const auto t = static_cast<double>(n_triggers);
  const auto c = static_cast<double>(n_coincidence);
  const auto s1 = static_cast<double>(n1);
  const auto s2 = static_cast<double>(n2);
  if (t == 0.0 || s1 == 0.0 || s2 == 0.0) return 0.0;
  if (c == 0.0) {
    // One coincidence is the smallest resolvable excess.
    return t / (s1 * s2);
  }
  // Categories: both detectors, P1 only, P2 only (rest: none).
  const double p_both = c / t;
  const double p_only1 = (s1 - c) / t;
  const double p_only2 = (s2 - c) / t;
  // d log(alpha) / d count for each category.
  const double g_both = 1.0 / c - 1.0 / s1 - 1.0 / s2;
  const double g_only1 = -1.0 / s1;
  const double g_only2 = -1.0 / s2;
  const double mean = p_both * g_both + p_only1 * g_only1 + p_only2 * g_only2;
  const double second =
      p_both * g_both * g_both + p_only1 * g_only1 * g_only1 + p_only2 * g_only2 * g_only2;
  const double var_log = t * (second - mean * mean);
  return alpha() * std::sqrt(std::max(0.0, var_log));
}

HbtResult simulate_hbt(const SourceModel& source, const DetectorModel& detectors,
                       std::uint64_t n_triggers, std::uint64_t seed) {
  validate(source);
  validate(detectors);
  if (n_triggers < kMinHbtTriggers) {
    throw DomainError(fmt::format("HBT run needs at least {} triggers", kMinHbtTriggers));
  }
  constexpr std::uint64_t block = 1u << 16;
  const double eta = detection_efficiency(source, detectors);

  HbtResult result;
  result.n_triggers = n_triggers;
  std::bernoulli_distribution emits(source.emission_probability);
  std::poisson_distribution<unsigned> background(source.background_mean > 0.0
                                                     ? source.background_mean
                                                     : 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  for (std::uint64_t start = 0; start < n_triggers; start += block) {
    auto engine = rng::make_engine(seed, rng::Stream::hbt_block, start / block);
    const std::uint64_t end = std::min(n_triggers, start + block);
    for (std::uint64_t t = start; t < end; ++t) {
      unsigned photons = emits(engine) ? 1u : 0u;
      if (source.background_mean > 0.0) photons += background(engine);
      bool click1 = false;
      bool click2 = false;
      for (unsigned k = 0; k < photons; ++k) {
        const double r = uniform(engine);
        // [0, eta/2) -> P1, [eta/2, eta) -> P2, rest lost.
        if (r < 0.5 * eta) {
          click1 = true;
        } else if (r < eta) {
          click2 = true;
        }
      }
      result.n1 += click1;
      result.n2 += click2;
      result.n_coincidence += click1 && click2;
    }
  }
  return result;
}

double expected_alpha(const SourceModel& source, const DetectorModel& detectors) {
  validate(source);
  validate(detectors);
  const double eta = detection_efficiency(source, detectors);
  const double p = source.emission_probability;
  const double mu = source.background_mean;
  // Photon-number generating function of Bernoulli(p) + Poisson(mu).
  auto pgf = [&](double z) { return (1.0 - p + p * z) * std::exp(mu * (z - 1.0)); };
  const double none_on_one = pgf(1.0 - 0.5 * eta);
  const double none_on_both = pgf(1.0 - eta);
  const double single = 1.0 - none_on_one;
  const double both = 1.0 - 2.0 * none_on_one + none_on_both;
  if (!(single > 0.0)) throw DegenerateError("source produces no detections");
  return both / (single * single);
}

SourceModel calibrate_background_for_alpha(SourceModel source, const DetectorModel& detectors,
                                           double target_alpha) {
  if (!(target_alpha >= 0.0 && target_alpha < 1.0)) {
    throw DomainError("target alpha must lie in [0, 1)");
  }
  if (!(source.emission_probability > 0.0)) {
    throw DomainError("calibration needs a nonzero signal emission probability");
  }
  auto alpha_at = [&](double mu) {
    SourceModel s = source;
    s.background_mean = mu;
    return expected_alpha(s, detectors);
  };
  double lo = 0.0;
  double hi = 1e-3;
  // alpha grows monotonically with background and tends to 1.
  while (alpha_at(hi) < target_alpha) {
    hi *= 2.0;
    if (hi > 1e6) throw DomainError("target alpha is not reachable");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (alpha_at(mid) < target_alpha ? lo : hi) = mid;
  }
  source.background_mean = 0.5 * (lo + hi);
  return source;
}

}  // namespace afshar
