#include "afshar/wave_optics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "afshar/errors.hpp"
#include "afshar/quadrature.hpp"

namespace afshar {

namespace {

constexpr double kPi = std::numbers::pi;

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

// Full sinc / array-factor / phase product shared by both paths.
// `offset` is the envelope centre shift (+u0 for path 1, -u0 for path 2) and
// `phase_shift` the shift printed in the two phase factors (-u0 resp. +u0).
Complex diffracted(const OpticalSetup& setup, const GratingSpec& grating, double u, double offset,
                   double phase_shift) {
  const double u0 = setup.spatial_frequency_per_m();
  const double q = u + offset;
  const double envelope = sinc(kPi * q * grating.slit_width_m);
  const double array = dirichlet(grating.slit_count, q * grating.period_m);
  const double shifted = u + phase_shift;
  const double static_phase = kPi * (grating.slit_count - 1) * (shifted / (2.0 * u0));
  const double position_phase = -2.0 * kPi * shifted * grating.position_m;
  return std::polar(envelope * array, static_phase + position_phase);
}

const GaussLegendre& aperture_rule() {
  static const GaussLegendre rule(kApertureQuadraturePoints);
  return rule;
}

}  // namespace

OpticalSetup make_setup(double wavelength_m, double refractive_index, double summit_angle_rad) {
  if (!finite_positive(wavelength_m)) {
    throw DomainError(fmt::format("wavelength must be positive, got {}", wavelength_m));
  }
  if (!std::isfinite(refractive_index) || refractive_index <= 1.0) {
    throw DomainError(fmt::format("refractive index must exceed 1, got {}", refractive_index));
  }
  if (!finite_positive(summit_angle_rad)) {
    throw DomainError(fmt::format("summit angle must be positive, got {}", summit_angle_rad));
  }
  OpticalSetup s;
  s.wavelength_m_ = wavelength_m;
  s.refractive_index_ = refractive_index;
  s.summit_angle_rad_ = summit_angle_rad;
  s.deviation_angle_rad_ = (refractive_index - 1.0) * summit_angle_rad;
  s.spatial_frequency_ = s.deviation_angle_rad_ / wavelength_m;
  s.interfringe_m_ = wavelength_m / (2.0 * s.deviation_angle_rad_);
  return s;
}

GratingSpec make_grating(const OpticalSetup& setup, double slit_width_m, int slit_count,
                         double position_m) {
  GratingSpec g{setup.interfringe_m(), slit_width_m, slit_count, position_m};
  validate(g);
  return g;
}

GratingSpec without_grating(const GratingSpec& grating) {
  GratingSpec open = grating;
  open.slit_width_m = grating.period_m;
  return open;
}

void validate(const GratingSpec& g) {
  if (!finite_positive(g.period_m)) {
    throw DomainError(fmt::format("grating period must be positive, got {}", g.period_m));
  }
  if (!std::isfinite(g.slit_width_m) || g.slit_width_m < 0.0 || g.slit_width_m > g.period_m) {
    throw DomainError(fmt::format("slit width {} outside [0, period = {}]", g.slit_width_m,
                                  g.period_m));
  }
  if (g.slit_count < 1) {
    throw DomainError(fmt::format("slit count must be at least 1, got {}", g.slit_count));
  }
  if (!std::isfinite(g.position_m)) throw DomainError("grating position must be finite");
}

void check_period(const OpticalSetup& setup, const GratingSpec& grating, PeriodCheck check) {
  validate(grating);
  if (check == PeriodCheck::allow_mismatch) return;
  const double lambda = setup.interfringe_m();
  if (std::abs(grating.period_m - lambda) > kPeriodTolerance * lambda) {
    throw GeometryMismatch(fmt::format(
        "grating period {} m does not match the interfringe {} m", grating.period_m, lambda));
  }
}

double sinc(double z) {
  if (z == 0.0) return 1.0;
  return std::sin(z) / z;
}

double dirichlet(int slit_count, double q) {
  const double m = std::nearbyint(q);
  const double r = q - m;
  // sin(N pi (m + r)) / sin(pi (m + r)) = (-1)^{m (N - 1)} sin(N pi r) / sin(pi r)
  const bool odd_m = std::fmod(std::abs(m), 2.0) == 1.0;
  const double sign = (odd_m && (slit_count - 1) % 2 != 0) ? -1.0 : 1.0;
  if (std::abs(r) < kSingularityWindow) return sign * slit_count;
  return sign * std::sin(slit_count * kPi * r) / std::sin(kPi * r);
}

double detector_direction(const OpticalSetup& setup, Detector detector) {
  const double u0 = setup.spatial_frequency_per_m();
  return detector == Detector::p1 ? -u0 : u0;
}

Complex amplitude_path1(const OpticalSetup& setup, const GratingSpec& grating, double u) {
  const double u0 = setup.spatial_frequency_per_m();
  return diffracted(setup, grating, u, u0, -u0);
}

Complex amplitude_path2(const OpticalSetup& setup, const GratingSpec& grating, double u) {
  const double u0 = setup.spatial_frequency_per_m();
  return diffracted(setup, grating, u, -u0, u0);
}

Complex path_amplitude(const OpticalSetup& setup, const GratingSpec& grating, Path path, double u) {
  return path == Path::one ? amplitude_path1(setup, grating, u) : amplitude_path2(setup, grating, u);
}

double intensity_at(const OpticalSetup& setup, const GratingSpec& grating, double u) {
  return intensity_at(setup, grating, u, Illumination::both_paths);
}

Illumination blocking(Path blocked) {
  return blocked == Path::one ? Illumination::path2_only : Illumination::path1_only;
}

double intensity_at(const OpticalSetup& setup, const GratingSpec& grating, double u,
                    Illumination illumination) {
  Complex field{};
  if (illumination != Illumination::path2_only) field += amplitude_path1(setup, grating, u);
  if (illumination != Illumination::path1_only) field += amplitude_path2(setup, grating, u);
  return std::norm(field);
}

double detector_intensity(const OpticalSetup& setup, const GratingSpec& grating, Detector detector,
                          Illumination illumination, DetectorAperture aperture) {
  const double centre = detector_direction(setup, detector);
  const double h = aperture.half_width_per_m;
  if (!std::isfinite(h) || h < 0.0) throw DomainError("detector half-width must be >= 0");
  if (h == 0.0) return intensity_at(setup, grating, centre, illumination);
  const double integral = aperture_rule().integrate(
      [&](double u) { return intensity_at(setup, grating, u, illumination); }, centre - h,
      centre + h);
  return integral / (2.0 * h);
}

namespace {

double sinc_at_cross_order(const OpticalSetup& setup, const GratingSpec& grating,
                           PeriodCheck check) {
  check_period(setup, grating, check);
  return sinc(2.0 * kPi * setup.spatial_frequency_per_m() * grating.slit_width_m);
}

}  // namespace

double analytic_visibility(const OpticalSetup& setup, const GratingSpec& grating,
                           PeriodCheck check) {
  const double s = sinc_at_cross_order(setup, grating, check);
  return 2.0 * s / (1.0 + s * s);
}

double analytic_distinguishability(const OpticalSetup& setup, const GratingSpec& grating,
                                   PeriodCheck check) {
  const double s2 = std::pow(sinc_at_cross_order(setup, grating, check), 2);
  return (1.0 - s2) / (1.0 + s2);
}

Distinguishability probability_distinguishability(double p1_path1, double p2_path1,
                                                  double p1_path2, double p2_path2) {
  for (double p : {p1_path1, p2_path1, p1_path2, p2_path2}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DomainError(fmt::format("probability {} outside [0, 1]", p));
    }
  }
  constexpr double slack = 1e-12;
  if (p1_path1 + p2_path1 > 1.0 + slack || p1_path2 + p2_path2 > 1.0 + slack) {
    throw DomainError("detection probabilities of one path sum above 1");
  }
  Distinguishability d;
  d.d1 = std::abs(p1_path1 - p2_path1);
  d.d2 = std::abs(p1_path2 - p2_path2);
  d.total = d.d1 + d.d2;
  return d;
}

Distinguishability probability_distinguishability(const DetectorProbabilities& p) {
  return probability_distinguishability(p.p1_path1, p.p2_path1, p.p1_path2, p.p2_path2);
}

DetectorProbabilities detector_probabilities(double path1_at_p1, double path1_at_p2,
                                             double path2_at_p1, double path2_at_p2) {
  const double total1 = path1_at_p1 + path1_at_p2;
  const double total2 = path2_at_p1 + path2_at_p2;
  if (!(total1 > 0.0) || !(total2 > 0.0)) {
    throw DegenerateError("a path delivers no intensity to either detector");
  }
  return {0.5 * path1_at_p1 / total1, 0.5 * path1_at_p2 / total1, 0.5 * path2_at_p1 / total2,
          0.5 * path2_at_p2 / total2};
}

DetectorProbabilities detector_probabilities(const OpticalSetup& setup, const GratingSpec& grating,
                                             DetectorAperture aperture) {
  auto at = [&](Detector det, Illumination ill) {
    return detector_intensity(setup, grating, det, ill, aperture);
  };
  return detector_probabilities(
      at(Detector::p1, Illumination::path1_only), at(Detector::p2, Illumination::path1_only),
      at(Detector::p1, Illumination::path2_only), at(Detector::p2, Illumination::path2_only));
}

double ComplementarityRecord::sum_of_squares() const {
  return visibility * visibility + distinguishability * distinguishability;
}

std::optional<double> ComplementarityRecord::sum_of_squares_err() const {
  if (!visibility_err || !distinguishability_err) return std::nullopt;
  return std::hypot(2.0 * visibility * *visibility_err,
                    2.0 * distinguishability * *distinguishability_err);
}

double ComplementarityRecord::visibility_clamped() const {
  return std::clamp(visibility, 0.0, 1.0);
}

double ComplementarityRecord::distinguishability_clamped() const {
  return std::clamp(distinguishability, 0.0, 1.0);
}

ComplementarityRecord analytic_record(const OpticalSetup& setup, const GratingSpec& grating,
                                      PeriodCheck check) {
  ComplementarityRecord r;
  r.visibility = analytic_visibility(setup, grating, check);
  r.distinguishability = analytic_distinguishability(setup, grating, check);
  // Both paths are symmetric, so each carries half of D.
  r.d1 = 0.5 * r.distinguishability;
  r.d2 = 0.5 * r.distinguishability;
  return r;
}

}  // namespace afshar
