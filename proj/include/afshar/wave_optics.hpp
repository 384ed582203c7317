#pragma once

#include <complex>
#include <optional>

// Fraunhofer wave optics of a Fresnel-biprism two-path interferometer with a
// transmission grating placed in the overlap region.
//
// Conventions:
//   * lengths in metres, angles in radians, spatial frequencies u = alpha/lambda
//     in 1/m;
//   * amplitudes are in units of the incident amplitude (S0 = 1), so the
//     zero-order peak of either path has modulus N;
//   * detector P1 looks along u = -u0, detector P2 along u = +u0.
namespace afshar {

using Complex = std::complex<double>;

enum class Path { one = 1, two = 2 };
enum class Detector { p1 = 1, p2 = 2 };

class OpticalSetup {
 public:
  double wavelength_m() const { return wavelength_m_; }
  double refractive_index() const { return refractive_index_; }
  double summit_angle_rad() const { return summit_angle_rad_; }
  // alpha0 = (n - 1) beta
  double deviation_angle_rad() const { return deviation_angle_rad_; }
  // u0 = alpha0 / lambda
  double spatial_frequency_per_m() const { return spatial_frequency_; }
  // Lambda = lambda / (2 alpha0) = 1 / (2 u0)
  double interfringe_m() const { return interfringe_m_; }

  bool operator==(const OpticalSetup&) const = default;

 private:
  friend OpticalSetup make_setup(double, double, double);
  OpticalSetup() = default;

  double wavelength_m_ = 0.0;
  double refractive_index_ = 0.0;
  double summit_angle_rad_ = 0.0;
  double deviation_angle_rad_ = 0.0;
  double spatial_frequency_ = 0.0;
  double interfringe_m_ = 0.0;
};

// Throws DomainError unless wavelength > 0, n > 1 and beta > 0.
OpticalSetup make_setup(double wavelength_m, double refractive_index, double summit_angle_rad);

struct GratingSpec {
  double period_m = 0.0;
  double slit_width_m = 0.0;  // a == period means "no grating", a == 0 is a Dirac comb
  int slit_count = 20;
  double position_m = 0.0;    // lateral offset x along the fringe axis

  bool operator==(const GratingSpec&) const = default;
};

// Grating whose period equals the setup interfringe.
GratingSpec make_grating(const OpticalSetup& setup, double slit_width_m, int slit_count = 20,
                         double position_m = 0.0);

// Same grating with the slits opened to the full period.
GratingSpec without_grating(const GratingSpec& grating);

void validate(const GratingSpec& grating);

enum class PeriodCheck { strict, allow_mismatch };

inline constexpr double kPeriodTolerance = 1e-9;

// Throws GeometryMismatch when the grating period differs from the interfringe
// by more than kPeriodTolerance (relative), unless the check is overridden.
void check_period(const OpticalSetup& setup, const GratingSpec& grating,
                  PeriodCheck check = PeriodCheck::strict);

// sin(z)/z with sinc(0) = 1.
double sinc(double z);

inline constexpr double kSingularityWindow = 1e-9;

// N-slit array factor sin(N pi q) / sin(pi q). Within kSingularityWindow of an
// integer m the analytic limit N cos(N pi m) / cos(pi m) is returned.
double dirichlet(int slit_count, double q);

double detector_direction(const OpticalSetup& setup, Detector detector);

// Closed-form diffracted amplitudes of the two paths.
Complex amplitude_path1(const OpticalSetup& setup, const GratingSpec& grating, double u);
Complex amplitude_path2(const OpticalSetup& setup, const GratingSpec& grating, double u);
Complex path_amplitude(const OpticalSetup& setup, const GratingSpec& grating, Path path, double u);

// |S1(u) + S2(u)|^2
double intensity_at(const OpticalSetup& setup, const GratingSpec& grating, double u);

enum class Illumination { both_paths, path1_only, path2_only };

// Illumination with the given path blocked.
Illumination blocking(Path blocked);

// Intensity with a chosen set of paths open.
double intensity_at(const OpticalSetup& setup, const GratingSpec& grating, double u,
                    Illumination illumination);

// Finite detector acceptance. A zero half-width is a point detector.
struct DetectorAperture {
  double half_width_per_m = 0.0;
};

inline constexpr int kApertureQuadraturePoints = 16;

// Mean intensity over [u - h, u + h] (16-point Gauss-Legendre), or the point
// value when h == 0.
double detector_intensity(const OpticalSetup& setup, const GratingSpec& grating, Detector detector,
                          Illumination illumination = Illumination::both_paths,
                          DetectorAperture aperture = {});

// V = 2 sinc(2 pi u0 a) / (1 + sinc^2(2 pi u0 a))
double analytic_visibility(const OpticalSetup& setup, const GratingSpec& grating,
                           PeriodCheck check = PeriodCheck::strict);

// D = (1 - sinc^2(2 pi u0 a)) / (1 + sinc^2(2 pi u0 a))
double analytic_distinguishability(const OpticalSetup& setup, const GratingSpec& grating,
                                   PeriodCheck check = PeriodCheck::strict);

// p(P_i, path j): probability that the photon took path j and fired detector i.
struct DetectorProbabilities {
  double p1_path1 = 0.0;
  double p2_path1 = 0.0;
  double p1_path2 = 0.0;
  double p2_path2 = 0.0;
};

// Which-path contributions D1 = |p(P1,1) - p(P2,1)|, D2 = |p(P1,2) - p(P2,2)|.
struct Distinguishability {
  double d1 = 0.0;
  double d2 = 0.0;
  double total = 0.0;
};

Distinguishability probability_distinguishability(double p1_path1, double p2_path1,
                                                  double p1_path2, double p2_path2);
Distinguishability probability_distinguishability(const DetectorProbabilities& p);

// Path probabilities from single-path intensities in the two detector
// directions. Each path carries probability 1/2, split between P1 and P2 in
// proportion to the intensity seen by each detector.
DetectorProbabilities detector_probabilities(double path1_at_p1, double path1_at_p2,
                                             double path2_at_p1, double path2_at_p2);
DetectorProbabilities detector_probabilities(const OpticalSetup& setup, const GratingSpec& grating,
                                             DetectorAperture aperture = {});

struct ComplementarityRecord {
  double visibility = 0.0;
  double distinguishability = 0.0;
  std::optional<double> d1;
  std::optional<double> d2;
  std::optional<double> visibility_err;
  std::optional<double> distinguishability_err;
  std::optional<double> d1_err;
  std::optional<double> d2_err;

  double sum_of_squares() const;
  // Propagated from the V and D errors when both are known.
  std::optional<double> sum_of_squares_err() const;

  // Reporting-only views restricted to [0, 1]; the raw fields are never altered.
  double visibility_clamped() const;
  double distinguishability_clamped() const;
};

ComplementarityRecord analytic_record(const OpticalSetup& setup, const GratingSpec& grating,
                                      PeriodCheck check = PeriodCheck::strict);

}  // namespace afshar
