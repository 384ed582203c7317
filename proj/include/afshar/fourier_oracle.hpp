#pragma once

#include <span>
#include <vector>

#include "afshar/wave_optics.hpp"

// Brute-force far-field of the grating, built from the real-space aperture
// rather than from the closed-form sinc/array-factor product. Used to check
// the closed-form amplitudes.
namespace afshar {

// One transmitting slit [begin, end) of the aperture t(x' - x).
struct Slit {
  double begin_m = 0.0;
  double end_m = 0.0;
};

// Slit k is centred on x + k * period, k = 0 .. N-1.
std::vector<Slit> aperture_slits(const GratingSpec& grating);

// Amplitude transmission t(x' - x): 1 inside a slit, 0 elsewhere.
double transmission(const GratingSpec& grating, double x_m);

inline constexpr int kMinSamplesPerSlit = 32;

struct OracleOptions {
  int samples_per_slit = 64;  // Gauss-Legendre nodes per slit
};

// Fraunhofer integral  (1/a) * integral t(x' - x) exp(+-2 i pi u0 x') exp(2 i pi u x') dx'
// by quadrature over each slit (path 1 takes the + tilt so that its zero order
// leaves along u = -u0). Dividing by the slit width a puts the zero-order peak
// at N, the same normalisation as the closed form. For a == 0 each slit acts
// as a unit Dirac peak.
//
// Throws ResolutionError when samples_per_slit < kMinSamplesPerSlit.
std::vector<Complex> numeric_oracle_amplitude(const OpticalSetup& setup, const GratingSpec& grating,
                                              Path path, std::span<const double> u_grid,
                                              OracleOptions options = {});

// |O1(u) + O2(u)|^2 from the oracle amplitudes.
std::vector<double> numeric_oracle_intensity(const OpticalSetup& setup, const GratingSpec& grating,
                                             std::span<const double> u_grid,
                                             OracleOptions options = {});

}  // namespace afshar
