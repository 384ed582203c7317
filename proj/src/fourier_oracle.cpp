#include "afshar/fourier_oracle.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "afshar/errors.hpp"
#include "afshar/quadrature.hpp"

namespace afshar {

std::vector<Slit> aperture_slits(const GratingSpec& grating) {
  validate(grating);
  std::vector<Slit> slits;
  slits.reserve(static_cast<std::size_t>(grating.slit_count));
  const double half = 0.5 * grating.slit_width_m;
  for (int k = 0; k < grating.slit_count; ++k) {
    const double centre = grating.position_m + k * grating.period_m;
    slits.push_back({centre - half, centre + half});
  }
  return slits;
}

double transmission(const GratingSpec& grating, double x_m) {
  const double local = x_m - grating.position_m;
  const double k = std::nearbyint(local / grating.period_m);
  if (k < 0.0 || k >= grating.slit_count) return 0.0;
  const double offset = local - k * grating.period_m;
  const double half = 0.5 * grating.slit_width_m;
  return (offset >= -half && offset < half) ? 1.0 : 0.0;
}

std::vector<Complex> numeric_oracle_amplitude(const OpticalSetup& setup, const GratingSpec& grating,
                                              Path path, std::span<const double> u_grid,
                                              OracleOptions options) {
  if (options.samples_per_slit < kMinSamplesPerSlit) {
    throw ResolutionError(fmt::format("oracle needs at least {} samples per slit, got {}",
                                      kMinSamplesPerSlit, options.samples_per_slit));
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double tilt = path == Path::one ? setup.spatial_frequency_per_m()
                                        : -setup.spatial_frequency_per_m();
  const auto slits = aperture_slits(grating);
  const double width = grating.slit_width_m;
  const GaussLegendre rule(options.samples_per_slit);

  std::vector<Complex> out;
  out.reserve(u_grid.size());
  for (double u : u_grid) {
    if (!std::isfinite(u)) throw DomainError("oracle spatial frequency must be finite");
    auto field = [&](double x) {
      const Complex incident = std::polar(1.0, two_pi * tilt * x);
      const Complex kernel = std::polar(1.0, two_pi * u * x);
      return transmission(grating, x) * incident * kernel;
    };
    Complex sum{};
    for (const Slit& s : slits) {
      if (width == 0.0) {
        // Dirac-comb limit: unit weight at each slit centre.
        sum += std::polar(1.0, two_pi * (tilt + u) * s.begin_m);
      } else {
        sum += rule.integrate(field, s.begin_m, s.end_m);
      }
    }
    out.push_back(width == 0.0 ? sum : sum / width);
  }
  return out;
}

std::vector<double> numeric_oracle_intensity(const OpticalSetup& setup, const GratingSpec& grating,
                                             std::span<const double> u_grid,
                                             OracleOptions options) {
  const auto s1 = numeric_oracle_amplitude(setup, grating, Path::one, u_grid, options);
  const auto s2 = numeric_oracle_amplitude(setup, grating, Path::two, u_grid, options);
  std::vector<double> out(u_grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(s1[i] + s2[i]);
  return out;
}

}  // namespace afshar
