#include "afshar/experiment.hpp"

#include <cmath>
#include <future>
#include <limits>

#include <fmt/format.h>

#include "afshar/errors.hpp"
#include "afshar/rng.hpp"

namespace afshar {

std::string_view to_string(CampaignMode mode) {
  switch (mode) {
    case CampaignMode::analytic:
      return "analytic";
    case CampaignMode::monte_carlo:
      return "monte_carlo";
    case CampaignMode::both:
      return "both";
  }
  return "both";
}

CampaignMode parse_campaign_mode(std::string_view text) {
  if (text == "analytic") return CampaignMode::analytic;
  if (text == "monte_carlo") return CampaignMode::monte_carlo;
  if (text == "both") return CampaignMode::both;
  throw ConfigError(fmt::format("unknown campaign mode '{}'", text));
}

int scan_points(const ScanProtocol& protocol, double interfringe_m) {
  if (protocol.n_points > 0) return protocol.n_points;
  return static_cast<int>(std::ceil(kDefaultScanPeriods * interfringe_m / protocol.x_step_m));
}

const ComplementarityRecord& WidthReport::primary() const {
  return estimated ? *estimated : analytic;
}

GratingSpec campaign_grating(const Campaign& campaign, double slit_width_m) {
  GratingSpec g;
  g.period_m = campaign.period_override_m.value_or(campaign.setup.interfringe_m());
  g.slit_width_m = slit_width_m;
  g.slit_count = campaign.slit_count;
  g.position_m = 0.0;
  validate(g);
  return g;
}

namespace {

WidthReport run_width(const Campaign& campaign, std::size_t index) {
  const double a = campaign.slit_widths_m[index];
  const auto check =
      campaign.period_override_m ? PeriodCheck::allow_mismatch : PeriodCheck::strict;
  const GratingSpec grating = campaign_grating(campaign, a);

  WidthReport report;
  report.slit_width_m = a;
  report.seed = rng::derive_seed(campaign.seed, rng::Stream::campaign_width, index);
  report.analytic = analytic_record(campaign.setup, grating, check);
  if (campaign.mode == CampaignMode::analytic) return report;

  const ScanProtocol& protocol = campaign.protocol;
  ScanRequest request;
  request.x_start_m = protocol.x_start_m;
  request.x_step_m = protocol.x_step_m;
  request.n_points = scan_points(protocol, grating.period_m);
  request.bin_time_s = protocol.bin_time_s;
  request.dark_run_factor = protocol.dark_run_factor;
  request.seed = report.seed;

  const auto& setup = campaign.setup;
  report.scan = simulate_scan(setup, grating, campaign.source, campaign.detectors, request);
  FitOptions fit_options;
  fit_options.max_reduced_chi2 = protocol.max_reduced_chi2;
  report.fit = fit_visibility(*report.scan, grating.period_m, fit_options);

  report.path2_blocked =
      simulate_blocked_run(setup, grating, Path::two, campaign.source, campaign.detectors,
                           protocol.blocked_bin_time_s, report.seed);
  report.path1_blocked =
      simulate_blocked_run(setup, grating, Path::one, campaign.source, campaign.detectors,
                           protocol.blocked_bin_time_s, report.seed);

  const double dark_hz = report.scan->dark_estimate_hz;
  const double t = protocol.blocked_bin_time_s;
  const double dark_var =
      report.scan->dark_run_time_s > 0.0 ? dark_hz / report.scan->dark_run_time_s * t * t : 0.0;
  const auto est = estimate_distinguishability(
      NetCounts::from(*report.path2_blocked).minus_dark(dark_hz * t, dark_var),
      NetCounts::from(*report.path1_blocked).minus_dark(dark_hz * t, dark_var));

  ComplementarityRecord r;
  r.visibility = report.fit->visibility;
  r.visibility_err = report.fit->visibility_err;
  r.distinguishability = est.d;
  r.distinguishability_err = est.d_err;
  r.d1 = est.d1;
  r.d1_err = est.d1_err;
  r.d2 = est.d2;
  r.d2_err = est.d2_err;
  report.estimated = r;
  return report;
}

}  // namespace

Aggregate aggregate_sum_of_squares(const std::vector<WidthReport>& widths) {
  Aggregate agg;
  agg.count = widths.size();
  if (widths.empty()) return agg;
  double sum = 0.0;
  for (const auto& w : widths) sum += w.primary().sum_of_squares();
  agg.mean_sum_sq = sum / static_cast<double>(widths.size());
  if (widths.size() == 1) {
    agg.sem_sum_sq = widths.front().primary().sum_of_squares_err().value_or(0.0);
    return agg;
  }
  double ss = 0.0;
  for (const auto& w : widths) ss += std::pow(w.primary().sum_of_squares() - agg.mean_sum_sq, 2);
  const double n = static_cast<double>(widths.size());
  agg.sem_sum_sq = std::sqrt(ss / (n - 1.0) / n);
  return agg;
}

CampaignReport run_campaign(const Campaign& campaign) {
  if (campaign.slit_widths_m.empty()) throw DomainError("campaign has no slit widths");
  validate(campaign.source);
  validate(campaign.detectors);

  std::vector<std::future<WidthReport>> jobs;
  jobs.reserve(campaign.slit_widths_m.size());
  for (std::size_t i = 0; i < campaign.slit_widths_m.size(); ++i) {
    jobs.push_back(std::async(std::launch::async, [&campaign, i] {
      try {
        return run_width(campaign, i);
      } catch (const std::exception& e) {
        throw CampaignError(
            fmt::format("slit width {:.6g} um: {}", campaign.slit_widths_m[i] * 1e6, e.what()));
      }
    }));
  }

  CampaignReport report;
  report.mode = campaign.mode;
  report.seed = campaign.seed;
  for (auto& job : jobs) report.widths.push_back(job.get());
  report.aggregate = aggregate_sum_of_squares(report.widths);
  return report;
}

IntensityMap generate_intensity_map(const OpticalSetup& setup, double slit_width_m, int n_u,
                                    int n_x, int slit_count) {
  if (n_u < kMinMapAxisPoints || n_x < kMinMapAxisPoints) {
    throw DomainError(fmt::format("map axes need at least {} points", kMinMapAxisPoints));
  }
  GratingSpec grating = make_grating(setup, slit_width_m, slit_count);
  const double u0 = setup.spatial_frequency_per_m();
  const double period = setup.interfringe_m();

  IntensityMap map;
  map.slit_width_m = slit_width_m;
  map.u_per_m.resize(static_cast<std::size_t>(n_u));
  map.x_m.resize(static_cast<std::size_t>(n_x));
  for (int i = 0; i < n_u; ++i) map.u_per_m[i] = -3.0 * u0 + 6.0 * u0 * i / (n_u - 1);
  for (int j = 0; j < n_x; ++j) map.x_m[j] = 2.0 * period * j / (n_x - 1);

  map.values.resize(map.n_u() * map.n_x());
  for (std::size_t ix = 0; ix < map.n_x(); ++ix) {
    grating.position_m = map.x_m[ix];
    for (std::size_t iu = 0; iu < map.n_u(); ++iu) {
      map.values[ix * map.n_u() + iu] = intensity_at(setup, grating, map.u_per_m[iu]);
    }
  }
  return map;
}

ComplementarityCheck complementarity_check(const ComplementarityRecord& record,
                                           double z_threshold) {
  ComplementarityCheck check;
  check.sum_of_squares = record.sum_of_squares();
  check.sum_err = record.sum_of_squares_err().value_or(0.0);
  check.margin = 1.0 - check.sum_of_squares;
  const double excess = check.sum_of_squares - 1.0;
  if (check.sum_err > 0.0) {
    check.z_score = excess / check.sum_err;
  } else if (std::abs(excess) <= 1e-12) {
    check.z_score = 0.0;
  } else {
    check.z_score = std::copysign(std::numeric_limits<double>::infinity(), excess);
  }
  check.violation = check.z_score > z_threshold;
  return check;
}

}  // namespace afshar
