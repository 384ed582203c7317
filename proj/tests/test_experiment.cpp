#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "afshar/errors.hpp"
#include "afshar/experiment.hpp"
#include "test_support.hpp"

using namespace afshar;
using afshar::test::um;

namespace {

Campaign reference_campaign(CampaignMode mode, std::vector<double> widths = {20 * um, 50 * um, 70 * um, 80 * um}) {
  return Campaign{.setup = test::reference_setup(),
                  .slit_widths_m = std::move(widths),
                  .slit_count = 20,
                  .period_override_m = std::nullopt,
                  .protocol = {},
                  .source = {},
                  .detectors = {},
                  .seed = 1,
                  .mode = mode};
}

std::pair<double, double> column_extremes(const IntensityMap& map, std::size_t iu) {
  double lo = map.at(0, iu);
  double hi = lo;
  for (std::size_t ix = 0; ix < map.n_x(); ++ix) {
    lo = std::min(lo, map.at(ix, iu));
    hi = std::max(hi, map.at(ix, iu));
  }
  return {lo, hi};
}

}  // namespace

TEST_CASE("campaign mode names") {
  for (auto m : {CampaignMode::analytic, CampaignMode::monte_carlo, CampaignMode::both}) {
    CHECK(parse_campaign_mode(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_campaign_mode("sometimes"), ConfigError);
}

TEST_CASE("default scan covers 2.5 interfringes") {
  ScanProtocol p;
  CHECK(scan_points(p, test::kReferenceInterfringe) == 55);
  p.n_points = 12;
  CHECK(scan_points(p, test::kReferenceInterfringe) == 12);
}

TEST_CASE("analytic campaign satisfies V^2 + D^2 = 1") {
  const auto report = run_campaign(reference_campaign(CampaignMode::analytic));
  REQUIRE(report.widths.size() == 4);
  for (const auto& w : report.widths) {
    CHECK(!w.estimated);
    CHECK(std::abs(w.primary().sum_of_squares() - 1.0) < 1e-12);
  }
  CHECK(report.aggregate.count == 4);
  CHECK(std::abs(report.aggregate.mean_sum_sq - 1.0) < 1e-12);
  CHECK(report.aggregate.sem_sum_sq < 1e-12);
}

TEST_CASE("Monte Carlo campaign agrees with the closed form") {
  const auto report = run_campaign(reference_campaign(CampaignMode::both));
  for (const auto& w : report.widths) {
    REQUIRE(w.estimated);
    REQUIRE(w.scan);
    REQUIRE(w.fit);
    const auto& e = *w.estimated;
    const double v2_err = 2.0 * std::abs(e.visibility) * *e.visibility_err;
    const double d2_err = 2.0 * std::abs(e.distinguishability) * *e.distinguishability_err;
    CHECK(std::abs(e.visibility * e.visibility - w.analytic.visibility * w.analytic.visibility) <
          3.0 * v2_err);
    CHECK(std::abs(e.distinguishability * e.distinguishability -
                   w.analytic.distinguishability * w.analytic.distinguishability) < 3.0 * d2_err);
    CHECK(!complementarity_check(e).violation);
  }
  CHECK(report.aggregate.mean_sum_sq >= 0.93);
  CHECK(report.aggregate.mean_sum_sq <= 1.03);
}

TEST_CASE("campaign reports are deterministic and seed-sensitive") {
  auto c = reference_campaign(CampaignMode::monte_carlo, {50 * um, 80 * um});
  const auto a = run_campaign(c);
  const auto b = run_campaign(c);
  for (std::size_t i = 0; i < a.widths.size(); ++i) {
    CHECK(a.widths[i].scan->counts_p1 == b.widths[i].scan->counts_p1);
    CHECK(a.widths[i].estimated->visibility == b.widths[i].estimated->visibility);
    CHECK(a.widths[i].estimated->distinguishability == b.widths[i].estimated->distinguishability);
  }
  CHECK(a.widths[0].seed != a.widths[1].seed);
  c.seed = 2;
  CHECK(run_campaign(c).widths[0].scan->counts_p1 != a.widths[0].scan->counts_p1);
}

TEST_CASE("slit as wide as the period: no fringe, full which-path information") {
  const auto report = run_campaign(reference_campaign(CampaignMode::both, {test::kReferenceInterfringe}));
  const auto& w = report.widths.front();
  CHECK(std::abs(w.analytic.visibility) < 1e-12);
  CHECK(w.analytic.distinguishability == doctest::Approx(1.0).epsilon(1e-12));
  const auto& e = *w.estimated;
  CHECK(std::abs(e.visibility) < 3.0 * *e.visibility_err + 1e-12);
  CHECK(std::abs(e.distinguishability - 1.0) < 3.0 * *e.distinguishability_err + 1e-3);
}

TEST_CASE("campaign failures name the slit width") {
  auto c = reference_campaign(CampaignMode::analytic, {20 * um, 200 * um});
  try {
    run_campaign(c);
    FAIL("expected CampaignError");
  } catch (const CampaignError& e) {
    CHECK(std::string(e.what()).find("200") != std::string::npos);
  }
}

TEST_CASE("mismatched grating period requires the override") {
  auto c = reference_campaign(CampaignMode::analytic, {20 * um});
  c.period_override_m = 90 * um;
  const auto report = run_campaign(c);
  CHECK(report.widths.front().analytic.visibility > 0.0);
  CHECK(campaign_grating(c, 20 * um).period_m == 90 * um);
}

TEST_CASE("aggregate statistics") {
  std::vector<WidthReport> widths(2);
  widths[0].analytic = {.visibility = 0.6, .distinguishability = 0.8};
  widths[1].analytic = {.visibility = 0.0, .distinguishability = 0.9};
  const auto agg = aggregate_sum_of_squares(widths);
  CHECK(agg.count == 2);
  CHECK(agg.mean_sum_sq == doctest::Approx((1.0 + 0.81) / 2.0));
  CHECK(agg.sem_sum_sq == doctest::Approx(0.19 / 2.0));

  std::vector<WidthReport> one(1);
  one[0].analytic = {.visibility = 0.6, .distinguishability = 0.8};
  one[0].estimated = ComplementarityRecord{.visibility = 0.6,
                                           .distinguishability = 0.8,
                                           .visibility_err = 0.01,
                                           .distinguishability_err = 0.0};
  const auto single = aggregate_sum_of_squares(one);
  CHECK(single.sem_sum_sq == doctest::Approx(*one[0].estimated->sum_of_squares_err()));
}

TEST_CASE("complementarity check examples") {
  const auto ideal = complementarity_check({.visibility = 1.0, .distinguishability = 0.0});
  CHECK(!ideal.violation);
  CHECK(ideal.margin == doctest::Approx(0.0));
  const auto pythagorean = complementarity_check({.visibility = 0.6, .distinguishability = 0.8});
  CHECK(!pythagorean.violation);
  const auto excess = complementarity_check({.visibility = 0.9, .distinguishability = 0.9});
  CHECK(excess.violation);
  CHECK(excess.margin == doctest::Approx(1.0 - 1.62));
  const auto noisy = complementarity_check({.visibility = 0.9,
                                            .distinguishability = 0.9,
                                            .visibility_err = 0.2,
                                            .distinguishability_err = 0.2});
  CHECK(!noisy.violation);
  CHECK(noisy.z_score > 0.0);
}

TEST_CASE("intensity map axes and fringe contrast") {
  const auto s = test::reference_setup();
  const double u0 = s.spatial_frequency_per_m();
  const auto map = generate_intensity_map(s, 80 * um, 31, 65);
  REQUIRE(map.n_u() == 31);
  REQUIRE(map.n_x() == 65);
  CHECK(map.u_per_m.front() == doctest::Approx(-3.0 * u0));
  CHECK(map.u_per_m[20] == doctest::Approx(u0));
  CHECK(map.x_m.back() == doctest::Approx(2.0 * s.interfringe_m()));
  CHECK(map.x_m[16] == doctest::Approx(s.interfringe_m() / 2.0));
  const auto g = make_grating(s, 80 * um);
  for (std::size_t iu : {std::size_t{10}, std::size_t{20}}) {
    const auto [lo, hi] = column_extremes(map, iu);
    CHECK(std::abs((hi - lo) / (hi + lo) - analytic_visibility(s, g)) < 1e-6);
  }
}

TEST_CASE("Dirac comb map is fully modulated at the detectors") {
  const auto s = test::reference_setup();
  const auto map = generate_intensity_map(s, 0.0, 31, 65);
  const auto [lo, hi] = column_extremes(map, 10);
  CHECK(hi == doctest::Approx(4.0 * 400.0));
  CHECK(lo < 1e-9 * hi);
}

TEST_CASE("intensity map input validation") {
  const auto s = test::reference_setup();
  CHECK_THROWS_AS(generate_intensity_map(s, 50 * um, kMinMapAxisPoints - 1, 64), DomainError);
  CHECK_THROWS_AS(generate_intensity_map(s, -1 * um, 64, 64), DomainError);
}
