#include "afshar/export.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace afshar::io {

std::string format_number(double value) { return fmt::format("{:.9g}", value); }

void write_scan_csv(std::ostream& out, const ScanResult& scan) {
  out << kScanCsvHeader << '\n';
  for (std::size_t i = 0; i < scan.positions_m.size(); ++i) {
    out << format_number(scan.positions_m[i]) << ',' << scan.counts_p1[i] << ','
        << scan.counts_p2[i] << ',' << format_number(scan.expected_rate_p1_hz[i]) << ','
        << format_number(scan.expected_rate_p2_hz[i]) << '\n';
  }
}

void write_analytic_csv(std::ostream& out, const OpticalSetup&,
                        const std::vector<ComplementarityRecord>& records,
                        const std::vector<double>& slit_widths_m) {
  out << kAnalyticCsvHeader << '\n';
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    out << format_number(slit_widths_m[i]) << ',' << format_number(r.visibility) << ','
        << format_number(r.distinguishability) << ','
        << format_number(r.visibility * r.visibility) << ','
        << format_number(r.distinguishability * r.distinguishability) << ','
        << format_number(r.sum_of_squares()) << '\n';
  }
}

void write_series_csv(std::ostream& out, const CampaignReport& report) {
  out << kSeriesCsvHeader << '\n';
  for (const auto& w : report.widths) {
    const auto& r = w.primary();
    const double v_err = 2.0 * r.visibility * r.visibility_err.value_or(0.0);
    const double d_err = 2.0 * r.distinguishability * r.distinguishability_err.value_or(0.0);
    out << format_number(w.slit_width_m) << ',' << format_number(r.visibility * r.visibility)
        << ',' << format_number(v_err) << ','
        << format_number(r.distinguishability * r.distinguishability) << ','
        << format_number(d_err) << ',' << format_number(r.sum_of_squares()) << ','
        << format_number(r.sum_of_squares_err().value_or(0.0)) << ','
        << format_number(w.analytic.visibility * w.analytic.visibility) << ','
        << format_number(w.analytic.distinguishability * w.analytic.distinguishability) << '\n';
  }
}

void write_map_csv(std::ostream& out, const IntensityMap& map) {
  out << kMapCornerCell;
  for (double u : map.u_per_m) out << ',' << format_number(u);
  out << '\n';
  for (std::size_t ix = 0; ix < map.n_x(); ++ix) {
    out << format_number(map.x_m[ix]);
    for (std::size_t iu = 0; iu < map.n_u(); ++iu) out << ',' << format_number(map.at(ix, iu));
    out << '\n';
  }
}

void write_scan_plot_csv(std::ostream& out, const ScanResult& scan, double period_m,
                         const VisibilityFit& fit_p1, const VisibilityFit& fit_p2) {
  const double k = 2.0 * std::numbers::pi / period_m;
  const double dark = scan.dark_estimate_hz * scan.bin_time_s;
  auto model = [k](const VisibilityFit& f, double x) {
    return f.offset + f.amplitude * std::cos(k * x + f.phase_rad);
  };
  out << kScanPlotCsvHeader << '\n';
  for (std::size_t i = 0; i < scan.positions_m.size(); ++i) {
    const double x = scan.positions_m[i];
    out << format_number(x) << ',' << format_number(static_cast<double>(scan.counts_p1[i]) - dark)
        << ',' << format_number(model(fit_p1, x)) << ','
        << format_number(static_cast<double>(scan.counts_p2[i]) - dark) << ','
        << format_number(model(fit_p2, x)) << '\n';
  }
}

namespace {

nlohmann::json fit_json(const VisibilityFit& fit) {
  return {{"V", fit.visibility},
          {"V_err", fit.visibility_err},
          {"V_clamped", fit.visibility_clamped()},
          {"offset", fit.offset},
          {"offset_err", fit.offset_err},
          {"amplitude", fit.amplitude},
          {"phase_rad", fit.phase_rad},
          {"reduced_chi2", fit.reduced_chi2},
          {"dof", fit.dof}};
}

}  // namespace

nlohmann::json fit_summary_json(const VisibilityFit& fit_p1, const VisibilityFit& fit_p2,
                                double analytic_visibility) {
  return {{"schema_version", kSchemaVersion},
          {"p1", fit_json(fit_p1)},
          {"p2", fit_json(fit_p2)},
          {"V_analytic", analytic_visibility}};
}

nlohmann::json record_json(const WidthReport& width) {
  const auto& r = width.primary();
  nlohmann::json j{{"slit_width_m", width.slit_width_m},
                   {"source", width.estimated ? "monte_carlo" : "analytic"},
                   {"V", r.visibility},
                   {"V_err", r.visibility_err.value_or(0.0)},
                   {"V_clamped", r.visibility_clamped()},
                   {"D", r.distinguishability},
                   {"D_err", r.distinguishability_err.value_or(0.0)},
                   {"D_clamped", r.distinguishability_clamped()},
                   {"d1", r.d1.value_or(0.0)},
                   {"d1_err", r.d1_err.value_or(0.0)},
                   {"d2", r.d2.value_or(0.0)},
                   {"d2_err", r.d2_err.value_or(0.0)},
                   {"sum_sq", r.sum_of_squares()},
                   {"sum_sq_err", r.sum_of_squares_err().value_or(0.0)},
                   {"seed", width.seed}};
  j["analytic"] = {{"V", width.analytic.visibility},
                   {"D", width.analytic.distinguishability},
                   {"sum_sq", width.analytic.sum_of_squares()}};
  const auto check = complementarity_check(r);
  j["check"] = {{"margin", check.margin},
                {"z_score", std::isfinite(check.z_score) ? nlohmann::json(check.z_score)
                                                         : nlohmann::json(nullptr)},
                {"violation", check.violation}};
  return j;
}

nlohmann::json campaign_report_json(const CampaignReport& report, const RunConfig& config) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& w : report.widths) records.push_back(record_json(w));
  return {{"schema_version", kSchemaVersion},
          {"mode", std::string(to_string(report.mode))},
          {"records", records},
          {"aggregate",
           {{"count", report.aggregate.count},
            {"mean_sum_sq", report.aggregate.mean_sum_sq},
            {"sem_sum_sq", report.aggregate.sem_sum_sq},
            {"statistic", "unweighted mean of per-width V^2+D^2, standard error of the mean"}}},
          {"provenance",
           {{"seed", report.seed}, {"version", kVersion}, {"config", emit_config(config)}}}};
}

nlohmann::json hbt_json(const HbtResult& result, double expected) {
  return {{"schema_version", kSchemaVersion},
          {"n_triggers", result.n_triggers},
          {"n1", result.n1},
          {"n2", result.n2},
          {"n_coincidence", result.n_coincidence},
          {"alpha", result.alpha()},
          {"alpha_err", result.alpha_err()},
          {"alpha_expected", expected}};
}

}  // namespace afshar::io
