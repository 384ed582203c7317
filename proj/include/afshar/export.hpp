#pragma once

#include <ostream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "afshar/config.hpp"
#include "afshar/experiment.hpp"

// File formats written by the CLI. Numbers in CSV files use 9 significant
// digits with a '.' separator regardless of locale.
namespace afshar::io {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kVersion = "1.0.0";

inline constexpr std::string_view kScanCsvHeader =
    "x_m,counts_p1,counts_p2,expected_rate_p1,expected_rate_p2";
inline constexpr std::string_view kAnalyticCsvHeader = "slit_width_m,V,D,V2,D2,sum_sq";
inline constexpr std::string_view kSeriesCsvHeader =
    "slit_width_m,V2,V2_err,D2,D2_err,sum_sq,sum_sq_err,V2_analytic,D2_analytic";
inline constexpr std::string_view kScanPlotCsvHeader =
    "x_m,net_counts_p1,fit_p1,net_counts_p2,fit_p2";
// First cell of the map CSV axis row; the remaining cells are the u values.
inline constexpr std::string_view kMapCornerCell = "x_m\\u_per_m";

std::string format_number(double value);

void write_scan_csv(std::ostream& out, const ScanResult& scan);
void write_analytic_csv(std::ostream& out, const OpticalSetup& setup,
                        const std::vector<ComplementarityRecord>& records,
                        const std::vector<double>& slit_widths_m);
void write_series_csv(std::ostream& out, const CampaignReport& report);
void write_map_csv(std::ostream& out, const IntensityMap& map);
// Dark-subtracted counts of both detectors with the fitted cosines.
void write_scan_plot_csv(std::ostream& out, const ScanResult& scan, double period_m,
                         const VisibilityFit& fit_p1, const VisibilityFit& fit_p2);

nlohmann::json fit_summary_json(const VisibilityFit& fit_p1, const VisibilityFit& fit_p2,
                                double analytic_visibility);

// Record keys: slit_width_m, V, V_err, D, D_err, sum_sq, sum_sq_err (+ extras).
nlohmann::json record_json(const WidthReport& width);
nlohmann::json campaign_report_json(const CampaignReport& report, const RunConfig& config);

nlohmann::json hbt_json(const HbtResult& result, double expected);

}  // namespace afshar::io
