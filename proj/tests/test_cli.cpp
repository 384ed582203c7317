#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "afshar/cli.hpp"
#include "afshar/config.hpp"
#include "afshar/export.hpp"
#include "test_support.hpp"

using namespace afshar;

namespace {

const std::vector<std::string> kSetup{"--wavelength", "670nm", "--index", "1.51", "--beta", "7.5mrad"};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args, bool with_setup = true) {
  if (with_setup) args.insert(args.begin() + 1, kSetup.begin(), kSetup.end());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string golden(const std::string& name) {
  return slurp(std::filesystem::path(AFSHAR_GOLDEN_DIR) / name);
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(cli({}, false).code == kExitUsage);
  CHECK(cli({"bogus"}, false).code == kExitUsage);
  const auto missing = cli({"analytic", "--slit-width", "20um"}, false);
  CHECK(missing.code == kExitUsage);
  CHECK(missing.err.find("--wavelength") != std::string::npos);
  CHECK(cli({"analytic", "--slit-width", "20"}).code == kExitUsage);
  CHECK(cli({"analytic", "--slit-width", "200um"}).code == kExitUsage);
  CHECK(cli({"scan", "--slit-width", "20um", "--points", "3"}).code == kExitUsage);
  CHECK(cli({"campaign", "--mode", "sometimes"}).code == kExitUsage);
}

TEST_CASE("compute failures exit with 1") {
  // Scan spans well under 1.5 interfringes, so the fit refuses it.
  const auto r = cli({"scan", "--slit-width", "50um", "--points", "12", "--x-step", "1um"});
  CHECK(r.code == kExitFailure);
  CHECK(r.err.find("periods") != std::string::npos);
}

TEST_CASE("analytic table") {
  const auto r = cli({"analytic", "--slit-width", "0um", "--slit-width", "80um"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("1.000000000  0.000000000") != std::string::npos);
  CHECK(r.out.find("0.185588445  0.982627564  0.034443071  1.000000000") != std::string::npos);
}

TEST_CASE("analytic CSV matches the golden file") {
  const auto dir = test::scratch_dir("cli_analytic");
  const auto r = cli({"analytic", "--slit-width", "20um", "--slit-width", "50um", "--slit-width",
                      "70um", "--slit-width", "80um", "--out", dir.string()});
  REQUIRE(r.code == kExitOk);
  CHECK(slurp(dir / "analytic.csv") == golden("analytic_reference.csv"));
}

TEST_CASE("noiseless scan CSV matches the golden file") {
  const auto dir = test::scratch_dir("cli_noiseless");
  const auto r = cli({"scan", "--slit-width", "50um", "--noiseless", "--points", "12", "--x-step",
                      "20um", "--out", dir.string()});
  REQUIRE(r.code == kExitOk);
  CHECK(slurp(dir / "scan.csv") == golden("scan_noiseless_50um.csv"));
}

TEST_CASE("scan outputs") {
  for (const std::string width : {"20um", "80um"}) {
    const auto dir = test::scratch_dir("cli_scan_" + width);
    const auto r = cli({"scan", "--slit-width", width, "--out", dir.string(), "--seed", "3"});
    REQUIRE(r.code == kExitOk);
    const auto scan = lines(slurp(dir / "scan.csv"));
    REQUIRE(scan.size() == 56);
    CHECK(scan.front() == io::kScanCsvHeader);
    CHECK(lines(slurp(dir / "scan_plot.csv")).front() == io::kScanPlotCsvHeader);
    const auto fit = nlohmann::json::parse(slurp(dir / "scan_fit.json"));
    CHECK(fit["schema_version"] == io::kSchemaVersion);
    const double v = fit["p1"]["V"];
    const double v_err = fit["p1"]["V_err"];
    CHECK(std::abs(v - fit["V_analytic"].get<double>()) < 3.0 * v_err);

    const auto again = test::scratch_dir("cli_scan_again_" + width);
    cli({"scan", "--slit-width", width, "--out", again.string(), "--seed", "3"});
    CHECK(slurp(again / "scan.csv") == slurp(dir / "scan.csv"));
  }
}

TEST_CASE("scan without the grating shows no fringe") {
  const auto dir = test::scratch_dir("cli_open");
  const auto r = cli({"scan", "--slit-width", "50um", "--no-grating", "--out", dir.string()});
  REQUIRE(r.code == kExitOk);
  const auto fit = nlohmann::json::parse(slurp(dir / "scan_fit.json"));
  CHECK(std::abs(fit["p1"]["V"].get<double>()) < 3.0 * fit["p1"]["V_err"].get<double>());
  CHECK(std::abs(fit["V_analytic"].get<double>()) < 1e-12);
}

TEST_CASE("campaign outputs and config round trip") {
  const auto dir = test::scratch_dir("cli_campaign");
  const auto r = cli({"campaign", "--mode", "both", "--seed", "9", "--out", dir.string()});
  REQUIRE(r.code == kExitOk);
  for (const char* name : {"campaign.ini", "campaign_report.json", "campaign_series.csv",
                           "scan_00.csv", "scan_03.csv"}) {
    CHECK(std::filesystem::exists(dir / name));
  }
  CHECK(lines(slurp(dir / "campaign_series.csv")).front() == io::kSeriesCsvHeader);
  const auto report = nlohmann::json::parse(slurp(dir / "campaign_report.json"));
  CHECK(report["schema_version"] == io::kSchemaVersion);
  CHECK(report["mode"] == "both");
  REQUIRE(report["records"].size() == 4);
  for (const auto& rec : report["records"]) {
    for (const char* key : {"slit_width_m", "V", "V_err", "D", "D_err", "sum_sq", "sum_sq_err"}) {
      CHECK(rec.contains(key));
    }
    CHECK(rec["source"] == "monte_carlo");
    CHECK(rec["check"]["violation"] == false);
  }
  const double mean = report["aggregate"]["mean_sum_sq"];
  CHECK(mean >= 0.93);
  CHECK(mean <= 1.03);
  CHECK(report["provenance"]["seed"] == 9);

  const auto saved = load_config(dir / "campaign.ini");
  CHECK(saved.seed == 9);
  CHECK(emit_config(saved) == report["provenance"]["config"].get<std::string>());

  const auto rerun = test::scratch_dir("cli_campaign_rerun");
  const auto r2 = cli({"campaign", "--config", (dir / "campaign.ini").string(), "--out", rerun.string()},
                      false);
  REQUIRE(r2.code == kExitOk);
  CHECK(slurp(rerun / "campaign_series.csv") == slurp(dir / "campaign_series.csv"));
}

TEST_CASE("hbt output") {
  const auto dir = test::scratch_dir("cli_hbt");
  const auto r = cli({"hbt", "--emission-probability", "0.5", "--target-alpha", "0.14", "--triggers",
                      "200000", "--out", dir.string()},
                     false);
  REQUIRE(r.code == kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir / "hbt.json"));
  CHECK(j["n_triggers"] == 200000);
  CHECK(j["alpha_expected"].get<double>() == doctest::Approx(0.14).epsilon(1e-9));
  CHECK(std::abs(j["alpha"].get<double>() - 0.14) < 3.0 * j["alpha_err"].get<double>());
  CHECK(cli({"hbt", "--triggers", "10"}, false).code == kExitUsage);
}

TEST_CASE("map output") {
  const auto dir = test::scratch_dir("cli_map");
  const auto r = cli({"map", "--slit-width", "50um", "--nu", "31", "--nx", "17", "--out", dir.string()});
  REQUIRE(r.code == kExitOk);
  const auto rows = lines(slurp(dir / "intensity_map.csv"));
  REQUIRE(rows.size() == 18);
  CHECK(rows.front().rfind(std::string(io::kMapCornerCell) + ",", 0) == 0);
  CHECK(std::count(rows.front().begin(), rows.front().end(), ',') == 31);
  CHECK(std::count(rows[5].begin(), rows[5].end(), ',') == 31);
}
