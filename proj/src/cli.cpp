#include "afshar/cli.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "afshar/config.hpp"
#include "afshar/errors.hpp"
#include "afshar/export.hpp"
#include "afshar/units.hpp"

namespace afshar {

namespace {

namespace fs = std::filesystem;

// Raised while turning flags and config into a runnable request.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Every flag is captured as text and converted after parsing, so a missing
// flag and an explicit value are distinguishable and unit errors report
// uniformly.
struct Flags {
  std::string config;
  std::string seed;
  std::string out;
  std::string wavelength;
  std::string index;
  std::string beta;
  std::string slit_count;
  std::string period_override;
  std::vector<std::string> slit_widths;
  bool no_grating = false;
  std::string x_start;
  std::string x_step;
  std::string points;
  std::string bin_time;
  std::string blocked_bin_time;
  std::string dark_rate;
  std::string rep_rate;
  std::string emission_probability;
  std::string background_mean;
  std::string efficiency;
  std::string mode;
  bool noiseless = false;
  std::string triggers;
  std::string target_alpha;
  std::string n_u;
  std::string n_x;
  int verbose = 0;
  bool quiet = false;
};

template <typename Int>
Int to_integer(const std::string& text, std::string_view flag) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size() || v < 0) throw std::invalid_argument(text);
    return static_cast<Int>(v);
  } catch (const std::exception&) {
    throw UsageError(fmt::format("{} expects a non-negative integer, got '{}'", flag, text));
  }
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "INI run configuration");
  sub->add_option("--seed", f.seed, "RNG seed (u64)");
  sub->add_option("--out", f.out, "output directory");
  sub->add_flag("-v,--verbose", f.verbose, "more output");
  sub->add_flag("-q,--quiet", f.quiet, "tables off");
}

void add_setup(CLI::App* sub, Flags& f) {
  sub->add_option("--wavelength", f.wavelength, "vacuum wavelength, e.g. 670nm");
  sub->add_option("--index", f.index, "biprism refractive index n");
  sub->add_option("--beta", f.beta, "biprism summit angle (rad, or with mrad suffix)");
  sub->add_option("--slit-count", f.slit_count, "illuminated slits N");
  sub->add_option("--period-override", f.period_override,
                  "grating period differing from the interfringe");
}

void add_source(CLI::App* sub, Flags& f) {
  sub->add_option("--dark-rate", f.dark_rate, "detector dark rate, e.g. 180Hz");
  sub->add_option("--rep-rate", f.rep_rate, "source repetition rate, e.g. 4MHz");
  sub->add_option("--emission-probability", f.emission_probability, "signal photon per pulse");
  sub->add_option("--background-mean", f.background_mean, "background photons per pulse");
  sub->add_option("--efficiency", f.efficiency, "detector quantum efficiency");
}

void add_scan(CLI::App* sub, Flags& f) {
  sub->add_option("--x-start", f.x_start, "first grating position");
  sub->add_option("--x-step", f.x_step, "grating step, e.g. 4um");
  sub->add_option("--points", f.points, "scan points (0: 2.5 periods)");
  sub->add_option("--bin-time", f.bin_time, "acquisition per point, e.g. 3s");
  sub->add_option("--blocked-bin-time", f.blocked_bin_time, "blocked-path acquisition");
}

RunConfig build_config(const Flags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
  auto set = [](const std::string& text, auto&& apply) {
    if (!text.empty()) apply(text);
  };
  set(f.seed, [&](const std::string& v) { c.seed = to_integer<std::uint64_t>(v, "--seed"); });
  set(f.out, [&](const std::string& v) { c.output_directory = v; });
  set(f.wavelength, [&](const std::string& v) { c.wavelength_m = units::parse_length(v); });
  set(f.index, [&](const std::string& v) { c.refractive_index = units::parse_number(v); });
  set(f.beta, [&](const std::string& v) { c.summit_angle_rad = units::parse_angle(v); });
  set(f.slit_count, [&](const std::string& v) { c.slit_count = to_integer<int>(v, "--slit-count"); });
  set(f.period_override, [&](const std::string& v) { c.period_override_m = units::parse_length(v); });
  if (!f.slit_widths.empty()) {
    c.slit_widths_m.clear();
    for (const auto& w : f.slit_widths) c.slit_widths_m.push_back(units::parse_length(w));
  }
  set(f.x_start, [&](const std::string& v) { c.protocol.x_start_m = units::parse_length(v); });
  set(f.x_step, [&](const std::string& v) { c.protocol.x_step_m = units::parse_length(v); });
  set(f.points, [&](const std::string& v) { c.protocol.n_points = to_integer<int>(v, "--points"); });
  set(f.bin_time, [&](const std::string& v) { c.protocol.bin_time_s = units::parse_time(v); });
  set(f.blocked_bin_time,
      [&](const std::string& v) { c.protocol.blocked_bin_time_s = units::parse_time(v); });
  set(f.dark_rate, [&](const std::string& v) { c.detectors.dark_rate_hz = units::parse_frequency(v); });
  set(f.rep_rate, [&](const std::string& v) { c.source.repetition_rate_hz = units::parse_frequency(v); });
  set(f.emission_probability,
      [&](const std::string& v) { c.source.emission_probability = units::parse_number(v); });
  set(f.background_mean, [&](const std::string& v) { c.source.background_mean = units::parse_number(v); });
  set(f.efficiency, [&](const std::string& v) { c.detectors.quantum_efficiency = units::parse_number(v); });
  set(f.mode, [&](const std::string& v) { c.mode = parse_campaign_mode(v); });
  set(f.triggers, [&](const std::string& v) { c.hbt_triggers = to_integer<std::uint64_t>(v, "--triggers"); });
  set(f.target_alpha, [&](const std::string& v) { c.hbt_target_alpha = units::parse_number(v); });
  set(f.n_u, [&](const std::string& v) { c.map_n_u = to_integer<int>(v, "--nu"); });
  set(f.n_x, [&](const std::string& v) { c.map_n_x = to_integer<int>(v, "--nx"); });
  if (f.quiet) c.verbosity = 0;
  c.verbosity += f.verbose;
  return c;
}

OpticalSetup require_setup(const RunConfig& c) {
  if (!c.wavelength_m) throw UsageError("missing --wavelength (or setup.wavelength)");
  if (!c.refractive_index) throw UsageError("missing --index (or setup.refractive_index)");
  if (!c.summit_angle_rad) throw UsageError("missing --beta (or setup.summit_angle)");
  return c.setup();
}

bool wants(const RunConfig& c, std::string_view format) {
  return std::find(c.output_formats.begin(), c.output_formats.end(), format) !=
         c.output_formats.end();
}

fs::path prepare_dir(const RunConfig& c) {
  fs::path dir(c.output_directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
  return dir;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream file(path);
  if (!file) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  body(file);
  if (!file) throw std::runtime_error(fmt::format("write to '{}' failed", path.string()));
}

GratingSpec single_grating(const RunConfig& c, const OpticalSetup& setup, bool no_grating) {
  const double period = c.period_override_m.value_or(setup.interfringe_m());
  if (!no_grating && c.slit_widths_m.empty()) throw UsageError("no slit width given");
  GratingSpec g{period, no_grating ? period : c.slit_widths_m.front(), c.slit_count, 0.0};
  validate(g);
  return g;
}

PeriodCheck period_check(const RunConfig& c) {
  return c.period_override_m ? PeriodCheck::allow_mismatch : PeriodCheck::strict;
}

// A prepared command: validation happens before, computation inside.
using Job = std::function<void(std::ostream&)>;

Job analytic_job(const RunConfig& c, bool write_csv) {
  const OpticalSetup setup = require_setup(c);
  if (c.slit_widths_m.empty()) throw UsageError("no slit width given");
  std::vector<GratingSpec> gratings;
  for (double a : c.slit_widths_m) {
    gratings.push_back({c.period_override_m.value_or(setup.interfringe_m()), a, c.slit_count, 0.0});
    validate(gratings.back());
  }
  return [c, setup, gratings, write_csv](std::ostream& out) {
    std::vector<ComplementarityRecord> records;
    for (const auto& g : gratings) records.push_back(analytic_record(setup, g, period_check(c)));
    if (c.verbosity > 0) {
      fmt::print(out, "interfringe = {:.6g} um, u0 = {:.6g} 1/m\n", setup.interfringe_m() * 1e6,
                 setup.spatial_frequency_per_m());
      fmt::print(out, "{:>12} {:>12} {:>12} {:>12} {:>12}\n", "a [um]", "V", "D", "V^2", "V^2+D^2");
      for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        fmt::print(out, "{:>12.6g} {:>12.9f} {:>12.9f} {:>12.9f} {:>12.9f}\n",
                   c.slit_widths_m[i] * 1e6, r.visibility, r.distinguishability,
                   r.visibility * r.visibility, r.sum_of_squares());
      }
    }
    if (write_csv) {
      const auto dir = prepare_dir(c);
      write_file(dir / "analytic.csv", [&](std::ostream& f) {
        io::write_analytic_csv(f, setup, records, c.slit_widths_m);
      });
    }
  };
}

Job scan_job(const RunConfig& c, bool no_grating, bool noiseless) {
  const OpticalSetup setup = require_setup(c);
  const GratingSpec grating = single_grating(c, setup, no_grating);
  validate(c.source);
  validate(c.detectors);
  ScanRequest request;
  request.x_start_m = c.protocol.x_start_m;
  request.x_step_m = c.protocol.x_step_m;
  request.n_points = scan_points(c.protocol, grating.period_m);
  request.bin_time_s = c.protocol.bin_time_s;
  request.dark_run_factor = c.protocol.dark_run_factor;
  request.seed = c.seed;
  request.noise = noiseless ? NoiseMode::none : NoiseMode::poisson;
  if (request.n_points < kMinScanPoints) {
    throw UsageError(fmt::format("a scan needs at least {} points", kMinScanPoints));
  }
  return [c, setup, grating, request](std::ostream& out) {
    const auto scan = simulate_scan(setup, grating, c.source, c.detectors, request);
    FitOptions options;
    options.max_reduced_chi2 = c.protocol.max_reduced_chi2;
    const auto fit1 = fit_visibility(scan, grating.period_m, options);
    options.detector = Detector::p2;
    const auto fit2 = fit_visibility(scan, grating.period_m, options);
    const double v_analytic = analytic_visibility(setup, grating, period_check(c));
    if (c.verbosity > 0) {
      fmt::print(out, "a = {:.6g} um, {} points, bin {} s, dark estimate {:.6g} Hz\n",
                 grating.slit_width_m * 1e6, scan.positions_m.size(), scan.bin_time_s,
                 scan.dark_estimate_hz);
      fmt::print(out, "P1: V = {:.6f} +- {:.6f} (chi2/dof {:.3f})\n", fit1.visibility,
                 fit1.visibility_err, fit1.reduced_chi2);
      fmt::print(out, "P2: V = {:.6f} +- {:.6f} (chi2/dof {:.3f})\n", fit2.visibility,
                 fit2.visibility_err, fit2.reduced_chi2);
      fmt::print(out, "analytic V = {:.6f}\n", v_analytic);
    }
    const auto dir = prepare_dir(c);
    if (wants(c, "csv")) {
      write_file(dir / "scan.csv", [&](std::ostream& f) { io::write_scan_csv(f, scan); });
      write_file(dir / "scan_plot.csv", [&](std::ostream& f) {
        io::write_scan_plot_csv(f, scan, grating.period_m, fit1, fit2);
      });
    }
    if (wants(c, "json")) {
      write_file(dir / "scan_fit.json", [&](std::ostream& f) {
        f << io::fit_summary_json(fit1, fit2, v_analytic).dump(2) << '\n';
      });
    }
  };
}

Job campaign_job(const RunConfig& c) {
  require_setup(c);
  const Campaign campaign = c.campaign();
  if (campaign.slit_widths_m.empty()) throw UsageError("no slit width given");
  for (double a : campaign.slit_widths_m) campaign_grating(campaign, a);
  validate(c.source);
  validate(c.detectors);
  return [c, campaign](std::ostream& out) {
    const auto report = run_campaign(campaign);
    if (c.verbosity > 0) {
      fmt::print(out, "{:>10} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}\n", "a [um]", "V^2",
                 "D^2", "sum", "+-", "V^2 th", "D^2 th");
      for (const auto& w : report.widths) {
        const auto& r = w.primary();
        fmt::print(out, "{:>10.4g} {:>10.5f} {:>10.5f} {:>10.5f} {:>10.5f} {:>10.5f} {:>10.5f}\n",
                   w.slit_width_m * 1e6, r.visibility * r.visibility,
                   r.distinguishability * r.distinguishability, r.sum_of_squares(),
                   r.sum_of_squares_err().value_or(0.0),
                   w.analytic.visibility * w.analytic.visibility,
                   w.analytic.distinguishability * w.analytic.distinguishability);
      }
      fmt::print(out, "mean V^2+D^2 = {:.5f} +- {:.5f} over {} widths\n",
                 report.aggregate.mean_sum_sq, report.aggregate.sem_sum_sq,
                 report.aggregate.count);
    }
    const auto dir = prepare_dir(c);
    write_file(dir / "campaign.ini", [&](std::ostream& f) { f << emit_config(c); });
    if (wants(c, "json")) {
      write_file(dir / "campaign_report.json", [&](std::ostream& f) {
        f << io::campaign_report_json(report, c).dump(2) << '\n';
      });
    }
    if (wants(c, "csv")) {
      write_file(dir / "campaign_series.csv",
                 [&](std::ostream& f) { io::write_series_csv(f, report); });
      for (std::size_t i = 0; i < report.widths.size(); ++i) {
        const auto& w = report.widths[i];
        if (!w.scan) continue;
        write_file(dir / fmt::format("scan_{:02d}.csv", i),
                   [&](std::ostream& f) { io::write_scan_csv(f, *w.scan); });
      }
    }
  };
}

Job hbt_job(const RunConfig& c, bool write) {
  SourceModel source = c.source;
  validate(source);
  validate(c.detectors);
  if (c.hbt_triggers < kMinHbtTriggers) {
    throw UsageError(fmt::format("--triggers must be at least {}", kMinHbtTriggers));
  }
  if (c.hbt_target_alpha) {
    source = calibrate_background_for_alpha(source, c.detectors, *c.hbt_target_alpha);
  }
  return [c, source, write](std::ostream& out) {
    const auto result = simulate_hbt(source, c.detectors, c.hbt_triggers, c.seed);
    const double expected = expected_alpha(source, c.detectors);
    if (c.verbosity > 0) {
      fmt::print(out, "background_mean = {:.9g}\n", source.background_mean);
      fmt::print(out, "N_T = {}  N1 = {}  N2 = {}  N_C = {}\n", result.n_triggers, result.n1,
                 result.n2, result.n_coincidence);
      fmt::print(out, "alpha = {:.6f} +- {:.6f} (expected {:.6f})\n", result.alpha(),
                 result.alpha_err(), expected);
    }
    if (write) {
      const auto dir = prepare_dir(c);
      write_file(dir / "hbt.json",
                 [&](std::ostream& f) { f << io::hbt_json(result, expected).dump(2) << '\n'; });
    }
  };
}

Job map_job(const RunConfig& c) {
  const OpticalSetup setup = require_setup(c);
  if (c.slit_widths_m.empty()) throw UsageError("no slit width given");
  if (c.map_n_u < kMinMapAxisPoints || c.map_n_x < kMinMapAxisPoints) {
    throw UsageError(fmt::format("--nu and --nx must be at least {}", kMinMapAxisPoints));
  }
  make_grating(setup, c.slit_widths_m.front(), c.slit_count);
  return [c, setup](std::ostream& out) {
    const auto map =
        generate_intensity_map(setup, c.slit_widths_m.front(), c.map_n_u, c.map_n_x, c.slit_count);
    const auto dir = prepare_dir(c);
    write_file(dir / "intensity_map.csv", [&](std::ostream& f) { io::write_map_csv(f, map); });
    if (c.verbosity > 0) {
      fmt::print(out, "wrote {} x {} map to {}\n", map.n_x(), map.n_u(),
                 (dir / "intensity_map.csv").string());
    }
  };
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulator for the biprism-and-grating complementarity experiment", "afshar"};
  app.require_subcommand(1);
  Flags f;

  auto* analytic = app.add_subcommand("analytic", "closed-form V and D per slit width");
  add_common(analytic, f);
  add_setup(analytic, f);
  analytic->add_option("--slit-width", f.slit_widths, "slit width a (repeatable)");

  auto* scan = app.add_subcommand("scan", "Monte Carlo grating translation scan with cosine fit");
  add_common(scan, f);
  add_setup(scan, f);
  add_source(scan, f);
  add_scan(scan, f);
  scan->add_option("--slit-width", f.slit_widths, "slit width a")->expected(1);
  scan->add_flag("--no-grating", f.no_grating, "open slits (a = period) control run");
  scan->add_flag("--noiseless", f.noiseless, "expected counts instead of Poisson draws");

  auto* campaign = app.add_subcommand("campaign", "V and D for every slit width");
  add_common(campaign, f);
  add_setup(campaign, f);
  add_source(campaign, f);
  add_scan(campaign, f);
  campaign->add_option("--slit-width", f.slit_widths, "slit width a (repeatable)");
  campaign->add_option("--mode", f.mode, "analytic | monte_carlo | both");

  auto* hbt = app.add_subcommand("hbt", "trigger-gated anticorrelation measurement");
  add_common(hbt, f);
  add_source(hbt, f);
  hbt->add_option("--triggers", f.triggers, "number of triggers");
  hbt->add_option("--target-alpha", f.target_alpha, "calibrate background to this alpha");

  auto* map = app.add_subcommand("map", "intensity versus direction and grating position");
  add_common(map, f);
  add_setup(map, f);
  map->add_option("--slit-width", f.slit_widths, "slit width a")->expected(1);
  map->add_option("--nu", f.n_u, "points along u");
  map->add_option("--nx", f.n_x, "points along x");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  CLI::App* active = app.get_subcommands().front();
  Job job;
  try {
    const RunConfig config = build_config(f);
    const std::string name = active->get_name();
    if (name == "analytic") {
      job = analytic_job(config, !f.out.empty());
    } else if (name == "scan") {
      job = scan_job(config, f.no_grating, f.noiseless);
    } else if (name == "campaign") {
      job = campaign_job(config);
    } else if (name == "hbt") {
      job = hbt_job(config, !f.out.empty());
    } else {
      job = map_job(config);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << active->help();
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n\n" << active->help();
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    job(out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("afshar");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace afshar
