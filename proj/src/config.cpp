#include "afshar/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "afshar/errors.hpp"
#include "afshar/units.hpp"

namespace afshar {

namespace {

using Setter = std::function<void(RunConfig&, const std::string&)>;
using SectionTable = std::map<std::string, Setter, std::less<>>;

template <typename Int>
Int parse_integer(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  Int value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError(fmt::format("'{}' is not a valid integer", text));
  }
  return value;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    auto item = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_bool_like_none(std::string_view text) { return text == "none" || text.empty(); }

const std::map<std::string, SectionTable, std::less<>>& schema() {
  static const std::map<std::string, SectionTable, std::less<>> table{
      {"setup",
       {{"wavelength", [](RunConfig& c, const std::string& v) { c.wavelength_m = units::parse_length(v); }},
        {"refractive_index", [](RunConfig& c, const std::string& v) { c.refractive_index = units::parse_number(v); }},
        {"summit_angle", [](RunConfig& c, const std::string& v) { c.summit_angle_rad = units::parse_angle(v); }}}},
      {"grating",
       {{"slit_count", [](RunConfig& c, const std::string& v) { c.slit_count = parse_integer<int>(v); }},
        {"slit_widths",
         [](RunConfig& c, const std::string& v) {
           c.slit_widths_m.clear();
           for (const auto& item : split_list(v)) c.slit_widths_m.push_back(units::parse_length(item));
         }},
        {"period_override", [](RunConfig& c, const std::string& v) {
           if (parse_bool_like_none(v)) {
             c.period_override_m.reset();
           } else {
             c.period_override_m = units::parse_length(v);
           }
         }}}},
      {"scan",
       {{"x_start", [](RunConfig& c, const std::string& v) { c.protocol.x_start_m = units::parse_length(v); }},
        {"x_step", [](RunConfig& c, const std::string& v) { c.protocol.x_step_m = units::parse_length(v); }},
        {"n_points", [](RunConfig& c, const std::string& v) { c.protocol.n_points = parse_integer<int>(v); }},
        {"bin_time", [](RunConfig& c, const std::string& v) { c.protocol.bin_time_s = units::parse_time(v); }},
        {"blocked_bin_time", [](RunConfig& c, const std::string& v) { c.protocol.blocked_bin_time_s = units::parse_time(v); }},
        {"dark_run_factor", [](RunConfig& c, const std::string& v) { c.protocol.dark_run_factor = units::parse_number(v); }},
        {"max_reduced_chi2", [](RunConfig& c, const std::string& v) { c.protocol.max_reduced_chi2 = units::parse_number(v); }}}},
      {"source",
       {{"repetition_rate", [](RunConfig& c, const std::string& v) { c.source.repetition_rate_hz = units::parse_frequency(v); }},
        {"emission_probability", [](RunConfig& c, const std::string& v) { c.source.emission_probability = units::parse_number(v); }},
        {"background_mean", [](RunConfig& c, const std::string& v) { c.source.background_mean = units::parse_number(v); }},
        {"collection_efficiency", [](RunConfig& c, const std::string& v) { c.source.collection_efficiency = units::parse_number(v); }}}},
      {"detector",
       {{"dark_rate", [](RunConfig& c, const std::string& v) { c.detectors.dark_rate_hz = units::parse_frequency(v); }},
        {"quantum_efficiency", [](RunConfig& c, const std::string& v) { c.detectors.quantum_efficiency = units::parse_number(v); }},
        {"acceptance_half_angle", [](RunConfig& c, const std::string& v) { c.detectors.acceptance_half_angle_rad = units::parse_angle(v); }}}},
      {"campaign",
       {{"mode", [](RunConfig& c, const std::string& v) { c.mode = parse_campaign_mode(v); }},
        {"seed", [](RunConfig& c, const std::string& v) { c.seed = parse_integer<std::uint64_t>(v); }}}},
      {"hbt",
       {{"triggers", [](RunConfig& c, const std::string& v) { c.hbt_triggers = parse_integer<std::uint64_t>(v); }},
        {"target_alpha", [](RunConfig& c, const std::string& v) {
           if (parse_bool_like_none(v)) {
             c.hbt_target_alpha.reset();
           } else {
             c.hbt_target_alpha = units::parse_number(v);
           }
         }}}},
      {"map",
       {{"n_u", [](RunConfig& c, const std::string& v) { c.map_n_u = parse_integer<int>(v); }},
        {"n_x", [](RunConfig& c, const std::string& v) { c.map_n_x = parse_integer<int>(v); }}}},
      {"output",
       {{"directory", [](RunConfig& c, const std::string& v) { c.output_directory = v; }},
        {"formats", [](RunConfig& c, const std::string& v) { c.output_formats = split_list(v); }},
        {"verbosity", [](RunConfig& c, const std::string& v) { c.verbosity = parse_integer<int>(v); }}}},
  };
  return table;
}

std::string join_lengths(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += units::format_exact(values[i], "m");
  }
  return out;
}

std::string join(const std::vector<std::string>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += values[i];
  }
  return out;
}

}  // namespace

OpticalSetup RunConfig::setup() const {
  if (!wavelength_m) throw ConfigError("missing setup.wavelength");
  if (!refractive_index) throw ConfigError("missing setup.refractive_index");
  if (!summit_angle_rad) throw ConfigError("missing setup.summit_angle");
  return make_setup(*wavelength_m, *refractive_index, *summit_angle_rad);
}

Campaign RunConfig::campaign() const {
  return Campaign{.setup = setup(),
                  .slit_widths_m = slit_widths_m,
                  .slit_count = slit_count,
                  .period_override_m = period_override_m,
                  .protocol = protocol,
                  .source = source,
                  .detectors = detectors,
                  .seed = seed,
                  .mode = mode};
}

RunConfig parse_config(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
  }

  RunConfig config;
  const auto& table = schema();
  for (const auto& [section, keys] : tree) {
    if (keys.empty() && !keys.data().empty()) {
      throw ConfigError(fmt::format("key '{}' outside any section", section));
    }
    const auto found = table.find(section);
    if (found == table.end()) {
      throw ConfigError(fmt::format("unknown config section [{}]", section));
    }
    for (const auto& [key, node] : keys) {
      const auto setter = found->second.find(key);
      if (setter == found->second.end()) {
        throw ConfigError(fmt::format("unknown config key '{}.{}'", section, key));
      }
      try {
        setter->second(config, node.data());
      } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("{}.{}: {}", section, key, e.what()));
      }
    }
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string emit_config(const RunConfig& c) {
  using units::format_exact;
  std::string out;
  auto line = [&out](std::string_view key, const std::string& value) {
    out += fmt::format("{} = {}\n", key, value);
  };

  out += "[setup]\n";
  if (c.wavelength_m) line("wavelength", format_exact(*c.wavelength_m, "m"));
  if (c.refractive_index) line("refractive_index", format_exact(*c.refractive_index));
  if (c.summit_angle_rad) line("summit_angle", format_exact(*c.summit_angle_rad, "rad"));

  out += "\n[grating]\n";
  line("slit_count", std::to_string(c.slit_count));
  line("slit_widths", join_lengths(c.slit_widths_m));
  line("period_override", c.period_override_m ? format_exact(*c.period_override_m, "m") : "none");

  out += "\n[scan]\n";
  line("x_start", format_exact(c.protocol.x_start_m, "m"));
  line("x_step", format_exact(c.protocol.x_step_m, "m"));
  line("n_points", std::to_string(c.protocol.n_points));
  line("bin_time", format_exact(c.protocol.bin_time_s, "s"));
  line("blocked_bin_time", format_exact(c.protocol.blocked_bin_time_s, "s"));
  line("dark_run_factor", format_exact(c.protocol.dark_run_factor));
  line("max_reduced_chi2", format_exact(c.protocol.max_reduced_chi2));

  out += "\n[source]\n";
  line("repetition_rate", format_exact(c.source.repetition_rate_hz, "Hz"));
  line("emission_probability", format_exact(c.source.emission_probability));
  line("background_mean", format_exact(c.source.background_mean));
  line("collection_efficiency", format_exact(c.source.collection_efficiency));

  out += "\n[detector]\n";
  line("dark_rate", format_exact(c.detectors.dark_rate_hz, "Hz"));
  line("quantum_efficiency", format_exact(c.detectors.quantum_efficiency));
  line("acceptance_half_angle", format_exact(c.detectors.acceptance_half_angle_rad, "rad"));

  out += "\n[campaign]\n";
  line("mode", std::string(to_string(c.mode)));
  line("seed", std::to_string(c.seed));

  out += "\n[hbt]\n";
  line("triggers", std::to_string(c.hbt_triggers));
  line("target_alpha", c.hbt_target_alpha ? format_exact(*c.hbt_target_alpha) : "none");

  out += "\n[map]\n";
  line("n_u", std::to_string(c.map_n_u));
  line("n_x", std::to_string(c.map_n_x));

  out += "\n[output]\n";
  line("directory", c.output_directory);
  line("formats", join(c.output_formats));
  line("verbosity", std::to_string(c.verbosity));
  return out;
}

}  // namespace afshar
