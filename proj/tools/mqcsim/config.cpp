#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "mqcsim/error.hpp"
#include "mqcsim/text_format.hpp"

namespace mqcsim::cli {
namespace {

[[noreturn]] void config_error(const std::string& what) { fail(ErrorKind::config, what); }

long parse_long(std::string_view text) {
  text = trim(text);
  long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) config_error("'" + std::string(text) + "' is not an integer");
  return value;
}

std::uint64_t parse_u64(std::string_view text) {
  text = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    config_error("'" + std::string(text) + "' is not a nonnegative integer");
  }
  return value;
}

double parse_real(std::string_view text) {
  try {
    return parse_double(trim(text));
  } catch (const Error&) {
    config_error("'" + std::string(trim(text)) + "' is not a number");
  }
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? ", " : "") + parts[i];
  return out;
}

template <typename T, typename F>
std::string join_values(const std::vector<T>& values, F format) {
  std::vector<std::string> parts;
  for (const auto& v : values) parts.push_back(format(v));
  return join(parts);
}

// Every accepted key, in echo order.
const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "run.seed",           "run.workers",           "run.max_spins",          "run.output",
      "geometry.kind",      "geometry.sites",        "geometry.lattice_constant", "geometry.spacing",
      "geometry.axis",      "geometry.radius",       "geometry.min_distance",  "geometry.max_sites",
      "geometry.nearest_coupling", "geometry.cutoff",
      "orientation.mode",   "orientation.alpha",     "orientation.beta",       "orientation.gamma",
      "orientation.count",
      "experiment.p",       "experiment.N",          "experiment.N0",          "experiment.tau_c",
      "experiment.mode",    "experiment.normalization", "experiment.tail_fraction", "experiment.fit_floor",
      "error.model",        "error.strength",        "error.realizations",
  };
  return keys;
}

}  // namespace

std::vector<long> parse_long_list(const std::string& text) {
  std::vector<long> out;
  for (auto item : split(text, ',')) {
    item = trim(item);
    if (item.empty()) config_error("empty list item in '" + text + "'");
    const auto parts = split(item, ':');
    if (parts.size() == 1) {
      out.push_back(parse_long(item));
    } else if (parts.size() == 3) {
      const long start = parse_long(parts[0]);
      const long stop = parse_long(parts[1]);
      const long step = parse_long(parts[2]);
      if (step <= 0) config_error("range step must be positive in '" + std::string(item) + "'");
      if (stop < start) config_error("range stop precedes start in '" + std::string(item) + "'");
      for (long v = start; v <= stop; v += step) out.push_back(v);
    } else {
      config_error("'" + std::string(item) + "' is neither an integer nor start:stop:step");
    }
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (auto item : split(text, ',')) {
    if (trim(item).empty()) config_error("empty list item in '" + text + "'");
    out.push_back(parse_real(item));
  }
  return out;
}

ConfigFile ConfigFile::parse(const std::string& text, const std::string& source) {
  ConfigFile cfg;
  cfg.source_ = source;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string where = source + ":" + std::to_string(number);
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#' || body.front() == ';') continue;
    if (body.front() == '[') {
      if (body.back() != ']' || body.size() < 3) config_error(where + ": malformed section header");
      section = std::string(trim(body.substr(1, body.size() - 2)));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) config_error(where + ": expected 'key = value'");
    if (section.empty()) config_error(where + ": key outside any [section]");
    const std::string key = section + "." + std::string(trim(body.substr(0, eq)));
    std::string value(trim(body.substr(eq + 1)));
    const auto hash = value.find(" #");
    if (hash != std::string::npos) value = std::string(trim(std::string_view(value).substr(0, hash)));
    if (cfg.values_.count(key)) config_error(where + ": duplicate key " + key);
    cfg.values_[key] = value;
    cfg.lines_[key] = number;
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot read config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), path);
}

void ConfigFile::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) config_error("--set expects section.key=value, got '" + assignment + "'");
  const std::string key(trim(std::string_view(assignment).substr(0, eq)));
  if (key.find('.') == std::string::npos) config_error("--set key '" + key + "' lacks a section");
  values_[key] = std::string(trim(std::string_view(assignment).substr(eq + 1)));
  lines_.erase(key);
}

const std::string& ConfigFile::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) config_error("missing required key " + key);
  return it->second;
}

std::string ConfigFile::where(const std::string& key) const {
  const auto it = lines_.find(key);
  return it == lines_.end() ? "--set" : source_ + ":" + std::to_string(it->second);
}

RunConfig resolve(const ConfigFile& file, const std::vector<std::string>& required) {
  const auto& keys = known_keys();
  for (const auto& [key, value] : file.values()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) config_error(file.where(key) + ": unknown key " + key);
  }
  for (const std::string key : {"geometry.kind", "geometry.sites"}) (void)file.raw(key);
  for (const auto& key : required) (void)file.raw(key);

  // Wraps a conversion so that its error names the key and line.
  const auto read = [&](const std::string& key, const std::function<void(const std::string&)>& apply) {
    if (!file.has(key)) return;
    try {
      apply(file.raw(key));
    } catch (const Error& e) {
      config_error(file.where(key) + ": " + key + ": " + e.what());
    }
  };

  RunConfig cfg;
  ExperimentConfig& x = cfg.experiment;
  GeometrySpec& g = x.geometry;
  read("run.seed", [&](const std::string& v) { x.seed = parse_u64(v); });
  read("run.workers", [&](const std::string& v) { x.workers = static_cast<unsigned>(parse_u64(v)); });
  read("run.max_spins", [&](const std::string& v) { x.max_spins = static_cast<int>(parse_long(v)); });
  read("run.output", [&](const std::string& v) { cfg.output = v; });
  read("geometry.kind", [&](const std::string& v) { g.kind = parse_geometry_kind(v); });
  read("geometry.sites", [&](const std::string& v) { g.sites = static_cast<std::size_t>(parse_u64(v)); });
  read("geometry.lattice_constant", [&](const std::string& v) { g.lattice_constant = parse_real(v); });
  read("geometry.spacing", [&](const std::string& v) { g.spacing = parse_real(v); });
  read("geometry.axis", [&](const std::string& v) {
    const auto a = parse_double_list(v);
    if (a.size() != 3) config_error("axis needs three components");
    g.axis = {a[0], a[1], a[2]};
  });
  read("geometry.radius", [&](const std::string& v) { g.radius = parse_real(v); });
  read("geometry.min_distance", [&](const std::string& v) { g.min_distance = parse_real(v); });
  read("geometry.max_sites", [&](const std::string& v) { g.max_sites = static_cast<std::size_t>(parse_u64(v)); });
  read("geometry.nearest_coupling", [&](const std::string& v) { g.nearest_coupling = parse_real(v); });
  read("geometry.cutoff", [&](const std::string& v) { g.cutoff = parse_real(v); });
  read("orientation.mode", [&](const std::string& v) { x.orientation_mode = parse_orientation_mode(v); });
  read("orientation.alpha", [&](const std::string& v) { x.orientation.alpha = parse_real(v); });
  read("orientation.beta", [&](const std::string& v) { x.orientation.beta = parse_real(v); });
  read("orientation.gamma", [&](const std::string& v) { x.orientation.gamma = parse_real(v); });
  read("orientation.count", [&](const std::string& v) { x.powder_count = static_cast<std::size_t>(parse_u64(v)); });
  read("experiment.p", [&](const std::string& v) { x.p_values = parse_double_list(v); });
  read("experiment.N", [&](const std::string& v) { x.schedule = parse_long_list(v); });
  read("experiment.N0", [&](const std::string& v) { x.prep_cycles = parse_long_list(v); });
  read("experiment.tau_c", [&](const std::string& v) { x.tau_c = parse_real(v); });
  read("experiment.mode", [&](const std::string& v) { x.mode = parse_cycle_mode(v); });
  read("experiment.normalization", [&](const std::string& v) { x.normalization = parse_normalization(v); });
  read("experiment.tail_fraction", [&](const std::string& v) { x.tail_fraction = parse_real(v); });
  read("experiment.fit_floor", [&](const std::string& v) { x.fit_floor = parse_real(v); });
  read("error.model", [&](const std::string& v) { x.error_model = parse_error_model(v); });
  read("error.strength", [&](const std::string& v) { x.error_strength = parse_real(v); });
  read("error.realizations", [&](const std::string& v) { x.realizations = static_cast<std::size_t>(parse_u64(v)); });

  if (cfg.output.empty()) config_error("run.output must not be empty");
  return cfg;
}

std::string echo(const RunConfig& cfg) {
  const ExperimentConfig& x = cfg.experiment;
  const GeometrySpec& g = x.geometry;
  const auto num = [](double v) { return format_double(v); };
  std::ostringstream out;
  out << "[run]\n"
      << "seed = " << x.seed << '\n'
      << "workers = " << x.workers << '\n'
      << "max_spins = " << x.max_spins << '\n'
      << "output = " << cfg.output << '\n'
      << "\n[geometry]\n"
      << "kind = " << to_string(g.kind) << '\n'
      << "sites = " << g.sites << '\n'
      << "lattice_constant = " << num(g.lattice_constant) << '\n'
      << "spacing = " << num(g.spacing) << '\n'
      << "axis = " << num(g.axis[0]) << ", " << num(g.axis[1]) << ", " << num(g.axis[2]) << '\n'
      << "radius = " << num(g.radius) << '\n'
      << "min_distance = " << num(g.min_distance) << '\n'
      << "max_sites = " << g.max_sites << '\n'
      << "nearest_coupling = " << num(g.nearest_coupling) << '\n'
      << "cutoff = " << num(g.cutoff) << '\n'
      << "\n[orientation]\n"
      << "mode = " << to_string(x.orientation_mode) << '\n'
      << "alpha = " << num(x.orientation.alpha) << '\n'
      << "beta = " << num(x.orientation.beta) << '\n'
      << "gamma = " << num(x.orientation.gamma) << '\n'
      << "count = " << x.powder_count << '\n'
      << "\n[experiment]\n"
      << "p = " << join_values(x.p_values, num) << '\n'
      << "N = " << join_values(x.schedule, [](long v) { return std::to_string(v); }) << '\n'
      << "N0 = " << join_values(x.prep_cycles, [](long v) { return std::to_string(v); }) << '\n'
      << "tau_c = " << num(x.tau_c) << '\n'
      << "mode = " << to_string(x.mode) << '\n'
      << "normalization = " << to_string(x.normalization) << '\n'
      << "tail_fraction = " << num(x.tail_fraction) << '\n'
      << "fit_floor = " << num(x.fit_floor) << '\n'
      << "\n[error]\n"
      << "model = " << to_string(x.error_model) << '\n'
      << "strength = " << num(x.error_strength) << '\n'
      << "realizations = " << x.realizations << '\n';
  return out.str();
}

}  // namespace mqcsim::cli
