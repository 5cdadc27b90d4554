#include "scatkf/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "scatkf/io.hpp"

namespace scatkf {

namespace {

std::string trim(const std::string& s) {
  size_t begin = 0, end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) {
    ++begin;
  }
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) {
    --end;
  }
  return s.substr(begin, end - begin);
}

// The full key schema; anything else is a typo.
const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "physics.k",
      "grid.S", "grid.M",
      "data.N", "data.J", "data.sigma", "data.seed", "data.phantom",
      "data.noise",
      "algorithm.name", "algorithm.schedule", "algorithm.alpha",
      "algorithm.rho", "algorithm.r", "algorithm.iterations",
      "output.snapshots",
      "sweep.axis", "sweep.values", "sweep.algorithms",
  };
  return keys;
}

void require_known(const std::string& key, const std::string& where) {
  if (known_keys().find(key) == known_keys().end()) {
    throw std::invalid_argument(where + ": unknown key '" + key + "'");
  }
}

double parse_double(const ConfigMap& map, const std::string& key,
                    double fallback) {
  const auto it = map.values.find(key);
  if (it == map.values.end()) return fallback;
  try {
    size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": cannot parse '" + it->second +
                                "' as a number");
  }
}

long long parse_integer(const ConfigMap& map, const std::string& key,
                        long long fallback) {
  const auto it = map.values.find(key);
  if (it == map.values.end()) return fallback;
  try {
    size_t used = 0;
    const long long v = std::stoll(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": cannot parse '" + it->second +
                                "' as an integer");
  }
}

unsigned long long parse_unsigned(const ConfigMap& map, const std::string& key,
                                  unsigned long long fallback) {
  const auto it = map.values.find(key);
  if (it == map.values.end()) return fallback;
  try {
    size_t used = 0;
    const unsigned long long v = std::stoull(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": cannot parse '" + it->second +
                                "' as a nonnegative integer");
  }
}

bool parse_bool(const ConfigMap& map, const std::string& key, bool fallback) {
  const auto it = map.values.find(key);
  if (it == map.values.end()) return fallback;
  const std::string& v = it->second;
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw std::invalid_argument(key + ": expected on/off/true/false/1/0, got '" +
                              v + "'");
}

std::string parse_choice(const ConfigMap& map, const std::string& key,
                         const std::vector<std::string>& choices,
                         const std::string& fallback) {
  const auto it = map.values.find(key);
  const std::string v = it == map.values.end() ? fallback : it->second;
  for (const auto& c : choices) {
    if (v == c) return v;
  }
  std::string allowed;
  for (const auto& c : choices) {
    if (!allowed.empty()) allowed += ", ";
    allowed += c;
  }
  throw std::invalid_argument(key + ": expected one of {" + allowed +
                              "}, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

Algorithm algorithm_from_name(const std::string& name,
                              const std::string& key) {
  for (Algorithm a : {Algorithm::flm, Algorithm::kfl_init,
                      Algorithm::kfl_carry, Algorithm::ekf_init,
                      Algorithm::ekf_carry}) {
    if (name == algorithm_name(a)) return a;
  }
  throw std::invalid_argument(
      key + ": expected one of {flm, kfl_init, kfl_carry, ekf_init, "
            "ekf_carry}, got '" + name + "'");
}

} // namespace

void ConfigMap::set_override(const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("--set expects section.key=value, got '" +
                                assignment + "'");
  }
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (key.find('.') == std::string::npos) {
    throw std::invalid_argument("--set key must be section.key, got '" + key +
                                "'");
  }
  require_known(key, "--set");
  values[key] = value;
}

ConfigMap parse_config_text(const std::string& text,
                            const std::string& origin) {
  ConfigMap map;
  std::stringstream stream(text);
  std::string line;
  std::string section;
  int line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3) {
        throw std::invalid_argument(origin + ":" + std::to_string(line_number) +
                                    ": malformed section header '" + t + "'");
      }
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(origin + ":" + std::to_string(line_number) +
                                  ": expected key = value, got '" + t + "'");
    }
    const std::string key = trim(t.substr(0, eq));
    if (section.empty() || key.empty()) {
      throw std::invalid_argument(origin + ":" + std::to_string(line_number) +
                                  ": key outside a [section] or empty key");
    }
    const std::string dotted = section + "." + key;
    require_known(dotted, origin + ":" + std::to_string(line_number));
    map.values[dotted] = trim(t.substr(eq + 1));
  }
  return map;
}

ConfigMap parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("cannot open config file " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.filename().string());
}

ScenarioConfig scenario_from_map(const ConfigMap& map) {
  ScenarioConfig config;
  config.k = parse_double(map, "physics.k", config.k);
  config.S = parse_double(map, "grid.S", config.S);
  config.M = static_cast<int>(parse_integer(map, "grid.M", config.M));
  config.N = static_cast<int>(parse_integer(map, "data.N", config.N));
  config.J = static_cast<int>(parse_integer(map, "data.J", config.J));
  config.sigma = parse_double(map, "data.sigma", config.sigma);
  config.seed = parse_unsigned(map, "data.seed", config.seed);
  config.phantom = parse_choice(map, "data.phantom", {"disk", "nine_disks"},
                                "disk") == "disk"
                       ? PhantomKind::disk
                       : PhantomKind::nine_disks;
  config.noise_real_only =
      parse_choice(map, "data.noise", {"complex", "real"}, "complex") ==
      "real";
  config.algorithm = algorithm_from_name(
      parse_choice(map, "algorithm.name",
                   {"flm", "kfl_init", "kfl_carry", "ekf_init", "ekf_carry"},
                   "ekf_init"),
      "algorithm.name");
  const std::string schedule =
      parse_choice(map, "algorithm.schedule", {"constant", "morozov"},
                   "constant");
  if (schedule == "constant") {
    const double alpha = parse_double(map, "algorithm.alpha", 100.0);
    if (!(alpha > 0.0)) {
      throw std::invalid_argument("algorithm.alpha must be > 0");
    }
    config.schedule = RegularizationSchedule::constant(alpha);
  } else {
    const double rho = parse_double(map, "algorithm.rho", 0.8);
    if (!(rho > 0.0 && rho < 1.0)) {
      throw std::invalid_argument("algorithm.rho must lie in (0, 1)");
    }
    config.schedule = RegularizationSchedule::morozov(rho);
  }
  config.r = parse_double(map, "algorithm.r", config.r);
  config.outer_iterations = static_cast<int>(
      parse_integer(map, "algorithm.iterations", config.outer_iterations));
  config.write_snapshots =
      parse_bool(map, "output.snapshots", config.write_snapshots);
  config.validate();
  return config;
}

SweepSpec sweep_from_map(const ConfigMap& map) {
  SweepSpec spec;
  spec.axis = parse_choice(map, "sweep.axis", {"sigma", "alpha"}, "sigma") ==
                      "sigma"
                  ? SweepSpec::Axis::sigma
                  : SweepSpec::Axis::alpha;

  const auto values_it = map.values.find("sweep.values");
  if (values_it == map.values.end()) {
    throw std::invalid_argument("sweep.values is required for sweep runs");
  }
  for (const std::string& item : split_list(values_it->second)) {
    try {
      size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument("trailing");
      spec.values.push_back(v);
    } catch (const std::exception&) {
      throw std::invalid_argument("sweep.values: cannot parse '" + item +
                                  "' as a number");
    }
  }
  if (spec.values.empty()) {
    throw std::invalid_argument("sweep.values must list at least one value");
  }
  for (double v : spec.values) {
    if (spec.axis == SweepSpec::Axis::sigma ? !(v >= 0.0) : !(v > 0.0)) {
      throw std::invalid_argument("sweep.values: " + io::format_double(v) +
                                  " is out of range for the axis");
    }
  }

  const auto algs_it = map.values.find("sweep.algorithms");
  if (algs_it == map.values.end()) {
    spec.algorithms = {Algorithm::kfl_init, Algorithm::kfl_carry,
                       Algorithm::ekf_init, Algorithm::ekf_carry};
  } else {
    for (const std::string& name : split_list(algs_it->second)) {
      spec.algorithms.push_back(
          algorithm_from_name(name, "sweep.algorithms"));
    }
    if (spec.algorithms.empty()) {
      throw std::invalid_argument(
          "sweep.algorithms must list at least one algorithm");
    }
  }
  return spec;
}

std::vector<std::pair<std::string, std::string>> scenario_echo(
    const ScenarioConfig& config) {
  std::vector<std::pair<std::string, std::string>> echo;
  echo.emplace_back("physics.k", io::format_double(config.k));
  echo.emplace_back("grid.S", io::format_double(config.S));
  echo.emplace_back("grid.M", std::to_string(config.M));
  echo.emplace_back("data.N", std::to_string(config.N));
  echo.emplace_back("data.J", std::to_string(config.J));
  echo.emplace_back("data.sigma", io::format_double(config.sigma));
  echo.emplace_back("data.seed", std::to_string(config.seed));
  echo.emplace_back("data.phantom",
                    config.phantom == PhantomKind::disk ? "disk"
                                                        : "nine_disks");
  echo.emplace_back("data.noise",
                    config.noise_real_only ? "real" : "complex");
  echo.emplace_back("algorithm.name", algorithm_name(config.algorithm));
  const bool constant =
      config.schedule.mode == RegularizationSchedule::Mode::constant;
  echo.emplace_back("algorithm.schedule", constant ? "constant" : "morozov");
  if (constant) {
    echo.emplace_back("algorithm.alpha",
                      io::format_double(config.schedule.alpha));
  } else {
    echo.emplace_back("algorithm.rho", io::format_double(config.schedule.rho));
  }
  echo.emplace_back("algorithm.r", io::format_double(config.r));
  echo.emplace_back("algorithm.iterations",
                    std::to_string(config.outer_iterations));
  echo.emplace_back("output.snapshots",
                    config.write_snapshots ? "on" : "off");
  return echo;
}

} // namespace scatkf
