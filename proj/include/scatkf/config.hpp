#ifndef SCATKF_CONFIG_HPP
#define SCATKF_CONFIG_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "scatkf/experiments.hpp"

// Scenario files are flat key/value text with [section] headers, '#' or
// ';' comments, and blank lines. Keys are addressed as "section.key"
// (also the --set override syntax). Unknown keys are rejected so typos
// surface instead of silently running the defaults.

namespace scatkf {

// Parsed file as dotted keys in file order. Parse errors carry the line
// number; values keep their raw text until typed extraction.
struct ConfigMap {
  std::map<std::string, std::string> values;

  // "section.key=value" (the --set form). Throws on malformed input.
  void set_override(const std::string& assignment);
};

ConfigMap parse_config_text(const std::string& text,
                            const std::string& origin);
ConfigMap parse_config_file(const std::filesystem::path& path);

// Scenario with reference-protocol defaults for every missing key. Throws
// std::invalid_argument naming the offending key on bad values.
ScenarioConfig scenario_from_map(const ConfigMap& map);

struct SweepSpec {
  enum class Axis { sigma, alpha };
  Axis axis = Axis::sigma;
  std::vector<double> values;
  std::vector<Algorithm> algorithms;
};

// Requires [sweep] axis and a non-empty values list; the algorithm list
// defaults to the four Kalman variants.
SweepSpec sweep_from_map(const ConfigMap& map);

// Echo used by the run manifest: every scenario key with its effective
// value, in schema order.
std::vector<std::pair<std::string, std::string>> scenario_echo(
    const ScenarioConfig& config);

} // namespace scatkf

#endif
