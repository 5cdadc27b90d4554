#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "scatkf/config.hpp"
#include "scatkf/experiments.hpp"
#include "scatkf/forward.hpp"
#include "scatkf/io.hpp"

namespace fs = std::filesystem;
using namespace scatkf;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string utc_now() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

struct RunTiming {
  std::string started = utc_now();
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
  }
};

// Manifest: config echo, timings and status. Deliberately outside the
// byte-identity contract (timestamps and wall times live here).
void write_manifest(const fs::path& dir, const std::string& subcommand,
                    const ScenarioConfig& config, const RunTiming& timing,
                    const std::optional<std::string>& error,
                    const std::vector<double>* iteration_ms) {
  std::ofstream out(dir / "manifest.txt", std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + (dir / "manifest.txt").string() +
                             " for writing");
  }
  out << "[run]\n";
  out << "version = " << kVersion << '\n';
  out << "subcommand = " << subcommand << '\n';
  out << "status = " << (error ? "FAILED" : "success") << '\n';
  if (error) out << "error = " << *error << '\n';
  out << "started_utc = " << timing.started << '\n';
  out << "elapsed_ms = " << io::format_double(timing.elapsed_ms()) << '\n';
  out << "\n[config]\n";
  for (const auto& [key, value] : scenario_echo(config)) {
    out << key << " = " << value << '\n';
  }
  if (iteration_ms && !iteration_ms->empty()) {
    out << "\n[timing]\n";
    for (size_t i = 1; i < iteration_ms->size(); ++i) {
      out << "iteration_" << i << "_ms = "
          << io::format_double((*iteration_ms)[i]) << '\n';
    }
  }
  out.flush();
  if (!out) {
    throw std::runtime_error("write failed for " +
                             (dir / "manifest.txt").string());
  }
}

ScenarioConfig load_scenario(const std::string& config_path,
                             const std::vector<std::string>& overrides) {
  ConfigMap map = config_path.empty() ? ConfigMap{}
                                      : parse_config_file(config_path);
  for (const std::string& assignment : overrides) {
    map.set_override(assignment);
  }
  return scenario_from_map(map);
}

fs::path prepare_out_dir(const std::string& out_dir) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  return dir;
}

std::string snapshot_name(size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "estimate_iter_%03zu.csv", i);
  return buf;
}

// Shared by `reconstruct` and each sweep cell: synthesize, reconstruct,
// write every artifact, record status in the manifest. Returns the
// history (possibly with an error attached).
RunHistory reconstruct_into(const ScenarioConfig& config, const fs::path& dir) {
  const RunTiming timing;
  RunHistory history;
  std::optional<std::string> error;
  try {
    const Grid grid(config.S, config.M);
    const MediumField q_true = phantom(grid, config.phantom);
    const MeasurementSet measurements =
        synthesize_measurements(q_true, config);
    history = run_reconstruction(config, measurements, q_true);
    error = history.error;

    io::write_mse_csv(dir / "mse.csv", history.mse);
    io::write_field_csv(dir / "final_estimate.csv", history.final_estimate());
    io::write_field_pgm(dir / "final_estimate.pgm", history.final_estimate());
    io::write_field_csv(dir / "truth.csv", q_true);
    io::write_field_pgm(dir / "truth.pgm", q_true);
    if (config.write_snapshots) {
      for (size_t i = 0; i < history.snapshots.size(); ++i) {
        io::write_field_csv(dir / snapshot_name(i), history.snapshots[i]);
      }
    }
  } catch (const std::exception& e) {
    error = e.what();
    if (!history.error) history.error = error;
  }
  write_manifest(dir, "reconstruct", config, timing, error,
                 &history.wall_ms);
  return history;
}

int cmd_forward(const ScenarioConfig& config, const fs::path& dir) {
  const RunTiming timing;
  std::optional<std::string> error;
  try {
    const Grid grid(config.S, config.M);
    const MediumField q_true = phantom(grid, config.phantom);
    const GreenMatrix G = assemble_green_matrix(grid, config.k);
    const FarFieldRowOperator C =
        assemble_far_field_rows(grid, ObservationSet(config.J), config.k);
    const DirectionSet directions(config.N);

    std::vector<Eigen::VectorXcd> far_rows;
    far_rows.reserve(config.N);
    for (int n = 0; n < config.N; ++n) {
      const Eigen::Vector2d theta = directions.vector(n);
      const TotalField u = solve_total_field(G, q_true, theta);
      char name[40];
      std::snprintf(name, sizeof(name), "total_field_%03d.csv", n);
      io::write_field_csv(dir / name, MediumField(grid, u.values));
      far_rows.push_back(far_field(C, G, q_true, theta));
    }
    io::write_complex_table_csv(dir / "far_field.csv", far_rows);
    io::write_field_csv(dir / "truth.csv", q_true);
  } catch (const std::exception& e) {
    error = e.what();
  }
  write_manifest(dir, "forward", config, timing, error, nullptr);
  if (error) {
    std::cerr << "error: " << *error << '\n';
    return 1;
  }
  return 0;
}

int cmd_synth(const ScenarioConfig& config, const fs::path& dir) {
  const RunTiming timing;
  std::optional<std::string> error;
  try {
    const Grid grid(config.S, config.M);
    const MediumField q_true = phantom(grid, config.phantom);
    const MeasurementSet measurements =
        synthesize_measurements(q_true, config);
    io::write_complex_table_csv(dir / "measurements.csv", measurements.data);
    io::write_field_csv(dir / "truth.csv", q_true);
  } catch (const std::exception& e) {
    error = e.what();
  }
  write_manifest(dir, "synth", config, timing, error, nullptr);
  if (error) {
    std::cerr << "error: " << *error << '\n';
    return 1;
  }
  return 0;
}

int cmd_reconstruct(const ScenarioConfig& config, const fs::path& dir) {
  const RunHistory history = reconstruct_into(config, dir);
  if (history.error) {
    std::cerr << "error: " << *history.error << '\n';
    return 1;
  }
  return 0;
}

int cmd_equivalence(const std::string& scale_name, const fs::path& dir) {
  const HarnessScale scale =
      scale_name == "full" ? HarnessScale::full : HarnessScale::tiny;
  const EquivalenceReport report = equivalence_harness(scale);

  std::ofstream out(dir / "equivalence.txt", std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " +
                             (dir / "equivalence.txt").string() +
                             " for writing");
  }
  out << "scale = " << scale_name << '\n';
  out << "linear_max_rel_dev = "
      << io::format_double(report.linear_max_rel_dev) << '\n';
  for (size_t i = 0; i < report.nonlinear_rel_dev.size(); ++i) {
    out << "nonlinear_rel_dev_i" << i << " = "
        << io::format_double(report.nonlinear_rel_dev[i]) << '\n';
  }
  out.flush();

  std::cout << "linear_max_rel_dev = " << report.linear_max_rel_dev << '\n';
  for (size_t i = 0; i < report.nonlinear_rel_dev.size(); ++i) {
    std::cout << "nonlinear_rel_dev_i" << i << " = "
              << report.nonlinear_rel_dev[i] << '\n';
  }
  return 0;
}

int cmd_sweep(const ScenarioConfig& base, const SweepSpec& spec,
              const fs::path& dir, int workers) {
  struct Cell {
    ScenarioConfig config;
    fs::path dir;
    io::SweepSummaryRow row;
  };
  const std::string axis_name =
      spec.axis == SweepSpec::Axis::sigma ? "sigma" : "alpha";

  std::vector<Cell> cells;
  for (double value : spec.values) {
    for (Algorithm algorithm : spec.algorithms) {
      Cell cell;
      cell.config = base;
      cell.config.algorithm = algorithm;
      if (spec.axis == SweepSpec::Axis::sigma) {
        cell.config.sigma = value;
      } else {
        cell.config.schedule = RegularizationSchedule::constant(value);
      }
      cell.config.validate();
      cell.dir = dir / (axis_name + "_" + io::format_double_brief(value)) /
                 algorithm_name(algorithm);
      cell.row.axis = axis_name;
      cell.row.value = value;
      cell.row.algorithm = algorithm_name(algorithm);
      cells.push_back(std::move(cell));
    }
  }

  std::atomic<size_t> next{0};
  auto worker = [&cells, &next] {
    for (;;) {
      const size_t idx = next.fetch_add(1);
      if (idx >= cells.size()) return;
      Cell& cell = cells[idx];
      try {
        fs::create_directories(cell.dir);
        const RunHistory history = reconstruct_into(cell.config, cell.dir);
        if (history.error) {
          cell.row.failed = true;
          continue;
        }
        cell.row.final_mse = history.mse.back();
        size_t argmin = 0;
        for (size_t i = 1; i < history.mse.size(); ++i) {
          if (history.mse[i] < history.mse[argmin]) argmin = i;
        }
        cell.row.min_mse = history.mse[argmin];
        cell.row.min_iteration = static_cast<int>(argmin);
      } catch (const std::exception&) {
        cell.row.failed = true;  // per-cell isolation
      }
    }
  };

  const size_t pool_size = std::min<size_t>(
      std::max(workers, 1), cells.empty() ? 1 : cells.size());
  std::vector<std::thread> pool;
  for (size_t t = 0; t < pool_size; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::vector<io::SweepSummaryRow> rows;
  rows.reserve(cells.size());
  int failures = 0;
  for (const Cell& cell : cells) {
    rows.push_back(cell.row);
    if (cell.row.failed) ++failures;
  }
  io::write_sweep_summary(dir / "sweep_summary.csv", rows);
  if (failures > 0) {
    std::cerr << "error: " << failures << " of " << cells.size()
              << " sweep cells failed (see per-cell manifests)\n";
    return 1;
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"2-D inverse medium scattering: forward simulation and "
               "Kalman-type reconstruction"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  std::string scale_name = "tiny";
  int workers = 1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path,
                    "scenario file (missing keys take the defaults)");
    cmd->add_option("--out", out_dir, "output directory")->required();
    cmd->add_option("--set", overrides,
                    "override a scenario key: section.key=value");
  };

  CLI::App* forward = app.add_subcommand(
      "forward", "solve the forward problem, write fields and far-field data");
  add_common(forward);
  CLI::App* synth = app.add_subcommand(
      "synth", "write the (optionally noisy) measurement set");
  add_common(synth);
  CLI::App* reconstruct = app.add_subcommand(
      "reconstruct", "run the configured reconstruction, write mse.csv and "
                     "estimate fields");
  add_common(reconstruct);
  CLI::App* equivalence = app.add_subcommand(
      "equivalence", "numeric check of the Kalman/Tikhonov equivalences");
  equivalence->add_option("--out", out_dir, "output directory")->required();
  equivalence->add_option("--scale", scale_name, "tiny or full")
      ->check(CLI::IsMember({"tiny", "full"}));
  CLI::App* sweep = app.add_subcommand(
      "sweep", "grid of runs over a sigma or alpha list times an algorithm "
               "list");
  add_common(sweep);
  sweep->add_option("--workers", workers, "parallel sweep cells")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    const fs::path dir = prepare_out_dir(out_dir);
    if (*equivalence) {
      return cmd_equivalence(scale_name, dir);
    }
    const ScenarioConfig config = load_scenario(config_path, overrides);
    if (*forward) return cmd_forward(config, dir);
    if (*synth) return cmd_synth(config, dir);
    if (*reconstruct) return cmd_reconstruct(config, dir);
    if (*sweep) {
      ConfigMap map = config_path.empty() ? ConfigMap{}
                                          : parse_config_file(config_path);
      for (const std::string& assignment : overrides) {
        map.set_override(assignment);
      }
      return cmd_sweep(config, sweep_from_map(map), dir, workers);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
