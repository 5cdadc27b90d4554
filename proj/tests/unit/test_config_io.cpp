#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "scatkf/config.hpp"
#include "scatkf/io.hpp"

using namespace scatkf;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("scatkf_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

} // namespace

TEST_CASE("empty config yields the default protocol") {
  const ScenarioConfig config = scenario_from_map(parse_config_text("", "t"));
  CHECK(config.k == 7.0);
  CHECK(config.S == 3.0);
  CHECK(config.M == 6);
  CHECK(config.N == 60);
  CHECK(config.J == 60);
  CHECK(config.sigma == 0.0);
  CHECK(config.phantom == PhantomKind::disk);
  CHECK(config.schedule.mode == RegularizationSchedule::Mode::constant);
  CHECK(config.schedule.alpha == 100.0);
  CHECK(config.r == 1.0);
  CHECK(config.outer_iterations == 10);
  CHECK(!config.noise_real_only);
  CHECK(!config.write_snapshots);
}

TEST_CASE("config round trip with comments and overrides") {
  const std::string text =
      "# scenario\n"
      "[physics]\n"
      "k = 5.5\n"
      "\n"
      "[algorithm]\n"
      "name = kfl_carry   \n"
      "alpha = 42\n"
      "; trailing comment line\n"
      "[data]\n"
      "phantom = nine_disks\n"
      "seed = 77\n";
  ConfigMap map = parse_config_text(text, "mem");
  map.set_override("algorithm.iterations=4");
  const ScenarioConfig config = scenario_from_map(map);
  CHECK(config.k == 5.5);
  CHECK(config.algorithm == Algorithm::kfl_carry);
  CHECK(config.schedule.alpha == 42.0);
  CHECK(config.phantom == PhantomKind::nine_disks);
  CHECK(config.seed == 77);
  CHECK(config.outer_iterations == 4);
}

TEST_CASE("parse errors carry the line number") {
  CHECK_THROWS_WITH_AS(parse_config_text("[grid]\nM : 3\n", "f.ini"),
                       "f.ini:2: expected key = value, got 'M : 3'",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text("[grid\nM = 3\n", "f.ini"),
                       "f.ini:1: malformed section header '[grid'",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text("M = 3\n", "f.ini"),
                       "f.ini:1: key outside a [section] or empty key",
                       std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("[grid]\nwat = 3\n", "f.ini"),
                  std::invalid_argument);
}

TEST_CASE("validation errors name the key") {
  ConfigMap map = parse_config_text("[grid]\nM = 0\n", "t");
  CHECK_THROWS_WITH_AS(scenario_from_map(map), "grid.M must be >= 1",
                       std::invalid_argument);
  map = parse_config_text("[algorithm]\nalpha = nope\n", "t");
  CHECK_THROWS_WITH_AS(scenario_from_map(map),
                       "algorithm.alpha: cannot parse 'nope' as a number",
                       std::invalid_argument);
  map = parse_config_text("[data]\nphantom = square\n", "t");
  CHECK_THROWS_AS(scenario_from_map(map), std::invalid_argument);
  CHECK_THROWS_AS(ConfigMap{}.set_override("nodots"), std::invalid_argument);
  CHECK_THROWS_AS(ConfigMap{}.set_override("grid.M"), std::invalid_argument);
}

TEST_CASE("sweep spec parsing") {
  ConfigMap map = parse_config_text(
      "[sweep]\naxis = alpha\nvalues = 300, 100, 50\n", "t");
  const SweepSpec spec = sweep_from_map(map);
  CHECK(spec.axis == SweepSpec::Axis::alpha);
  REQUIRE(spec.values.size() == 3);
  CHECK(spec.values[0] == 300.0);
  CHECK(spec.values[2] == 50.0);
  // Default algorithm list: the four Kalman variants.
  REQUIRE(spec.algorithms.size() == 4);
  CHECK(spec.algorithms[0] == Algorithm::kfl_init);
  CHECK(spec.algorithms[3] == Algorithm::ekf_carry);

  CHECK_THROWS_AS(sweep_from_map(parse_config_text("", "t")),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      sweep_from_map(parse_config_text("[sweep]\nvalues = ,\n", "t")),
      std::invalid_argument);
  CHECK_THROWS_AS(
      sweep_from_map(
          parse_config_text("[sweep]\naxis = alpha\nvalues = 0\n", "t")),
      std::invalid_argument);
}

TEST_CASE("number formatting") {
  CHECK(io::format_double(0.5) == "0.5");
  CHECK(io::format_double(0.0) == "0");
  CHECK(io::format_double(4.0) == "4");
  // Round-trippable: 17 significant digits.
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(io::format_double_brief(0.6) == "0.6");
  CHECK(io::format_double_brief(1e-4) == "0.0001");
}

TEST_CASE("field csv layout: rows m2 ascending, real block then imag block") {
  const Grid grid(1.0, 1);  // 2x2 cells
  Eigen::VectorXcd values(4);
  // index(m1, m2): (-1,-1)=0, (0,-1)=1, (-1,0)=2, (0,0)=3
  values << Complex(1.0, 5.0), Complex(2.0, 6.0), Complex(3.0, 7.0),
      Complex(4.0, 8.0);
  const MediumField f(grid, values);

  TempDir tmp;
  const fs::path path = tmp.path / "field.csv";
  io::write_field_csv(path, f);
  CHECK(slurp(path) == "1,2,5,6\n3,4,7,8\n");
}

TEST_CASE("pgm layout: top row is the largest m2, scaled to [0,255]") {
  const Grid grid(1.0, 1);
  Eigen::VectorXcd values(4);
  values << Complex(0.0, 9.0), Complex(1.0, 9.0), Complex(2.0, 9.0),
      Complex(4.0, 9.0);
  const MediumField f(grid, values);

  TempDir tmp;
  const fs::path path = tmp.path / "field.pgm";
  io::write_field_pgm(path, f);
  // min 0, max 4: values scale to 0, 64, 128, 255; m2 = 0 row on top.
  CHECK(slurp(path) == "P2\n2 2\n255\n128 255\n0 64\n");

  // Constant field renders as zeros, not NaNs.
  const MediumField flat(grid, Eigen::VectorXcd::Constant(4, Complex(2, 0)));
  io::write_field_pgm(path, flat);
  CHECK(slurp(path) == "P2\n2 2\n255\n0 0\n0 0\n");
}

TEST_CASE("mse csv fixes the wall_ms column to zero") {
  TempDir tmp;
  const fs::path path = tmp.path / "mse.csv";
  io::write_mse_csv(path, {4.0, 2.5, 1.25});
  CHECK(slurp(path) ==
        "iteration,mse,wall_ms\n0,4,0\n1,2.5,0\n2,1.25,0\n");
}

TEST_CASE("sweep summary layout") {
  TempDir tmp;
  const fs::path path = tmp.path / "sweep_summary.csv";
  io::SweepSummaryRow good{"sigma", 0.6, "ekf_init", 2.0, 0.5, 3, false};
  io::SweepSummaryRow bad{"sigma", 0.9, "kfl_init", 0.0, 0.0, 0, true};
  io::write_sweep_summary(path, {good, bad});
  CHECK(slurp(path) ==
        "axis,value,algorithm,final_mse,min_mse,min_iteration\n"
        "sigma,0.6,ekf_init,2,0.5,3\n"
        "sigma,0.9,kfl_init,nan,nan,-1\n");
}

TEST_CASE("scenario echo covers the full schema") {
  ScenarioConfig config;
  config.schedule = RegularizationSchedule::morozov(0.5);
  const auto echo = scenario_echo(config);
  bool saw_rho = false, saw_seed = false;
  for (const auto& [key, value] : echo) {
    if (key == "algorithm.rho") {
      saw_rho = true;
      CHECK(value == "0.5");
    }
    if (key == "data.seed") {
      saw_seed = true;
      CHECK(value == "1");
    }
  }
  CHECK(saw_rho);
  CHECK(saw_seed);
}
