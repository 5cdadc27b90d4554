#include "scatkf/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace scatkf {

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::flm: return "flm";
    case Algorithm::kfl_init: return "kfl_init";
    case Algorithm::kfl_carry: return "kfl_carry";
    case Algorithm::ekf_init: return "ekf_init";
    case Algorithm::ekf_carry: return "ekf_carry";
  }
  throw std::logic_error("algorithm_name: unhandled enum value");
}

void ScenarioConfig::validate() const {
  if (!(k > 0.0)) throw std::invalid_argument("physics.k must be > 0");
  if (!(S > 0.0)) throw std::invalid_argument("grid.S must be > 0");
  if (M < 1) throw std::invalid_argument("grid.M must be >= 1");
  if (N < 1) throw std::invalid_argument("data.N must be >= 1");
  if (J < 1) throw std::invalid_argument("data.J must be >= 1");
  if (!(sigma >= 0.0)) throw std::invalid_argument("data.sigma must be >= 0");
  if (outer_iterations < 0) {
    throw std::invalid_argument("algorithm.iterations must be >= 0");
  }
  if (!(r > 0.0)) throw std::invalid_argument("algorithm.r must be > 0");
  if (schedule.mode == RegularizationSchedule::Mode::constant) {
    if (!(schedule.alpha > 0.0)) {
      throw std::invalid_argument("algorithm.alpha must be > 0");
    }
  } else if (!(schedule.rho > 0.0 && schedule.rho < 1.0)) {
    throw std::invalid_argument("algorithm.rho must lie in (0, 1)");
  }
}

namespace {

// splitmix64 finalizer; substream n draws its mt19937_64 seed from the
// n-th step of the splitmix sequence started at `seed`.
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, int n) {
  return splitmix64(seed + static_cast<std::uint64_t>(n) *
                               0x9E3779B97F4A7C15ULL);
}

// Uniform in [0, 1) from the top 53 bits; together with the explicit
// Box-Muller below this sidesteps std::normal_distribution, whose output
// sequence is implementation-defined.
double next_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::pair<double, double> next_normal_pair(std::mt19937_64& rng) {
  const double u1 = next_uniform(rng);
  const double u2 = next_uniform(rng);
  const double radius = std::sqrt(-2.0 * std::log1p(-u1));  // u1 < 1 always
  const double angle = 2.0 * 3.14159265358979323846 * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

} // namespace

MeasurementSet synthesize_measurements(const MediumField& q_true,
                                       const ScenarioConfig& config) {
  config.validate();
  const Grid grid(config.S, config.M);
  if (!(q_true.grid == grid)) {
    throw std::invalid_argument(
        "synthesize_measurements: q_true grid differs from config");
  }
  const GreenMatrix G = assemble_green_matrix(grid, config.k);
  const FarFieldRowOperator C =
      assemble_far_field_rows(grid, ObservationSet(config.J), config.k);
  const LinearizedForward fwd(C, G, q_true);

  MeasurementSet out{DirectionSet(config.N), {}, config.sigma, config.seed};
  out.data.reserve(config.N);
  for (int n = 0; n < config.N; ++n) {
    FarFieldData data = fwd.far_field(out.directions.vector(n));
    if (config.sigma > 0.0) {
      std::mt19937_64 rng(substream_seed(config.seed, n));
      const double component_std =
          config.noise_real_only ? config.sigma
                                 : config.sigma / std::sqrt(2.0);
      for (int j = 0; j < data.size(); ++j) {
        const auto [z0, z1] = next_normal_pair(rng);
        if (config.noise_real_only) {
          data[j] += Complex(component_std * z0, 0.0);
        } else {
          data[j] += Complex(component_std * z0, component_std * z1);
        }
      }
    }
    out.data.push_back(std::move(data));
  }
  return out;
}

RunHistory run_reconstruction(const ScenarioConfig& config,
                              const MeasurementSet& measurements,
                              const MediumField& q_true,
                              const std::optional<MediumField>& initial) {
  config.validate();
  const Grid grid(config.S, config.M);
  if (!(q_true.grid == grid)) {
    throw std::invalid_argument(
        "run_reconstruction: q_true grid differs from config");
  }
  const GreenMatrix G = assemble_green_matrix(grid, config.k);
  const FarFieldRowOperator C =
      assemble_far_field_rows(grid, ObservationSet(config.J), config.k);

  MediumField q = initial.value_or(MediumField::zero(grid));
  if (!(q.grid == grid)) {
    throw std::invalid_argument(
        "run_reconstruction: initial guess grid differs from config");
  }

  RunHistory history;
  history.mse.push_back(mse(q, q_true));
  history.wall_ms.push_back(0.0);
  history.snapshots.push_back(q);

  const bool carry = config.algorithm == Algorithm::kfl_carry ||
                     config.algorithm == Algorithm::ekf_carry;
  const WeightPolicyMode policy =
      carry ? WeightPolicyMode::carry_over : WeightPolicyMode::initialize;
  std::optional<FilterState> state;

  for (int i = 0; i < config.outer_iterations; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const double alpha_i =
          config.schedule.mode == RegularizationSchedule::Mode::constant
              ? config.schedule.alpha
              : morozov_alpha(q, C, G, measurements, config.schedule.rho,
                              config.r);
      switch (config.algorithm) {
        case Algorithm::flm:
          q = flm_step(q, C, G, measurements, alpha_i, config.r);
          break;
        case Algorithm::kfl_init:
        case Algorithm::kfl_carry:
          state = kfl_sweep(apply_weight_policy(state, q, alpha_i, policy), C,
                            G, measurements, config.r);
          q = state->q;
          break;
        case Algorithm::ekf_init:
        case Algorithm::ekf_carry:
          state = ekf_sweep(apply_weight_policy(state, q, alpha_i, policy), C,
                            G, measurements, config.r);
          q = state->q;
          break;
      }
    } catch (const std::exception& e) {
      history.error = "outer iteration " + std::to_string(i) + ": " + e.what();
      break;
    }
    const auto t1 = std::chrono::steady_clock::now();
    history.mse.push_back(mse(q, q_true));
    history.wall_ms.push_back(
        std::chrono::duration<double, std::milli>(t1 - t0).count());
    history.snapshots.push_back(q);
  }
  return history;
}

EquivalenceReport equivalence_harness(HarnessScale scale) {
  EquivalenceReport report;

  // (a) Random linear operators: sequential Kalman vs one-shot minimizer.
  {
    const int d = scale == HarnessScale::tiny ? 8 : 16;
    const int j = scale == HarnessScale::tiny ? 4 : 8;
    const int n_count = scale == HarnessScale::tiny ? 5 : 10;
    const double wx = 0.25, wy = 2.0 * 3.14159265358979323846 / j;
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto rand_matrix = [&](int rows, int cols) {
      Eigen::MatrixXcd m(rows, cols);
      for (int c = 0; c < cols; ++c) {
        for (int row = 0; row < rows; ++row) m(row, c) = Complex(u(rng), u(rng));
      }
      return m;
    };
    std::vector<Eigen::MatrixXcd> ops;
    std::vector<Eigen::VectorXcd> data;
    for (int n = 0; n < n_count; ++n) {
      ops.push_back(rand_matrix(j, d));
      data.push_back(rand_matrix(j, 1));
    }
    const Eigen::VectorXcd prior = rand_matrix(d, 1);

    for (double alpha : {0.5, 10.0, 400.0}) {
      const Eigen::VectorXcd direct =
          full_tikhonov_core(prior, ops, data, alpha, wx, wy, 1.0);
      Eigen::VectorXcd q = prior;
      Eigen::MatrixXcd B = (1.0 / alpha) * Eigen::MatrixXcd::Identity(d, d);
      for (int n = 0; n < n_count; ++n) {
        kalman_update_core(q, B, ops[n], data[n], wx, wy, 1.0, n + 1);
      }
      report.linear_max_rel_dev =
          std::max(report.linear_max_rel_dev,
                   (q - direct).norm() / direct.norm());
    }
  }

  // (b) Scattering instance: Kalman sweep vs Levenberg-Marquardt step from
  // the same linearization point, chained along the LM trajectory.
  {
    const bool tiny = scale == HarnessScale::tiny;
    const double k = tiny ? 1.0 : 7.0;
    const int m_half = tiny ? 3 : 6;
    const int n_count = tiny ? 8 : 60;
    const int j_count = tiny ? 16 : 60;
    const int outers = tiny ? 3 : 1;
    const double alpha = tiny ? 10.0 : 100.0;

    const Grid grid(3.0, m_half);
    const GreenMatrix G = assemble_green_matrix(grid, k);
    const FarFieldRowOperator C =
        assemble_far_field_rows(grid, ObservationSet(j_count), k);
    const MediumField q_true = phantom(grid, PhantomKind::disk);
    MeasurementSet meas{DirectionSet(n_count), {}, 0.0, 0};
    const LinearizedForward truth(C, G, q_true);
    for (int n = 0; n < n_count; ++n) {
      meas.data.push_back(truth.far_field(meas.directions.vector(n)));
    }

    MediumField q_i = MediumField::zero(grid);
    for (int i = 0; i < outers; ++i) {
      const MediumField lm = flm_step(q_i, C, G, meas, alpha, 1.0);
      const FilterState swept =
          kfl_sweep(apply_weight_policy(std::nullopt, q_i, alpha,
                                        WeightPolicyMode::initialize),
                    C, G, meas, 1.0);
      report.nonlinear_rel_dev.push_back(
          (swept.q.values - lm.values).norm() / lm.values.norm());
      q_i = lm;
    }
  }
  return report;
}

} // namespace scatkf
