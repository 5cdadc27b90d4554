#ifndef SCATKF_EXPERIMENTS_HPP
#define SCATKF_EXPERIMENTS_HPP

#include <optional>
#include <string>
#include <vector>

#include "scatkf/filters.hpp"
#include "scatkf/forward.hpp"
#include "scatkf/grid.hpp"

// Scenario orchestration: synthetic data with seeded noise, the
// reconstruction loop over the algorithm variants, and the equivalence
// harnesses used by the verification suite.

namespace scatkf {

enum class Algorithm { flm, kfl_init, kfl_carry, ekf_init, ekf_carry };

const char* algorithm_name(Algorithm a);

struct ScenarioConfig {
  double k = 7.0;   // wavenumber
  double S = 3.0;   // half-width of the square domain
  int M = 6;        // half-divisions per axis (grid is 2M x 2M)
  int N = 60;       // incident directions
  int J = 60;       // observation directions
  PhantomKind phantom = PhantomKind::disk;
  Algorithm algorithm = Algorithm::ekf_init;
  RegularizationSchedule schedule = RegularizationSchedule::constant(100.0);
  double sigma = 0.0;
  unsigned long long seed = 1;
  int outer_iterations = 10;
  double r = 1.0;               // measurement weight R = r I
  bool noise_real_only = false; // perturb only the real parts
  bool write_snapshots = false; // per-iteration field CSVs (consumed by the CLI)

  // Throws std::invalid_argument naming the offending config key.
  void validate() const;
};

// Per-outer-iteration record, index 0 being the initial state. When a
// sweep fails mid-run the history stops at the last completed iteration
// and `error` carries the diagnosis.
struct RunHistory {
  std::vector<double> mse;       // e_0 .. e_I
  std::vector<double> wall_ms;   // measured; entry 0 is 0 by definition
  std::vector<MediumField> snapshots;
  std::optional<std::string> error;

  const MediumField& final_estimate() const { return snapshots.back(); }
};

// data_n = far_field(q_true, theta_n) + noise. Each complex entry gets
// independent real and imaginary perturbations of std sigma/sqrt(2)
// (total per-entry variance sigma^2); with noise_real_only only the real
// part is perturbed, with std sigma. The generator is mt19937_64 with one
// splitmix64-derived substream per direction index and a hand-rolled
// Box-Muller transform, so the data is bit-reproducible across platforms
// and unaffected by how directions are scheduled.
MeasurementSet synthesize_measurements(const MediumField& q_true,
                                       const ScenarioConfig& config);

// Runs the configured algorithm from initial guess 0 (or `initial` when
// given), recording mse(estimate, q_true) after every outer iteration.
RunHistory run_reconstruction(
    const ScenarioConfig& config, const MeasurementSet& measurements,
    const MediumField& q_true,
    const std::optional<MediumField>& initial = std::nullopt);

enum class HarnessScale { tiny, full };

// Numeric verification of the two equivalence statements: (a) a sequential
// Kalman sweep on random linear operators against the one-shot Tikhonov
// minimizer, (b) a Kalman sweep on a scattering instance against the
// Levenberg-Marquardt step from the same linearization point, per outer
// index. Deterministic; thresholds are applied by the caller.
struct EquivalenceReport {
  double linear_max_rel_dev = 0.0;
  std::vector<double> nonlinear_rel_dev;  // one entry per outer index
};

EquivalenceReport equivalence_harness(HarnessScale scale);

} // namespace scatkf

#endif
