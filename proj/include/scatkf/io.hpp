#ifndef SCATKF_IO_HPP
#define SCATKF_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "scatkf/grid.hpp"

// Deterministic artifact writers. Every number is printed with "%.17g" in
// the C locale, so identical inputs produce byte-identical files; nothing
// time- or platform-dependent is allowed in here (wall-clock timings
// belong to the manifest, which is exempt from the byte-identity
// contract).

namespace scatkf::io {

// "%.17g" rendering of a double (round-trippable, locale-independent).
std::string format_double(double v);

// "%g" rendering: short, deterministic, not round-trippable. Used for
// sweep directory names and the sweep summary's value column so the two
// match.
std::string format_double_brief(double v);

// Complex field on the grid, one row per m2 (ascending), columns m1
// ascending; each row lists the real block first, then the imaginary
// block, comma separated, no header.
void write_field_csv(const std::filesystem::path& path, const MediumField& f);

// ASCII P2 grayscale of the real part, linearly scaled [min, max] ->
// [0, 255]. Rows top to bottom are m2 descending (y pointing up in the
// image); columns are m1 ascending. A constant field renders as all
// zeros.
void write_field_pgm(const std::filesystem::path& path, const MediumField& f);

// Rows are vectors (e.g. one far-field vector per incident direction, row
// order = direction order), each printed real block then imaginary block.
void write_complex_table_csv(const std::filesystem::path& path,
                             const std::vector<Eigen::VectorXcd>& rows);

// `iteration,mse,wall_ms` with row index 0..len-1. The wall_ms column is
// fixed to 0 so reruns are byte-identical; measured timings go to the run
// manifest instead.
void write_mse_csv(const std::filesystem::path& path,
                   const std::vector<double>& mse);

struct SweepSummaryRow {
  std::string axis;       // "sigma" or "alpha"
  double value = 0.0;
  std::string algorithm;
  double final_mse = 0.0;
  double min_mse = 0.0;
  int min_iteration = 0;
  bool failed = false;    // failed cells print nan for the mse columns
};

// `axis,value,algorithm,final_mse,min_mse,min_iteration`, one row per
// sweep cell in the caller's order.
void write_sweep_summary(const std::filesystem::path& path,
                         const std::vector<SweepSummaryRow>& rows);

} // namespace scatkf::io

#endif
