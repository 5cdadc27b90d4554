#include "scatkf/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace scatkf::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_double_brief(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // binary: no newline mangling
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) {
    throw std::runtime_error("write failed for " + path.string());
  }
}

} // namespace

void write_field_csv(const std::filesystem::path& path, const MediumField& f) {
  auto out = open_for_write(path);
  const int m_half = f.grid.M();
  for (int m2 = -m_half; m2 < m_half; ++m2) {
    std::string line;
    for (int m1 = -m_half; m1 < m_half; ++m1) {
      if (!line.empty()) line += ',';
      line += format_double(f.values[f.grid.index(m1, m2)].real());
    }
    for (int m1 = -m_half; m1 < m_half; ++m1) {
      line += ',';
      line += format_double(f.values[f.grid.index(m1, m2)].imag());
    }
    out << line << '\n';
  }
  finish(out, path);
}

void write_field_pgm(const std::filesystem::path& path, const MediumField& f) {
  auto out = open_for_write(path);
  const int m_half = f.grid.M();
  const int side = 2 * m_half;

  double lo = f.values[0].real(), hi = lo;
  for (int c = 1; c < f.grid.cell_count(); ++c) {
    lo = std::min(lo, f.values[c].real());
    hi = std::max(hi, f.values[c].real());
  }
  const double span = hi - lo;

  out << "P2\n" << side << ' ' << side << "\n255\n";
  for (int m2 = m_half - 1; m2 >= -m_half; --m2) {  // top row = largest y
    std::string line;
    for (int m1 = -m_half; m1 < m_half; ++m1) {
      const double v = f.values[f.grid.index(m1, m2)].real();
      const long g = span > 0.0 ? std::lround(255.0 * (v - lo) / span) : 0;
      if (!line.empty()) line += ' ';
      line += std::to_string(g);
    }
    out << line << '\n';
  }
  finish(out, path);
}

void write_complex_table_csv(const std::filesystem::path& path,
                             const std::vector<Eigen::VectorXcd>& rows) {
  auto out = open_for_write(path);
  for (const auto& row : rows) {
    std::string line;
    for (int j = 0; j < row.size(); ++j) {
      if (!line.empty()) line += ',';
      line += format_double(row[j].real());
    }
    for (int j = 0; j < row.size(); ++j) {
      line += ',';
      line += format_double(row[j].imag());
    }
    out << line << '\n';
  }
  finish(out, path);
}

void write_mse_csv(const std::filesystem::path& path,
                   const std::vector<double>& mse) {
  auto out = open_for_write(path);
  out << "iteration,mse,wall_ms\n";
  for (size_t i = 0; i < mse.size(); ++i) {
    out << i << ',' << format_double(mse[i]) << ",0\n";
  }
  finish(out, path);
}

void write_sweep_summary(const std::filesystem::path& path,
                         const std::vector<SweepSummaryRow>& rows) {
  auto out = open_for_write(path);
  out << "axis,value,algorithm,final_mse,min_mse,min_iteration\n";
  for (const auto& row : rows) {
    if (row.failed) {
      out << row.axis << ',' << format_double_brief(row.value) << ','
          << row.algorithm << ",nan,nan,-1\n";
    } else {
      out << row.axis << ',' << format_double_brief(row.value) << ','
          << row.algorithm << ',' << format_double(row.final_mse) << ','
          << format_double(row.min_mse) << ',' << row.min_iteration << '\n';
    }
  }
  finish(out, path);
}

} // namespace scatkf::io
