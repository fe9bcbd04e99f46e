#pragma once

#include <complex>
#include <filesystem>
#include <string>
#include <vector>

#include "afc/analysis/tomography.hpp"
#include "afc/source/detector.hpp"

namespace afc::io {

/// Rows of (axis, real, imag); axis_name is frequency_Hz or time_s.
struct ComplexSeries {
  std::string axis_name = "frequency_Hz";
  std::vector<double> axis;
  std::vector<std::complex<double>> values;
};

void write_complex_csv(const std::filesystem::path& path, const ComplexSeries& series);
/// Errors: io (unreadable file, malformed row).
ComplexSeries read_complex_csv(const std::filesystem::path& path);

/// time_s,channel for every stream, merged in time order.
void write_time_tags(const std::filesystem::path& path, const std::vector<source::TimeTagStream>& streams);
/// bin_center_s,counts
void write_histogram(const std::filesystem::path& path, const source::Histogram& h);

/// basis,outcome,counts with basis in {HV, DA, RL} and outcome in {+, -}.
void write_counts_table(const std::filesystem::path& path, const analysis::TomographyCounts& c);
analysis::TomographyCounts read_counts_table(const std::filesystem::path& path);

/// Generic table with a header row. Values are printed with 17 significant
/// digits so files are reproducible bit-for-bit.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  std::string to_string() const;
};
std::string fmt(double x);
void write_table(const std::filesystem::path& path, const Table& t);

/// x,y,yerr
Table plot_table(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& yerr);

}  // namespace afc::io
