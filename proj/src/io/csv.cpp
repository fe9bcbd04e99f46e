#include "afc/io/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "afc/error.hpp"

namespace afc::io {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string Table::to_string() const {
  std::string s;
  auto emit = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) s += ',';
      s += r[i];
    }
    s += '\n';
  };
  emit(header);
  for (const auto& r : rows) emit(r);
  return s;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::io, "cannot write " + path.string());
  return f;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  return out;
}

double parse_double(const std::string& s, const std::filesystem::path& path) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(Errc::io, "malformed number '" + s + "' in " + path.string());
  }
  return v;
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path,
                                                std::vector<std::string>& header) {
  std::ifstream f(path);
  if (!f) throw Error(Errc::io, "cannot read " + path.string());
  std::string line;
  if (!std::getline(f, line)) throw Error(Errc::io, "empty file " + path.string());
  header = split(line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(f, line)) {
    if (line.empty() || line == "\r") continue;
    auto r = split(line);
    if (r.size() != header.size()) throw Error(Errc::io, "ragged row in " + path.string());
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

void write_table(const std::filesystem::path& path, const Table& t) {
  auto f = open_out(path);
  f << t.to_string();
}

void write_complex_csv(const std::filesystem::path& path, const ComplexSeries& s) {
  if (s.axis.size() != s.values.size()) throw Error(Errc::invalid_argument, "axis and values differ in length");
  Table t{{s.axis_name, "real", "imag"}, {}};
  t.rows.reserve(s.axis.size());
  for (std::size_t i = 0; i < s.axis.size(); ++i) {
    t.add({fmt(s.axis[i]), fmt(s.values[i].real()), fmt(s.values[i].imag())});
  }
  write_table(path, t);
}

ComplexSeries read_complex_csv(const std::filesystem::path& path) {
  std::vector<std::string> header;
  const auto rows = read_rows(path, header);
  if (header.size() != 3 || header[1] != "real" || header[2] != "imag") {
    throw Error(Errc::io, "expected axis,real,imag header in " + path.string());
  }
  ComplexSeries s;
  s.axis_name = header[0];
  for (const auto& r : rows) {
    s.axis.push_back(parse_double(r[0], path));
    s.values.emplace_back(parse_double(r[1], path), parse_double(r[2], path));
  }
  return s;
}

void write_time_tags(const std::filesystem::path& path, const std::vector<source::TimeTagStream>& streams) {
  std::vector<std::pair<double, std::uint32_t>> all;
  for (const auto& s : streams) {
    for (double t : s.times) all.emplace_back(t, s.channel);
  }
  std::stable_sort(all.begin(), all.end());
  Table t{{"time_s", "channel"}, {}};
  for (const auto& [time, ch] : all) t.add({fmt(time), std::to_string(ch)});
  write_table(path, t);
}

void write_histogram(const std::filesystem::path& path, const source::Histogram& h) {
  Table t{{"bin_center_s", "counts"}, {}};
  for (std::size_t i = 0; i < h.counts.size(); ++i) t.add({fmt(h.bin_center(i)), std::to_string(h.counts[i])});
  write_table(path, t);
}

void write_counts_table(const std::filesystem::path& path, const analysis::TomographyCounts& c) {
  Table t{{"basis", "outcome", "counts"}, {}};
  auto put = [&](const char* b, const analysis::BasisCounts& bc) {
    t.add({b, "+", fmt(bc.plus)});
    t.add({b, "-", fmt(bc.minus)});
  };
  put("HV", c.hv);
  put("DA", c.da);
  put("RL", c.rl);
  write_table(path, t);
}

analysis::TomographyCounts read_counts_table(const std::filesystem::path& path) {
  std::vector<std::string> header;
  const auto rows = read_rows(path, header);
  if (header != std::vector<std::string>{"basis", "outcome", "counts"}) {
    throw Error(Errc::io, "expected basis,outcome,counts header in " + path.string());
  }
  analysis::TomographyCounts c;
  for (const auto& r : rows) {
    analysis::BasisCounts* b = nullptr;
    if (r[0] == "HV") b = &c.hv;
    else if (r[0] == "DA") b = &c.da;
    else if (r[0] == "RL") b = &c.rl;
    else throw Error(Errc::io, "unknown basis '" + r[0] + "' in " + path.string());
    const double v = parse_double(r[2], path);
    if (r[1] == "+") b->plus = v;
    else if (r[1] == "-") b->minus = v;
    else throw Error(Errc::io, "unknown outcome '" + r[1] + "' in " + path.string());
  }
  return c;
}

Table plot_table(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& yerr) {
  if (x.size() != y.size() || x.size() != yerr.size()) {
    throw Error(Errc::invalid_argument, "plot columns differ in length");
  }
  Table t{{"x", "y", "yerr"}, {}};
  for (std::size_t i = 0; i < x.size(); ++i) t.add({fmt(x[i]), fmt(y[i]), fmt(yerr[i])});
  return t;
}

}  // namespace afc::io
