#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "marginlab/experiment.hpp"

namespace marginlab {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) {
      break;
    }
    start = comma + 1;
  }
  return out;
}

double parse_double_field(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != end) {
    throw std::runtime_error("report line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

std::size_t parse_count_field(const std::string& s, std::size_t line) {
  std::size_t v = 0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != end) {
    throw std::runtime_error("report line " + std::to_string(line) + ": bad count '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) {
    return "nan";
  }
  if (std::isinf(x)) {
    return x > 0 ? "inf" : "-inf";
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void sort_rows(ResultTable& table) {
  std::stable_sort(table.begin(), table.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.n != b.n) {
      return a.n < b.n;
    }
    if (a.h != b.h) {
      return a.h < b.h;
    }
    return a.bound_id < b.bound_id;
  });
}

void write_report(std::ostream& out, const ResultTable& table) {
  out << kReportHeader << '\n';
  for (const auto& r : table) {
    out << r.experiment_id << ',' << r.kind << ',' << r.n << ',' << format_double(r.h) << ',' << r.V << ','
        << r.D << ',' << format_double(r.theta) << ',' << r.replications << ','
        << (r.risk_mean ? format_double(*r.risk_mean) : "") << ','
        << (r.risk_stderr ? format_double(*r.risk_stderr) : "") << ',' << r.bound_id << ','
        << format_double(r.bound_value) << ',' << (r.bound_valid ? 1 : 0) << '\n';
  }
}

void emit_report(const ResultTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open output file " + path.string());
  }
  write_report(out, table);
  out.flush();
  if (!out) {
    throw std::runtime_error("failed writing output file " + path.string());
  }
}

ResultTable read_report(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kReportHeader) {
    throw std::runtime_error("report: unexpected header");
  }
  ResultTable table;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto f = split_fields(line);
    if (f.size() != 13) {
      throw std::runtime_error("report line " + std::to_string(lineno) + ": expected 13 fields");
    }
    ResultRow r;
    r.experiment_id = f[0];
    r.kind = f[1];
    r.n = parse_count_field(f[2], lineno);
    r.h = parse_double_field(f[3], lineno);
    r.V = parse_count_field(f[4], lineno);
    r.D = parse_count_field(f[5], lineno);
    r.theta = parse_double_field(f[6], lineno);
    r.replications = parse_count_field(f[7], lineno);
    if (!f[8].empty()) {
      r.risk_mean = parse_double_field(f[8], lineno);
    }
    if (!f[9].empty()) {
      r.risk_stderr = parse_double_field(f[9], lineno);
    }
    r.bound_id = f[10];
    r.bound_value = parse_double_field(f[11], lineno);
    if (f[12] != "0" && f[12] != "1") {
      throw std::runtime_error("report line " + std::to_string(lineno) + ": validity must be 0 or 1");
    }
    r.bound_valid = f[12] == "1";
    table.push_back(std::move(r));
  }
  return table;
}

}  // namespace marginlab
