#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "marginlab/bounds.hpp"
#include "marginlab/classes.hpp"

namespace marginlab {

// Configuration problem; line is 0 when not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class ExperimentKind { Bounds, Simulate, Rates, LowerLab, Regress, Verify };

const char* to_string(ExperimentKind kind);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Bounds;
  std::uint64_t seed = 1;
  std::size_t replications = 1000;
  std::string output;
  std::string experiment_id = "run";
  std::size_t threads = 1;

  // sweep
  std::vector<std::size_t> n;
  std::vector<double> h;
  std::vector<double> theta{1.0};
  std::vector<std::string> bounds;  // empty: every bound id

  // class and distribution
  std::string class_kind = "powerset";  // powerset | sparse | halfspace | file
  std::size_t V = 0;
  std::size_t N = 0;
  std::size_t D = 0;
  std::vector<Point> points;
  std::string file;
  std::string distribution = "assouad";  // assouad | uniform

  // constants
  BoundConstants constants;
  std::optional<double> L0;
  std::optional<double> EH;
  std::optional<double> p;
  double r = 0.5;
  double rho = 0.0;

  // regression
  double a = 0.25;
  double b = 0.75;
  double L = 1.0;
  double alpha = 1.0;

  // lower-bound lab: (N, D) packings
  std::vector<std::pair<std::size_t, std::size_t>> packing;
};

// Flat key=value lines, optional [section] headers, '#' comments,
// comma-separated lists. Throws ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Class described by the configuration (powerset needs V, sparse N and D, ...).
ClassifierClass build_config_class(const ExperimentConfig& config);

// One CSV line. Risk columns are empty for rows without a simulation.
struct ResultRow {
  std::string experiment_id;
  std::string kind;
  std::size_t n = 0;  // 0 marks rows that summarize a sweep
  double h = 0.0;
  std::size_t V = 0;
  std::size_t D = 0;
  double theta = 1.0;
  std::size_t replications = 0;
  std::optional<double> risk_mean;
  std::optional<double> risk_stderr;
  std::string bound_id;
  double bound_value = 0.0;
  bool bound_valid = false;
};

using ResultTable = std::vector<ResultRow>;

inline constexpr const char* kReportHeader =
    "experiment_id,kind,n,h,V,D,theta,replications,risk_mean,risk_stderr,bound_id,bound_value,bound_valid";

// Runs the configured experiment; rows come back sorted by (n, h, bound_id).
ResultTable run_sweep(const ExperimentConfig& config);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

// Least squares of log risk on log n. Needs >= 2 points with distinct n and
// positive risk.
RateFit fit_rate(const std::vector<std::pair<double, double>>& pairs);

// max(risk, 1 / (10 R n)); second is true when the floor was applied.
std::pair<double, bool> floor_risk(double risk, std::size_t R, std::size_t n);

// Shortest round-trip decimal; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double x);

void sort_rows(ResultTable& table);
void write_report(std::ostream& out, const ResultTable& table);
void emit_report(const ResultTable& table, const std::filesystem::path& path);
ResultTable read_report(std::istream& in);

// Command line entry point; returns the process exit code.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace marginlab
