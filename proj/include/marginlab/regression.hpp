#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace marginlab {

// A function [0,1] -> [0,1], either piecewise constant on D equal bins or a
// path sampled on a regular grid and linearly interpolated.
class BoundaryFunction {
 public:
  enum class Kind { PiecewiseConstant, Path };

  static BoundaryFunction constant(double c);
  static BoundaryFunction piecewise(std::vector<double> bin_values);
  static BoundaryFunction path(std::vector<double> grid_values);

  Kind kind() const { return kind_; }
  const std::vector<double>& values() const { return values_; }
  // Number of bins, or grid points for a path.
  std::size_t resolution() const { return values_.size(); }

  double operator()(double x) const;

  // Sorted breakpoints in [0,1], endpoints included.
  std::vector<double> breakpoints() const;

 private:
  BoundaryFunction(Kind kind, std::vector<double> values);

  Kind kind_;
  std::vector<double> values_;
};

// Two gray levels separated by the boundary fragment f.
struct ImageModel {
  double a = 0.25;
  double b = 0.75;
  BoundaryFunction f = BoundaryFunction::constant(0.5);

  ImageModel(double a, double b, BoundaryFunction f);
};

// b if x2 <= f(x1), else a.
double chi(const ImageModel& model, double x1, double x2);

struct RegressionPoint {
  double x1 = 0.0;
  double x2 = 0.0;
  std::uint8_t y = 0;
};

struct RegressionSample {
  std::vector<RegressionPoint> points;
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;
};

// (x1, x2) uniform on the unit square, y ~ Bernoulli(chi(x1, x2)).
RegressionSample draw_regression_sample(const ImageModel& model, std::size_t n, std::uint64_t seed,
                                        std::uint64_t replication);

// Least-squares fit over boundaries that are constant on D equal bins. Bins
// decouple, so each threshold is scanned over {0} u {x2 in bin} u {1}; ties go
// to the smallest threshold and empty bins get 0. Needs 0 <= a < b <= 1.
BoundaryFunction histogram_erm(const RegressionSample& sample, std::size_t D, double a, double b);

// Empirical squared loss of chi_f on the sample.
double empirical_squared_loss(const RegressionSample& sample, const BoundaryFunction& f, double a, double b);

// Integral of |f - g| over [0,1], exact for both representations.
double boundary_l1_loss(const BoundaryFunction& f, const BoundaryFunction& g);

// Grid of this many points carries a generated boundary.
inline constexpr std::size_t kHolderGridPoints = 1025;

// Random path with |f(x) - f(x')| <= L |x - x'|^alpha on the grid, by midpoint
// displacement with amplitude L 2^{-alpha level} / 2, clamped to [0,1].
BoundaryFunction holder_boundary(double L, double alpha, std::uint64_t seed);

// max |f(x) - f(x')| / |x - x'|^alpha over all pairs of grid points.
double holder_constant(const BoundaryFunction& path, double alpha);

// round((L (b-a)^3 n)^{1/(alpha+1)}), at least 1.
std::size_t histogram_bins(double L, double alpha, double a, double b, std::size_t n);

// Two columns: grid point and value.
void write_boundary(std::ostream& out, const BoundaryFunction& f);

}  // namespace marginlab
