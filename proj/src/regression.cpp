#include "marginlab/regression.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "marginlab/rng.hpp"

namespace marginlab {

namespace {

void check_unit_values(const std::vector<double>& v) {
  if (v.empty()) {
    throw std::invalid_argument("boundary needs at least one value");
  }
  for (double x : v) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw std::invalid_argument("boundary values must lie in [0,1]");
    }
  }
}

std::size_t bin_of(double x, std::size_t D) {
  const auto j = static_cast<std::size_t>(std::floor(x * static_cast<double>(D)));
  return std::min(j, D - 1);
}

// Values of f at the two ends of a segment on which f is affine.
std::pair<double, double> segment_ends(const BoundaryFunction& f, double x0, double x1) {
  if (f.kind() == BoundaryFunction::Kind::PiecewiseConstant) {
    const double v = f(0.5 * (x0 + x1));
    return {v, v};
  }
  return {f(x0), f(x1)};
}

// Integral of |d| for d affine from d0 to d1 over a segment of length len.
double abs_affine_integral(double d0, double d1, double len) {
  if ((d0 >= 0.0 && d1 >= 0.0) || (d0 <= 0.0 && d1 <= 0.0)) {
    return 0.5 * (std::abs(d0) + std::abs(d1)) * len;
  }
  return len * (d0 * d0 + d1 * d1) / (2.0 * (std::abs(d0) + std::abs(d1)));
}

}  // namespace

BoundaryFunction::BoundaryFunction(Kind kind, std::vector<double> values) : kind_(kind), values_(std::move(values)) {
  check_unit_values(values_);
  if (kind_ == Kind::Path && values_.size() < 2) {
    throw std::invalid_argument("sampled path needs at least two grid points");
  }
}

BoundaryFunction BoundaryFunction::constant(double c) { return BoundaryFunction(Kind::PiecewiseConstant, {c}); }

BoundaryFunction BoundaryFunction::piecewise(std::vector<double> bin_values) {
  return BoundaryFunction(Kind::PiecewiseConstant, std::move(bin_values));
}

BoundaryFunction BoundaryFunction::path(std::vector<double> grid_values) {
  return BoundaryFunction(Kind::Path, std::move(grid_values));
}

double BoundaryFunction::operator()(double x) const {
  x = std::clamp(x, 0.0, 1.0);
  if (kind_ == Kind::PiecewiseConstant) {
    return values_[bin_of(x, values_.size())];
  }
  const double steps = static_cast<double>(values_.size() - 1);
  const double pos = x * steps;
  const auto k = std::min(static_cast<std::size_t>(std::floor(pos)), values_.size() - 2);
  const double t = pos - static_cast<double>(k);
  return values_[k] + t * (values_[k + 1] - values_[k]);
}

std::vector<double> BoundaryFunction::breakpoints() const {
  const std::size_t cells = kind_ == Kind::PiecewiseConstant ? values_.size() : values_.size() - 1;
  std::vector<double> out(cells + 1);
  for (std::size_t k = 0; k <= cells; ++k) {
    out[k] = static_cast<double>(k) / static_cast<double>(cells);
  }
  return out;
}

ImageModel::ImageModel(double a_, double b_, BoundaryFunction f_) : a(a_), b(b_), f(std::move(f_)) {
  if (!(a > 0.0 && a < b && b < 1.0)) {
    throw std::invalid_argument("image levels must satisfy 0 < a < b < 1");
  }
}

double chi(const ImageModel& model, double x1, double x2) { return x2 <= model.f(x1) ? model.b : model.a; }

RegressionSample draw_regression_sample(const ImageModel& model, std::size_t n, std::uint64_t seed,
                                        std::uint64_t replication) {
  if (n == 0) {
    throw std::invalid_argument("sample size must be at least 1");
  }
  Stream stream(seed, replication);
  RegressionSample s;
  s.seed = seed;
  s.replication = replication;
  s.points.resize(n);
  for (auto& p : s.points) {
    p.x1 = stream.uniform();
    p.x2 = stream.uniform();
    p.y = stream.uniform() < chi(model, p.x1, p.x2) ? 1 : 0;
  }
  return s;
}

BoundaryFunction histogram_erm(const RegressionSample& sample, std::size_t D, double a, double b) {
  if (D == 0) {
    throw std::invalid_argument("histogram needs at least one bin");
  }
  if (!(a >= 0.0 && a < b && b <= 1.0)) {
    throw std::invalid_argument("levels must satisfy 0 <= a < b <= 1");
  }
  if (sample.points.empty()) {
    throw std::invalid_argument("histogram fit of an empty sample");
  }
  std::vector<std::vector<std::pair<double, std::uint8_t>>> bins(D);
  for (const auto& p : sample.points) {
    bins[bin_of(p.x1, D)].emplace_back(p.x2, p.y);
  }

  std::vector<double> thresholds(D, 0.0);
  for (std::size_t j = 0; j < D; ++j) {
    auto& pts = bins[j];
    if (pts.empty()) {
      continue;
    }
    std::sort(pts.begin(), pts.end());
    const std::size_t m = pts.size();
    // Labels are binary, so the loss only depends on label counts on each side.
    std::size_t ones_total = 0;
    for (const auto& pt : pts) {
      ones_total += pt.second;
    }
    const std::size_t zeros_total = m - ones_total;
    std::size_t ones_below = 0;
    std::size_t zeros_below = 0;
    std::size_t k = 0;
    auto loss_at = [&](double c) {
      while (k < m && pts[k].first <= c) {
        (pts[k].second ? ones_below : zeros_below)++;
        ++k;
      }
      return static_cast<double>(zeros_below) * b * b + static_cast<double>(ones_below) * (1.0 - b) * (1.0 - b) +
             static_cast<double>(zeros_total - zeros_below) * a * a +
             static_cast<double>(ones_total - ones_below) * (1.0 - a) * (1.0 - a);
    };
    double best_loss = loss_at(0.0);
    double best_c = 0.0;
    auto consider = [&](double c) {
      const double loss = loss_at(c);
      if (loss < best_loss - 1e-12 * std::max(1.0, best_loss)) {
        best_loss = loss;
        best_c = c;
      }
    };
    for (const auto& pt : pts) {
      consider(pt.first);
    }
    consider(1.0);
    thresholds[j] = best_c;
  }
  return BoundaryFunction::piecewise(std::move(thresholds));
}

double empirical_squared_loss(const RegressionSample& sample, const BoundaryFunction& f, double a, double b) {
  if (sample.points.empty()) {
    throw std::invalid_argument("empirical loss of an empty sample");
  }
  double sum = 0.0;
  for (const auto& p : sample.points) {
    const double level = p.x2 <= f(p.x1) ? b : a;
    sum += (p.y - level) * (p.y - level);
  }
  return sum / static_cast<double>(sample.points.size());
}

double boundary_l1_loss(const BoundaryFunction& f, const BoundaryFunction& g) {
  std::vector<double> cuts = f.breakpoints();
  const auto more = g.breakpoints();
  cuts.insert(cuts.end(), more.begin(), more.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double x, double y) { return y - x <= 1e-15; }), cuts.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double x0 = cuts[k];
    const double x1 = cuts[k + 1];
    const auto [f0, f1] = segment_ends(f, x0, x1);
    const auto [g0, g1] = segment_ends(g, x0, x1);
    total += abs_affine_integral(f0 - g0, f1 - g1, x1 - x0);
  }
  return total;
}

double holder_constant(const BoundaryFunction& path, double alpha) {
  const auto& v = path.values();
  const std::size_t G = v.size();
  if (G < 2) {
    return 0.0;
  }
  const double step = 1.0 / static_cast<double>(G - 1);
  // |k step|^alpha per lag.
  std::vector<double> scale(G);
  for (std::size_t k = 1; k < G; ++k) {
    scale[k] = std::pow(static_cast<double>(k) * step, alpha);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < G; ++i) {
    for (std::size_t j = i + 1; j < G; ++j) {
      worst = std::max(worst, std::abs(v[j] - v[i]) / scale[j - i]);
    }
  }
  return worst;
}

BoundaryFunction holder_boundary(double L, double alpha, std::uint64_t seed) {
  if (!(L >= 0.0) || !(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("Hoelder boundary needs L >= 0 and 0 < alpha <= 1");
  }
  const std::size_t G = kHolderGridPoints;
  std::vector<double> v(G, 0.5);
  Stream stream(seed, 0);
  std::size_t stride = G - 1;
  for (int level = 1; stride > 1; ++level, stride /= 2) {
    const double amp = L * std::pow(2.0, -alpha * level) / 2.0;
    for (std::size_t left = 0; left + stride < G; left += stride) {
      const std::size_t mid = left + stride / 2;
      v[mid] = 0.5 * (v[left] + v[left + stride]) + amp * (2.0 * stream.uniform() - 1.0);
    }
  }
  for (double& x : v) {
    x = std::clamp(x, 0.0, 1.0);
  }
  auto f = BoundaryFunction::path(v);
  const double worst = holder_constant(f, alpha);
  if (worst > L) {
    // Contract about 1/2; this keeps the values inside [0,1].
    const double s = L / worst * (1.0 - 1e-12);
    for (double& x : v) {
      x = std::clamp(0.5 + s * (x - 0.5), 0.0, 1.0);
    }
    f = BoundaryFunction::path(v);
  }
  return f;
}

std::size_t histogram_bins(double L, double alpha, double a, double b, std::size_t n) {
  if (!(L > 0.0) || !(alpha > 0.0) || !(b > a)) {
    throw std::invalid_argument("histogram size needs L > 0, alpha > 0 and b > a");
  }
  const double raw = std::pow(L * std::pow(b - a, 3.0) * static_cast<double>(n), 1.0 / (alpha + 1.0));
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(raw)));
}

void write_boundary(std::ostream& out, const BoundaryFunction& f) {
  const auto& v = f.values();
  const std::size_t G = v.size();
  out << std::setprecision(17);
  for (std::size_t k = 0; k < G; ++k) {
    const double x = f.kind() == BoundaryFunction::Kind::Path
                         ? static_cast<double>(k) / static_cast<double>(G - 1)
                         : (static_cast<double>(k) + 0.5) / static_cast<double>(G);
    out << x << ' ' << v[k] << '\n';
  }
}

}  // namespace marginlab
