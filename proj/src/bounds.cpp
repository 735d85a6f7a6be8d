#include "marginlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "marginlab/lower_lab.hpp"

namespace marginlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_params(const BoundParams& p) {
  if (p.V < 1) {
    throw std::invalid_argument("bound parameters need V >= 1");
  }
  if (p.n < 1) {
    throw std::invalid_argument("bound parameters need n >= 1");
  }
  if (!(p.h >= 0.0 && p.h <= 1.0)) {
    throw std::invalid_argument("margin h must lie in [0,1]");
  }
  if (!(p.theta >= 1.0)) {
    throw std::invalid_argument("margin exponent theta must be >= 1");
  }
  if (p.EH && !(*p.EH >= 0.0)) {
    throw std::invalid_argument("expected entropy must be nonnegative");
  }
  if (p.L0 && !(*p.L0 >= 0.0 && *p.L0 <= 0.5)) {
    throw std::invalid_argument("L0 must lie in [0, 1/2]");
  }
  const auto& c = p.constants;
  for (double k : {c.C, c.kappa, c.kappa3, c.kappa4, c.C1, c.C2, c.K_lower, c.c_sparse, c.kappa_pp}) {
    if (!(k > 0.0)) {
      throw std::invalid_argument("bound constants must be positive");
    }
  }
}

void check_r(double r) {
  if (!(r > 0.0 && r < 1.0)) {
    throw std::invalid_argument("entropy exponent r must lie in (0,1)");
  }
}

BoundValue make(const std::string& id, double value, bool valid, std::string cond) {
  return {id, value, valid, std::move(cond)};
}

double dn(std::size_t n) { return static_cast<double>(n); }

double level(const BoundParams& p) { return p.L0 ? *p.L0 : (1.0 - p.h) / 2.0; }

// [(1-r)^2 n h^{1-r}]^{-theta/(2theta-1+r)} ^ (1-r)^{-1} n^{-1/2}
double bracketing_rate(const BoundParams& p) {
  check_r(p.r);
  const double r = p.r;
  const double base = (1.0 - r) * (1.0 - r) * dn(p.n) * std::pow(p.h, 1.0 - r);
  const double first = std::pow(base, -p.theta / (2.0 * p.theta - 1.0 + r));
  const double second = 1.0 / ((1.0 - r) * std::sqrt(dn(p.n)));
  return std::min(first, second);
}

// (1-h) (k / (n h)) (1 + log(n h^2 / k)), clamped at 0.
double log_margin_rate(double h, std::size_t k, std::size_t n) {
  if (h <= 0.0) {
    return 0.0;
  }
  const double kk = static_cast<double>(k);
  const double v = (1.0 - h) * (kk / (dn(n) * h)) * (1.0 + std::log(dn(n) * h * h / kk));
  return std::max(0.0, v);
}

}  // namespace

bool is_upper_bound(const std::string& id) {
  const auto& ids = upper_bound_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

BoundValue upper_bound(const std::string& id, const BoundParams& p) {
  check_params(p);
  const auto& c = p.constants;
  const double V = static_cast<double>(p.V);
  const double n = dn(p.n);
  const double h = p.h;
  const double expo = p.theta / (2.0 * p.theta - 1.0);

  if (id == "Eq32") {
    const double ent = p.EH ? std::max(1.0, *p.EH) : V;
    return make(id, c.C * std::sqrt(std::min(V, ent) / n), true, "none");
  }
  if (id == "Eq33") {
    double ent = 0.0;
    if (p.EH) {
      ent = std::max(1.0, *p.EH);
    } else {
      // Sauer's bound stands in for the expected entropy.
      ent = V * (1.0 + std::log(std::max(n / V, 1.0)));
    }
    const double value = h > 0.0 ? c.C * std::pow(ent / (n * h), expo) : kInf;
    return make(id, value, h > 0.0, "h > 0");
  }
  if (id == "Eq34") {
    if (h <= 0.0) {
      return make(id, kInf, false, "h > 0");
    }
    const double lg = 1.0 + std::log(std::max(n * std::pow(h, 2.0 * p.theta) / V, 1.0));
    return make(id, c.C * std::pow(V * lg / (n * h), expo), true, "h > 0");
  }
  if (id == "Eq7") {
    const bool valid = h > std::sqrt(V / n);
    if (h <= 0.0) {
      return make(id, kInf, false, "h > sqrt(V/n)");
    }
    const double value = c.kappa * (V / (n * h)) * (1.0 + std::log(n * h * h / V));
    return make(id, valid ? value : std::max(value, 0.0), valid, "h > sqrt(V/n)");
  }
  if (id == "Eq2") {
    const double L0 = level(p);
    const bool valid = L0 >= c.kappa3 * V / n && n >= V;
    const double value = c.kappa3 * std::sqrt(L0 * V * (1.0 + std::log(std::max(n / V, 1.0))) / n);
    return make(id, value, valid, "L0 >= kappa3 V/n and n >= V");
  }
  if (id == "Eq36") {
    return make(id, c.C2 * bracketing_rate(p), true, "0 < r < 1");
  }
  if (id == "Eq35") {
    return make(id, c.C1 * bracketing_rate(p), true, "0 < r < 1");
  }
  throw std::invalid_argument("unknown upper bound id: " + id);
}

BoundValue lower_bound(const std::string& id, const BoundParams& p) {
  check_params(p);
  const auto& c = p.constants;
  const double V = static_cast<double>(p.V);
  const double n = dn(p.n);
  const double h = p.h;

  if (id == "Eq40_proof") {
    if (p.V < 2) {
      throw std::invalid_argument("Eq40_proof needs V >= 2");
    }
    const double he = std::max(h, std::sqrt((V - 1.0) / n));
    return make(id, (V - 1.0) / (54.0 * n * he), h > 0.0, "V >= 2 and h > 0");
  }
  if (id == "Eq38") {
    if (p.V < 2) {
      throw std::invalid_argument("Eq38 needs V >= 2");
    }
    const double value = std::exp(-8.0) / (2.0 * std::sqrt(6.0)) * std::sqrt((V - 1.0) / n);
    return make(id, value, h == 0.0 && n >= 5.0 * (V - 1.0), "h = 0 and n >= 5(V-1)");
  }
  if (id == "Eq39") {
    if (p.V < 2) {
      throw std::invalid_argument("Eq39 needs V >= 2");
    }
    return make(id, (V - 1.0) / (4.0 * std::numbers::e * n), h == 1.0, "h = 1");
  }
  if (id == "Eq41") {
    const std::size_t D = p.D == 0 ? p.V : p.D;
    const bool valid = h > 0.0 && h >= std::sqrt(static_cast<double>(D) / n);
    return make(id, c.c_sparse * log_margin_rate(h, D, p.n), valid, "h >= sqrt(D/n) and (A_{N,D}) for every N");
  }
  if (id == "Eq9") {
    const std::size_t d = p.d == 0 ? std::max<std::size_t>(p.V, 2) - 1 : p.d;
    const bool valid = d >= 2 && h > 0.0 && h >= std::sqrt(static_cast<double>(d) / n);
    return make(id, c.kappa_pp * log_margin_rate(h, d, p.n), valid, "d >= 2 and h >= sqrt(d/n)");
  }
  if (id == "Eq42") {
    check_r(p.r);
    const double r = p.r;
    const double first = h > 0.0 ? std::pow(h, -(1.0 - r) / (1.0 + r)) * std::pow(n, -1.0 / (1.0 + r)) : kInf;
    const double value = c.K_lower * std::pow(1.0 - h, 1.0 / (1.0 + r)) * std::min(first, 1.0 / std::sqrt(n));
    return make(id, value, true, "0 < r < 1");
  }
  if (id == "Eq3") {
    const double L0 = level(p);
    const bool valid = c.kappa4 * L0 * (1.0 - 2.0 * L0) * (1.0 - 2.0 * L0) >= V / n;
    return make(id, c.kappa4 * std::sqrt(L0 * V / n), valid, "kappa4 L0 (1 - 2 L0)^2 >= V/n");
  }
  if (id == "assouad_expr") {
    if (p.V < 2) {
      throw std::invalid_argument("assouad_expr needs V >= 2");
    }
    const double mass = p.p ? *p.p : default_atom_mass(p.V, p.n, h);
    const bool valid = mass >= 0.0 && mass * (V - 1.0) <= 1.0 + kProbTolerance;
    const double hell = h * h / (1.0 + std::sqrt(1.0 - h * h));
    const double value = (V - 1.0) * mass * h * (1.0 - std::sqrt(2.0 * n * mass * hell)) / 4.0;
    return make(id, std::max(0.0, value), valid, "p (V-1) <= 1");
  }
  throw std::invalid_argument("unknown lower bound id: " + id);
}

BoundValue evaluate_bound(const std::string& id, const BoundParams& params) {
  return is_upper_bound(id) ? upper_bound(id, params) : lower_bound(id, params);
}

double modulus_phi(const PhiSpec& spec, double sigma) {
  if (!(sigma >= 0.0)) {
    throw std::invalid_argument("modulus argument must be nonnegative");
  }
  switch (spec.kind) {
    case PhiKind::Combinatorial:
      return spec.K * sigma * std::sqrt(std::max(1.0, spec.EH));
    case PhiKind::Universal:
      if (sigma == 0.0) {
        return 0.0;
      }
      return spec.K * sigma *
             std::sqrt(static_cast<double>(spec.V) * (1.0 + std::log(std::max(1.0 / sigma, 1.0))));
    case PhiKind::BracketingPower:
      if (!(spec.r < 1.0)) {
        throw std::invalid_argument("bracketing modulus diverges for r >= 1");
      }
      if (!(spec.r >= 0.0)) {
        throw std::invalid_argument("bracketing exponent must be nonnegative");
      }
      return 12.0 * std::sqrt(spec.K1) * std::pow(sigma, 1.0 - spec.r) / (1.0 - spec.r);
  }
  return 0.0;
}

double modulus_w(double eps, double h, double theta, bool cap) {
  if (!(h > 0.0 && h <= 1.0)) {
    throw std::invalid_argument("modulus w needs 0 < h <= 1");
  }
  if (!(theta >= 1.0) || !(eps >= 0.0)) {
    throw std::invalid_argument("modulus w needs theta >= 1 and eps >= 0");
  }
  const double w = std::pow(eps, 1.0 / theta) / std::sqrt(h);
  return cap ? std::min(1.0, w) : w;
}

double solve_epsilon_star(const std::function<double(double)>& phi, const std::function<double(double)>& w,
                          std::size_t n) {
  if (n < 1) {
    throw std::invalid_argument("fixed point needs n >= 1");
  }
  const double root_n = std::sqrt(dn(n));
  // g decreases through zero at the root.
  auto g = [&](double eps) { return phi(w(eps)) / (eps * eps) - root_n; };

  double hi = 1.0;
  int guard = 0;
  while (!(g(hi) < 0.0)) {
    hi *= 2.0;
    if (++guard > 2000 || !std::isfinite(hi)) {
      throw std::runtime_error("fixed point: no upper bracket, check the moduli");
    }
  }
  double lo = hi;
  guard = 0;
  while (!(g(lo) > 0.0)) {
    lo /= 2.0;
    if (++guard > 2000 || lo == 0.0) {
      throw std::runtime_error("fixed point: no lower bracket, check the moduli");
    }
  }
  // Bisect to full double precision.
  while (true) {
    const double mid = lo + (hi - lo) / 2.0;
    if (mid <= lo || mid >= hi) {
      break;
    }
    const double v = g(mid);
    if (v > 0.0) {
      lo = mid;
    } else if (v < 0.0) {
      hi = mid;
    } else {
      return mid;
    }
  }
  return std::abs(g(lo)) < std::abs(g(hi)) ? lo : hi;
}

double solve_epsilon_star(const PhiSpec& phi, double h, double theta, bool cap, std::size_t n) {
  return solve_epsilon_star([&](double s) { return modulus_phi(phi, s); },
                            [&](double e) { return modulus_w(e, h, theta, cap); }, n);
}

double bousquet_tail(double v, double b, double EZ, double y, std::size_t n) {
  if (!(v >= 0.0) || !(b > 0.0) || !(EZ >= 0.0) || !(y >= 0.0) || n < 1) {
    throw std::invalid_argument("Bousquet tail needs v >= 0, b > 0, EZ >= 0, y >= 0, n >= 1");
  }
  return EZ + std::sqrt(2.0 * (v + 4.0 * b * EZ) * y / dn(n)) + 2.0 * b * y / (3.0 * dn(n));
}

double subgaussian_max(double v, std::size_t N) {
  if (!(v >= 0.0) || N < 1) {
    throw std::invalid_argument("maximal inequality needs v >= 0 and N >= 1");
  }
  return std::sqrt(2.0 * v * std::log(dn(N)));
}

double bernstein_max(double v, std::size_t N, double c) {
  if (!(c >= 0.0)) {
    throw std::invalid_argument("Bernstein scale must be nonnegative");
  }
  return subgaussian_max(v, N) + c * std::log(dn(N));
}

double chaining_bound(const std::function<double(double)>& H2, double delta, std::size_t terms) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("chaining radius must be positive");
  }
  double sum = 0.0;
  double weight = 1.0;
  for (std::size_t j = 0; j < terms; ++j) {
    const double arg = delta * weight / 2.0;
    if (arg == 0.0) {
      break;
    }
    sum += weight * std::sqrt(std::max(0.0, H2(arg)));
    weight /= 2.0;
  }
  return 3.0 * delta * sum;
}

BoundValue vc_entropy_max(double sigma, double EH, std::size_t n) {
  if (!(sigma > 0.0) || !(EH >= 0.0) || n < 1) {
    throw std::invalid_argument("VC maximal inequality needs sigma > 0, EH >= 0, n >= 1");
  }
  const double root = std::sqrt(EH / dn(n));
  const double s3 = std::sqrt(3.0);
  return make("vc_A6", 2.0 * s3 * sigma * root, sigma >= 4.0 * s3 * root, "sigma >= 4 sqrt(3) sqrt(EH/n)");
}

BoundValue vc_universal_max(double sigma, std::size_t V, std::size_t n, double kappa) {
  if (!(sigma > 0.0) || V < 1 || n < 1 || !(kappa > 0.0)) {
    throw std::invalid_argument("VC maximal inequality needs sigma > 0, V >= 1, n >= 1, kappa > 0");
  }
  const double C = 6.0 * std::sqrt(kappa) * (1.0 + std::sqrt(2.0));
  const double s3 = std::sqrt(3.0);
  const double Vd = static_cast<double>(V);
  const double value = s3 * C * sigma * std::sqrt(Vd * (1.0 + std::log(std::max(1.0 / sigma, 1.0))) / dn(n));
  const bool valid = sigma >= 2.0 * s3 * C * std::sqrt(Vd * (1.0 + std::abs(std::log(sigma))) / dn(n));
  return make("vc_A7", value, valid, "sigma >= 2 sqrt(3) C sqrt(V (1 + |log sigma|)/n)");
}

BoundValue bracketing_max(double phi_delta, double delta, std::size_t n) {
  if (!(phi_delta >= 0.0) || !(delta > 0.0) || n < 1) {
    throw std::invalid_argument("bracketing maximal inequality needs phi >= 0, delta > 0, n >= 1");
  }
  const double root_n = std::sqrt(dn(n));
  return make("bracketing_A4", 12.0 * phi_delta / root_n, 4.0 * phi_delta <= delta * delta * root_n,
              "4 phi(delta) <= delta^2 sqrt(n)");
}

double peeling_bound(double x, const std::function<double(double)>& psi) {
  if (!(x > 0.0)) {
    throw std::invalid_argument("peeling bound needs x > 0");
  }
  return 4.0 * psi(x) / (x * x);
}

RiskCertificate risk_certificate(const JointDistribution& P, const ClassifierClass& cls, std::size_t n,
                                 const BoundConstants& constants, double theta) {
  if (cls.domain_size() != P.size()) {
    throw std::invalid_argument("class and distribution live on different domains");
  }
  RiskCertificate cert;
  cert.V = vc_dimension(cls);
  cert.n = n;
  const auto ml = margin_and_level(P);
  cert.h = ml.h;
  cert.L = ml.L;

  BoundParams p;
  p.V = std::max<std::size_t>(cert.V, 1);
  p.n = n;
  p.h = ml.h;
  p.theta = theta;
  p.L0 = ml.L;
  p.constants = constants;

  for (const char* id : {"Eq2", "Eq32", "Eq33", "Eq34", "Eq7"}) {
    cert.bounds.push_back(upper_bound(id, p));
  }
  cert.bounds.push_back(lower_bound("Eq3", p));
  if (cert.V >= 2) {
    for (const char* id : {"Eq38", "Eq39", "Eq40_proof", "Eq41", "Eq9"}) {
      auto b = lower_bound(id, p);
      if (b.id == "Eq41" || b.id == "Eq9") {
        // Their richness hypothesis concerns infinitely many N; a finite class cannot certify it.
        b.valid = false;
      }
      cert.bounds.push_back(std::move(b));
    }
  }

  cert.lower = 0.0;
  cert.upper = kInf;
  for (const auto& b : cert.bounds) {
    if (!b.valid) {
      continue;
    }
    if (is_upper_bound(b.id)) {
      cert.upper = std::min(cert.upper, b.value);
    } else {
      cert.lower = std::max(cert.lower, b.value);
    }
  }
  return cert;
}

}  // namespace marginlab
