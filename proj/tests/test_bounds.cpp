#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "marginlab/bounds.hpp"
#include "marginlab/erm.hpp"

using namespace marginlab;

namespace {

BoundParams params(std::size_t V, std::size_t n, double h, double theta = 1.0) {
  BoundParams p;
  p.V = V;
  p.n = n;
  p.h = h;
  p.theta = theta;
  return p;
}

const BoundValue& find(const std::vector<BoundValue>& bounds, const std::string& id) {
  for (const auto& b : bounds) {
    if (b.id == id) {
      return b;
    }
  }
  throw std::runtime_error("missing bound " + id);
}

bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)); }

}  // namespace

TEST_CASE("phi modulus examples") {
  PhiSpec comb;
  comb.EH = 4.0;
  CHECK(modulus_phi(comb, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
  comb.EH = 0.2;
  CHECK(modulus_phi(comb, 0.5) == doctest::Approx(0.5).epsilon(1e-15));

  PhiSpec uni;
  uni.kind = PhiKind::Universal;
  uni.V = 9;
  CHECK(modulus_phi(uni, 1.0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(modulus_phi(uni, 0.0) == 0.0);

  PhiSpec br;
  br.kind = PhiKind::BracketingPower;
  br.K1 = 1.0;
  br.r = 0.5;
  CHECK(modulus_phi(br, 0.25) == doctest::Approx(12.0).epsilon(1e-15));
  br.r = 1.0;
  CHECK_THROWS_AS(modulus_phi(br, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(modulus_phi(comb, -1.0), std::invalid_argument);
}

TEST_CASE("bracketing modulus matches numeric quadrature of the entropy integral") {
  boost::math::quadrature::tanh_sinh<double> integrator;
  for (double K1 : {0.5, 1.0, 3.0}) {
    for (double r : {0.1, 0.25, 0.5, 0.75}) {
      for (double sigma : {0.05, 0.25, 0.9}) {
        // 12 times the integral over (0, sigma) of sqrt(H(u^2)) with H(x) = K1 x^{-r}. Cutting
        // the integrand below 1e-200 drops less than 1e-50 of mass.
        auto f = [&](double u) { return u > 1e-200 ? std::sqrt(K1 * std::pow(u, -2.0 * r)) : 0.0; };
        const double quad = 12.0 * integrator.integrate(f, 0.0, sigma);
        PhiSpec br;
        br.kind = PhiKind::BracketingPower;
        br.K1 = K1;
        br.r = r;
        CHECK(std::abs(modulus_phi(br, sigma) - quad) <= 1e-10 * quad);
      }
    }
  }
}

TEST_CASE("w modulus examples") {
  CHECK(modulus_w(0.3, 1.0, 1.0) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(modulus_w(0.1, 0.25, 1.0, false) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(modulus_w(0.9, 0.25, 1.0, true) == 1.0);
  CHECK(modulus_w(0.9, 0.25, 1.0, false) == doctest::Approx(1.8));
  CHECK(modulus_w(0.25, 1.0, 2.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(modulus_w(0.1, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(modulus_w(0.1, 0.5, 0.5), std::invalid_argument);
}

TEST_CASE("fixed point closed forms") {
  // phi(sigma) = 5 sigma, identity w, n = 100: root 0.5.
  const double e = solve_epsilon_star([](double s) { return 5.0 * s; }, [](double x) { return x; }, 100);
  CHECK(std::abs(e - 0.5) <= 1e-10);

  // phi = K sigma sqrt(V), uncapped w, theta = 1: eps^2 = K^2 V / (n h).
  for (double K : {0.5, 1.0, 2.0}) {
    for (std::size_t V : {1, 4, 30}) {
      for (double h : {0.05, 0.3, 1.0}) {
        for (std::size_t n : {10, 1000, 1000000}) {
          PhiSpec comb;
          comb.K = K;
          comb.EH = static_cast<double>(V);
          const double eps = solve_epsilon_star(comb, h, 1.0, false, n);
          const double exact = K * K * static_cast<double>(V) / (static_cast<double>(n) * h);
          CHECK(close_rel(eps * eps, exact, 1e-10));
        }
      }
    }
  }
}

TEST_CASE("fixed point residuals on random instances") {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    PhiSpec phi;
    phi.kind = static_cast<PhiKind>(trial % 3);
    phi.K = 0.2 + 2.0 * unif(gen);
    phi.EH = 10.0 * unif(gen);
    phi.V = 1 + gen() % 20;
    phi.K1 = 0.1 + unif(gen);
    phi.r = 0.05 + 0.9 * unif(gen);
    const double h = 0.01 + 0.99 * unif(gen);
    const double theta = 1.0 + 2.0 * unif(gen);
    const bool cap = gen() & 1U;
    const auto n = static_cast<std::size_t>(std::pow(10.0, 1.0 + 7.0 * unif(gen)));
    const double eps = solve_epsilon_star(phi, h, theta, cap, n);
    const double residual =
        std::abs(std::sqrt(static_cast<double>(n)) * eps * eps - modulus_phi(phi, modulus_w(eps, h, theta, cap)));
    worst = std::max(worst, residual);
    CHECK(residual <= 1e-9);
  }
  MESSAGE("worst fixed point residual " << worst);
  CHECK_THROWS_AS(solve_epsilon_star([](double) { return 0.0; }, [](double x) { return x; }, 10),
                  std::runtime_error);
}

TEST_CASE("bracketing fixed point follows the power rate in n") {
  for (double theta : {1.0, 1.5, 2.0}) {
    for (double r : {0.2, 0.5, 0.8}) {
      PhiSpec br;
      br.kind = PhiKind::BracketingPower;
      br.r = r;
      const double h = 0.5;
      const std::size_t n1 = 100000000;
      const std::size_t n2 = 10000000000;
      const double e1 = solve_epsilon_star(br, h, theta, true, n1);
      const double e2 = solve_epsilon_star(br, h, theta, true, n2);
      REQUIRE(modulus_w(e1, h, theta, false) < 1.0);
      const double slope = (std::log(e2 * e2) - std::log(e1 * e1)) / (std::log(1e10) - std::log(1e8));
      CHECK(std::abs(slope + theta / (2.0 * theta - 1.0 + r)) <= 1e-3);
    }
  }
}

TEST_CASE("upper bound examples") {
  auto p = params(10, 1000000, 0.1);
  const auto e34 = upper_bound("Eq34", p);
  CHECK(close_rel(e34.value, 7.9078e-4, 1e-4));
  // Long double evaluation of the same closed form.
  const long double x = 1e6L * 0.01L / 10.0L;
  CHECK(close_rel(e34.value, static_cast<double>(10.0L * (1.0L + std::log(x)) / (1e6L * 0.1L)), 1e-13));
  CHECK(e34.valid);

  auto p32 = params(10, 1000, 0.0);
  p32.EH = 56.0517;
  // min picks V: sqrt(10 / 1000).
  CHECK(close_rel(upper_bound("Eq32", p32).value, 0.1, 1e-15));
  p32.EH = 4.0;
  CHECK(close_rel(upper_bound("Eq32", p32).value, std::sqrt(0.004), 1e-15));
  p32.EH = 0.5;
  CHECK(close_rel(upper_bound("Eq32", p32).value, std::sqrt(0.001), 1e-15));

  auto p2 = params(10, 1000, 0.5);
  p2.L0 = 0.25;
  CHECK(close_rel(upper_bound("Eq2", p2).value, 0.118376, 1e-5));
  CHECK(upper_bound("Eq2", p2).valid);
  p2.L0 = 0.001;
  CHECK_FALSE(upper_bound("Eq2", p2).valid);

  // Eq7 side condition h > sqrt(V/n).
  CHECK(upper_bound("Eq7", params(10, 1000, 0.2)).valid);
  CHECK_FALSE(upper_bound("Eq7", params(10, 1000, 0.1)).valid);
  CHECK(close_rel(upper_bound("Eq7", params(10, 1000, 0.2)).value, (10.0 / 200.0) * (1.0 + std::log(4.0)), 1e-14));

  // Eq33 with and without the expected entropy.
  auto p33 = params(4, 400, 0.5, 2.0);
  p33.EH = 3.0;
  CHECK(close_rel(upper_bound("Eq33", p33).value, std::pow(3.0 / 200.0, 2.0 / 3.0), 1e-14));
  p33.EH.reset();
  CHECK(close_rel(upper_bound("Eq33", p33).value, std::pow(4.0 * (1.0 + std::log(100.0)) / 200.0, 2.0 / 3.0),
                  1e-14));
  CHECK_FALSE(upper_bound("Eq33", params(4, 400, 0.0)).valid);
  CHECK(std::isinf(upper_bound("Eq34", params(4, 400, 0.0)).value));

  // Eq36 is the smaller of its two branches.
  auto p36 = params(5, 10000, 0.5, 1.0);
  p36.r = 0.5;
  const double first = std::pow(0.25 * 10000.0 * std::sqrt(0.5), -1.0 / 1.5);
  const double second = 1.0 / (0.5 * 100.0);
  CHECK(close_rel(upper_bound("Eq36", p36).value, std::min(first, second), 1e-14));
  p36.r = 1.0;
  CHECK_THROWS_AS(upper_bound("Eq36", p36), std::invalid_argument);

  CHECK_THROWS_AS(upper_bound("Eq99", p), std::invalid_argument);
  CHECK_THROWS_AS(upper_bound("Eq34", params(0, 10, 0.5)), std::invalid_argument);
  CHECK_THROWS_AS(upper_bound("Eq34", params(3, 10, 1.5)), std::invalid_argument);
  CHECK(is_upper_bound("Eq34"));
  CHECK_FALSE(is_upper_bound("Eq40_proof"));
}

TEST_CASE("lower bound examples") {
  const auto e40 = lower_bound("Eq40_proof", params(10, 1000, 0.5));
  CHECK(close_rel(e40.value, 9.0 / 27000.0, 1e-15));
  CHECK(close_rel(e40.value, 3.33333e-4, 1e-5));
  CHECK(e40.valid);
  CHECK(close_rel(BoundConstants{}.c_sparse, 1.49921e-3, 1e-5));
  CHECK(close_rel(lower_bound("Eq38", params(11, 200, 0.0)).value, 1.53116e-5, 1e-5));
  CHECK(lower_bound("Eq38", params(11, 200, 0.0)).valid);
  CHECK_FALSE(lower_bound("Eq38", params(11, 40, 0.0)).valid);
  CHECK(close_rel(lower_bound("Eq39", params(2, 100, 1.0)).value, 9.19699e-4, 1e-5));
  CHECK_THROWS_AS(lower_bound("Eq40_proof", params(1, 100, 0.5)), std::invalid_argument);
  CHECK_THROWS_AS(lower_bound("Eq38", params(1, 100, 0.0)), std::invalid_argument);

  // Eq41 with D points: c (1-h) (D/(nh)) (1 + log(n h^2 / D)).
  auto p41 = params(8, 10000, 0.3);
  p41.D = 4;
  const double v41 = BoundConstants{}.c_sparse * 0.7 * (4.0 / 3000.0) * (1.0 + std::log(900.0 / 4.0));
  CHECK(close_rel(lower_bound("Eq41", p41).value, v41, 1e-14));
  CHECK(lower_bound("Eq41", p41).valid);
  p41.h = 0.01;
  CHECK_FALSE(lower_bound("Eq41", p41).valid);

  auto p9 = params(4, 10000, 0.3);
  CHECK(lower_bound("Eq9", p9).valid);
  p9.d = 1;
  CHECK_FALSE(lower_bound("Eq9", p9).valid);

  auto p42 = params(5, 10000, 0.36);
  p42.r = 0.5;
  const double v42 = std::pow(0.64, 1.0 / 1.5) * std::min(std::pow(0.36, -0.5 / 1.5) * std::pow(1e4, -1.0 / 1.5), 0.01);
  CHECK(close_rel(lower_bound("Eq42", p42).value, v42, 1e-14));

  // Assouad expression with explicit atom mass.
  auto pa = params(3, 10, 0.6);
  pa.p = 0.01;
  const double hell = 1.0 - 0.8;
  const double va = 2.0 * 0.01 * 0.6 * (1.0 - std::sqrt(2.0 * 10.0 * 0.01 * hell)) / 4.0;
  CHECK(close_rel(lower_bound("assouad_expr", pa).value, va, 1e-14));
  pa.p = 0.9;
  CHECK_FALSE(lower_bound("assouad_expr", pa).valid);
  CHECK(lower_bound("assouad_expr", pa).value >= 0.0);

  auto p3 = params(2, 1000, 0.5);
  p3.L0 = 0.25;
  CHECK(close_rel(lower_bound("Eq3", p3).value, std::sqrt(0.25 * 2.0 / 1000.0), 1e-15));
  CHECK(lower_bound("Eq3", p3).valid);
  p3.L0 = 0.5;
  CHECK_FALSE(lower_bound("Eq3", p3).valid);
}

TEST_CASE("upper bounds do not increase with n") {
  for (std::size_t V : {1, 3, 10}) {
    for (double h : {0.0, 0.05, 0.3, 1.0}) {
      for (double theta : {1.0, 2.0}) {
        for (const auto& id : upper_bound_ids()) {
          double prev = std::numeric_limits<double>::infinity();
          for (std::size_t n = V; n <= 10000000; n = n * 3 + 1) {
            auto p = params(V, n, h, theta);
            p.L0 = 0.2;
            const auto b = upper_bound(id, p);
            if (!b.valid) {
              continue;
            }
            INFO(id << " V=" << V << " h=" << h << " n=" << n);
            CHECK(b.value <= prev * (1.0 + 1e-12));
            prev = b.value;
          }
        }
      }
    }
  }
}

TEST_CASE("upper bounds do not increase with h away from the critical margin") {
  // (1 + log x)/h with x = n h^{2 theta}/V grows in h while log x < 2 theta - 1, so the check
  // starts past that point.
  for (std::size_t V : {1, 3, 10}) {
    for (std::size_t n : {100, 10000, 1000000}) {
      for (double theta : {1.0, 2.0}) {
        for (const std::string id : {"Eq33", "Eq34", "Eq7", "Eq36"}) {
          double prev = std::numeric_limits<double>::infinity();
          for (double h = 0.01; h <= 1.0; h += 0.01) {
            const double x = static_cast<double>(n) * std::pow(h, 2.0 * (id == "Eq7" ? 1.0 : theta)) /
                             static_cast<double>(V);
            const double t = id == "Eq7" ? 1.0 : theta;
            const bool log_term = id == "Eq34" || id == "Eq7";
            if (log_term && std::log(x) < 2.0 * t - 1.0) {
              continue;
            }
            auto p = params(V, n, h, id == "Eq7" ? 1.0 : theta);
            const auto b = upper_bound(id, p);
            if (!b.valid) {
              continue;
            }
            INFO(id << " V=" << V << " n=" << n << " h=" << h);
            CHECK(b.value <= prev * (1.0 + 1e-12));
            prev = b.value;
          }
        }
      }
    }
  }
}

TEST_CASE("lower bound interpolation endpoints") {
  for (std::size_t V : {2, 5, 20}) {
    for (std::size_t n = 5 * V; n <= 10000000; n *= 7) {
      const double e40 = lower_bound("Eq40_proof", params(V, n, 1.0)).value;
      const double e39 = lower_bound("Eq39", params(V, n, 1.0)).value;
      CHECK(e40 / e39 >= 1e-3);
      CHECK(e40 / e39 <= 1e3);
      // Below the critical margin the square-root branch is active.
      const double hc = std::sqrt(static_cast<double>(V - 1) / static_cast<double>(n));
      for (double f : {0.1, 0.5, 1.0}) {
        const double v = lower_bound("Eq40_proof", params(V, n, hc * f)).value;
        CHECK(close_rel(v, static_cast<double>(V - 1) / (54.0 * static_cast<double>(n) * hc), 1e-14));
      }
    }
  }
}

TEST_CASE("gap between the margin upper bound and the lower bound") {
  for (std::size_t V : {2, 3, 10, 50}) {
    for (std::size_t n : {50, 1000, 100000, 10000000}) {
      if (n < V) {
        continue;
      }
      const double hmin = std::sqrt(static_cast<double>(V) / static_cast<double>(n));
      for (double f : {1.0, 1.5, 3.0, 10.0, 100.0}) {
        const double h = std::min(1.0, hmin * f);
        const double up = upper_bound("Eq34", params(V, n, h)).value;
        const double lo = lower_bound("Eq40_proof", params(V, n, h)).value;
        const double Vd = static_cast<double>(V);
        const double gap = 54.0 * (1.0 + std::log(static_cast<double>(n) * h * h / Vd)) * Vd / (Vd - 1.0);
        CHECK(close_rel(up / lo, gap, 1e-12));
      }
    }
  }
}

TEST_CASE("tails and maximal inequalities") {
  CHECK(close_rel(bousquet_tail(1, 1, 0, 1, 100), 0.1480880, 1e-6));
  CHECK(bousquet_tail(1, 1, 0.3, 0, 100) == 0.3);
  CHECK(close_rel(bousquet_tail(0, 1, 0, 3, 3), 2.0 / 3.0, 1e-15));
  CHECK_THROWS_AS(bousquet_tail(1, 0, 0, 1, 1), std::invalid_argument);

  CHECK(subgaussian_max(2.0, 1) == 0.0);
  CHECK(close_rel(subgaussian_max(2.0, 100), std::sqrt(4.0 * std::log(100.0)), 1e-15));
  CHECK(close_rel(bernstein_max(2.0, 100), std::sqrt(4.0 * std::log(100.0)) + std::log(100.0) / 3.0, 1e-15));

  const double chain = chaining_bound([](double) { return std::log(2.0); }, 1.0);
  CHECK(close_rel(chain, 4.99532, 1e-5));
  CHECK(close_rel(chain, 6.0 * std::sqrt(std::log(2.0)), 1e-15));
  // Truncation error of the tail beyond 64 terms.
  const double shorter = chaining_bound([](double) { return std::log(2.0); }, 1.0, 63);
  CHECK(chain - shorter < 1e-15);
  // Entropy hitting zero ends the sum.
  CHECK(chaining_bound([](double u) { return u > 0.2 ? 1.0 : 0.0; }, 1.0) ==
        doctest::Approx(3.0 * (1.0 + 0.5)).epsilon(1e-15));

  CHECK(peeling_bound(4.0, [](double x) { return std::sqrt(x); }) == doctest::Approx(0.5).epsilon(1e-15));

  const auto a6 = vc_entropy_max(0.5, 2.0, 10000);
  CHECK(close_rel(a6.value, 2.0 * std::sqrt(3.0) * 0.5 * std::sqrt(0.0002), 1e-15));
  CHECK(a6.valid);
  CHECK_FALSE(vc_entropy_max(0.9, 2.0, 2).valid);

  const double C = 6.0 * (1.0 + std::sqrt(2.0));
  const auto a7 = vc_universal_max(0.5, 3, 1000000);
  CHECK(close_rel(a7.value, std::sqrt(3.0) * C * 0.5 * std::sqrt(3.0 * (1.0 + std::log(2.0)) / 1e6), 1e-14));
  CHECK(a7.valid);
  CHECK_FALSE(vc_universal_max(0.5, 3, 100).valid);

  const auto a4 = bracketing_max(0.1, 0.5, 100);
  CHECK(close_rel(a4.value, 0.12, 1e-15));
  CHECK(a4.valid);
  CHECK_FALSE(bracketing_max(1.0, 0.5, 100).valid);
}

TEST_CASE("risk certificates") {
  const JointDistribution zero(FiniteDomain::uniform(2), {1.0, 0.0});
  const auto c1 = risk_certificate(zero, ClassifierClass::powerset(2), 100);
  CHECK(c1.V == 2);
  CHECK(c1.h == 1.0);
  CHECK(close_rel(find(c1.bounds, "Eq39").value, 9.19699e-4, 1e-5));
  CHECK(find(c1.bounds, "Eq39").valid);

  const JointDistribution flat(FiniteDomain::uniform(4), {0.5, 0.5, 0.5, 0.5});
  const auto c0 = risk_certificate(flat, ClassifierClass::powerset(4), 1000);
  for (const char* id : {"Eq33", "Eq34", "Eq7", "Eq39", "Eq40_proof", "Eq41", "Eq9", "Eq3"}) {
    INFO(id);
    CHECK_FALSE(find(c0.bounds, id).valid);
  }
  CHECK(find(c0.bounds, "Eq32").valid);
  CHECK(find(c0.bounds, "Eq38").valid);

  std::vector<double> eta(10, 0.75);
  const JointDistribution P(FiniteDomain::uniform(10), eta);
  const auto c = risk_certificate(P, ClassifierClass::powerset(10), 1000);
  CHECK(c.V == 10);
  CHECK(c.h == doctest::Approx(0.5));
  CHECK(close_rel(find(c.bounds, "Eq40_proof").value, 3.33333e-4, 1e-5));
  CHECK(find(c.bounds, "Eq40_proof").value <= find(c.bounds, "Eq34").value);
  CHECK(c.lower <= c.upper);
}

TEST_CASE("simulated supremum stays below the VC maximal bound") {
  const auto sets = ClassifierClass::powerset(6);
  const JointDistribution P(FiniteDomain::uniform(6), std::vector<double>(6, 0.5));
  const std::size_t n = 500;
  for (double sigma : {0.7, 0.85, 1.0}) {
    const auto est = sup_process_estimate(sets, P, n, sigma, 2000, 17);
    const auto bound = vc_entropy_max(sigma, est.entropy_mean, n);
    INFO("sigma " << sigma << " W+ " << est.wplus_mean << " bound " << bound.value);
    REQUIRE(bound.valid);
    CHECK(est.wplus_mean - 3.0 * est.wplus_stderr <= bound.value);
    CHECK(est.wminus_mean - 3.0 * est.wminus_stderr <= bound.value);
  }
}
