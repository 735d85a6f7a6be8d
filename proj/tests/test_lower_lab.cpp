#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "marginlab/lower_lab.hpp"

using namespace marginlab;

namespace {

// Per-point Bernoulli sums in long double.
long double oracle_hellinger(const JointDistribution& P, const JointDistribution& Q) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < P.size(); ++i) {
    const long double a = P.eta(i);
    const long double b = Q.eta(i);
    s += P.domain().weight(i) * (1.0L - std::sqrt(a * b) - std::sqrt((1.0L - a) * (1.0L - b)));
  }
  return s;
}

long double xlogy(long double x, long double y) { return x == 0.0L ? 0.0L : x * std::log(x / y); }

long double oracle_kl(const JointDistribution& P, const JointDistribution& Q) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < P.size(); ++i) {
    const long double a = P.eta(i);
    const long double b = Q.eta(i);
    s += P.domain().weight(i) * (xlogy(a, b) + xlogy(1.0L - a, 1.0L - b));
  }
  return s;
}

Labels random_bits(std::mt19937_64& gen, std::size_t len) {
  Labels b(len);
  for (auto& x : b) {
    x = gen() & 1U;
  }
  return b;
}

Labels random_weight(std::mt19937_64& gen, std::size_t N, std::size_t D) {
  Labels b(N, 0);
  std::fill(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(D), 1);
  std::shuffle(b.begin(), b.end(), gen);
  return b;
}

std::size_t hamming(const Labels& a, const Labels& b) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += a[i] != b[i];
  }
  return d;
}

// Every weight-D word of length N in lexicographic order (x_0 first).
std::vector<Labels> all_words(std::size_t N, std::size_t D) {
  std::vector<Labels> out;
  Labels b(N, 0);
  std::fill(b.end() - static_cast<std::ptrdiff_t>(D), b.end(), 1);
  do {
    out.push_back(b);
  } while (std::next_permutation(b.begin(), b.end()));
  return out;
}

}  // namespace

TEST_CASE("family members") {
  const auto a = family_member(MarginFamilySpec::assouad(2, 1.0, 0.5), {1});
  CHECK(a.eta(0) == 1.0);
  CHECK(a.eta(1) == 0.0);
  CHECK(a.domain().weight(0) == 0.5);
  CHECK(a.domain().weight(1) == 0.5);

  const auto b = family_member(MarginFamilySpec::assouad(3, 0.5, 0.3), {1, 0});
  CHECK(b.eta(0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(b.eta(1) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(b.eta(2) == 0.0);
  CHECK(b.domain().weight(2) == doctest::Approx(0.4).epsilon(1e-15));

  const auto s = family_member(MarginFamilySpec::sparse(4, 1, 0.2), {0, 0, 1, 0});
  CHECK(s.eta(0) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(s.eta(2) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(s.domain().weight(3) == 0.25);

  CHECK_THROWS_AS(MarginFamilySpec::assouad(3, 0.5, 0.6), std::invalid_argument);
  CHECK_THROWS_AS(MarginFamilySpec::assouad(1, 0.5, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(MarginFamilySpec::sparse(7, 2, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(family_member(MarginFamilySpec::sparse(4, 1, 0.2), {1, 0, 1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(family_member(MarginFamilySpec::assouad(3, 0.5, 0.3), {1}), std::invalid_argument);
}

TEST_CASE("default atom mass and effective margin") {
  CHECK(effective_margin(5, 100, 0.5) == 0.5);
  CHECK(effective_margin(5, 100, 0.0) == doctest::Approx(0.2));
  CHECK(default_atom_mass(5, 1000, 0.5) == doctest::Approx(2.0 / (9.0 * 1000 * 0.25)));
  // At the critical margin p = 2 / (9 (V-1)), below the cap 1/(V-1).
  CHECK(default_atom_mass(5, 4, 0.0) == doctest::Approx(2.0 / 36.0));
}

TEST_CASE("closed-form divergence examples") {
  const auto z = closed_form_divergences(MarginFamilySpec::sparse(8, 2, 0.0), {0, 0, 0, 1, 0, 1, 0, 0},
                                         {1, 1, 0, 0, 0, 0, 0, 0});
  CHECK(z.hellinger_sq == 0.0);
  CHECK(z.kl == 0.0);

  // h = 0.6 with half of the mass in disagreement.
  const auto spec6 = MarginFamilySpec::sparse(4, 1, 0.6);
  CHECK(closed_form_hellinger(spec6, {1, 0, 0, 0}, {0, 1, 0, 0}) == doctest::Approx(0.1).epsilon(1e-14));

  // h = 0.5 with full disagreement: assouad V=2, p=1 puts all mass on x_1.
  const auto spec5 = MarginFamilySpec::assouad(2, 0.5, 1.0);
  CHECK(closed_form_kl(spec5, {1}, {0}) == doctest::Approx(0.54930614).epsilon(1e-8));

  CHECK_THROWS_AS(closed_form_kl(MarginFamilySpec::assouad(2, 1.0, 0.5), {1}, {0}), std::domain_error);
}

TEST_CASE("brute-force divergence examples") {
  const JointDistribution P(FiniteDomain::uniform(1), {0.75});
  const JointDistribution Q(FiniteDomain::uniform(1), {0.25});
  CHECK(brute_force_hellinger(P, Q) == doctest::Approx(0.1339746).epsilon(1e-7));
  CHECK(brute_force_kl(P, Q) == doctest::Approx(0.54930614).epsilon(1e-8));
  const auto same = brute_force_divergences(P, P);
  CHECK(same.hellinger_sq == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(same.kl == 0.0);

  const JointDistribution R(FiniteDomain::uniform(1), {1.0});
  const JointDistribution S(FiniteDomain::uniform(1), {0.0});
  CHECK_THROWS_AS(brute_force_kl(R, S), std::domain_error);
  CHECK(brute_force_hellinger(R, S) == doctest::Approx(1.0));
  CHECK_THROWS_AS(brute_force_kl(P, JointDistribution(FiniteDomain::uniform(2), {0.5, 0.5})), std::invalid_argument);
}

TEST_CASE("closed form matches per-point sums on 1000 random instances") {
  std::mt19937_64 gen(31337);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst_h = 0.0;
  double worst_k = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    MarginFamilySpec spec;
    Labels b;
    Labels b2;
    const double h = trial % 10 == 0 ? 0.0 : (trial % 10 == 1 ? 1.0 : unif(gen));
    if (trial % 2 == 0) {
      const std::size_t V = 2 + gen() % 10;
      const double p = unif(gen) / static_cast<double>(V - 1);
      spec = MarginFamilySpec::assouad(V, h, p);
      b = random_bits(gen, V - 1);
      b2 = random_bits(gen, V - 1);
    } else {
      const std::size_t D = 1 + gen() % 4;
      const std::size_t N = 4 * D + gen() % 10;
      spec = MarginFamilySpec::sparse(N, D, h);
      b = random_weight(gen, N, D);
      b2 = random_weight(gen, N, D);
    }
    const auto P = family_member(spec, b);
    const auto Q = family_member(spec, b2);

    // Margin and Bayes recovery.
    CHECK(margin_and_level(P).h == doctest::Approx(h).epsilon(1e-15));
    for (std::size_t i = 0; i < b.size(); ++i) {
      CHECK(std::abs(2.0 * P.eta(i) - 1.0) == doctest::Approx(h).epsilon(1e-15));
      if (h > 0.0) {
        CHECK(P.bayes()[i] == b[i]);
      }
    }
    if (spec.kind == FamilyKind::Assouad) {
      CHECK(P.eta(b.size()) == 0.0);
    }

    const double hc = closed_form_hellinger(spec, b, b2);
    const auto ho = static_cast<double>(oracle_hellinger(P, Q));
    worst_h = std::max(worst_h, std::abs(hc - ho));
    CHECK(std::abs(hc - ho) <= 1e-12);
    CHECK(std::abs(brute_force_hellinger(P, Q) - ho) <= 1e-12);
    if (h < 1.0) {
      const double kc = closed_form_kl(spec, b, b2);
      const auto ko = static_cast<double>(oracle_kl(P, Q));
      worst_k = std::max(worst_k, std::abs(kc - ko));
      CHECK(std::abs(kc - ko) <= 1e-12);
      CHECK(std::abs(brute_force_kl(P, Q) - ko) <= 1e-12);
      CHECK(hc <= kc + 1e-15);
    }
  }
  MESSAGE("worst hellinger gap " << worst_h << ", worst kl gap " << worst_k);
}

TEST_CASE("packing examples") {
  const auto c82 = greedy_packing(8, 2);
  CHECK(c82.codewords.size() == 28);
  CHECK(c82.min_distance == 2);
  CHECK(c82.certified);
  CHECK(c82.maximal);
  CHECK(c82.log_cardinality == doctest::Approx(std::log(28.0)));
  CHECK(c82.target == doctest::Approx(0.233 * 2 * std::log(4.0)));

  for (std::size_t D = 1; D <= 4; ++D) {
    const auto c = greedy_packing(4 * D, D);
    CHECK(c.certified);
    CHECK(verify_packing(c));
  }
  const auto c41 = greedy_packing(4, 1);
  CHECK(c41.codewords.size() == 4);
  CHECK(c41.min_distance == 2);

  const auto c164 = greedy_packing(16, 4);
  CHECK(c164.log_cardinality >= 0.233 * 4 * std::log(4.0));
  CHECK(c164.certified);

  CHECK_THROWS_AS(greedy_packing(7, 2), std::invalid_argument);
  CHECK_THROWS_AS(greedy_packing(4, 0), std::invalid_argument);
  CHECK_THROWS_AS(greedy_packing(65, 2), std::invalid_argument);
}

TEST_CASE("greedy packing equals an independent greedy scan and is maximal") {
  for (std::size_t N = 4; N <= 14; ++N) {
    for (std::size_t D = 1; 4 * D <= N; ++D) {
      const auto words = all_words(N, D);
      std::vector<Labels> kept;
      for (const auto& w : words) {
        bool ok = true;
        for (const auto& k : kept) {
          if (2 * hamming(w, k) <= D) {
            ok = false;
            break;
          }
        }
        if (ok) {
          kept.push_back(w);
        }
      }
      const auto code = greedy_packing(N, D);
      INFO("N=" << N << " D=" << D);
      CHECK(code.maximal);
      if (!code.from_clique) {
        CHECK(code.codewords == kept);
      }
      std::size_t md = N + 1;
      for (std::size_t i = 0; i < code.codewords.size(); ++i) {
        CHECK(std::count(code.codewords[i].begin(), code.codewords[i].end(), 1) == static_cast<long>(D));
        for (std::size_t j = i + 1; j < code.codewords.size(); ++j) {
          md = std::min(md, hamming(code.codewords[i], code.codewords[j]));
        }
      }
      CHECK(md == code.min_distance);
      CHECK(2 * md > D);
    }
  }
}

TEST_CASE("packing verification detects tampering and text export") {
  auto code = greedy_packing(8, 2);
  CHECK(verify_packing(code));
  code.min_distance = 3;
  CHECK_FALSE(verify_packing(code));
  code = greedy_packing(8, 2);
  code.codewords.push_back(code.codewords.front());
  CHECK_FALSE(verify_packing(code));

  std::ostringstream out;
  write_packing(out, greedy_packing(4, 1));
  CHECK(out.str() == "4 1 4\n0001\n0010\n0100\n1000\n");
}

TEST_CASE("Birge bound") {
  CHECK(birge_bound(0.0, 5) == 0.71);
  CHECK(birge_bound(1.42 * std::log(8.0) / 2.0, 7) == doctest::Approx(0.71).epsilon(1e-14));
  CHECK(birge_bound(10.0, 1) == 1.0);
  CHECK(birge_bound(0.8 * std::log(3.0), 2) == doctest::Approx(0.8).epsilon(1e-14));
}
