#include "marginlab/lower_lab.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace marginlab {

namespace {

using Word = std::uint64_t;

constexpr double kFullScanLimit = 1e7;
constexpr double kCliqueLimit = 5000.0;

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return r;
}

Word next_same_weight(Word x) {
  const Word c = x & (~x + 1);
  const Word r = x + c;
  return (((r ^ x) >> 2) / c) | r;
}

// x_0 is the most significant bit, so integer order is lexicographic order.
Labels to_labels(Word w, std::size_t N) {
  Labels out(N);
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = static_cast<std::uint8_t>((w >> (N - 1 - i)) & 1U);
  }
  return out;
}

void check_hypercube_index(const MarginFamilySpec& spec, const Labels& b) {
  if (b.size() != spec.index_length()) {
    throw std::invalid_argument("index vector has length " + std::to_string(b.size()) + ", expected " +
                                std::to_string(spec.index_length()));
  }
  std::size_t weight = 0;
  for (auto v : b) {
    if (v > 1) {
      throw std::invalid_argument("index vector must be binary");
    }
    weight += v;
  }
  if (spec.kind == FamilyKind::Sparse && weight != spec.D) {
    throw std::invalid_argument("sparse index vector must have weight D = " + std::to_string(spec.D));
  }
}

void check_spec(const MarginFamilySpec& spec) {
  if (!(spec.h >= 0.0 && spec.h <= 1.0)) {
    throw std::invalid_argument("margin h must lie in [0,1]");
  }
  if (spec.kind == FamilyKind::Assouad) {
    if (spec.V < 2) {
      throw std::invalid_argument("Assouad family needs V >= 2");
    }
    if (!(spec.p >= 0.0) || spec.p * static_cast<double>(spec.V - 1) > 1.0 + kProbTolerance) {
      throw std::invalid_argument("Assouad atom mass must satisfy 0 <= p(V-1) <= 1");
    }
  } else {
    if (spec.D < 1 || spec.N < 4 * spec.D) {
      throw std::invalid_argument("sparse family needs N >= 4D >= 4");
    }
  }
}

void require_same_marginal(const JointDistribution& P, const JointDistribution& Q) {
  if (P.size() != Q.size()) {
    throw std::invalid_argument("distributions live on domains of different size");
  }
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (std::abs(P.domain().weight(i) - Q.domain().weight(i)) > kProbTolerance) {
      throw std::invalid_argument("distributions must share the marginal of X");
    }
  }
}

// Branch and bound for a clique of size >= need in the compatibility graph.
class CliqueSearch {
 public:
  CliqueSearch(const std::vector<Word>& words, std::size_t D, std::size_t need)
      : n_(words.size()), blocks_((n_ + 63) / 64), need_(need), adj_(n_, std::vector<Word>(blocks_, 0)) {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) {
        if (2 * static_cast<std::size_t>(std::popcount(words[i] ^ words[j])) > D) {
          adj_[i][j / 64] |= Word{1} << (j % 64);
          adj_[j][i / 64] |= Word{1} << (i % 64);
        }
      }
    }
  }

  std::vector<std::size_t> run() {
    std::vector<Word> cand(blocks_, 0);
    for (std::size_t i = 0; i < n_; ++i) {
      cand[i / 64] |= Word{1} << (i % 64);
    }
    std::vector<std::size_t> current;
    expand(current, cand);
    return best_;
  }

 private:
  static std::size_t count(const std::vector<Word>& s) {
    std::size_t c = 0;
    for (Word w : s) {
      c += static_cast<std::size_t>(std::popcount(w));
    }
    return c;
  }

  bool expand(std::vector<std::size_t>& current, std::vector<Word> cand) {
    if (current.size() > best_.size()) {
      best_ = current;
      if (best_.size() >= need_) {
        return true;
      }
    }
    if (++nodes_ > kNodeBudget) {
      return true;
    }
    while (true) {
      if (current.size() + count(cand) <= best_.size()) {
        return false;
      }
      std::size_t v = n_;
      for (std::size_t b = 0; b < blocks_; ++b) {
        if (cand[b] != 0) {
          v = b * 64 + static_cast<std::size_t>(std::countr_zero(cand[b]));
          break;
        }
      }
      if (v == n_) {
        return false;
      }
      cand[v / 64] &= ~(Word{1} << (v % 64));
      std::vector<Word> next(blocks_);
      for (std::size_t b = 0; b < blocks_; ++b) {
        next[b] = cand[b] & adj_[v][b];
      }
      current.push_back(v);
      if (expand(current, std::move(next))) {
        return true;
      }
      current.pop_back();
    }
  }

  static constexpr std::size_t kNodeBudget = 50'000'000;

  std::size_t n_;
  std::size_t blocks_;
  std::size_t need_;
  std::vector<std::vector<Word>> adj_;
  std::vector<std::size_t> best_;
  std::size_t nodes_ = 0;
};

void finish(PackingCode& code, const std::vector<Word>& kept) {
  code.codewords.clear();
  code.codewords.reserve(kept.size());
  std::size_t dmin = code.N + 1;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    code.codewords.push_back(to_labels(kept[i], code.N));
    for (std::size_t j = 0; j < i; ++j) {
      dmin = std::min(dmin, static_cast<std::size_t>(std::popcount(kept[i] ^ kept[j])));
    }
  }
  code.min_distance = dmin;
  code.log_cardinality = std::log(static_cast<double>(kept.size()));
  code.certified = code.log_cardinality >= code.target;
}

}  // namespace

MarginFamilySpec MarginFamilySpec::assouad(std::size_t V, double h, double p) {
  MarginFamilySpec s;
  s.kind = FamilyKind::Assouad;
  s.V = V;
  s.h = h;
  s.p = p;
  check_spec(s);
  return s;
}

MarginFamilySpec MarginFamilySpec::sparse(std::size_t N, std::size_t D, double h) {
  MarginFamilySpec s;
  s.kind = FamilyKind::Sparse;
  s.N = N;
  s.D = D;
  s.h = h;
  check_spec(s);
  return s;
}

double effective_margin(std::size_t V, std::size_t n, double h) {
  if (V < 2 || n < 1) {
    throw std::invalid_argument("effective margin needs V >= 2 and n >= 1");
  }
  return std::max(h, std::sqrt(static_cast<double>(V - 1) / static_cast<double>(n)));
}

double default_atom_mass(std::size_t V, std::size_t n, double h) {
  const double he = effective_margin(V, n, h);
  const double p = 2.0 / (9.0 * static_cast<double>(n) * he * he);
  return std::min(p, 1.0 / static_cast<double>(V - 1));
}

JointDistribution family_member(const MarginFamilySpec& spec, const Labels& b) {
  check_spec(spec);
  check_hypercube_index(spec, b);
  const double h = spec.h;
  if (spec.kind == FamilyKind::Assouad) {
    const std::size_t V = spec.V;
    std::vector<double> mu(V, spec.p);
    mu[V - 1] = std::max(0.0, 1.0 - spec.p * static_cast<double>(V - 1));
    std::vector<double> eta(V, 0.0);
    for (std::size_t i = 0; i + 1 < V; ++i) {
      eta[i] = (1.0 + (2.0 * b[i] - 1.0) * h) / 2.0;
    }
    return JointDistribution(FiniteDomain(std::move(mu)), std::move(eta));
  }
  std::vector<double> eta(spec.N);
  for (std::size_t i = 0; i < spec.N; ++i) {
    eta[i] = (1.0 + (2.0 * b[i] - 1.0) * h) / 2.0;
  }
  return JointDistribution(FiniteDomain::uniform(spec.N), std::move(eta));
}

namespace {

double bayes_disagreement(const MarginFamilySpec& spec, const Labels& b, const Labels& b2) {
  const auto P = family_member(spec, b);
  const auto Q = family_member(spec, b2);
  return l1_distance(P.domain(), P.bayes(), Q.bayes());
}

}  // namespace

double closed_form_hellinger(const MarginFamilySpec& spec, const Labels& b, const Labels& b2) {
  const double h = spec.h;
  // 1 - sqrt(1 - h^2) without cancellation.
  const double factor = h * h / (1.0 + std::sqrt(1.0 - h * h));
  return factor * bayes_disagreement(spec, b, b2);
}

double closed_form_kl(const MarginFamilySpec& spec, const Labels& b, const Labels& b2) {
  const double h = spec.h;
  if (h >= 1.0) {
    throw std::domain_error("Kullback-Leibler divergence is infinite at h = 1");
  }
  const double factor = h * (std::log1p(h) - std::log1p(-h));
  return factor * bayes_disagreement(spec, b, b2);
}

Divergences closed_form_divergences(const MarginFamilySpec& spec, const Labels& b, const Labels& b2) {
  return {closed_form_hellinger(spec, b, b2), closed_form_kl(spec, b, b2)};
}

double brute_force_hellinger(const JointDistribution& P, const JointDistribution& Q) {
  require_same_marginal(P, Q);
  double sum = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    const double p = P.eta(i);
    const double q = Q.eta(i);
    sum += P.domain().weight(i) * (1.0 - std::sqrt(p * q) - std::sqrt((1.0 - p) * (1.0 - q)));
  }
  return sum;
}

double brute_force_kl(const JointDistribution& P, const JointDistribution& Q) {
  require_same_marginal(P, Q);
  auto term = [](double a, double c) {
    if (a == 0.0) {
      return 0.0;
    }
    if (c == 0.0) {
      throw std::domain_error("Kullback-Leibler divergence: support violation");
    }
    return a * std::log(a / c);
  };
  double sum = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    const double w = P.domain().weight(i);
    if (w == 0.0) {
      continue;
    }
    const double p = P.eta(i);
    const double q = Q.eta(i);
    sum += w * (term(p, q) + term(1.0 - p, 1.0 - q));
  }
  return sum;
}

Divergences brute_force_divergences(const JointDistribution& P, const JointDistribution& Q) {
  return {brute_force_hellinger(P, Q), brute_force_kl(P, Q)};
}

double packing_target(std::size_t N, std::size_t D) {
  return kPackingRho * static_cast<double>(D) * std::log(static_cast<double>(N) / static_cast<double>(D));
}

PackingCode greedy_packing(std::size_t N, std::size_t D) {
  if (D < 1 || N < 4 * D) {
    throw std::invalid_argument("packing needs N >= 4D >= 4");
  }
  if (N > 64) {
    throw std::invalid_argument("packing supports N <= 64");
  }
  PackingCode code;
  code.N = N;
  code.D = D;
  code.target = packing_target(N, D);

  const double total = binomial(N, D);
  const bool complete = total <= kFullScanLimit;
  const std::size_t need = static_cast<std::size_t>(std::ceil(std::exp(code.target) - 1e-9));
  const Word first = (Word{1} << D) - 1;
  const Word last = first << (N - D);

  std::vector<Word> kept;
  std::size_t scanned = 0;
  for (Word w = first;; w = next_same_weight(w)) {
    ++scanned;
    bool ok = true;
    // Recent words are the likeliest conflicts.
    for (auto it = kept.rbegin(); it != kept.rend(); ++it) {
      if (2 * static_cast<std::size_t>(std::popcount(w ^ *it)) <= D) {
        ok = false;
        break;
      }
    }
    if (ok) {
      kept.push_back(w);
    }
    if (w == last) {
      break;
    }
    if (!complete && (kept.size() >= need || scanned >= static_cast<std::size_t>(kFullScanLimit))) {
      break;
    }
  }
  code.maximal = complete;
  finish(code, kept);

  if (!code.certified && total <= kCliqueLimit) {
    std::vector<Word> words;
    for (Word w = first;; w = next_same_weight(w)) {
      words.push_back(w);
      if (w == last) {
        break;
      }
    }
    const auto clique = CliqueSearch(words, D, need).run();
    if (clique.size() > kept.size()) {
      std::vector<Word> chosen;
      for (auto i : clique) {
        chosen.push_back(words[i]);
      }
      std::sort(chosen.begin(), chosen.end());
      code.maximal = false;
      code.from_clique = true;
      finish(code, chosen);
    }
  }
  return code;
}

bool verify_packing(const PackingCode& code) {
  std::size_t dmin = code.N + 1;
  for (std::size_t i = 0; i < code.codewords.size(); ++i) {
    const auto& a = code.codewords[i];
    if (a.size() != code.N) {
      return false;
    }
    std::size_t weight = 0;
    for (auto v : a) {
      weight += v;
    }
    if (weight != code.D) {
      return false;
    }
    for (std::size_t j = 0; j < i; ++j) {
      const auto& b = code.codewords[j];
      std::size_t dist = 0;
      for (std::size_t k = 0; k < code.N; ++k) {
        dist += a[k] != b[k];
      }
      if (2 * dist <= code.D) {
        return false;
      }
      dmin = std::min(dmin, dist);
    }
  }
  return dmin == code.min_distance &&
         code.log_cardinality == std::log(static_cast<double>(code.codewords.size()));
}

void write_packing(std::ostream& out, const PackingCode& code) {
  out << code.N << ' ' << code.D << ' ' << code.codewords.size() << '\n';
  for (const auto& w : code.codewords) {
    for (auto v : w) {
      out << static_cast<char>('0' + v);
    }
    out << '\n';
  }
}

double birge_bound(double kbar, std::size_t N) {
  if (N < 1 || !(kbar >= 0.0)) {
    throw std::invalid_argument("Birge bound needs N >= 1 and kbar >= 0");
  }
  return std::min(1.0, std::max(0.71, kbar / std::log1p(static_cast<double>(N))));
}

}  // namespace marginlab
