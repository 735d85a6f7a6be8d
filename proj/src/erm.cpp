#include "marginlab/erm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "marginlab/parallel.hpp"
#include "marginlab/rng.hpp"

namespace marginlab {

Sample draw_sample(const JointDistribution& P, std::size_t n, std::uint64_t seed, std::uint64_t replication) {
  if (n == 0) {
    throw std::invalid_argument("sample size must be at least 1");
  }
  const std::size_t m = P.size();
  std::vector<double> cumulative(m);
  std::partial_sum(P.domain().weights().begin(), P.domain().weights().end(), cumulative.begin());
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (P.domain().weight(i) > 0.0) {
      last_positive = i;
    }
  }

  Stream stream(seed, replication);
  Sample s;
  s.seed = seed;
  s.replication = replication;
  s.draws.resize(n);
  for (auto& d : s.draws) {
    const double u = stream.uniform() * cumulative.back();
    auto idx = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    idx = std::min(idx, last_positive);
    d.point = static_cast<std::uint32_t>(idx);
    d.label = stream.uniform() < P.eta(idx) ? 1 : 0;
  }
  return s;
}

double empirical_risk(const Classifier& t, const Sample& sample) {
  if (sample.draws.empty()) {
    throw std::invalid_argument("empirical risk of an empty sample");
  }
  std::size_t mistakes = 0;
  for (const auto& d : sample.draws) {
    if (d.point >= t.size()) {
      throw std::out_of_range("sample point outside the classifier domain");
    }
    mistakes += t[d.point] != d.label;
  }
  return static_cast<double>(mistakes) / static_cast<double>(sample.size());
}

LabelCounts count_labels(const Sample& sample, std::size_t m) {
  LabelCounts c;
  c.zeros.assign(m, 0);
  c.ones.assign(m, 0);
  for (const auto& d : sample.draws) {
    if (d.point >= m) {
      throw std::out_of_range("sample point outside the class domain");
    }
    (d.label ? c.ones : c.zeros)[d.point]++;
  }
  return c;
}

std::size_t erm_index(const ClassifierClass& cls, const Sample& sample, double rho) {
  if (cls.size() == 0) {
    throw std::invalid_argument("ERM over an empty class");
  }
  if (!(rho >= 0.0)) {
    throw std::invalid_argument("ERM slack must be nonnegative");
  }
  const std::size_t m = cls.domain_size();
  const auto counts = count_labels(sample, m);
  // Only observed points contribute.
  std::vector<std::size_t> seen;
  for (std::size_t i = 0; i < m; ++i) {
    if (counts.zeros[i] + counts.ones[i] > 0) {
      seen.push_back(i);
    }
  }
  std::vector<std::size_t> mistakes(cls.size());
  std::size_t best = static_cast<std::size_t>(-1);
  for (std::size_t k = 0; k < cls.size(); ++k) {
    const auto& t = cls[k];
    std::size_t e = 0;
    for (auto i : seen) {
      e += t[i] ? counts.zeros[i] : counts.ones[i];
    }
    mistakes[k] = e;
    best = std::min(best, e);
  }
  // Compare in counts; risk slack rho is rho * n mistakes.
  const double limit = static_cast<double>(best) + rho * static_cast<double>(sample.size()) + 1e-9;
  for (std::size_t k = 0; k < cls.size(); ++k) {
    if (static_cast<double>(mistakes[k]) <= limit) {
      return k;
    }
  }
  return 0;
}

Classifier erm(const ClassifierClass& cls, const Sample& sample, double rho) {
  return cls[erm_index(cls, sample, rho)];
}

MeanStderr summarize(const std::vector<double>& values) {
  MeanStderr r;
  if (values.empty()) {
    return r;
  }
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  const double count = static_cast<double>(values.size());
  r.mean = sum / count;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) {
      ss += (v - r.mean) * (v - r.mean);
    }
    r.stderr_ = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
  }
  return r;
}

RiskEstimate monte_carlo_excess_risk(const JointDistribution& P, const ClassifierClass& cls, std::size_t n,
                                     std::size_t R, std::uint64_t seed, std::size_t threads, double rho) {
  if (R < 2) {
    throw std::invalid_argument("Monte Carlo needs at least 2 replications");
  }
  if (cls.domain_size() != P.size()) {
    throw std::invalid_argument("class and distribution live on different domains");
  }
  // Excess loss of every member is fixed; replications only pick an index.
  std::vector<double> member_loss(cls.size());
  for (std::size_t k = 0; k < cls.size(); ++k) {
    member_loss[k] = excess_loss(P, cls[k]);
  }
  std::vector<double> losses(R);
  parallel_for(R, threads, [&](std::size_t r) {
    const auto sample = draw_sample(P, n, seed, r + 1);
    losses[r] = member_loss[erm_index(cls, sample, rho)];
  });
  const auto s = summarize(losses);
  RiskEstimate est;
  est.mean = s.mean;
  est.stderr_ = s.stderr_;
  est.replications = R;
  est.n = n;
  est.h = P.margin();
  est.class_tag = to_string(cls.kind());
  return est;
}

SupEstimate sup_process_estimate(const ClassifierClass& sets, const JointDistribution& P, std::size_t n,
                                 double sigma, std::size_t R, std::uint64_t seed, std::size_t threads) {
  if (R < 2) {
    throw std::invalid_argument("Monte Carlo needs at least 2 replications");
  }
  if (sets.domain_size() != P.size()) {
    throw std::invalid_argument("set family and distribution live on different domains");
  }
  const std::size_t m = P.size();
  auto mass = [&](const Classifier& c) {
    double q = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (c[i]) {
        q += P.domain().weight(i);
      }
    }
    return q;
  };
  std::vector<const Classifier*> kept;
  std::vector<double> masses;
  for (const auto& c : sets.members()) {
    const double q = mass(c);
    if (q <= sigma * sigma + kProbTolerance) {
      kept.push_back(&c);
      masses.push_back(q);
    }
  }
  if (kept.empty()) {
    throw std::invalid_argument("sigma filter leaves no member");
  }

  std::vector<double> wplus(R);
  std::vector<double> wminus(R);
  std::vector<double> entropy(R);
  parallel_for(R, threads, [&](std::size_t r) {
    const auto sample = draw_sample(P, n, seed, r + 1);
    std::vector<std::uint32_t> hits(m, 0);
    for (const auto& d : sample.draws) {
      hits[d.point]++;
    }
    double up = -1e300;
    double down = -1e300;
    std::vector<std::string> traces;
    traces.reserve(kept.size());
    for (std::size_t k = 0; k < kept.size(); ++k) {
      const Classifier& c = *kept[k];
      std::size_t count = 0;
      std::string trace;
      for (std::size_t i = 0; i < m; ++i) {
        if (hits[i] > 0) {
          trace.push_back(static_cast<char>('0' + c[i]));
          if (c[i]) {
            count += hits[i];
          }
        }
      }
      traces.push_back(std::move(trace));
      const double diff = static_cast<double>(count) / static_cast<double>(n) - masses[k];
      up = std::max(up, diff);
      down = std::max(down, -diff);
    }
    std::sort(traces.begin(), traces.end());
    const auto distinct = std::unique(traces.begin(), traces.end()) - traces.begin();
    wplus[r] = up;
    wminus[r] = down;
    entropy[r] = std::log(static_cast<double>(distinct));
  });

  const auto p = summarize(wplus);
  const auto q = summarize(wminus);
  SupEstimate est;
  est.wplus_mean = p.mean;
  est.wplus_stderr = p.stderr_;
  est.wminus_mean = q.mean;
  est.wminus_stderr = q.stderr_;
  est.entropy_mean = summarize(entropy).mean;
  est.members = kept.size();
  est.replications = R;
  return est;
}

}  // namespace marginlab
