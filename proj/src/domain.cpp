#include "marginlab/domain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace marginlab {

FiniteDomain::FiniteDomain(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) {
    throw std::invalid_argument("domain must contain at least one point");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) {
      throw std::invalid_argument("domain weights must be nonnegative");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > kProbTolerance * static_cast<double>(weights_.size())) {
    throw std::invalid_argument("domain weights sum to " + std::to_string(total) + ", expected 1");
  }
}

FiniteDomain FiniteDomain::uniform(std::size_t m) {
  if (m == 0) {
    throw std::invalid_argument("domain must contain at least one point");
  }
  return FiniteDomain(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

JointDistribution::JointDistribution(FiniteDomain domain, std::vector<double> eta)
    : domain_(std::move(domain)), eta_(std::move(eta)) {
  if (eta_.size() != domain_.size()) {
    throw std::invalid_argument("regression vector length does not match domain size");
  }
  Labels labels(eta_.size());
  margin_ = 1.0;
  zero_error_ = true;
  for (std::size_t i = 0; i < eta_.size(); ++i) {
    const double e = eta_[i];
    if (!(e >= 0.0 && e <= 1.0)) {
      throw std::invalid_argument("regression values must lie in [0,1]");
    }
    labels[i] = e >= 0.5 ? 1 : 0;
    margin_ = std::min(margin_, std::abs(2.0 * e - 1.0));
    if (e != 0.0 && e != 1.0) {
      zero_error_ = false;
    }
  }
  bayes_ = Classifier(std::move(labels));
}

Classifier bayes_classifier(const JointDistribution& p) { return p.bayes(); }

static void require_same_size(std::size_t a, std::size_t b) {
  if (a != b) {
    throw std::invalid_argument("classifier length " + std::to_string(b) +
                                " does not match domain size " + std::to_string(a));
  }
}

double excess_loss(const JointDistribution& p, const Classifier& t) {
  require_same_size(p.size(), t.size());
  const Classifier& s = p.bayes();
  double loss = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (t[i] != s[i]) {
      loss += p.domain().weight(i) * std::abs(2.0 * p.eta(i) - 1.0);
    }
  }
  return loss;
}

double misclassification(const JointDistribution& p, const Classifier& t) {
  require_same_size(p.size(), t.size());
  double err = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    err += p.domain().weight(i) * (t[i] ? 1.0 - p.eta(i) : p.eta(i));
  }
  return err;
}

MarginLevel margin_and_level(const JointDistribution& p) {
  double level = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    level += p.domain().weight(i) * std::min(p.eta(i), 1.0 - p.eta(i));
  }
  return {p.margin(), level};
}

double l1_distance(const FiniteDomain& domain, const Classifier& t, const Classifier& u) {
  require_same_size(domain.size(), t.size());
  require_same_size(domain.size(), u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (t[i] != u[i]) {
      d += domain.weight(i);
    }
  }
  return d;
}

}  // namespace marginlab
