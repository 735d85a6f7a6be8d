#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace marginlab {

// Absolute tolerance for probability equalities.
inline constexpr double kProbTolerance = 1e-12;

// Binary labels over the points of a finite domain, t(x_i) in {0,1}.
using Labels = std::vector<std::uint8_t>;

// Marginal law mu on points 0..m-1.
class FiniteDomain {
 public:
  explicit FiniteDomain(std::vector<double> weights);

  static FiniteDomain uniform(std::size_t m);

  std::size_t size() const { return weights_.size(); }
  double weight(std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }

 private:
  std::vector<double> weights_;
};

class Classifier {
 public:
  Classifier() = default;
  explicit Classifier(Labels labels) : labels_(std::move(labels)) {}

  std::size_t size() const { return labels_.size(); }
  std::uint8_t operator[](std::size_t i) const { return labels_[i]; }
  const Labels& labels() const { return labels_; }

  friend auto operator<=>(const Classifier&, const Classifier&) = default;

 private:
  Labels labels_;
};

// Finite-support law of (X, Y): X ~ mu, Y | X = x_i ~ Bernoulli(eta_i).
class JointDistribution {
 public:
  JointDistribution(FiniteDomain domain, std::vector<double> eta);

  const FiniteDomain& domain() const { return domain_; }
  std::size_t size() const { return domain_.size(); }
  double eta(std::size_t i) const { return eta_[i]; }
  std::span<const double> eta() const { return eta_; }

  const Classifier& bayes() const { return bayes_; }
  double margin() const { return margin_; }
  // True iff every eta_i is 0 or 1 (Y = s*(X) almost surely).
  bool zero_error() const { return zero_error_; }

 private:
  FiniteDomain domain_;
  std::vector<double> eta_;
  Classifier bayes_;
  double margin_ = 0.0;
  bool zero_error_ = false;
};

struct MarginLevel {
  double h;  // min_i |2 eta_i - 1|
  double L;  // P(Y != s*(X))
};

// s*(x) = 1{eta(x) >= 1/2}; ties go to label 1.
Classifier bayes_classifier(const JointDistribution& p);

// l(s*, t) = sum_i mu_i |2 eta_i - 1| 1{t_i != s*_i}.
double excess_loss(const JointDistribution& p, const Classifier& t);

// P(Y != t(X)).
double misclassification(const JointDistribution& p, const Classifier& t);

MarginLevel margin_and_level(const JointDistribution& p);

// L1(mu) distance between two classifiers.
double l1_distance(const FiniteDomain& domain, const Classifier& t, const Classifier& u);

}  // namespace marginlab
