#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "marginlab/classes.hpp"
#include "marginlab/domain.hpp"

namespace marginlab {

struct Draw {
  std::uint32_t point = 0;
  std::uint8_t label = 0;
};

// n i.i.d. copies of (X, Y) with their provenance.
struct Sample {
  std::vector<Draw> draws;
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;

  std::size_t size() const { return draws.size(); }
};

// X from the cumulative weights of mu, then Y = 1 iff U < eta(X). The draws
// are a pure function of (seed, replication).
Sample draw_sample(const JointDistribution& P, std::size_t n, std::uint64_t seed, std::uint64_t replication);

// Fraction of draws with t(X_i) != Y_i.
double empirical_risk(const Classifier& t, const Sample& sample);

// Per-point counts of label 0 and label 1.
struct LabelCounts {
  std::vector<std::uint32_t> zeros;
  std::vector<std::uint32_t> ones;
};
LabelCounts count_labels(const Sample& sample, std::size_t m);

// Index of the first member (in class order) whose empirical risk is within
// rho of the minimum.
std::size_t erm_index(const ClassifierClass& cls, const Sample& sample, double rho = 0.0);
Classifier erm(const ClassifierClass& cls, const Sample& sample, double rho = 0.0);

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;  // sample standard deviation / sqrt(count)
};
// Sequential, order-fixed reduction.
MeanStderr summarize(const std::vector<double>& values);

struct RiskEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t replications = 0;
  std::size_t n = 0;
  double h = 0.0;
  std::string class_tag;
};

// Mean excess loss of rho-ERM over replications 1..R.
RiskEstimate monte_carlo_excess_risk(const JointDistribution& P, const ClassifierClass& cls, std::size_t n,
                                     std::size_t R, std::uint64_t seed, std::size_t threads = 1,
                                     double rho = 0.0);

struct SupEstimate {
  double wplus_mean = 0.0;
  double wminus_mean = 0.0;
  double wplus_stderr = 0.0;
  double wminus_stderr = 0.0;
  double entropy_mean = 0.0;  // mean combinatorial entropy of the kept sets on the sample
  std::size_t members = 0;    // sets kept by the sigma filter
  std::size_t replications = 0;
};

// Monte Carlo means of sup_B (P_n - P)(B) and sup_B (P - P_n)(B) over the
// members with P(B) <= sigma^2, each member read as a set indicator.
SupEstimate sup_process_estimate(const ClassifierClass& sets, const JointDistribution& P, std::size_t n,
                                 double sigma, std::size_t R, std::uint64_t seed, std::size_t threads = 1);

}  // namespace marginlab
