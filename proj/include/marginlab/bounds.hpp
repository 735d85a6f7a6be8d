#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "marginlab/classes.hpp"
#include "marginlab/domain.hpp"

namespace marginlab {

// rho alpha (1 - alpha) / 32 with rho = 0.233, alpha = 0.71.
inline constexpr double kSparseLowerConstant = 0.233 * 0.71 * 0.29 / 32.0;

struct BoundValue {
  std::string id;
  double value = 0.0;
  bool valid = false;
  std::string side_condition;
};

// Absolute constants. Those without a known value default to 1.
struct BoundConstants {
  double C = 1.0;        // margin upper bounds
  double kappa = 1.0;    // excess risk upper bound in h > sqrt(V/n)
  double kappa3 = 1.0;   // L0 upper bound
  double kappa4 = 1.0;   // L0 lower bound
  double C1 = 1.0;       // epsilon*^2 bound under bracketing entropy
  double C2 = 1.0;       // risk bound under bracketing entropy
  double K_lower = 1.0;  // metric entropy lower bound
  double c_sparse = kSparseLowerConstant;
  double kappa_pp = kSparseLowerConstant / 4.0;  // half-space lower bound
};

struct BoundParams {
  std::size_t V = 1;
  std::size_t n = 1;
  double h = 0.0;
  double theta = 1.0;
  std::optional<double> EH;  // expected combinatorial entropy
  std::optional<double> L0;  // misclassification level; (1-h)/2 when absent
  std::size_t D = 0;         // sparse dimension; V when 0
  std::size_t d = 0;         // half-space dimension; V-1 when 0
  double r = 0.5;            // bracketing / metric entropy exponent
  std::optional<double> p;   // Assouad atom mass; default_atom_mass when absent
  BoundConstants constants;
};

inline const std::vector<std::string>& upper_bound_ids() {
  static const std::vector<std::string> ids{"Eq2", "Eq32", "Eq33", "Eq34", "Eq35", "Eq36", "Eq7"};
  return ids;
}
inline const std::vector<std::string>& lower_bound_ids() {
  static const std::vector<std::string> ids{"Eq3",  "Eq38", "Eq39",        "Eq40_proof",
                                            "Eq41", "Eq42", "Eq9", "assouad_expr"};
  return ids;
}

// Throws std::invalid_argument for unknown ids or malformed parameters.
BoundValue upper_bound(const std::string& id, const BoundParams& params);
BoundValue lower_bound(const std::string& id, const BoundParams& params);
BoundValue evaluate_bound(const std::string& id, const BoundParams& params);
bool is_upper_bound(const std::string& id);

// Moduli ----------------------------------------------------------------------

enum class PhiKind { Combinatorial, Universal, BracketingPower };

struct PhiSpec {
  PhiKind kind = PhiKind::Combinatorial;
  double K = 1.0;
  double EH = 1.0;     // combinatorial
  std::size_t V = 1;   // universal
  double K1 = 1.0;     // bracketing_power: H(u) = K1 u^{-r}
  double r = 0.5;
};

//   combinatorial:    K sigma sqrt(max(1, EH))
//   universal:        K sigma sqrt(V (1 + log(max(1/sigma, 1))))
//   bracketing_power: 12 sqrt(K1) sigma^{1-r} / (1-r)
double modulus_phi(const PhiSpec& spec, double sigma);

// h^{-1/2} eps^{1/theta}, capped at 1 when cap is set.
double modulus_w(double eps, double h, double theta, bool cap = true);

// Root of sqrt(n) eps^2 = phi(w(eps)) by bisection on eps. phi(w(eps)) / eps^2
// must be nonincreasing. Throws std::runtime_error if no bracket is found.
double solve_epsilon_star(const std::function<double(double)>& phi, const std::function<double(double)>& w,
                          std::size_t n);
double solve_epsilon_star(const PhiSpec& phi, double h, double theta, bool cap, std::size_t n);

// Tails and maximal inequalities ----------------------------------------------

// EZ + sqrt(2 (v + 4 b EZ) y / n) + 2 b y / (3 n).
double bousquet_tail(double v, double b, double EZ, double y, std::size_t n);

// sqrt(2 v log N).
double subgaussian_max(double v, std::size_t N);
// sqrt(2 v log N) + c log N.
double bernstein_max(double v, std::size_t N, double c = 1.0 / 3.0);
// 3 delta sum_j 2^{-j} sqrt(H2(2^{-j-1} delta)), at most `terms` terms.
double chaining_bound(const std::function<double(double)>& H2, double delta, std::size_t terms = 64);
// 2 sqrt(3) sigma sqrt(EH / n); valid iff sigma >= 4 sqrt(3) sqrt(EH / n).
BoundValue vc_entropy_max(double sigma, double EH, std::size_t n);
// sqrt(3) C sigma sqrt(V (1 + log(max(1/sigma, 1))) / n) with C = 6 sqrt(kappa)(1 + sqrt 2);
// valid iff sigma >= 2 sqrt(3) C sqrt(V (1 + |log sigma|) / n).
BoundValue vc_universal_max(double sigma, std::size_t V, std::size_t n, double kappa = 1.0);
// 12 phi(delta) / sqrt(n); valid iff 4 phi(delta) <= delta^2 sqrt(n).
BoundValue bracketing_max(double phi_delta, double delta, std::size_t n);
// 4 x^{-2} psi(x).
double peeling_bound(double x, const std::function<double(double)>& psi);

// Scenario report -------------------------------------------------------------

struct RiskCertificate {
  std::size_t V = 0;
  std::size_t n = 0;
  double h = 0.0;
  double L = 0.0;
  std::vector<BoundValue> bounds;
  double lower = 0.0;  // max of valid lower bounds
  double upper = 0.0;  // min of valid upper bounds
};

RiskCertificate risk_certificate(const JointDistribution& P, const ClassifierClass& cls, std::size_t n,
                                 const BoundConstants& constants = {}, double theta = 1.0);

}  // namespace marginlab
