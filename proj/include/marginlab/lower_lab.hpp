#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "marginlab/domain.hpp"

namespace marginlab {

enum class FamilyKind { Assouad, Sparse };

// Hypercube of margin-h distributions used for lower bounds.
//   assouad: V points, mu = (p, ..., p, 1 - p(V-1)), indexed by b in {0,1}^{V-1}
//   sparse:  N uniform points, indexed by weight-D vectors b in {0,1}^N
struct MarginFamilySpec {
  FamilyKind kind = FamilyKind::Assouad;
  std::size_t V = 0;
  std::size_t N = 0;
  std::size_t D = 0;
  double h = 0.0;
  double p = 0.0;

  static MarginFamilySpec assouad(std::size_t V, double h, double p);
  static MarginFamilySpec sparse(std::size_t N, std::size_t D, double h);

  // Length of the index vector b.
  std::size_t index_length() const { return kind == FamilyKind::Assouad ? V - 1 : N; }
};

// max(h, sqrt((V-1)/n)): small margins are replaced by the critical one.
double effective_margin(std::size_t V, std::size_t n, double h);

// p = 2 / (9 n h^2) at the effective margin, clamped so that p (V-1) <= 1.
double default_atom_mass(std::size_t V, std::size_t n, double h);

JointDistribution family_member(const MarginFamilySpec& spec, const Labels& b);

struct Divergences {
  double hellinger_sq = 0.0;
  double kl = 0.0;
};

// (1 - sqrt(1 - h^2)) |t - s|_1.
double closed_form_hellinger(const MarginFamilySpec& spec, const Labels& b, const Labels& b2);
// h log((1+h)/(1-h)) |t - s|_1; throws std::domain_error when h = 1.
double closed_form_kl(const MarginFamilySpec& spec, const Labels& b, const Labels& b2);
Divergences closed_form_divergences(const MarginFamilySpec& spec, const Labels& b, const Labels& b2);

// Pointwise Bernoulli sums; P and Q must share the marginal.
double brute_force_hellinger(const JointDistribution& P, const JointDistribution& Q);
// Throws std::domain_error when P is not absolutely continuous w.r.t. Q.
double brute_force_kl(const JointDistribution& P, const JointDistribution& Q);
Divergences brute_force_divergences(const JointDistribution& P, const JointDistribution& Q);

// Constant-weight code with pairwise Hamming distance > D/2.
struct PackingCode {
  std::size_t N = 0;
  std::size_t D = 0;
  std::vector<Labels> codewords;
  std::size_t min_distance = 0;  // N + 1 when there is a single codeword
  double log_cardinality = 0.0;
  double target = 0.0;      // 0.233 D log(N/D)
  bool certified = false;   // log_cardinality >= target
  bool maximal = false;     // scan ran over every weight-D vector
  bool from_clique = false; // produced by the exact fallback search
};

inline constexpr double kPackingRho = 0.233;

double packing_target(std::size_t N, std::size_t D);

// Greedy lexicographic packing of weight-D words, N <= 64, N >= 4D >= 4.
//
// Up to 10^7 words the scan is complete and the code is maximal. Beyond that
// the scan stops as soon as the certificate holds.
PackingCode greedy_packing(std::size_t N, std::size_t D);

// Recomputes weights and all pairwise distances; true iff they match the code.
bool verify_packing(const PackingCode& code);

// "N D count" header, then one codeword per line.
void write_packing(std::ostream& out, const PackingCode& code);

// max(0.71, kbar / log(1 + N)), capped at 1.
double birge_bound(double kbar, std::size_t N);

}  // namespace marginlab
