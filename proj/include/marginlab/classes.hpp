#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "marginlab/domain.hpp"

namespace marginlab {

enum class ClassKind { Powerset, Sparse, HalfspaceTrace, Explicit };

const char* to_string(ClassKind kind);

using Point = std::vector<double>;

// Construction parameters recorded with a class.
struct ClassMetadata {
  std::size_t V = 0;  // powerset size
  std::size_t N = 0;  // sparse length
  std::size_t D = 0;  // sparse weight
  std::vector<Point> points;  // halfspace coordinates
};

// Finite family of classifiers over points 0..m-1.
//
// Members are distinct and kept in ascending lexicographic order of their
// label vectors, x_0 first. That order is the ERM tie-break contract.
class ClassifierClass {
 public:
  static constexpr std::size_t kMaxPowersetPoints = 20;
  static constexpr std::size_t kMaxSparseMembers = 1'000'000;
  static constexpr std::size_t kMaxHalfspacePoints = 12;

  static ClassifierClass powerset(std::size_t m);
  static ClassifierClass sparse(std::size_t n_points, std::size_t weight);
  // Traces of closed half-spaces {x : <w,x> >= c} on points in R^d, d <= 3.
  static ClassifierClass halfspace_trace(std::vector<Point> points);
  static ClassifierClass explicit_members(std::size_t m, std::vector<Classifier> members);

  std::size_t domain_size() const { return m_; }
  std::size_t size() const { return members_.size(); }
  const Classifier& operator[](std::size_t i) const { return members_[i]; }
  const std::vector<Classifier>& members() const { return members_; }
  ClassKind kind() const { return kind_; }
  const ClassMetadata& metadata() const { return meta_; }

  bool contains(const Classifier& t) const;

  // Subfamily keeping members accepted by pred; order preserved.
  template <class Pred>
  ClassifierClass filtered(Pred pred) const {
    std::vector<Classifier> kept;
    for (const auto& c : members_) {
      if (pred(c)) {
        kept.push_back(c);
      }
    }
    return ClassifierClass(m_, std::move(kept), ClassKind::Explicit, {});
  }

 private:
  ClassifierClass(std::size_t m, std::vector<Classifier> members, ClassKind kind, ClassMetadata meta);

  std::size_t m_ = 0;
  std::vector<Classifier> members_;
  ClassKind kind_ = ClassKind::Explicit;
  ClassMetadata meta_;
};

// "m k" header, then k lines of m characters in {0,1}.
ClassifierClass read_class(std::istream& in);
ClassifierClass load_class(const std::filesystem::path& path);
void write_class(std::ostream& out, const ClassifierClass& cls);

// Largest k such that some k-subset of the domain is shattered.
std::size_t vc_dimension(const ClassifierClass& cls);

// Whether the class realizes all 2^|subset| patterns on the given points.
bool shatters(const ClassifierClass& cls, const std::vector<std::size_t>& subset);

// log of the number of distinct restrictions of members to the sample points (nats).
double combinatorial_entropy(const ClassifierClass& cls, const std::vector<std::size_t>& sample_points);

struct EntropyReport {
  double combinatorial = 0.0;
  double sauer = 0.0;
  double haussler = 0.0;
  std::size_t sample_size = 0;
};

// V (1 + log(n / V)); requires n >= V >= 1.
double sauer_bound(std::size_t V, std::size_t n);
// kappa V (1 + log(max(1/eps, 1))).
double haussler_bound(std::size_t V, double eps, double kappa = 1.0);

EntropyReport entropy_bounds(std::size_t V, std::size_t n, double eps, double kappa = 1.0);
EntropyReport entropy_report(const ClassifierClass& cls, const std::vector<std::size_t>& sample_points,
                             std::size_t V, double eps, double kappa = 1.0);

// (A_{N,D}) on the given points: every D-subset appears as a trace.
bool check_property_and(const ClassifierClass& cls, const std::vector<std::size_t>& points, std::size_t D);

// Dichotomies of the points realizable by closed half-spaces, as bitmasks
// (bit i set iff point i is labelled 1). Points must be distinct, d <= 3.
std::vector<std::uint32_t> halfspace_dichotomies(const std::vector<Point>& points);

}  // namespace marginlab
