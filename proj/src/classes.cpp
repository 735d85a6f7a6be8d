#include "marginlab/classes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace marginlab {

const char* to_string(ClassKind kind) {
  switch (kind) {
    case ClassKind::Powerset:
      return "powerset";
    case ClassKind::Sparse:
      return "sparse";
    case ClassKind::HalfspaceTrace:
      return "halfspace_trace";
    case ClassKind::Explicit:
      return "explicit";
  }
  return "unknown";
}

namespace {

using Mask = std::uint32_t;

double log_binomial(std::size_t n, std::size_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

Mask to_mask(const Classifier& c) {
  Mask m = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i]) {
      m |= Mask{1} << i;
    }
  }
  return m;
}

// Bits of value selected by sel, packed into the low bits.
Mask compress(Mask value, Mask sel) {
  Mask out = 0;
  Mask bit = 1;
  while (sel != 0) {
    const Mask low = sel & (~sel + 1);
    if (value & low) {
      out |= bit;
    }
    bit <<= 1;
    sel ^= low;
  }
  return out;
}

// Next integer with the same popcount (Gosper's hack).
Mask next_same_weight(Mask x) {
  const Mask c = x & (~x + 1);
  const Mask r = x + c;
  return (((r ^ x) >> 2) / c) | r;
}

std::vector<Mask> member_masks(const ClassifierClass& cls) {
  if (cls.domain_size() > 20) {
    throw std::invalid_argument("domain too large for exhaustive shattering search (max 20 points)");
  }
  std::vector<Mask> masks;
  masks.reserve(cls.size());
  for (const auto& c : cls.members()) {
    masks.push_back(to_mask(c));
  }
  return masks;
}

bool shatters_mask(const std::vector<Mask>& masks, Mask subset, std::vector<std::uint32_t>& stamp,
                   std::uint32_t epoch) {
  const std::size_t k = static_cast<std::size_t>(std::popcount(subset));
  const std::size_t need = std::size_t{1} << k;
  if (masks.size() < need) {
    return false;
  }
  std::size_t seen = 0;
  for (Mask c : masks) {
    const Mask t = compress(c, subset);
    if (stamp[t] != epoch) {
      stamp[t] = epoch;
      if (++seen == need) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace

ClassifierClass::ClassifierClass(std::size_t m, std::vector<Classifier> members, ClassKind kind, ClassMetadata meta)
    : m_(m), members_(std::move(members)), kind_(kind), meta_(std::move(meta)) {
  if (members_.empty()) {
    throw std::invalid_argument("classifier class must have at least one member");
  }
  for (const auto& c : members_) {
    if (c.size() != m_) {
      throw std::invalid_argument("member length does not match domain size");
    }
  }
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end()) {
    throw std::invalid_argument("classifier class members must be distinct");
  }
}

ClassifierClass ClassifierClass::powerset(std::size_t m) {
  if (m == 0 || m > kMaxPowersetPoints) {
    throw std::invalid_argument("powerset class supports 1 to 20 points");
  }
  const std::size_t count = std::size_t{1} << m;
  std::vector<Classifier> members;
  members.reserve(count);
  for (std::size_t code = 0; code < count; ++code) {
    Labels labels(m);
    for (std::size_t i = 0; i < m; ++i) {
      labels[i] = static_cast<std::uint8_t>((code >> (m - 1 - i)) & 1U);
    }
    members.emplace_back(std::move(labels));
  }
  ClassMetadata meta;
  meta.V = m;
  return ClassifierClass(m, std::move(members), ClassKind::Powerset, std::move(meta));
}

ClassifierClass ClassifierClass::sparse(std::size_t n_points, std::size_t weight) {
  if (n_points == 0 || weight > n_points) {
    throw std::invalid_argument("sparse class needs 0 <= D <= N and N >= 1");
  }
  if (log_binomial(n_points, weight) > std::log(static_cast<double>(kMaxSparseMembers)) + 1e-9) {
    throw std::invalid_argument("sparse class too large: binom(N, D) exceeds 10^6");
  }
  Labels labels(n_points, 0);
  std::fill(labels.end() - static_cast<std::ptrdiff_t>(weight), labels.end(), 1);
  std::vector<Classifier> members;
  do {
    members.emplace_back(labels);
  } while (std::next_permutation(labels.begin(), labels.end()));
  ClassMetadata meta;
  meta.N = n_points;
  meta.D = weight;
  return ClassifierClass(n_points, std::move(members), ClassKind::Sparse, std::move(meta));
}

ClassifierClass ClassifierClass::halfspace_trace(std::vector<Point> points) {
  if (points.size() > kMaxHalfspacePoints) {
    throw std::invalid_argument("half-space trace supports at most 12 points");
  }
  const std::size_t n = points.size();
  const auto dichotomies = halfspace_dichotomies(points);
  std::vector<Classifier> members;
  // Exhaustive pass over all labelings; membership is the separability oracle.
  for (Mask code = 0; code < (Mask{1} << n); ++code) {
    if (std::binary_search(dichotomies.begin(), dichotomies.end(), code)) {
      Labels labels(n);
      for (std::size_t i = 0; i < n; ++i) {
        labels[i] = static_cast<std::uint8_t>((code >> i) & 1U);
      }
      members.emplace_back(std::move(labels));
    }
  }
  ClassMetadata meta;
  meta.points = std::move(points);
  return ClassifierClass(n, std::move(members), ClassKind::HalfspaceTrace, std::move(meta));
}

ClassifierClass ClassifierClass::explicit_members(std::size_t m, std::vector<Classifier> members) {
  if (m == 0) {
    throw std::invalid_argument("domain must contain at least one point");
  }
  for (const auto& c : members) {
    for (auto v : c.labels()) {
      if (v > 1) {
        throw std::invalid_argument("labels must be 0 or 1");
      }
    }
  }
  return ClassifierClass(m, std::move(members), ClassKind::Explicit, {});
}

bool ClassifierClass::contains(const Classifier& t) const {
  return std::binary_search(members_.begin(), members_.end(), t);
}

ClassifierClass read_class(std::istream& in) {
  std::string line;
  std::size_t m = 0;
  std::size_t k = 0;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("class file: missing header line");
  }
  {
    std::istringstream header(line);
    std::string rest;
    if (!(header >> m >> k) || (header >> rest)) {
      throw std::invalid_argument("class file: header must be \"m k\"");
    }
  }
  std::vector<Classifier> members;
  members.reserve(k);
  for (std::size_t row = 0; row < k; ++row) {
    if (!std::getline(in, line)) {
      throw std::invalid_argument("class file: expected " + std::to_string(k) + " members, got " +
                                  std::to_string(row));
    }
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.size() != m) {
      throw std::invalid_argument("class file: line " + std::to_string(row + 2) + " has length " +
                                  std::to_string(line.size()) + ", expected " + std::to_string(m));
    }
    Labels labels(m);
    for (std::size_t i = 0; i < m; ++i) {
      if (line[i] != '0' && line[i] != '1') {
        throw std::invalid_argument("class file: line " + std::to_string(row + 2) + " contains a non-binary symbol");
      }
      labels[i] = static_cast<std::uint8_t>(line[i] - '0');
    }
    members.emplace_back(std::move(labels));
  }
  return ClassifierClass::explicit_members(m, std::move(members));
}

ClassifierClass load_class(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open class file " + path.string());
  }
  return read_class(in);
}

void write_class(std::ostream& out, const ClassifierClass& cls) {
  out << cls.domain_size() << ' ' << cls.size() << '\n';
  for (const auto& c : cls.members()) {
    for (auto v : c.labels()) {
      out << static_cast<char>('0' + v);
    }
    out << '\n';
  }
}

std::size_t vc_dimension(const ClassifierClass& cls) {
  const auto masks = member_masks(cls);
  const std::size_t m = cls.domain_size();
  const Mask full = (Mask{1} << m) - 1;

  // has_superset[s]: some member contains s; has_subset[s]: some member inside s.
  std::vector<std::uint8_t> has_superset(std::size_t{1} << m, 0);
  std::vector<std::uint8_t> has_subset(std::size_t{1} << m, 0);
  for (Mask c : masks) {
    has_superset[c] = 1;
    has_subset[c] = 1;
  }
  for (std::size_t b = 0; b < m; ++b) {
    const Mask bit = Mask{1} << b;
    for (Mask s = 0; s <= full; ++s) {
      if (s & bit) {
        has_subset[s] |= has_subset[s ^ bit];
      } else {
        has_superset[s] |= has_superset[s | bit];
      }
    }
  }

  std::vector<std::uint32_t> stamp(std::size_t{1} << m, 0);
  std::uint32_t epoch = 0;
  std::size_t best = 0;
  for (std::size_t k = 1; k <= m && (std::size_t{1} << k) <= masks.size(); ++k) {
    bool found = false;
    Mask s = (Mask{1} << k) - 1;
    while (s <= full) {
      if (has_superset[s] && has_subset[full ^ s] && shatters_mask(masks, s, stamp, ++epoch)) {
        found = true;
        break;
      }
      if (s == (full ^ ((Mask{1} << (m - k)) - 1))) {
        break;
      }
      s = next_same_weight(s);
    }
    if (!found) {
      break;
    }
    best = k;
  }
  return best;
}

bool shatters(const ClassifierClass& cls, const std::vector<std::size_t>& subset) {
  const auto masks = member_masks(cls);
  Mask s = 0;
  for (auto i : subset) {
    if (i >= cls.domain_size()) {
      throw std::out_of_range("point index out of range");
    }
    s |= Mask{1} << i;
  }
  std::vector<std::uint32_t> stamp(std::size_t{1} << std::popcount(s), 0);
  return shatters_mask(masks, s, stamp, 1);
}

double combinatorial_entropy(const ClassifierClass& cls, const std::vector<std::size_t>& sample_points) {
  if (sample_points.empty()) {
    throw std::invalid_argument("combinatorial entropy of an empty sample");
  }
  std::vector<std::size_t> pts = sample_points;
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.back() >= cls.domain_size()) {
    throw std::out_of_range("sample point index out of range");
  }
  std::vector<std::string> traces;
  traces.reserve(cls.size());
  for (const auto& c : cls.members()) {
    std::string t(pts.size(), '0');
    for (std::size_t k = 0; k < pts.size(); ++k) {
      t[k] = static_cast<char>('0' + c[pts[k]]);
    }
    traces.push_back(std::move(t));
  }
  std::sort(traces.begin(), traces.end());
  const auto distinct = std::unique(traces.begin(), traces.end()) - traces.begin();
  return std::log(static_cast<double>(distinct));
}

double sauer_bound(std::size_t V, std::size_t n) {
  if (V == 0 || n < V) {
    throw std::invalid_argument("Sauer bound requires n >= V >= 1");
  }
  const double v = static_cast<double>(V);
  return v * (1.0 + std::log(static_cast<double>(n) / v));
}

double haussler_bound(std::size_t V, double eps, double kappa) {
  if (!(eps > 0.0) || !(kappa > 0.0)) {
    throw std::invalid_argument("Haussler bound requires eps > 0 and kappa > 0");
  }
  return kappa * static_cast<double>(V) * (1.0 + std::log(std::max(1.0 / eps, 1.0)));
}

EntropyReport entropy_bounds(std::size_t V, std::size_t n, double eps, double kappa) {
  EntropyReport r;
  r.sauer = sauer_bound(V, n);
  r.haussler = haussler_bound(V, eps, kappa);
  r.sample_size = n;
  return r;
}

EntropyReport entropy_report(const ClassifierClass& cls, const std::vector<std::size_t>& sample_points,
                             std::size_t V, double eps, double kappa) {
  EntropyReport r = entropy_bounds(V, sample_points.size(), eps, kappa);
  r.combinatorial = combinatorial_entropy(cls, sample_points);
  return r;
}

bool check_property_and(const ClassifierClass& cls, const std::vector<std::size_t>& points, std::size_t D) {
  const std::size_t n = points.size();
  if (n == 0 || n > 20) {
    throw std::invalid_argument("property (A_{N,D}) check supports 1 to 20 points");
  }
  if (D > n) {
    return false;
  }
  std::vector<std::size_t> sorted = points;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("property (A_{N,D}) points must be distinct");
  }
  if (sorted.back() >= cls.domain_size()) {
    throw std::out_of_range("point index out of range");
  }
  std::vector<std::uint8_t> present(std::size_t{1} << n, 0);
  for (const auto& c : cls.members()) {
    Mask t = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (c[points[k]]) {
        t |= Mask{1} << k;
      }
    }
    present[t] = 1;
  }
  if (D == 0) {
    return present[0] != 0;
  }
  const Mask last = ((Mask{1} << D) - 1) << (n - D);
  for (Mask s = (Mask{1} << D) - 1;; s = next_same_weight(s)) {
    if (!present[s]) {
      return false;
    }
    if (s == last) {
      break;
    }
  }
  return true;
}

}  // namespace marginlab
