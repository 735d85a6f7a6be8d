#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "marginlab/experiment.hpp"

namespace marginlab {

namespace {

// Section owning each key.
const std::map<std::string, std::string>& key_sections() {
  static const std::map<std::string, std::string> keys{
      {"kind", "general"},      {"seed", "general"},       {"replications", "general"},
      {"output", "general"},    {"experiment_id", "general"}, {"threads", "general"},
      {"n", "sweep"},           {"h", "sweep"},            {"theta", "sweep"},
      {"bounds", "sweep"},      {"class", "class"},        {"V", "class"},
      {"N", "class"},           {"D", "class"},            {"points", "class"},
      {"file", "class"},        {"distribution", "class"}, {"C", "constants"},
      {"kappa", "constants"},   {"kappa3", "constants"},   {"kappa4", "constants"},
      {"C1", "constants"},      {"C2", "constants"},       {"K_lower", "constants"},
      {"c_sparse", "constants"}, {"kappa_pp", "constants"}, {"L0", "constants"},
      {"EH", "constants"},      {"p", "constants"},        {"r", "constants"},
      {"rho", "constants"},     {"a", "regress"},          {"b", "regress"},
      {"L", "regress"},         {"alpha", "regress"},      {"packing", "lowerlab"},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    out.push_back(trim(item));
  }
  if (!s.empty() && s.back() == sep) {
    out.emplace_back();
  }
  return out;
}

struct Entry {
  std::string value;
  std::size_t line = 0;
};

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  std::size_t line(const std::string& key) const { return has(key) ? entries_.at(key).line : 0; }
  const std::string& raw(const std::string& key) const { return entries_.at(key).value; }

  std::uint64_t u64(const std::string& key) const { return parse_u64(raw(key), key, line(key)); }

  double real(const std::string& key) const { return parse_real(raw(key), key, line(key)); }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split(raw(key), ',')) {
      out.push_back(parse_real(item, key, line(key)));
    }
    return out;
  }

  std::vector<std::size_t> counts(const std::string& key) const {
    std::vector<std::size_t> out;
    for (const auto& item : split(raw(key), ',')) {
      out.push_back(static_cast<std::size_t>(parse_u64(item, key, line(key))));
    }
    return out;
  }

  static std::uint64_t parse_u64(const std::string& text, const std::string& key, std::size_t line) {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != end) {
      throw ConfigError("key '" + key + "' expects a nonnegative integer, got '" + text + "'", line);
    }
    return v;
  }

  static double parse_real(const std::string& text, const std::string& key, std::size_t line) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != end || !std::isfinite(v)) {
      throw ConfigError("key '" + key + "' expects a finite number, got '" + text + "'", line);
    }
    return v;
  }

 private:
  std::map<std::string, Entry> entries_;
};

ExperimentKind parse_kind(const std::string& s, std::size_t line) {
  if (s == "bounds") return ExperimentKind::Bounds;
  if (s == "simulate") return ExperimentKind::Simulate;
  if (s == "rates") return ExperimentKind::Rates;
  if (s == "lowerlab") return ExperimentKind::LowerLab;
  if (s == "regress") return ExperimentKind::Regress;
  if (s == "verify") return ExperimentKind::Verify;
  throw ConfigError("unknown kind '" + s + "' (bounds, simulate, rates, lowerlab, regress, verify)", line);
}

void require(bool ok, const std::string& what, std::size_t line) {
  if (!ok) {
    throw ConfigError(what, line);
  }
}

void validate(const ExperimentConfig& c, const Reader& r) {
  const bool simulates = c.kind == ExperimentKind::Simulate || c.kind == ExperimentKind::Rates ||
                         c.kind == ExperimentKind::Regress;
  for (double h : c.h) {
    require(h >= 0.0 && h <= 1.0, "h must lie in [0,1]", r.line("h"));
  }
  for (auto n : c.n) {
    require(n >= 1, "n must be at least 1", r.line("n"));
  }
  for (double t : c.theta) {
    require(t >= 1.0, "theta must be at least 1", r.line("theta"));
  }
  require(!c.theta.empty(), "theta list is empty", r.line("theta"));
  require(c.threads >= 1, "threads must be at least 1", r.line("threads"));
  require(c.r > 0.0 && c.r < 1.0, "r must lie in (0,1)", r.line("r"));
  require(c.rho >= 0.0, "rho must be nonnegative", r.line("rho"));
  if (c.L0) {
    require(*c.L0 >= 0.0 && *c.L0 <= 0.5, "L0 must lie in [0, 1/2]", r.line("L0"));
  }
  if (c.EH) {
    require(*c.EH >= 0.0, "EH must be nonnegative", r.line("EH"));
  }
  if (c.p) {
    require(*c.p > 0.0 && *c.p <= 1.0, "p must lie in (0,1]", r.line("p"));
  }
  const auto& k = c.constants;
  for (double v : {k.C, k.kappa, k.kappa3, k.kappa4, k.C1, k.C2, k.K_lower, k.c_sparse, k.kappa_pp}) {
    require(v > 0.0, "constants must be positive", 0);
  }
  require(c.experiment_id.find_first_of(",\n\"") == std::string::npos && !c.experiment_id.empty(),
          "experiment_id must be nonempty and free of commas and quotes", r.line("experiment_id"));
  require(c.distribution == "assouad" || c.distribution == "uniform",
          "distribution must be assouad or uniform", r.line("distribution"));
  require(c.class_kind == "powerset" || c.class_kind == "sparse" || c.class_kind == "halfspace" ||
              c.class_kind == "file",
          "class must be powerset, sparse, halfspace or file", r.line("class"));

  if (c.kind == ExperimentKind::Verify) {
    return;
  }
  require(!c.n.empty(), "sweep needs at least one n value", r.line("n"));
  if (c.kind != ExperimentKind::Regress) {
    require(!c.h.empty(), "sweep needs at least one h value", r.line("h"));
  }
  if (simulates) {
    require(c.replications >= 2, "replications must be at least 2", r.line("replications"));
  }
  if (c.kind == ExperimentKind::Rates) {
    auto ns = c.n;
    std::sort(ns.begin(), ns.end());
    require(std::unique(ns.begin(), ns.end()) - ns.begin() >= 2, "rates need at least two distinct n values",
            r.line("n"));
  }
  if (c.kind == ExperimentKind::Regress) {
    require(c.a > 0.0 && c.a < c.b && c.b < 1.0, "levels must satisfy 0 < a < b < 1", r.line("b"));
    require(c.L > 0.0, "L must be positive", r.line("L"));
    require(c.alpha > 0.0 && c.alpha <= 1.0, "alpha must lie in (0,1]", r.line("alpha"));
  }
  if (c.kind == ExperimentKind::Bounds) {
    require(c.V >= 1 || c.class_kind != "powerset", "bounds need V >= 1", r.line("V"));
    for (const auto& id : c.bounds) {
      const auto& up = upper_bound_ids();
      const auto& lo = lower_bound_ids();
      require(std::find(up.begin(), up.end(), id) != up.end() || std::find(lo.begin(), lo.end(), id) != lo.end(),
              "unknown bound id '" + id + "'", r.line("bounds"));
    }
  }
  if (c.kind == ExperimentKind::Simulate || c.kind == ExperimentKind::Rates) {
    if (c.class_kind == "powerset") {
      require(c.V >= 1 && c.V <= ClassifierClass::kMaxPowersetPoints, "powerset class needs 1 <= V <= 20",
              r.line("V"));
    }
  }
  if (c.class_kind == "sparse" && c.kind != ExperimentKind::Regress) {
    require(c.N >= 1 && c.D <= c.N, "sparse class needs N >= 1 and D <= N", r.line("N"));
  }
  if (c.class_kind == "file" && c.kind != ExperimentKind::Regress) {
    require(!c.file.empty(), "class=file needs a file key", r.line("class"));
  }
  if (c.class_kind == "halfspace" && c.kind != ExperimentKind::Regress) {
    require(!c.points.empty(), "class=halfspace needs points", r.line("class"));
  }
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Bounds:
      return "bounds";
    case ExperimentKind::Simulate:
      return "simulate";
    case ExperimentKind::Rates:
      return "rates";
    case ExperimentKind::LowerLab:
      return "lowerlab";
    case ExperimentKind::Regress:
      return "regress";
    case ExperimentKind::Verify:
      return "verify";
  }
  return "unknown";
}

ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, Entry> entries;
  std::string section;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  static const std::set<std::string> sections{"general", "sweep", "class", "constants", "regress", "lowerlab"};
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("malformed section header '" + line + "'", lineno);
      }
      section = trim(line.substr(1, line.size() - 2));
      if (!sections.count(section)) {
        throw ConfigError("unknown section [" + section + "]", lineno);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected key=value, got '" + line + "'", lineno);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("missing key before '='", lineno);
    }
    const auto owner = key_sections().find(key);
    if (owner == key_sections().end()) {
      throw ConfigError("unknown key '" + key + "'", lineno);
    }
    if (!section.empty() && owner->second != section) {
      throw ConfigError("key '" + key + "' belongs to section [" + owner->second + "]", lineno);
    }
    if (value.empty()) {
      throw ConfigError("key '" + key + "' has an empty value", lineno);
    }
    if (entries.count(key)) {
      throw ConfigError("duplicate key '" + key + "' (first on line " + std::to_string(entries[key].line) + ")",
                        lineno);
    }
    entries[key] = {value, lineno};
  }

  const Reader r(std::move(entries));
  ExperimentConfig c;
  if (!r.has("kind")) {
    throw ConfigError("missing required key 'kind'");
  }
  c.kind = parse_kind(r.raw("kind"), r.line("kind"));
  if (r.has("seed")) c.seed = r.u64("seed");
  if (r.has("replications")) c.replications = static_cast<std::size_t>(r.u64("replications"));
  if (r.has("output")) c.output = r.raw("output");
  if (r.has("experiment_id")) c.experiment_id = r.raw("experiment_id");
  if (r.has("threads")) c.threads = static_cast<std::size_t>(r.u64("threads"));
  if (r.has("n")) c.n = r.counts("n");
  if (r.has("h")) c.h = r.reals("h");
  if (r.has("theta")) c.theta = r.reals("theta");
  if (r.has("bounds")) c.bounds = split(r.raw("bounds"), ',');
  if (r.has("class")) c.class_kind = r.raw("class");
  if (r.has("V")) c.V = static_cast<std::size_t>(r.u64("V"));
  if (r.has("N")) c.N = static_cast<std::size_t>(r.u64("N"));
  if (r.has("D")) c.D = static_cast<std::size_t>(r.u64("D"));
  if (r.has("file")) c.file = r.raw("file");
  if (r.has("distribution")) c.distribution = r.raw("distribution");
  if (r.has("points")) {
    // Points separated by commas, coordinates by ':'.
    for (const auto& item : split(r.raw("points"), ',')) {
      Point pt;
      for (const auto& coord : split(item, ':')) {
        pt.push_back(Reader::parse_real(coord, "points", r.line("points")));
      }
      c.points.push_back(std::move(pt));
    }
  }
  auto set_real = [&](const char* key, double& dst) {
    if (r.has(key)) dst = r.real(key);
  };
  set_real("C", c.constants.C);
  set_real("kappa", c.constants.kappa);
  set_real("kappa3", c.constants.kappa3);
  set_real("kappa4", c.constants.kappa4);
  set_real("C1", c.constants.C1);
  set_real("C2", c.constants.C2);
  set_real("K_lower", c.constants.K_lower);
  set_real("c_sparse", c.constants.c_sparse);
  set_real("kappa_pp", c.constants.kappa_pp);
  if (r.has("L0")) c.L0 = r.real("L0");
  if (r.has("EH")) c.EH = r.real("EH");
  if (r.has("p")) c.p = r.real("p");
  set_real("r", c.r);
  set_real("rho", c.rho);
  set_real("a", c.a);
  set_real("b", c.b);
  set_real("L", c.L);
  set_real("alpha", c.alpha);
  if (r.has("packing")) {
    for (const auto& item : split(r.raw("packing"), ',')) {
      const auto parts = split(item, ':');
      if (parts.size() != 2) {
        throw ConfigError("packing entries are N:D pairs, got '" + item + "'", r.line("packing"));
      }
      c.packing.emplace_back(static_cast<std::size_t>(Reader::parse_u64(parts[0], "packing", r.line("packing"))),
                             static_cast<std::size_t>(Reader::parse_u64(parts[1], "packing", r.line("packing"))));
    }
  }
  validate(c, r);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot read config file " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

ClassifierClass build_config_class(const ExperimentConfig& config) {
  try {
    if (config.class_kind == "powerset") {
      return ClassifierClass::powerset(config.V);
    }
    if (config.class_kind == "sparse") {
      return ClassifierClass::sparse(config.N, config.D);
    }
    if (config.class_kind == "halfspace") {
      return ClassifierClass::halfspace_trace(config.points);
    }
    return load_class(config.file);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("class: ") + e.what());
  } catch (const std::runtime_error& e) {
    throw ConfigError(std::string("class: ") + e.what());
  }
}

}  // namespace marginlab
