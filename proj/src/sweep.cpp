#include <algorithm>
#include <cmath>
#include <map>

#include "marginlab/erm.hpp"
#include "marginlab/experiment.hpp"
#include "marginlab/lower_lab.hpp"
#include "marginlab/parallel.hpp"
#include "marginlab/regression.hpp"
#include "marginlab/rng.hpp"

namespace marginlab {

namespace {

ResultRow base_row(const ExperimentConfig& c) {
  ResultRow row;
  row.experiment_id = c.experiment_id;
  row.kind = to_string(c.kind);
  return row;
}

BoundParams bound_params(const ExperimentConfig& c, std::size_t V, std::size_t n, double h, double theta) {
  BoundParams p;
  p.V = V;
  p.n = n;
  p.h = h;
  p.theta = theta;
  p.EH = c.EH;
  p.L0 = c.L0;
  p.D = c.D;
  p.r = c.r;
  p.p = c.p;
  p.constants = c.constants;
  return p;
}

// Hypercube vertex b = (1, ..., 1) of the chosen family on m points.
JointDistribution simulation_law(const ExperimentConfig& c, std::size_t m, std::size_t n, double h) {
  if (c.distribution == "uniform") {
    return JointDistribution(FiniteDomain::uniform(m), std::vector<double>(m, (1.0 + h) / 2.0));
  }
  if (m < 2) {
    throw ConfigError("the Assouad family needs a class domain of at least 2 points");
  }
  const double he = effective_margin(m, n, h);
  const double p = c.p ? *c.p : default_atom_mass(m, n, h);
  const auto spec = MarginFamilySpec::assouad(m, he, p);
  return family_member(spec, Labels(m - 1, 1));
}

void append_fits(const ExperimentConfig& c, const std::map<double, std::vector<std::pair<double, double>>>& curves,
                 const std::map<double, bool>& floored, std::size_t V, std::size_t D, ResultTable& table) {
  for (const auto& [h, pairs] : curves) {
    if (pairs.size() < 2) {
      continue;
    }
    const RateFit fit = fit_rate(pairs);
    const bool clean = !floored.at(h);
    ResultRow row = base_row(c);
    row.n = 0;
    row.h = h;
    row.V = V;
    row.D = D;
    row.theta = c.theta.front();
    row.replications = c.replications;
    for (const auto& [id, value] :
         {std::pair{"fit_intercept", fit.intercept}, {"fit_r2", fit.r_squared}, {"fit_slope", fit.slope}}) {
      row.bound_id = id;
      row.bound_value = value;
      row.bound_valid = clean;
      table.push_back(row);
    }
  }
}

void run_bounds(const ExperimentConfig& c, ResultTable& table) {
  std::size_t V = c.V;
  if (V == 0) {
    V = vc_dimension(build_config_class(c));
  }
  std::vector<std::string> ids = c.bounds;
  if (ids.empty()) {
    ids = upper_bound_ids();
    ids.insert(ids.end(), lower_bound_ids().begin(), lower_bound_ids().end());
  }
  for (auto n : c.n) {
    for (double h : c.h) {
      for (double theta : c.theta) {
        const auto params = bound_params(c, V, n, h, theta);
        for (const auto& id : ids) {
          const bool needs_two = id == "Eq40_proof" || id == "Eq38" || id == "Eq39" || id == "assouad_expr";
          if (needs_two && V < 2) {
            continue;
          }
          const auto b = evaluate_bound(id, params);
          ResultRow row = base_row(c);
          row.n = n;
          row.h = h;
          row.V = V;
          row.D = c.D;
          row.theta = theta;
          row.bound_id = b.id;
          row.bound_value = b.value;
          row.bound_valid = b.valid;
          table.push_back(std::move(row));
        }
      }
    }
  }
}

void run_simulation(const ExperimentConfig& c, ResultTable& table) {
  const auto cls = build_config_class(c);
  const std::size_t m = cls.domain_size();
  std::map<double, std::vector<std::pair<double, double>>> curves;
  std::map<double, bool> floored;
  std::size_t V = 0;
  for (auto n : c.n) {
    for (double h : c.h) {
      const auto P = simulation_law(c, m, n, h);
      const auto est = monte_carlo_excess_risk(P, cls, n, c.replications, c.seed, c.threads, c.rho);
      const auto cert = risk_certificate(P, cls, n, c.constants, c.theta.front());
      V = cert.V;
      for (const auto& b : cert.bounds) {
        ResultRow row = base_row(c);
        row.n = n;
        row.h = h;
        row.V = cert.V;
        row.D = c.D;
        row.theta = c.theta.front();
        row.replications = c.replications;
        row.risk_mean = est.mean;
        row.risk_stderr = est.stderr_;
        row.bound_id = b.id;
        row.bound_value = b.value;
        row.bound_valid = b.valid;
        table.push_back(std::move(row));
      }
      const auto [risk, was_floored] = floor_risk(est.mean, c.replications, n);
      curves[h].emplace_back(static_cast<double>(n), risk);
      floored[h] = floored[h] || was_floored;
    }
  }
  if (c.kind == ExperimentKind::Rates) {
    append_fits(c, curves, floored, V, c.D, table);
  }
}

void run_regression(const ExperimentConfig& c, ResultTable& table) {
  const auto truth = holder_boundary(c.L, c.alpha, c.seed);
  const ImageModel model(c.a, c.b, truth);
  std::map<double, std::vector<std::pair<double, double>>> curves;
  std::map<double, bool> floored;
  const double gap = c.b - c.a;
  for (auto n : c.n) {
    const std::size_t D = c.D > 0 ? c.D : histogram_bins(c.L, c.alpha, c.a, c.b, n);
    std::vector<double> losses(c.replications);
    parallel_for(c.replications, c.threads, [&](std::size_t r) {
      const auto sample = draw_regression_sample(model, n, c.seed, r + 1);
      losses[r] = boundary_l1_loss(truth, histogram_erm(sample, D, c.a, c.b));
    });
    const auto s = summarize(losses);
    ResultRow row = base_row(c);
    row.n = n;
    row.h = gap;
    row.D = D;
    row.theta = 1.0;
    row.replications = c.replications;
    row.risk_mean = s.mean;
    row.risk_stderr = s.stderr_;
    row.bound_id = "holder_rate";
    row.bound_value = std::pow(static_cast<double>(n), -c.alpha / (1.0 + c.alpha));
    row.bound_valid = true;
    table.push_back(std::move(row));
    const auto [risk, was_floored] = floor_risk(s.mean, c.replications, n);
    curves[gap].emplace_back(static_cast<double>(n), risk);
    floored[gap] = floored[gap] || was_floored;
  }
  append_fits(c, curves, floored, 0, 0, table);
}

void run_lowerlab(const ExperimentConfig& c, ResultTable& table) {
  const std::size_t V = c.V >= 2 ? c.V : 2;
  for (auto n : c.n) {
    for (double h : c.h) {
      ResultRow row = base_row(c);
      row.n = n;
      row.h = h;
      row.V = V;
      row.theta = 1.0;
      auto push = [&](const std::string& id, double value, bool valid) {
        row.bound_id = id;
        row.bound_value = value;
        row.bound_valid = valid;
        table.push_back(row);
      };
      const auto params = bound_params(c, V, n, h, 1.0);
      for (const char* id : {"Eq40_proof", "assouad_expr"}) {
        const auto b = lower_bound(id, params);
        push(b.id, b.value, b.valid);
      }
      const double p = c.p ? *c.p : default_atom_mass(V, n, h);
      const auto spec = MarginFamilySpec::assouad(V, h, p);
      Labels b1(V - 1, 1);
      Labels b2 = b1;
      b2[0] = 0;
      const auto P = family_member(spec, b1);
      const auto Q = family_member(spec, b2);
      const double hc = closed_form_hellinger(spec, b1, b2);
      const double hb = brute_force_hellinger(P, Q);
      push("hellinger_closed", hc, std::abs(hc - hb) <= 1e-12);
      push("hellinger_brute", hb, std::abs(hc - hb) <= 1e-12);
      if (h < 1.0) {
        const double kc = closed_form_kl(spec, b1, b2);
        const double kb = brute_force_kl(P, Q);
        push("kl_closed", kc, std::abs(kc - kb) <= 1e-12);
        push("kl_brute", kb, std::abs(kc - kb) <= 1e-12);
        push("birge", birge_bound(static_cast<double>(n) * kc, V - 1), true);
      }
    }
  }
  for (const auto& [N, D] : c.packing) {
    const auto code = greedy_packing(N, D);
    ResultRow row = base_row(c);
    row.V = N;
    row.D = D;
    row.theta = 1.0;
    auto push = [&](const std::string& id, double value, bool valid) {
      row.bound_id = id;
      row.bound_value = value;
      row.bound_valid = valid;
      table.push_back(row);
    };
    push("packing_log_cardinality", code.log_cardinality, code.certified);
    push("packing_min_distance", static_cast<double>(code.min_distance), 2 * code.min_distance > D);
    push("packing_target", code.target, verify_packing(code));
  }
}

// Internal oracle checks, one row each.
void run_verify(const ExperimentConfig& c, ResultTable& table) {
  ResultRow row = base_row(c);
  auto push = [&](const std::string& id, double value, bool valid) {
    row.bound_id = id;
    row.bound_value = value;
    row.bound_valid = valid;
    table.push_back(row);
  };

  // Closed-form divergences against pointwise sums.
  {
    Stream s(c.seed, 0);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double h = 0.99 * s.uniform();
      MarginFamilySpec spec;
      Labels b1;
      Labels b2;
      if (k % 2 == 0) {
        const std::size_t V = 2 + static_cast<std::size_t>(s.next() % 7);
        spec = MarginFamilySpec::assouad(V, h, s.uniform() / static_cast<double>(V - 1));
        for (std::size_t i = 0; i + 1 < V; ++i) {
          b1.push_back(static_cast<std::uint8_t>(s.next() & 1));
          b2.push_back(static_cast<std::uint8_t>(s.next() & 1));
        }
      } else {
        const std::size_t D = 1 + static_cast<std::size_t>(s.next() % 3);
        const std::size_t N = 4 * D + static_cast<std::size_t>(s.next() % 5);
        spec = MarginFamilySpec::sparse(N, D, h);
        for (Labels* b : {&b1, &b2}) {
          b->assign(N, 0);
          for (std::size_t placed = 0; placed < D;) {
            const auto i = static_cast<std::size_t>(s.next() % N);
            if (!(*b)[i]) {
              (*b)[i] = 1;
              ++placed;
            }
          }
        }
      }
      const auto closed = closed_form_divergences(spec, b1, b2);
      const auto brute = brute_force_divergences(family_member(spec, b1), family_member(spec, b2));
      worst = std::max({worst, std::abs(closed.hellinger_sq - brute.hellinger_sq), std::abs(closed.kl - brute.kl)});
    }
    push("verify_divergence_oracle", worst, worst <= 1e-12);
  }

  // ERM expectation on two points with zero error, by enumeration of X.
  {
    const auto cls = ClassifierClass::powerset(2);
    const JointDistribution P(FiniteDomain::uniform(2), {1.0, 1.0});
    double worst = 0.0;
    for (std::size_t n = 1; n <= 6; ++n) {
      double expected = 0.0;
      for (std::size_t code = 0; code < (std::size_t{1} << n); ++code) {
        Sample s;
        for (std::size_t i = 0; i < n; ++i) {
          s.draws.push_back({static_cast<std::uint32_t>((code >> i) & 1U), 1});
        }
        expected += excess_loss(P, erm(cls, s)) / static_cast<double>(std::size_t{1} << n);
      }
      worst = std::max(worst, std::abs(expected - std::ldexp(1.0, -static_cast<int>(n))));
    }
    push("verify_erm_enumeration", worst, worst == 0.0);
  }

  // Packing certificates.
  {
    bool ok = true;
    double slack = 1e300;
    for (const auto& [N, D] : {std::pair<std::size_t, std::size_t>{8, 2}, {16, 4}, {32, 4}, {64, 8}}) {
      const auto code = greedy_packing(N, D);
      ok = ok && code.certified && verify_packing(code);
      slack = std::min(slack, code.log_cardinality - code.target);
    }
    push("verify_packing", slack, ok);
  }

  // Upper/lower ratio against 54 V/(V-1) (1 + log(n h^2 / V)).
  {
    double worst = 0.0;
    for (std::size_t n : {100, 1000, 10000, 100000}) {
      for (std::size_t V : {2, 5, 10}) {
        for (int k = 1; k <= 10; ++k) {
          const double h = 0.1 * k;
          if (h < std::sqrt(static_cast<double>(V) / static_cast<double>(n))) {
            continue;
          }
          BoundParams p;
          p.V = V;
          p.n = n;
          p.h = h;
          const double ratio = upper_bound("Eq34", p).value / lower_bound("Eq40_proof", p).value;
          const double Vd = static_cast<double>(V);
          const double target = 54.0 * Vd / (Vd - 1.0) * (1.0 + std::log(static_cast<double>(n) * h * h / Vd));
          worst = std::max(worst, ratio / target - 1.0);
        }
      }
    }
    push("verify_gap_identity", worst, worst <= 1e-12);
  }

  // Fixed point with a closed form: phi(s) = 5 s, w = identity, n = 100.
  {
    PhiSpec phi;
    phi.EH = 25.0;
    const double eps = solve_epsilon_star(phi, 1.0, 1.0, false, 100);
    push("verify_fixed_point", std::abs(eps - 0.5), std::abs(eps - 0.5) <= 1e-10);
  }
}

}  // namespace

std::pair<double, bool> floor_risk(double risk, std::size_t R, std::size_t n) {
  const double floor = 1.0 / (10.0 * static_cast<double>(R) * static_cast<double>(n));
  if (risk < floor) {
    return {floor, true};
  }
  return {risk, false};
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 2) {
    throw std::invalid_argument("rate fit needs at least two points");
  }
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& [n, risk] : pairs) {
    if (!(n > 0.0)) {
      throw std::invalid_argument("rate fit needs positive sample sizes");
    }
    if (!(risk > 0.0)) {
      throw std::invalid_argument("rate fit needs positive risk; floor zero cells at 1/(10 R n)");
    }
    x.push_back(std::log(n));
    y.push_back(std::log(risk));
  }
  const double k = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) {
    throw std::invalid_argument("rate fit needs at least two distinct sample sizes");
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = x.size();
  if (syy == 0.0) {
    fit.r_squared = 1.0;
  } else {
    fit.r_squared = std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  }
  return fit;
}

ResultTable run_sweep(const ExperimentConfig& config) {
  ResultTable table;
  switch (config.kind) {
    case ExperimentKind::Bounds:
      run_bounds(config, table);
      break;
    case ExperimentKind::Simulate:
    case ExperimentKind::Rates:
      run_simulation(config, table);
      break;
    case ExperimentKind::Regress:
      run_regression(config, table);
      break;
    case ExperimentKind::LowerLab:
      run_lowerlab(config, table);
      break;
    case ExperimentKind::Verify:
      run_verify(config, table);
      break;
  }
  sort_rows(table);
  return table;
}

}  // namespace marginlab
