#pragma once

// Power allocation by direct numerical minimization of the simulated SOP.

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sop/error.hpp"
#include "sop/model.hpp"
#include "sop/montecarlo.hpp"

namespace sop {

/// Minimizer of a unimodal f on [lo, hi] to within `tol`.
struct ScalarMin {
  double x;
  double fx;
};

inline ScalarMin golden_section_minimize(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (!(lo <= hi) || !(tol > 0.0)) throw domain_error("golden_section_minimize: needs lo <= hi and tol > 0");
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? ScalarMin{x1, f1} : ScalarMin{x2, f2};
}

enum class PowerConstraint {
  PerNode,  ///< every active node within its own budget P
  Total,    ///< active nodes share N * P; each still at least the floor fraction
};

inline PowerConstraint parse_constraint(std::string_view s) {
  if (s == "per-node") return PowerConstraint::PerNode;
  if (s == "total") return PowerConstraint::Total;
  throw config_error("unknown constraint '" + std::string(s) + "' (expected per-node or total)");
}

struct PowerOptResult {
  PowerAllocation allocation;
  SopEstimate optimized;
  SopEstimate full_power;
  int evaluations = 0;
};

inline constexpr double kMinPowerFraction = 0.05;

namespace detail {

inline int active_nodes(Scheme s) {
  switch (s) {
    case Scheme::DT: return 1;
    case Scheme::AF: return 2;
    case Scheme::CJ: return 3;
  }
  return 1;
}

inline PowerAllocation to_allocation(const std::array<double, 3>& x) { return {x[0], x[1], x[2]}; }

}  // namespace detail

/// Grid search at `grid_step` over the active nodes' fractions, then one
/// round of coordinate-wise golden-section refinement (tolerance 0.01). The
/// objective is the fixed-seed simulated SOP, so it is deterministic; full
/// power is evaluated first and only strict improvements replace it.
inline PowerOptResult minimize_sop(const LinkGains& g, const SystemParams& params, const McConfig& mc,
                                   double grid_step, PowerConstraint constraint = PowerConstraint::PerNode) {
  g.validate();
  params.validate();
  mc.validate();
  if (!(grid_step > 0.0) || grid_step > 0.5) throw config_error("minimize_sop: grid_step must lie in (0, 0.5]");

  const int n = detail::active_nodes(params.scheme.scheme());
  const bool total = constraint == PowerConstraint::Total;
  // Per node every fraction is at most 1. Under the total constraint a node may
  // take up to N - (N - 1) * floor and the active fractions sum to at most N.
  const double hi = total ? n - (n - 1) * kMinPowerFraction : 1.0;
  const double budget = static_cast<double>(n);
  constexpr double kRefineTol = 0.01;

  std::map<std::array<double, 3>, double> cache;
  PowerOptResult result;
  auto objective = [&](const std::array<double, 3>& x) {
    if (auto it = cache.find(x); it != cache.end()) return it->second;
    SystemParams p = params;
    p.power = detail::to_allocation(x);
    const double v = estimate_sop(g, p, mc).value;
    ++result.evaluations;
    cache.emplace(x, v);
    return v;
  };
  auto feasible = [&](const std::array<double, 3>& x) {
    if (!total) return true;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += x[static_cast<std::size_t>(i)];
    return sum <= budget * (1.0 + 1e-12);
  };

  const std::array<double, 3> full{1.0, 1.0, 1.0};
  std::array<double, 3> best = full;
  double best_value = objective(full);

  std::vector<double> levels;
  for (double v = hi; v >= kMinPowerFraction - 1e-12; v -= grid_step) levels.push_back(v);
  if (levels.back() > kMinPowerFraction + 1e-12) levels.push_back(kMinPowerFraction);

  // Enumerate the grid in lexicographic order over the active coordinates.
  std::array<std::size_t, 3> idx{0, 0, 0};
  for (;;) {
    std::array<double, 3> x = full;
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = levels[idx[static_cast<std::size_t>(i)]];
    if (feasible(x)) {
      const double v = objective(x);
      if (v < best_value) {
        best_value = v;
        best = x;
      }
    }
    int pos = n - 1;
    while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == levels.size()) idx[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) break;
  }

  for (int i = 0; i < n; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    double others = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j != i) others += best[static_cast<std::size_t>(j)];
    }
    const double upper = std::min({hi, best[ii] + grid_step, budget - others});
    const double lower = std::max(kMinPowerFraction, best[ii] - grid_step);
    if (!(upper > lower)) continue;
    auto line = [&](double v) {
      std::array<double, 3> x = best;
      x[ii] = v;
      return objective(x);
    };
    const ScalarMin m = golden_section_minimize(line, lower, upper, kRefineTol);
    if (m.fx < best_value) {
      best_value = m.fx;
      best[ii] = m.x;
    }
  }

  SystemParams p_best = params;
  p_best.power = detail::to_allocation(best);
  SystemParams p_full = params;
  p_full.power = PowerAllocation{};
  result.allocation = p_best.power;
  result.optimized = estimate_sop(g, p_best, mc);
  result.full_power = estimate_sop(g, p_full, mc);
  return result;
}

}  // namespace sop
