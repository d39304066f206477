#pragma once

// Closed-form secrecy outage probabilities and their high-SNR / extreme-gain
// limits. All functions are pure.

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "sop/error.hpp"
#include "sop/model.hpp"
#include "sop/specfun.hpp"

namespace sop {

namespace detail {

inline void check_inputs(const LinkGains& g, const SystemParams& p) {
  g.validate();
  p.validate();
}

// Probabilities are clamped only against rounding; a real excursion is left
// visible so tests catch it.
inline double clamp_probability(double p) {
  constexpr double slack = 1e-8;
  if (p < 0.0 && p > -slack) return 0.0;
  if (p > 1.0 && p < 1.0 + slack) return 1.0;
  return p;
}

// Long-double accumulator for alternating binomial sums. The magnitude of the
// terms bounds the cancellation error; results that cannot be trusted to
// kMaxError are refused.
class AlternatingSum {
public:
  static constexpr int kMaxK = 64;
  static constexpr long double kMaxError = 1e-9L;

  void add(long double term) {
    sum_ += term;
    magnitude_ += std::abs(term);
  }

  long double value(const char* who) const {
    const long double err = magnitude_ * 64.0L * LDBL_EPSILON;
    if (!(err <= kMaxError)) {
      throw range_error(std::string(who) + ": alternating sum cancels beyond extended precision at this K");
    }
    return sum_;
  }

private:
  long double sum_ = 0.0L;
  long double magnitude_ = 0.0L;
};

inline void check_binomial_k(int k, const char* who) {
  if (k > AlternatingSum::kMaxK) {
    throw range_error(std::string(who) + ": K above 64 is not supported by the binomial expansion");
  }
}

// 1 - mu (beta - 1) e^{mu beta} E1(mu beta), the bracket shared by the AF forms.
inline double af_bracket(double mu, double beta) {
  if (beta == 1.0) return 1.0;
  return 1.0 - mu * (beta - 1.0) * scaled_exp_e1(mu * beta);
}

}  // namespace detail

/// Probability of a positive secrecy rate without the relay's help.
inline double p_pos_dt(const LinkGains& g) {
  g.validate();
  return g.gamma_ab / (g.gamma_ar + g.gamma_ab);
}

inline double sop_dt_single(const LinkGains& g, const SystemParams& p) {
  detail::check_inputs(g, p);
  const double c = std::exp2(p.rate);
  return detail::clamp_probability(
      1.0 - g.gamma_ab / (c * g.gamma_ar + g.gamma_ab) * std::exp(-(c - 1.0) / (p.rho * g.gamma_ab)));
}

inline double p_pos_af(const LinkGains& g, const SystemParams& p) {
  detail::check_inputs(g, p);
  const double mu1 = (g.gamma_ar + 1.0 / p.rho) / g.gamma_rb;
  const double beta1 = 1.0 + g.gamma_ar / g.gamma_ab;
  return detail::clamp_probability(detail::af_bracket(mu1, beta1));
}

inline double sop_af_single(const LinkGains& g, const SystemParams& p) {
  detail::check_inputs(g, p);
  const double c = std::exp2(2.0 * p.rate);
  const double mu1 = (g.gamma_ar + 1.0 / p.rho) / g.gamma_rb;
  const double beta2 = (c * g.gamma_ar + g.gamma_ab) / ((c - 1.0) * g.gamma_ar + g.gamma_ab);
  const double direct = g.gamma_ab / ((c - 1.0) * g.gamma_ar + g.gamma_ab) * std::exp(-(c - 1.0) / (p.rho * g.gamma_ab));
  return detail::clamp_probability(1.0 - direct * detail::af_bracket(mu1, beta2));
}

inline double p_pos_cj(const LinkGains& g, const SystemParams& p) {
  detail::check_inputs(g, p);
  const double a = g.gamma_ar + g.gamma_rb + 1.0 / p.rho;
  return std::exp(-std::sqrt(a / p.rho) / g.gamma_rb);
}

namespace detail {

// P(|h_AR|^2 phi(z) >= 2^{2R} - 1) given |h_RB|^2 = z >= root, raised to the
// `power`-th order via the complementary form. `root` is the true zero of phi.
struct CjConditional {
  LinkGains g;
  double rho;
  double rate;
  double root;

  // exp(-(2^{2R}-1) / (gamma_AR phi(z))), the single-antenna survival term.
  double survival(double z) const {
    const double num = std::exp2(2.0 * rate) - 1.0;
    const double ph = cj_phi(z, g, rho, rate);
    if (ph > 0.0) return num == 0.0 ? 1.0 : std::exp(-num / (g.gamma_ar * ph));
    if (num == 0.0) return 1.0;
    if (z >= root * (1.0 - 1e-12)) return 0.0;  // rounding at the zero of phi
    // Below the zero the exponent changes sign and the integrand diverges.
    return std::numeric_limits<double>::infinity();
  }

  // (1 - survival)^K computed without cancellation when survival is near 1.
  double outage_power(double z, int k) const {
    const double num = std::exp2(2.0 * rate) - 1.0;
    const double ph = cj_phi(z, g, rho, rate);
    if (num == 0.0) return 0.0;
    if (!(ph > 0.0)) return 1.0;
    return std::pow(-std::expm1(-num / (g.gamma_ar * ph)), k);
  }
};

// Breakpoints in s = (z - t) / gamma_RB where the exponent
// (2^{2R} - 1) / (gamma_AR phi(z)) crosses fixed magnitudes. Near the root the
// integrand can switch from 1 to 0 within a tiny interval of s.
inline std::vector<double> cj_breakpoints(const LinkGains& g, double rho, double rate, double t, int k) {
  std::vector<double> s{0.0};
  const double num = std::exp2(2.0 * rate) - 1.0;
  if (num == 0.0) return s;
  std::vector<double> levels{1e3, 1e2, 1e1, 1.0, 1e-1, 1e-2};
  if (k > 1) levels.push_back(std::log(static_cast<double>(k)));
  std::sort(levels.begin(), levels.end(), std::greater<>());
  for (double a : levels) {
    const double target = num / (g.gamma_ar * a);
    if (!(target < rho * (1.0 - 1e-12))) continue;
    const double sj = (cj_phi_level(g, rho, rate, target) - t) / g.gamma_rb;
    if (sj > s.back() * (1.0 + 1e-9) && sj > 1e-300 && std::isfinite(sj)) s.push_back(sj);
  }
  return s;
}

}  // namespace detail

/// Single-antenna cooperative jamming. `root` selects the integration
/// threshold; RootForm::FactorTwo exists only to exhibit its failure.
inline double sop_cj_single(const LinkGains& g, const SystemParams& p, const QuadratureSpec& spec = {},
                            RootForm root = RootForm::Exact) {
  detail::check_inputs(g, p);
  const double t_true = cj_threshold(g, p.rho, p.rate, RootForm::Exact);
  const double t = root == RootForm::Exact ? t_true : cj_threshold(g, p.rho, p.rate, root);
  const detail::CjConditional cond{g, p.rho, p.rate, t_true};
  // z = t + gamma_RB s turns (1/gamma_RB) int_t^inf e^{-z/gamma_RB} (.) dz
  // into e^{-t/gamma_RB} int_0^inf e^{-s} (.) ds.
  auto integrand = [&](double s) { return std::exp(-s) * cond.survival(t + g.gamma_rb * s); };
  const double tail = root == RootForm::Exact
                          ? integrate_semi_infinite_split(integrand, detail::cj_breakpoints(g, p.rho, p.rate, t, 1), spec)
                          : integrate_semi_infinite(integrand, 0.0, spec);
  return detail::clamp_probability(1.0 - std::exp(-t / g.gamma_rb) * tail);
}

inline double sop_dt_multi(const LinkGains& g, const SystemParams& p) {
  detail::check_inputs(g, p);
  const double c = std::exp2(p.rate);
  const double ratio = g.gamma_ab / (c * g.gamma_ar + g.gamma_ab);
  return detail::clamp_probability(1.0 - std::pow(ratio, p.k_antennas) *
                                              std::exp(-(c - 1.0) / (p.rho * g.gamma_ab)));
}

/// AF with MRC/MRT at a K-antenna relay: closed leading terms plus a double
/// integral over the first-hop gain y and the direct-link gain x.
inline double sop_af_multi(const LinkGains& g, const SystemParams& p, const QuadratureSpec& spec = {}) {
  detail::check_inputs(g, p);
  const int k = p.k_antennas;
  const double c = std::exp2(2.0 * p.rate);
  const double rho = p.rho;
  const double first =
      1.0 - std::pow(1.0 + g.gamma_ar * (c - 1.0) / g.gamma_ab, -k) * std::exp(-(c - 1.0) / (rho * g.gamma_ab));

  // V = S_B / (S_B + kappa) with S_B / gamma_RB ~ Gamma(K, 1):
  // F_V(v) = P(S_B / gamma_RB <= v kappa' / (1 - v)).
  const double kappa = k * (g.gamma_ar + 1.0 / rho) / g.gamma_rb;
  auto cdf_v = [&](double v) {
    if (v <= 0.0) return 0.0;
    if (v >= 1.0) return 1.0;
    return 1.0 - chi2_2k_cdf_complement(v * kappa / (1.0 - v), k);
  };
  const double log_norm = -std::lgamma(static_cast<double>(k)) - k * std::log(g.gamma_ar);
  auto density_y = [&](double y) {
    return std::exp(log_norm + (k - 1) * std::log(y) - y / g.gamma_ar);
  };

  QuadratureSpec inner_spec = spec;
  inner_spec.abs_tol = spec.abs_tol * 0.1;
  // For fixed y, x runs over [x_l, x_u] = [(1 + rho y)(2^{2R} - 1)/rho, 2^{2R} y + (2^{2R} - 1)/rho],
  // where the argument of F_V sweeps from 1 down to 0. Writing x = x_l + xi keeps
  // that argument, 1 - xi / y, free of cancellation for small y.
  auto inner = [&](double y) {
    if (y <= 0.0) return 0.0;
    const double x_l = (1.0 + rho * y) * (c - 1.0) / rho;
    const double lead = std::exp(-x_l / g.gamma_ab) / g.gamma_ab;
    if (lead == 0.0) return 0.0;
    auto f = [&](double xi) { return cdf_v(1.0 - xi / y) * std::exp(-xi / g.gamma_ab); };
    // F_V switches on where its Gamma argument kappa (y - xi) / xi is of order K,
    // which can be a sliver at either end of [0, y].
    std::vector<double> breaks{0.0};
    for (double w : {4.0 * k + 8.0, static_cast<double>(k), 0.1 * k}) {
      const double xi = y * kappa / (kappa + w);
      if (xi > breaks.back() && xi < y) breaks.push_back(xi);
    }
    const double decay = 4.0 * g.gamma_ab;
    if (decay < y) {
      breaks.push_back(decay);
      std::sort(breaks.begin(), breaks.end());
    }
    breaks.push_back(y);
    return lead * integrate_finite_split(f, breaks, inner_spec);
  };
  auto outer = [&](double y) {
    const double w = density_y(y);
    if (w == 0.0) return 0.0;
    return w * inner(y);
  };
  // The outer integrand decays like y^{K-1} exp(-y / lambda).
  const double lambda = 1.0 / (1.0 / g.gamma_ar + (c - 1.0) / g.gamma_ab);
  const std::vector<double> outer_breaks{0.0, 0.25 * k * lambda, k * lambda, 4.0 * k * lambda};
  const double tail = integrate_semi_infinite_split(outer, outer_breaks, spec, k * lambda);
  return detail::clamp_probability(first + tail);
}

/// DT when the relay listens on its strongest antenna.
inline double sop_dt_select(const LinkGains& g, const SystemParams& p) {
  detail::check_inputs(g, p);
  const int k = p.k_antennas;
  detail::check_binomial_k(k, "sop_dt_select");
  const long double c = std::exp2(static_cast<long double>(p.rate));
  detail::AlternatingSum sum;
  for (int n = 0; n < k; ++n) {
    const long double sign = (n % 2 == 0) ? 1.0L : -1.0L;
    sum.add(sign * binomial_ld(k - 1, n) * g.gamma_ab / (c * g.gamma_ar + g.gamma_ab * (n + 1.0L)));
  }
  const long double s = sum.value("sop_dt_select");
  const double lead = std::exp(-(std::exp2(p.rate) - 1.0) / (p.rho * g.gamma_ab));
  return detail::clamp_probability(static_cast<double>(1.0L - k * s * lead));
}

/// AF antenna selection with second-hop CSI: best receive and best transmit antenna.
inline double sop_af_select_csi(const LinkGains& g, const SystemParams& p) {
  detail::check_inputs(g, p);
  const int k = p.k_antennas;
  detail::check_binomial_k(k, "sop_af_select_csi");
  const long double c = std::exp2(2.0L * p.rate);
  const long double mu = (g.gamma_ar + 1.0L / p.rho) / g.gamma_rb;
  detail::AlternatingSum sum;
  for (int n = 0; n < k; ++n) {
    const long double direct = g.gamma_ab * (n + 1.0L);
    const long double denom = (c - 1.0L) * g.gamma_ar + direct;
    const long double beta = (c * g.gamma_ar + direct) / denom;
    const long double prefactor = g.gamma_ab / denom;
    for (int m = 0; m < k; ++m) {
      const long double sign = ((m + n) % 2 == 0) ? 1.0L : -1.0L;
      const long double bracket =
          1.0L / (m + 1.0L) - mu * (beta - 1.0L) * scaled_exp_e1_ld(mu * beta * (m + 1.0L));
      sum.add(sign * binomial_ld(k - 1, m) * binomial_ld(k - 1, n) * prefactor * bracket);
    }
  }
  const long double s = sum.value("sop_af_select_csi");
  const double lead = std::exp(-(std::exp2(2.0 * p.rate) - 1.0) / (p.rho * g.gamma_ab));
  return detail::clamp_probability(static_cast<double>(1.0L - static_cast<long double>(k) * k * s * lead));
}

/// AF antenna selection without second-hop CSI: the transmit antenna is
/// effectively random, so only the receive-side order statistic remains.
inline double sop_af_select_nocsi(const LinkGains& g, const SystemParams& p) {
  detail::check_inputs(g, p);
  const int k = p.k_antennas;
  detail::check_binomial_k(k, "sop_af_select_nocsi");
  const long double c = std::exp2(2.0L * p.rate);
  const long double mu = (g.gamma_ar + 1.0L / p.rho) / g.gamma_rb;
  detail::AlternatingSum sum;
  for (int n = 0; n < k; ++n) {
    const long double direct = g.gamma_ab * (n + 1.0L);
    const long double denom = (c - 1.0L) * g.gamma_ar + direct;
    const long double beta = (c * g.gamma_ar + direct) / denom;
    const long double bracket = 1.0L - mu * (beta - 1.0L) * scaled_exp_e1_ld(mu * beta);
    const long double sign = (n % 2 == 0) ? 1.0L : -1.0L;
    sum.add(sign * binomial_ld(k - 1, n) * g.gamma_ab * bracket / denom);
  }
  const long double s = sum.value("sop_af_select_nocsi");
  const double lead = std::exp(-(std::exp2(2.0 * p.rate) - 1.0) / (p.rho * g.gamma_ab));
  return detail::clamp_probability(static_cast<double>(1.0L - k * s * lead));
}

/// CJ with a K-antenna relay that listens on its strongest antenna and has no
/// second-hop CSI. The binomial expansion over n is summed inside the
/// integral, as 1 - (1 - e^{-a(z)})^K, which keeps it stable for large K.
inline double sop_cj_select_nocsi(const LinkGains& g, const SystemParams& p, const QuadratureSpec& spec = {}) {
  detail::check_inputs(g, p);
  const int k = p.k_antennas;
  const double t = cj_threshold(g, p.rho, p.rate, RootForm::Exact);
  const detail::CjConditional cond{g, p.rho, p.rate, t};
  auto integrand = [&](double s) { return std::exp(-s) * cond.outage_power(t + g.gamma_rb * s, k); };
  const double w = std::exp(-t / g.gamma_rb);
  const double tail = integrate_semi_infinite_split(integrand, detail::cj_breakpoints(g, p.rho, p.rate, t, k), spec);
  return detail::clamp_probability(-std::expm1(-t / g.gamma_rb) + w * tail);
}

/// Same quantity through the literal alternating sum of K+1 integrals. Only
/// usable for small K; kept as a cross-check of the pointwise form.
inline double sop_cj_select_nocsi_binomial(const LinkGains& g, const SystemParams& p, const QuadratureSpec& spec = {}) {
  detail::check_inputs(g, p);
  const int k = p.k_antennas;
  detail::check_binomial_k(k, "sop_cj_select_nocsi_binomial");
  const double t = cj_threshold(g, p.rho, p.rate, RootForm::Exact);
  const detail::CjConditional cond{g, p.rho, p.rate, t};
  detail::AlternatingSum sum;
  for (int n = 0; n <= k; ++n) {
    auto integrand = [&](double s) {
      const double surv = cond.survival(t + g.gamma_rb * s);
      return std::exp(-s) * (n == 0 ? 1.0 : std::pow(surv, n));
    };
    const double integral = integrate_semi_infinite_split(integrand, detail::cj_breakpoints(g, p.rho, p.rate, t, n), spec);
    sum.add(((n % 2 == 0) ? 1.0L : -1.0L) * binomial_ld(k, n) * integral);
  }
  const double w = std::exp(-t / g.gamma_rb);
  return detail::clamp_probability(-std::expm1(-t / g.gamma_rb) + w * static_cast<double>(sum.value("sop_cj_select_nocsi_binomial")));
}

enum class Limit {
  DtRhoInf,           ///< DT, rho -> inf
  AfRhoInf,           ///< AF, rho -> inf (bracket in beta2, mu1 -> gamma_AR / gamma_RB)
  AfRhoInfBeta1,      ///< the same form with beta1 in the bracket; not the limit, kept for comparison
  CjRhoInf,           ///< CJ single antenna, rho -> inf: zero
  AfGrbInf,           ///< AF, gamma_RB -> inf
  CjGrbInf,           ///< CJ, gamma_RB -> inf: Bessel-K form
  AfGrbZero,          ///< AF, gamma_RB -> 0: DT at twice the rate with half pre-log
  CjGrbZero,          ///< CJ, gamma_RB -> 0: one
  DtGarZero,          ///< DT, gamma_AR -> 0
  AfGarZero,          ///< AF, gamma_AR -> 0
  CjGarZero,          ///< CJ, gamma_AR -> 0: one
  CjMultiRhoInf,      ///< CJ MRC/MRT with K >= 2, rho -> inf; simulated, see montecarlo.hpp
  CjSelectNoCsiKInf,  ///< CJ selection without CSI, K -> inf
};

inline std::string_view to_string(Limit l) {
  switch (l) {
    case Limit::DtRhoInf: return "dt-rho-inf";
    case Limit::AfRhoInf: return "af-rho-inf";
    case Limit::AfRhoInfBeta1: return "af-rho-inf-beta1";
    case Limit::CjRhoInf: return "cj-rho-inf";
    case Limit::AfGrbInf: return "af-grb-inf";
    case Limit::CjGrbInf: return "cj-grb-inf";
    case Limit::AfGrbZero: return "af-grb-zero";
    case Limit::CjGrbZero: return "cj-grb-zero";
    case Limit::DtGarZero: return "dt-gar-zero";
    case Limit::AfGarZero: return "af-gar-zero";
    case Limit::CjGarZero: return "cj-gar-zero";
    case Limit::CjMultiRhoInf: return "cj-multi-rho-inf";
    case Limit::CjSelectNoCsiKInf: return "cj-select-nocsi-k-inf";
  }
  return "?";
}

/// Closed-form limit value. Parameters the limit sends to 0 or infinity are
/// ignored; the rest are taken from `g` and `p`.
inline double limits(const LinkGains& g, const SystemParams& p, Limit which) {
  detail::check_inputs(g, p);
  const double c1 = std::exp2(p.rate);
  const double c2 = std::exp2(2.0 * p.rate);
  switch (which) {
    case Limit::DtRhoInf:
      return 1.0 - g.gamma_ab / (c1 * g.gamma_ar + g.gamma_ab);
    case Limit::AfRhoInf:
    case Limit::AfRhoInfBeta1: {
      const double mu = g.gamma_ar / g.gamma_rb;
      const double beta = which == Limit::AfRhoInfBeta1
                              ? 1.0 + g.gamma_ar / g.gamma_ab
                              : (c2 * g.gamma_ar + g.gamma_ab) / ((c2 - 1.0) * g.gamma_ar + g.gamma_ab);
      const double pre = g.gamma_ab / ((c2 - 1.0) * g.gamma_ar + g.gamma_ab);
      return detail::clamp_probability(1.0 - pre * detail::af_bracket(mu, beta));
    }
    case Limit::CjRhoInf:
      return 0.0;
    case Limit::AfGrbInf:
      return 1.0 - g.gamma_ab / ((c2 - 1.0) * g.gamma_ar + g.gamma_ab) * std::exp(-(c2 - 1.0) / (p.rho * g.gamma_ab));
    case Limit::CjGrbInf: {
      const double b = (c2 - 1.0) / (p.rho * g.gamma_ar);
      if (b == 0.0) return 0.0;
      const double s = 2.0 * std::sqrt(b);
      return detail::clamp_probability(1.0 - std::exp(-b) * s * bessel_k1(s));
    }
    case Limit::AfGrbZero:
      return 1.0 - g.gamma_ab / (c2 * g.gamma_ar + g.gamma_ab) * std::exp(-(c2 - 1.0) / (p.rho * g.gamma_ab));
    case Limit::CjGrbZero:
    case Limit::CjGarZero:
      return 1.0;
    case Limit::DtGarZero:
      return -std::expm1(-(c1 - 1.0) / (p.rho * g.gamma_ab));
    case Limit::AfGarZero:
      return -std::expm1(-(c2 - 1.0) / (p.rho * g.gamma_ab));
    case Limit::CjSelectNoCsiKInf:
      return -std::expm1(-cj_threshold(g, p.rho, p.rate) / g.gamma_rb);
    case Limit::CjMultiRhoInf:
      throw unsupported_error("limits: the multi-antenna CJ high-SNR limit has no closed form; use "
                              "cj_multi_rho_inf_limit (Monte Carlo)");
  }
  throw unsupported_error("limits: unknown selector");
}

/// True when a closed-form SOP exists for this scheme, mode and K at full power.
inline bool has_closed_form(const SystemParams& p) {
  if (!p.power.is_full()) return false;
  const Scheme s = p.scheme.scheme();
  const Mode m = p.scheme.mode();
  if (s != Scheme::CJ) return true;
  if (p.k_antennas == 1) return true;
  return m == Mode::SelectNoCsi;
}

/// Dispatch to the closed form matching `p.scheme` and `p.k_antennas`.
inline double analytic_sop(const LinkGains& g, const SystemParams& p, const QuadratureSpec& spec = {}) {
  detail::check_inputs(g, p);
  if (!p.power.is_full()) {
    throw unsupported_error("analytic_sop: closed forms assume every node at full power; use montecarlo");
  }
  const int k = p.k_antennas;
  const Mode m = p.scheme.mode();
  switch (p.scheme.scheme()) {
    case Scheme::DT:
      if (k == 1) return sop_dt_single(g, p);
      return m == Mode::FullArray ? sop_dt_multi(g, p) : sop_dt_select(g, p);
    case Scheme::AF:
      if (k == 1) return sop_af_single(g, p);
      switch (m) {
        case Mode::FullArray: return sop_af_multi(g, p, spec);
        case Mode::SelectWithCsi: return sop_af_select_csi(g, p);
        case Mode::SelectNoCsi: return sop_af_select_nocsi(g, p);
      }
      break;
    case Scheme::CJ:
      if (k == 1) return sop_cj_single(g, p, spec);
      if (m == Mode::SelectNoCsi) return sop_cj_select_nocsi(g, p, spec);
      throw unsupported_error(std::string("analytic_sop: no closed form for CJ ") + std::string(to_string(m)) +
                              " with K > 1; use montecarlo");
  }
  throw unsupported_error("analytic_sop: unknown scheme");
}

}  // namespace sop
