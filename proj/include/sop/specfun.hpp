#pragma once

// Special functions and quadrature used by the closed-form outage expressions.
//
// Everything here is a pure function of its arguments.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <vector>

#include "sop/error.hpp"

namespace sop {

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 200;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions < 1) {
      throw domain_error("QuadratureSpec: tolerances must be positive and max_subdivisions >= 1");
    }
  }
};

namespace detail {

// e^y * E1(y) for y > 0: power series below 4, Lentz continued fraction above.
template <class T>
T scaled_e1(T y) {
  constexpr T eps = std::numeric_limits<T>::epsilon();
  if (y < T(1)) {
    T sum = 0;
    T term = 1;
    for (int k = 1; k < 400; ++k) {
      term *= -y / T(k);
      const T contrib = term / T(k);
      sum += contrib;
      if (std::abs(contrib) <= eps * std::abs(sum)) break;
    }
    const T e1 = -std::numbers::egamma_v<T> - std::log(y) - sum;
    return std::exp(y) * e1;
  }
  constexpr T tiny = std::numeric_limits<T>::min() / eps;
  T b = y + T(1);
  T c = T(1) / tiny;
  T d = T(1) / b;
  T h = d;
  for (int i = 1; i < 10000; ++i) {
    const T a = -T(i) * T(i);
    b += T(2);
    d = T(1) / (a * d + b);
    c = b + a / c;
    const T del = c * d;
    h *= del;
    if (std::abs(del - T(1)) <= eps) break;
  }
  return h;
}

}  // namespace detail

/// e^y E1(y) = -e^y Ei(-y), y > 0. Stays finite where e^y and Ei(-y) separately
/// overflow/underflow, which is how the outage formulas combine them.
inline double scaled_exp_e1(double y) {
  if (!(y > 0.0)) throw domain_error("scaled_exp_e1: requires y > 0");
  if (std::isinf(y)) return 0.0;
  return detail::scaled_e1<double>(y);
}

inline long double scaled_exp_e1_ld(long double y) {
  if (!(y > 0.0L)) throw domain_error("scaled_exp_e1: requires y > 0");
  if (std::isinf(y)) return 0.0L;
  return detail::scaled_e1<long double>(y);
}

/// Exponential integral Ei(x) = integral_{-inf}^{x} e^t / t dt for x < 0.
inline double exp_integral_ei(double x) {
  if (!(x < 0.0)) throw domain_error("exp_integral_ei: requires x < 0");
  const double y = -x;
  return -std::exp(-y) * detail::scaled_e1<double>(y);
}

/// Modified Bessel function of the second kind, order one.
/// Series for x <= 2, Steed's continued fraction beyond.
inline double bessel_k1(double x) {
  if (!(x > 0.0)) throw domain_error("bessel_k1: requires x > 0");
  if (std::isinf(x)) return 0.0;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (x <= 2.0) {
    const double q = 0.25 * x * x;
    // I1 and the digamma-weighted series share the (q^k / (k! (k+1)!)) factor.
    double w = 1.0;  // q^k / (k! (k+1)!)
    double psi_k1 = -std::numbers::egamma;       // psi(k+1)
    double psi_k2 = 1.0 - std::numbers::egamma;  // psi(k+2)
    double i1_sum = 0.0;
    double psi_sum = 0.0;
    for (int k = 0; k < 200; ++k) {
      i1_sum += w;
      const double contrib = (psi_k1 + psi_k2) * w;
      psi_sum += contrib;
      if (k > 0 && w <= eps * i1_sum && std::abs(contrib) <= eps * std::abs(psi_sum)) break;
      w *= q / ((k + 1.0) * (k + 2.0));
      psi_k1 += 1.0 / (k + 1.0);
      psi_k2 += 1.0 / (k + 2.0);
    }
    const double i1 = 0.5 * x * i1_sum;
    return 1.0 / x + std::log(0.5 * x) * i1 - 0.25 * x * psi_sum;
  }
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i < 100000; ++i) {
    a -= 2 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < eps) break;
  }
  h = a1 * h;
  const double k0 = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) / s;
  return k0 * (x + 0.5 - h) / x;
}

/// sum_{n=0}^{k-1} v^n e^{-v} / n!, the survival function of a Gamma(k, 1)
/// variable (a chi-square with 2k degrees of freedom evaluated at 2v).
inline double chi2_2k_cdf_complement(double v, int k) {
  if (!(v >= 0.0) || k < 1) throw domain_error("chi2_2k_cdf_complement: requires v >= 0 and k >= 1");
  if (v == 0.0) return 1.0;
  if (std::isinf(v)) return 0.0;
  const double log_v = std::log(v);
  double sum = 0.0;
  for (int n = 0; n < k; ++n) {
    sum += std::exp(n * log_v - v - std::lgamma(n + 1.0));
  }
  return std::min(sum, 1.0);
}

namespace detail {

struct GaussKronrod15 {
  static constexpr std::array<double, 8> xgk = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr std::array<double, 8> wgk = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr std::array<double, 4> wg = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(const F& f, double a, double b) {
  using G = GaussKronrod15;
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kron = fc * G::wgk[7];
  double gauss = fc * G::wg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * G::xgk[j];
    const double fsum = f(center - dx) + f(center + dx);
    kron += G::wgk[j] * fsum;
    if (j % 2 == 1) gauss += G::wg[j / 2] * fsum;
  }
  return {a, b, kron * half, std::abs((kron - gauss) * half)};
}

template <class F>
double adaptive_gk(const F& f, double a, double b, const QuadratureSpec& spec, const char* who) {
  spec.validate();
  std::priority_queue<Panel> panels;
  Panel first = gk15(f, a, b);
  double total = first.value;
  double error = first.error;
  panels.push(first);
  int splits = 0;
  for (;;) {
    if (!std::isfinite(total) || !std::isfinite(error)) {
      throw convergence_error(std::string(who) + ": integrand produced a non-finite value");
    }
    if (error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) break;
    if (splits >= spec.max_subdivisions) {
      std::ostringstream msg;
      msg << who << ": tolerance not met after " << splits << " subdivisions (estimate " << total
          << ", error " << error << ")";
      throw convergence_error(msg.str());
    }
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Panel left = gk15(f, worst.a, mid);
    const Panel right = gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++splits;
  }
  // Re-sum to shed the drift of the incremental updates.
  double sum = 0.0;
  while (!panels.empty()) {
    sum += panels.top().value;
    panels.pop();
  }
  return sum;
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (7/15) integral of f over the finite interval [a, b].
template <class F>
double integrate_finite(const F& f, double a, double b, const QuadratureSpec& spec = {}) {
  if (a == b) return 0.0;
  return detail::adaptive_gk(f, a, b, spec, "integrate_finite");
}

/// Integral of f over [lower, inf) via z = lower + scale * u / (1 - u), u in [0, 1).
/// `scale` only reshapes the map; pick it near the decay length of f.
template <class F>
double integrate_semi_infinite(const F& f, double lower, const QuadratureSpec& spec = {},
                               double scale = 1.0) {
  if (!(scale > 0.0) || !std::isfinite(lower)) {
    throw domain_error("integrate_semi_infinite: requires finite lower bound and positive scale");
  }
  auto mapped = [&](double u) {
    const double one_minus = 1.0 - u;
    if (one_minus <= 0.0) return 0.0;
    const double z = lower + scale * u / one_minus;
    if (std::isinf(z)) return 0.0;
    const double value = f(z);
    if (value == 0.0) return 0.0;
    return value * scale / (one_minus * one_minus);
  };
  return detail::adaptive_gk(mapped, 0.0, 1.0, spec, "integrate_semi_infinite");
}

/// Integral of f over [breaks.front(), breaks.back()], split at the interior
/// breakpoints. The absolute tolerance is shared evenly among the pieces.
template <class F>
double integrate_finite_split(const F& f, const std::vector<double>& breaks, const QuadratureSpec& spec = {}) {
  if (breaks.size() < 2) throw domain_error("integrate_finite_split: needs both endpoints");
  QuadratureSpec piece = spec;
  piece.abs_tol = spec.abs_tol / static_cast<double>(breaks.size() - 1);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] >= breaks[i])) throw domain_error("integrate_finite_split: breakpoints must not decrease");
    sum += integrate_finite(f, breaks[i], breaks[i + 1], piece);
  }
  return sum;
}

/// Integral of f over [breaks.front(), inf), split at the given increasing
/// breakpoints so narrow features between them are not missed. The absolute
/// tolerance is shared evenly among the pieces.
template <class F>
double integrate_semi_infinite_split(const F& f, const std::vector<double>& breaks, const QuadratureSpec& spec = {},
                                     double scale = 1.0) {
  if (breaks.empty()) throw domain_error("integrate_semi_infinite_split: needs at least the lower bound");
  QuadratureSpec piece = spec;
  piece.abs_tol = spec.abs_tol / static_cast<double>(breaks.size());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) throw domain_error("integrate_semi_infinite_split: breakpoints must increase");
    sum += integrate_finite(f, breaks[i], breaks[i + 1], piece);
  }
  return sum + integrate_semi_infinite(f, breaks.back(), piece, scale);
}

/// Binomial coefficient C(n, k) as long double, exact for n <= 64.
inline long double binomial_ld(int n, int k) {
  if (k < 0 || k > n) return 0.0L;
  k = std::min(k, n - k);
  long double c = 1.0L;
  for (int i = 0; i < k; ++i) {
    c = c * static_cast<long double>(n - i) / static_cast<long double>(i + 1);
  }
  return std::round(c);
}

}  // namespace sop
