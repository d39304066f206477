#pragma once

// Domain types, Rayleigh channel sampling and the relay beamforming /
// antenna-selection kernels shared by the analytic and simulation paths.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "sop/error.hpp"
#include "sop/philox.hpp"

namespace sop {

using cplx = std::complex<double>;

inline double db_to_linear(double x_db) {
  if (!std::isfinite(x_db)) throw domain_error("db_to_linear: non-finite input");
  return std::pow(10.0, x_db / 10.0);
}

inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

/// Average squared channel gains, linear scale. The relay's per-antenna gains
/// are common across its array.
struct LinkGains {
  double gamma_ab = 1.0;
  double gamma_ar = 1.0;
  double gamma_rb = 1.0;

  static LinkGains from_db(double ab_db, double ar_db, double rb_db) {
    LinkGains g{db_to_linear(ab_db), db_to_linear(ar_db), db_to_linear(rb_db)};
    g.validate();
    return g;
  }

  void validate() const {
    auto ok = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!ok(gamma_ab) || !ok(gamma_ar) || !ok(gamma_rb)) {
      throw domain_error("LinkGains: all average gains must be positive and finite");
    }
  }
};

enum class Scheme { DT, AF, CJ };
enum class Mode { FullArray, SelectWithCsi, SelectNoCsi };

inline std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::DT: return "DT";
    case Scheme::AF: return "AF";
    case Scheme::CJ: return "CJ";
  }
  return "?";
}

inline std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::FullArray: return "full";
    case Mode::SelectWithCsi: return "select-csi";
    case Mode::SelectNoCsi: return "select-nocsi";
  }
  return "?";
}

inline Scheme parse_scheme(std::string_view s) {
  if (s == "DT" || s == "dt") return Scheme::DT;
  if (s == "AF" || s == "af") return Scheme::AF;
  if (s == "CJ" || s == "cj") return Scheme::CJ;
  throw config_error("unknown scheme '" + std::string(s) + "' (expected DT, AF or CJ)");
}

inline Mode parse_mode(std::string_view s) {
  if (s == "full") return Mode::FullArray;
  if (s == "select-csi") return Mode::SelectWithCsi;
  if (s == "select-nocsi") return Mode::SelectNoCsi;
  throw config_error("unknown mode '" + std::string(s) + "' (expected full, select-csi or select-nocsi)");
}

/// Transmission policy plus the relay's array mode. DT never hides second-hop
/// CSI (the relay is a pure eavesdropper), so (DT, SelectNoCsi) is rejected.
class SchemeId {
public:
  SchemeId(Scheme scheme = Scheme::DT, Mode mode = Mode::FullArray) : scheme_(scheme), mode_(mode) {
    if (scheme == Scheme::DT && mode == Mode::SelectNoCsi) {
      throw config_error("SchemeId: DT has no second-hop CSI distinction (use full or select-csi)");
    }
  }

  Scheme scheme() const { return scheme_; }
  Mode mode() const { return mode_; }
  bool selects() const { return mode_ != Mode::FullArray; }

  friend bool operator==(const SchemeId&, const SchemeId&) = default;

private:
  Scheme scheme_;
  Mode mode_;
};

/// Per-node transmit powers as fractions of the common budget P.
struct PowerAllocation {
  double frac_alice = 1.0;
  double frac_relay = 1.0;
  double frac_bob_jam = 1.0;

  bool is_full() const { return frac_alice == 1.0 && frac_relay == 1.0 && frac_bob_jam == 1.0; }

  void validate() const {
    auto ok = [](double v) { return v >= 0.0 && std::isfinite(v); };
    if (!ok(frac_alice) || !ok(frac_relay) || !ok(frac_bob_jam)) {
      throw domain_error("PowerAllocation: fractions must be finite and non-negative");
    }
  }

  friend bool operator==(const PowerAllocation&, const PowerAllocation&) = default;
};

struct SystemParams {
  double rho = 1.0;  ///< transmit SNR P / N0, linear
  int k_antennas = 1;
  double rate = 0.1;  ///< target secrecy rate, bits per channel use
  SchemeId scheme{};
  PowerAllocation power{};

  void validate() const {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw domain_error("SystemParams: rho must be positive and finite");
    if (k_antennas < 1) throw domain_error("SystemParams: k_antennas must be >= 1");
    if (!(rate >= 0.0) || !std::isfinite(rate)) throw domain_error("SystemParams: rate must be finite and >= 0");
    power.validate();
  }
};

enum class Method { Analytic, MonteCarlo, Asymptotic };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::Analytic: return "analytic";
    case Method::MonteCarlo: return "montecarlo";
    case Method::Asymptotic: return "asymptotic";
  }
  return "?";
}

struct SopEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
  Method method = Method::Analytic;
  double wilson_lo = 0.0;  ///< 95% Wilson interval, simulated estimates only
  double wilson_hi = 0.0;

  static SopEstimate exact(double value, Method method = Method::Analytic) {
    return {value, 0.0, 0, method, value, value};
  }

  /// Binomial (Wald) standard error plus the Wilson interval for `hits` of `n`.
  static SopEstimate from_counts(std::uint64_t hits, std::uint64_t n, Method method = Method::MonteCarlo) {
    const double nd = static_cast<double>(n);
    const double p = static_cast<double>(hits) / nd;
    constexpr double z = 1.959963984540054;
    const double denom = 1.0 + z * z / nd;
    const double center = (p + z * z / (2.0 * nd)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nd + z * z / (4.0 * nd * nd)) / denom;
    // The interval ends are exact at hits = 0 and hits = n; pin them there.
    const double lo = hits == 0 ? 0.0 : std::max(0.0, center - half);
    const double hi = hits == n ? 1.0 : std::min(1.0, center + half);
    return {p, std::sqrt(p * (1.0 - p) / nd), n, method, lo, hi};
  }
};

/// One quasi-static fading realization. h_rb[i] is the gain between relay
/// antenna i and Bob; reciprocity makes it serve both directions.
struct ChannelDraw {
  cplx h_ab{};
  std::vector<cplx> h_ar;
  std::vector<cplx> h_rb;
  double pick = 0.0;  ///< uniform on (0,1), used for blind antenna choices

  int k() const { return static_cast<int>(h_ar.size()); }
};

namespace slots {
inline constexpr std::uint32_t kDirect = 0;
inline constexpr std::uint32_t kPick = 1;
// Array entries interleave so a K-antenna draw is a prefix of a (K+1)-antenna one.
inline constexpr std::uint32_t first_hop(int i) { return 2u + 2u * static_cast<std::uint32_t>(i); }
inline constexpr std::uint32_t second_hop(int i) { return 3u + 2u * static_cast<std::uint32_t>(i); }
}  // namespace slots

inline void sample_channel(const LinkGains& gains, int k, const TrialStream& stream, ChannelDraw& out) {
  if (k < 1) throw domain_error("sample_channel: k must be >= 1");
  out.h_ab = stream.complex_normal(slots::kDirect, gains.gamma_ab);
  out.pick = stream.uniform(slots::kPick);
  out.h_ar.resize(static_cast<std::size_t>(k));
  out.h_rb.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    out.h_ar[static_cast<std::size_t>(i)] = stream.complex_normal(slots::first_hop(i), gains.gamma_ar);
    out.h_rb[static_cast<std::size_t>(i)] = stream.complex_normal(slots::second_hop(i), gains.gamma_rb);
  }
}

inline ChannelDraw sample_channel(const LinkGains& gains, int k, const TrialStream& stream) {
  ChannelDraw draw;
  sample_channel(gains, k, stream, draw);
  return draw;
}

inline double squared_norm(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return s;
}

/// Building blocks of Bob's SNR: direct-link SNR and the forwarded-path SNR
/// relay_num / relay_den.
struct SnrTerms {
  double direct = 0.0;
  double relay_num = 0.0;
  double relay_den = 1.0;

  double relay() const { return relay_num / relay_den; }
  double total() const { return direct + relay(); }
};

namespace detail {

// Forwarded SNR for first-hop strength s_a and second-hop strength s_b through
// `n_ant` radiating antennas. The relay normalizes by the statistical received
// power n_ant * (gamma_AR P_A [+ gamma_RB P_J] + N0), not by the realization.
inline SnrTerms forward_terms(double direct_gain, double s_a, double s_b, int n_ant, const LinkGains& gains,
                              const SystemParams& p) {
  const double rho_a = p.rho * p.power.frac_alice;
  const double rho_r = p.rho * p.power.frac_relay;
  const double rho_j = p.rho * p.power.frac_bob_jam;
  const bool jam = p.scheme.scheme() == Scheme::CJ;
  SnrTerms t;
  t.direct = jam ? 0.0 : rho_a * direct_gain;
  if (rho_r <= 0.0) {
    t.relay_num = 0.0;
    t.relay_den = 1.0;
    return t;
  }
  const double received = rho_a * gains.gamma_ar + (jam ? rho_j * gains.gamma_rb : 0.0) + 1.0;
  t.relay_num = rho_a * s_b * s_a;
  t.relay_den = s_b + n_ant * received / rho_r;
  return t;
}

}  // namespace detail

/// MRC-receive / MRT-transmit SNR terms for the full array (AF, or CJ once
/// Bob has cancelled his own jamming: then `direct` is zero and the jamming
/// power enters the relay's normalization).
inline SnrTerms mrc_mrt_snr_terms(const ChannelDraw& draw, const LinkGains& gains, const SystemParams& params) {
  return detail::forward_terms(std::norm(draw.h_ab), squared_norm(draw.h_ar), squared_norm(draw.h_rb), draw.k(),
                               gains, params);
}

/// Single-antenna forwarding through receive antenna m and transmit antenna n.
inline SnrTerms selected_snr_terms(const ChannelDraw& draw, int m, int n, const LinkGains& gains,
                                   const SystemParams& params) {
  return detail::forward_terms(std::norm(draw.h_ab), std::norm(draw.h_ar[static_cast<std::size_t>(m)]),
                               std::norm(draw.h_rb[static_cast<std::size_t>(n)]), 1, gains, params);
}

/// Max-SINR (MMSE) relay receiver against Bob's jamming,
/// rho_s h^H (rho_j g g^H + I)^{-1} h in Sherman-Morrison form.
inline double mmse_sinr_relay_cj(const ChannelDraw& draw, double rho_signal, double rho_jam) {
  const double h2 = squared_norm(draw.h_ar);
  const double g2 = squared_norm(draw.h_rb);
  cplx inner{};
  for (std::size_t i = 0; i < draw.h_ar.size(); ++i) inner += std::conj(draw.h_rb[i]) * draw.h_ar[i];
  const double projected = h2 - rho_jam * std::norm(inner) / (1.0 + rho_jam * g2);
  return rho_signal * std::clamp(projected, 0.0, h2);
}

inline double mmse_sinr_relay_cj(const ChannelDraw& draw, double rho) { return mmse_sinr_relay_cj(draw, rho, rho); }

struct AntennaPair {
  int m = 0;  ///< receive antenna (first hop)
  int n = 0;  ///< transmit antenna (second hop)
  friend bool operator==(const AntennaPair&, const AntennaPair&) = default;
};

namespace detail {

template <class Better>
int arg_best(int k, Better better) {
  int best = 0;
  for (int i = 1; i < k; ++i) {
    if (better(i, best)) best = i;
  }
  return best;
}

}  // namespace detail

/// Relay antenna choice. The relay always picks its strongest first-hop
/// antenna for eavesdropping, except CJ with CSI where it maximizes the
/// signal-to-jamming ratio. Without second-hop CSI, AF forwards on a uniformly
/// random antenna and CJ reuses its receive antenna.
inline AntennaPair select_antennas(const ChannelDraw& draw, const SchemeId& scheme) {
  const int k = draw.k();
  if (k == 1) return {0, 0};
  const auto& a = draw.h_ar;
  const auto& b = draw.h_rb;
  auto stronger_a = [&](int i, int j) { return std::norm(a[i]) > std::norm(a[j]); };
  auto stronger_b = [&](int i, int j) { return std::norm(b[i]) > std::norm(b[j]); };
  const int best_b = detail::arg_best(k, stronger_b);

  if (scheme.scheme() == Scheme::CJ) {
    if (scheme.mode() == Mode::SelectNoCsi) {
      const int m = detail::arg_best(k, stronger_a);
      return {m, m};
    }
    // |a_i|^2 / |b_i|^2 > |a_j|^2 / |b_j|^2 without dividing.
    auto better_ratio = [&](int i, int j) { return std::norm(a[i]) * std::norm(b[j]) > std::norm(a[j]) * std::norm(b[i]); };
    return {detail::arg_best(k, better_ratio), best_b};
  }
  const int m = detail::arg_best(k, stronger_a);
  if (scheme.mode() == Mode::SelectNoCsi) {
    const int n = std::min(k - 1, static_cast<int>(draw.pick * k));
    return {m, n};
  }
  return {m, best_b};
}

enum class RootForm {
  Exact,      ///< positive root of the quadratic phi(z) = 0
  FactorTwo,  ///< same radical with 2 rho 2^{2R} in place of 4 rho 2^{2R}; not a zero of phi,
              ///< kept to demonstrate that it breaks the R = 0 identity
};

struct DerivedCoefficients {
  double mu1 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double mu = 0.0;
  std::vector<double> beta_n;  ///< n = 0 .. K-1
  double t = 0.0;
  std::function<double(double)> phi;
};

/// phi(z) = rho z / (z + gamma_AR + gamma_RB + 1/rho) - 2^{2R} / (z + 1/rho):
/// the CJ outage event is phi(|h_RB|^2) |h_AR|^2 < 2^{2R} - 1.
inline double cj_phi(double z, const LinkGains& g, double rho, double rate) {
  const double c = std::exp2(2.0 * rate);
  return rho * z / (z + g.gamma_ar + g.gamma_rb + 1.0 / rho) - c / (z + 1.0 / rho);
}

/// The z > 0 where phi(z) = level, for 0 <= level < rho (phi increases from
/// -inf to rho): the positive root of
/// (rho - L) z^2 + (1 - 2^{2R} - L (a + 1/rho)) z - (2^{2R} a + L a / rho) = 0,
/// a = gamma_AR + gamma_RB + 1/rho.
inline double cj_phi_level(const LinkGains& g, double rho, double rate, double level) {
  if (!(level >= 0.0) || !(level < rho)) throw domain_error("cj_phi_level: level must lie in [0, rho)");
  const double c = std::exp2(2.0 * rate);
  const double a = g.gamma_ar + g.gamma_rb + 1.0 / rho;
  const double qa = rho - level;
  const double qb = 1.0 - c - level * (a + 1.0 / rho);
  const double qc = c * a + level * a / rho;  // minus the constant term
  const double root = std::sqrt(qb * qb + 4.0 * qa * qc);
  return qb < 0.0 ? (root - qb) / (2.0 * qa) : 2.0 * qc / (qb + root);
}

/// Zero of phi on z > 0: rho z^2 - (2^{2R} - 1) z - 2^{2R}(gamma_AR + gamma_RB + 1/rho) = 0.
inline double cj_threshold(const LinkGains& g, double rho, double rate, RootForm form = RootForm::Exact) {
  if (form == RootForm::Exact) return cj_phi_level(g, rho, rate, 0.0);
  const double c = std::exp2(2.0 * rate);
  const double a = g.gamma_ar + g.gamma_rb + 1.0 / rho;
  return ((c - 1.0) + std::sqrt((c - 1.0) * (c - 1.0) + 2.0 * rho * c * a)) / (2.0 * rho);
}

inline DerivedCoefficients derived_coefficients(const LinkGains& g, const SystemParams& p,
                                                RootForm form = RootForm::Exact) {
  g.validate();
  p.validate();
  const double c = std::exp2(2.0 * p.rate);
  DerivedCoefficients d;
  d.mu1 = (g.gamma_ar + 1.0 / p.rho) / g.gamma_rb;
  d.mu = d.mu1;
  d.beta1 = 1.0 + g.gamma_ar / g.gamma_ab;
  d.beta2 = (c * g.gamma_ar + g.gamma_ab) / ((c - 1.0) * g.gamma_ar + g.gamma_ab);
  d.beta_n.reserve(static_cast<std::size_t>(p.k_antennas));
  for (int n = 0; n < p.k_antennas; ++n) {
    const double direct = g.gamma_ab * (n + 1.0);
    d.beta_n.push_back((c * g.gamma_ar + direct) / ((c - 1.0) * g.gamma_ar + direct));
  }
  d.t = cj_threshold(g, p.rho, p.rate, form);
  d.phi = [g, rho = p.rho, rate = p.rate](double z) { return cj_phi(z, g, rho, rate); };
  return d;
}

}  // namespace sop
