#pragma once

// Monte Carlo estimation of the secrecy outage probability. Each trial draws an
// independent fading realization from a counter-based stream, so estimates are
// identical for any number of worker threads.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "sop/error.hpp"
#include "sop/model.hpp"
#include "sop/philox.hpp"

namespace sop {

struct McConfig {
  std::uint64_t trials = 1'000'000;
  std::uint64_t seed = 0x5EC0'2E7Dull;
  std::uint64_t chunk_size = 1ull << 16;
  unsigned workers = 0;  ///< 0 selects std::thread::hardware_concurrency()

  void validate() const {
    if (trials < 1) throw config_error("McConfig: trials must be >= 1");
    if (chunk_size < 1) throw config_error("McConfig: chunk_size must be >= 1");
  }
};

/// Bob's and the eavesdropping relay's SNRs for one realization, with the
/// pre-log of the scheme (1 for DT, 1/2 for the two-phase schemes).
struct LinkSnrs {
  double bob = 0.0;
  double relay = 0.0;
  double prelog = 1.0;
};

inline LinkSnrs link_snrs(const ChannelDraw& d, const LinkGains& g, const SystemParams& p) {
  const double rho_a = p.rho * p.power.frac_alice;
  const double rho_j = p.rho * p.power.frac_bob_jam;
  const Mode mode = p.scheme.mode();
  LinkSnrs s;
  switch (p.scheme.scheme()) {
    case Scheme::DT: {
      s.prelog = 1.0;
      s.bob = rho_a * std::norm(d.h_ab);
      if (mode == Mode::FullArray) {
        s.relay = rho_a * squared_norm(d.h_ar);
      } else {
        const AntennaPair ant = select_antennas(d, p.scheme);
        s.relay = rho_a * std::norm(d.h_ar[static_cast<std::size_t>(ant.m)]);
      }
      return s;
    }
    case Scheme::AF: {
      s.prelog = 0.5;
      if (mode == Mode::FullArray) {
        s.bob = mrc_mrt_snr_terms(d, g, p).total();
        s.relay = rho_a * squared_norm(d.h_ar);
      } else {
        const AntennaPair ant = select_antennas(d, p.scheme);
        s.bob = selected_snr_terms(d, ant.m, ant.n, g, p).total();
        s.relay = rho_a * std::norm(d.h_ar[static_cast<std::size_t>(ant.m)]);
      }
      return s;
    }
    case Scheme::CJ: {
      s.prelog = 0.5;
      if (mode == Mode::FullArray) {
        s.bob = mrc_mrt_snr_terms(d, g, p).total();
        s.relay = mmse_sinr_relay_cj(d, rho_a, rho_j);
      } else {
        const AntennaPair ant = select_antennas(d, p.scheme);
        s.bob = selected_snr_terms(d, ant.m, ant.n, g, p).total();
        const auto m = static_cast<std::size_t>(ant.m);
        s.relay = rho_a * std::norm(d.h_ar[m]) / (rho_j * std::norm(d.h_rb[m]) + 1.0);
      }
      return s;
    }
  }
  return s;
}

/// I_B - I_R without clipping at zero. Its sign decides positive secrecy.
inline double secrecy_margin(const ChannelDraw& d, const LinkGains& g, const SystemParams& p) {
  const LinkSnrs s = link_snrs(d, g, p);
  return s.prelog * (std::log2(1.0 + s.bob) - std::log2(1.0 + s.relay));
}

/// Achievable secrecy rate [I_B - I_R]^+.
inline double secrecy_rate(const ChannelDraw& d, const LinkGains& g, const SystemParams& p) {
  return std::max(0.0, secrecy_margin(d, g, p));
}

namespace detail {

inline unsigned resolve_workers(const McConfig& mc, std::uint64_t chunks) {
  unsigned w = mc.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : mc.workers;
  return static_cast<unsigned>(std::min<std::uint64_t>(w, chunks));
}

/// Runs `mc.trials` trials with draws from `sampling_gains` and K antennas,
/// calling `visit(draw, counts)` once per trial. Counts are summed over workers
/// as integers, so the total does not depend on scheduling.
template <class Visit>
std::vector<std::uint64_t> count_trials(const LinkGains& sampling_gains, int k, const McConfig& mc,
                                        std::size_t n_counters, const Visit& visit) {
  mc.validate();
  sampling_gains.validate();
  const std::uint64_t chunks = (mc.trials + mc.chunk_size - 1) / mc.chunk_size;
  const unsigned n_workers = resolve_workers(mc, chunks);
  std::atomic<std::uint64_t> next{0};
  std::vector<std::vector<std::uint64_t>> partial(n_workers, std::vector<std::uint64_t>(n_counters, 0));
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&](unsigned w) {
    try {
      ChannelDraw draw;
      auto& counts = partial[w];
      for (std::uint64_t c = next++; c < chunks; c = next++) {
        const std::uint64_t begin = c * mc.chunk_size;
        const std::uint64_t end = std::min(mc.trials, begin + mc.chunk_size);
        for (std::uint64_t trial = begin; trial < end; ++trial) {
          sample_channel(sampling_gains, k, TrialStream(mc.seed, trial), draw);
          visit(draw, counts);
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = chunks;
    }
  };

  if (n_workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<std::uint64_t> total(n_counters, 0);
  for (const auto& part : partial) {
    for (std::size_t i = 0; i < n_counters; ++i) total[i] += part[i];
  }
  return total;
}

}  // namespace detail

/// Fraction of trials with secrecy rate strictly below `p.rate`.
inline SopEstimate estimate_sop(const LinkGains& g, const SystemParams& p, const McConfig& mc) {
  g.validate();
  p.validate();
  const auto counts = detail::count_trials(g, p.k_antennas, mc, 1, [&](const ChannelDraw& d, auto& c) {
    if (secrecy_margin(d, g, p) < p.rate) ++c[0];
  });
  return SopEstimate::from_counts(counts[0], mc.trials);
}

/// Fraction of trials with a strictly positive secrecy rate.
inline SopEstimate positive_secrecy_probability(const LinkGains& g, const SystemParams& p, const McConfig& mc) {
  g.validate();
  p.validate();
  const auto counts = detail::count_trials(g, p.k_antennas, mc, 1, [&](const ChannelDraw& d, auto& c) {
    if (secrecy_margin(d, g, p) > 0.0) ++c[0];
  });
  return SopEstimate::from_counts(counts[0], mc.trials);
}

/// High-SNR limit of MRC/MRT cooperative jamming, K >= 2. As rho grows the
/// MMSE receiver's residual SINR is rho |h_AR|^2_perp with the jamming
/// direction projected out, and Bob's SNR grows at the same rate, so outage
/// tends to the rho-free event
///   S_B S_A / (S_B + K (gamma_AR + gamma_RB)) < 2^{2R} ||P_perp h_AR||^2.
inline SopEstimate cj_multi_rho_inf_limit(const LinkGains& g, const SystemParams& p, const McConfig& mc) {
  g.validate();
  p.validate();
  if (p.k_antennas < 2) {
    throw unsupported_error("cj_multi_rho_inf_limit: needs K >= 2 (K = 1 tends to zero outage)");
  }
  if (!p.power.is_full()) throw unsupported_error("cj_multi_rho_inf_limit: assumes full power at every node");
  const double c = std::exp2(2.0 * p.rate);
  const double k = p.k_antennas;
  const auto counts = detail::count_trials(g, p.k_antennas, mc, 1, [&](const ChannelDraw& d, auto& cnt) {
    const double s_a = squared_norm(d.h_ar);
    const double s_b = squared_norm(d.h_rb);
    cplx inner{};
    for (std::size_t i = 0; i < d.h_ar.size(); ++i) inner += std::conj(d.h_rb[i]) * d.h_ar[i];
    const double perp = std::max(0.0, s_a - std::norm(inner) / s_b);
    const double bob = s_b * s_a / (s_b + k * (g.gamma_ar + g.gamma_rb));
    if (bob < c * perp) ++cnt[0];
  });
  return SopEstimate::from_counts(counts[0], mc.trials, Method::Asymptotic);
}

/// Simulated SOP of several schemes on the same fading draws. Only the scheme
/// of `p` is replaced per entry.
inline std::vector<SopEstimate> estimate_sop_schemes(const LinkGains& g, const SystemParams& p,
                                                     const std::vector<SchemeId>& schemes, const McConfig& mc) {
  g.validate();
  p.validate();
  std::vector<SystemParams> per_scheme(schemes.size(), p);
  for (std::size_t i = 0; i < schemes.size(); ++i) per_scheme[i].scheme = schemes[i];
  const auto counts = detail::count_trials(g, p.k_antennas, mc, schemes.size(), [&](const ChannelDraw& d, auto& c) {
    for (std::size_t i = 0; i < per_scheme.size(); ++i) {
      if (secrecy_margin(d, g, per_scheme[i]) < per_scheme[i].rate) ++c[i];
    }
  });
  std::vector<SopEstimate> out;
  out.reserve(counts.size());
  for (auto hits : counts) out.push_back(SopEstimate::from_counts(hits, mc.trials));
  return out;
}

enum class SweepAxis { RhoDb, GabDb, GarDb, GrbDb, GabAndGrbDb, KAntennas };

inline std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::RhoDb: return "rho_db";
    case SweepAxis::GabDb: return "gab_db";
    case SweepAxis::GarDb: return "gar_db";
    case SweepAxis::GrbDb: return "grb_db";
    case SweepAxis::GabAndGrbDb: return "gab_and_grb_db";
    case SweepAxis::KAntennas: return "k_antennas";
  }
  return "?";
}

inline SweepAxis parse_axis(std::string_view s) {
  for (SweepAxis a : {SweepAxis::RhoDb, SweepAxis::GabDb, SweepAxis::GarDb, SweepAxis::GrbDb,
                      SweepAxis::GabAndGrbDb, SweepAxis::KAntennas}) {
    if (s == to_string(a)) return a;
  }
  throw config_error("unknown sweep axis '" + std::string(s) + "'");
}

/// Moves (g, p) to position x on `axis`. Gains and rho are in dB.
inline void apply_axis(SweepAxis axis, double x, LinkGains& g, SystemParams& p) {
  switch (axis) {
    case SweepAxis::RhoDb: p.rho = db_to_linear(x); break;
    case SweepAxis::GabDb: g.gamma_ab = db_to_linear(x); break;
    case SweepAxis::GarDb: g.gamma_ar = db_to_linear(x); break;
    case SweepAxis::GrbDb: g.gamma_rb = db_to_linear(x); break;
    case SweepAxis::GabAndGrbDb:
      g.gamma_ab = db_to_linear(x);
      g.gamma_rb = db_to_linear(x);
      break;
    case SweepAxis::KAntennas: {
      const double r = std::round(x);
      if (r < 1.0 || std::abs(r - x) > 1e-9) throw config_error("k_antennas axis needs integer points >= 1");
      p.k_antennas = static_cast<int>(r);
      break;
    }
  }
}

struct SweepPoint {
  double x = 0.0;
  LinkGains gains;
  SystemParams params;
  std::vector<SopEstimate> estimates;  ///< one per requested scheme, same order
};

/// Simulated SOP along an axis for several schemes. At each point every scheme
/// sees the same fading draws.
inline std::vector<SweepPoint> sweep(SweepAxis axis, const std::vector<double>& points, const LinkGains& base_gains,
                                     const SystemParams& base_params, const std::vector<SchemeId>& schemes,
                                     const McConfig& mc) {
  if (schemes.empty()) throw config_error("sweep: no schemes requested");
  std::vector<SweepPoint> out;
  out.reserve(points.size());
  for (double x : points) {
    SweepPoint pt;
    pt.x = x;
    pt.gains = base_gains;
    pt.params = base_params;
    apply_axis(axis, x, pt.gains, pt.params);
    pt.gains.validate();
    pt.params.validate();
    pt.estimates = estimate_sop_schemes(pt.gains, pt.params, schemes, mc);
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace sop
