#pragma once

// Experiment orchestration behind the command-line tool: single points,
// built-in figure datasets, the identity/consistency suite, and CSV output.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sop/analytic.hpp"
#include "sop/error.hpp"
#include "sop/model.hpp"
#include "sop/montecarlo.hpp"
#include "sop/powerallo.hpp"

namespace sop {

/// One operating point with every gain and the SNR in dB.
struct PointSpec {
  SchemeId scheme{};
  int k = 1;
  double rho_db = 20.0;
  double gab_db = 0.0;
  double gar_db = 0.0;
  double grb_db = 5.0;
  double rate = 0.1;

  LinkGains gains() const { return LinkGains::from_db(gab_db, gar_db, grb_db); }

  SystemParams params() const {
    SystemParams p;
    p.rho = db_to_linear(rho_db);
    p.k_antennas = k;
    p.rate = rate;
    p.scheme = scheme;
    p.validate();
    return p;
  }

  /// Mirror of apply_axis on the dB representation.
  void move_to(SweepAxis axis, double x) {
    switch (axis) {
      case SweepAxis::RhoDb: rho_db = x; break;
      case SweepAxis::GabDb: gab_db = x; break;
      case SweepAxis::GarDb: gar_db = x; break;
      case SweepAxis::GrbDb: grb_db = x; break;
      case SweepAxis::GabAndGrbDb: gab_db = grb_db = x; break;
      case SweepAxis::KAntennas: k = static_cast<int>(std::lround(x)); break;
    }
  }
};

struct CsvRow {
  PointSpec point;
  std::string method;
  double sop = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
};

inline constexpr const char* kCsvHeader = "scheme,mode,K,rho_db,gab_db,gar_db,grb_db,rate,method,sop,stderr,trials";

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline CsvRow make_row(const PointSpec& pt, const SopEstimate& e, std::string method = {}) {
  return {pt, method.empty() ? std::string(to_string(e.method)) : std::move(method), e.value, e.std_error, e.trials};
}

inline void write_csv_row(std::ostream& os, const CsvRow& r) {
  const PointSpec& p = r.point;
  os << to_string(p.scheme.scheme()) << ',' << to_string(p.scheme.mode()) << ',' << p.k << ','
     << format_number(p.rho_db) << ',' << format_number(p.gab_db) << ',' << format_number(p.gar_db) << ','
     << format_number(p.grb_db) << ',' << format_number(p.rate) << ',' << r.method << ',' << format_number(r.sop)
     << ',' << format_number(r.std_error) << ',' << r.trials << '\n';
}

inline void write_csv(std::ostream& os, const std::vector<CsvRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) write_csv_row(os, r);
}

enum class PointMethod { Analytic, MonteCarlo, Asymptotic, Both };

inline PointMethod parse_point_method(std::string_view s) {
  if (s == "analytic") return PointMethod::Analytic;
  if (s == "montecarlo") return PointMethod::MonteCarlo;
  if (s == "asymptotic") return PointMethod::Asymptotic;
  if (s == "both") return PointMethod::Both;
  throw config_error("unknown method '" + std::string(s) + "' (expected analytic, montecarlo, asymptotic or both)");
}

inline Limit parse_limit(std::string_view s) {
  for (int i = 0; i <= static_cast<int>(Limit::CjSelectNoCsiKInf); ++i) {
    const auto l = static_cast<Limit>(i);
    if (s == to_string(l)) return l;
  }
  throw config_error("unknown limit '" + std::string(s) + "'");
}

/// The high-SNR limit that belongs to a scheme, when one exists.
inline std::optional<Limit> default_limit(const SchemeId& s, int k) {
  if (k == 1) {
    switch (s.scheme()) {
      case Scheme::DT: return Limit::DtRhoInf;
      case Scheme::AF: return Limit::AfRhoInf;
      case Scheme::CJ: return Limit::CjRhoInf;
    }
  }
  if (s.scheme() == Scheme::CJ && s.mode() == Mode::FullArray) return Limit::CjMultiRhoInf;
  return std::nullopt;
}

inline SopEstimate evaluate_limit(const LinkGains& g, const SystemParams& p, Limit which, const McConfig& mc) {
  if (which == Limit::CjMultiRhoInf) return cj_multi_rho_inf_limit(g, p, mc);
  return SopEstimate::exact(limits(g, p, which), Method::Asymptotic);
}

struct PointResult {
  std::vector<CsvRow> rows;
  std::string summary;  ///< human-readable, for standard error
};

inline PointResult run_point(const PointSpec& pt, PointMethod method, const McConfig& mc,
                             std::optional<Limit> limit = std::nullopt) {
  const LinkGains g = pt.gains();
  const SystemParams p = pt.params();
  PointResult out;
  std::ostringstream msg;
  auto analytic = [&] {
    if (!has_closed_form(p)) {
      throw unsupported_error(std::string("no closed form for ") + std::string(to_string(p.scheme.scheme())) + " " +
                              std::string(to_string(p.scheme.mode())) + " with K = " + std::to_string(p.k_antennas) +
                              "; use --method montecarlo");
    }
    return SopEstimate::exact(analytic_sop(g, p));
  };
  switch (method) {
    case PointMethod::Analytic:
      out.rows.push_back(make_row(pt, analytic()));
      break;
    case PointMethod::MonteCarlo:
      out.rows.push_back(make_row(pt, estimate_sop(g, p, mc)));
      break;
    case PointMethod::Asymptotic: {
      const auto which = limit ? limit : default_limit(p.scheme, p.k_antennas);
      if (!which) {
        throw unsupported_error("no default high-SNR limit for this scheme and K; pass --limit");
      }
      out.rows.push_back(make_row(pt, evaluate_limit(g, p, *which, mc)));
      msg << "limit " << to_string(*which) << '\n';
      break;
    }
    case PointMethod::Both: {
      const SopEstimate a = analytic();
      const SopEstimate m = estimate_sop(g, p, mc);
      out.rows.push_back(make_row(pt, a));
      out.rows.push_back(make_row(pt, m));
      const double delta = std::abs(a.value - m.value);
      msg << "analytic " << format_number(a.value) << "  montecarlo " << format_number(m.value) << " +- "
          << format_number(m.std_error) << "  |delta|/stderr "
          << (m.std_error > 0.0 ? format_number(delta / m.std_error) : std::string("inf")) << '\n';
      break;
    }
  }
  for (const auto& r : out.rows) {
    if (r.method == "montecarlo" || (r.method == "asymptotic" && r.trials > 0)) {
      const SopEstimate e =
          SopEstimate::from_counts(static_cast<std::uint64_t>(std::llround(r.sop * r.trials)), r.trials);
      msg << "95% Wilson interval [" << format_number(e.wilson_lo) << ", " << format_number(e.wilson_hi) << "]\n";
    }
  }
  out.summary = msg.str();
  return out;
}

struct Curve {
  Curve(SchemeId s, bool with_optimized = false, std::vector<Limit> limits = {})
      : scheme(s), optimized(with_optimized), asymptotes(std::move(limits)) {}

  SchemeId scheme;
  bool analytic = true;
  bool montecarlo = true;
  bool optimized = false;
  std::vector<Limit> asymptotes;
};

struct FigurePreset {
  int id = 0;
  std::string caption;
  SweepAxis axis = SweepAxis::RhoDb;
  std::vector<double> points;
  PointSpec base;
  std::vector<Curve> curves;
};

namespace detail {

inline std::vector<double> linspace_step(double lo, double hi, double step) {
  std::vector<double> v;
  const int n = static_cast<int>(std::lround((hi - lo) / step));
  for (int i = 0; i <= n; ++i) v.push_back(lo + i * step);
  return v;
}

inline PointSpec base_point(double gab, double gar, double grb, double rho, int k) {
  PointSpec p;
  p.gab_db = gab;
  p.gar_db = gar;
  p.grb_db = grb;
  p.rho_db = rho;
  p.k = k;
  return p;
}

}  // namespace detail

inline FigurePreset figure_preset(int id) {
  using detail::base_point;
  using detail::linspace_step;
  const SchemeId dt{Scheme::DT, Mode::FullArray};
  const SchemeId af{Scheme::AF, Mode::FullArray};
  const SchemeId cj{Scheme::CJ, Mode::FullArray};
  FigurePreset f;
  f.id = id;
  switch (id) {
    case 1:
      f.caption = "SOP vs rho, single-antenna relay, gab = gar = 0 dB, grb = 5 dB";
      f.axis = SweepAxis::RhoDb;
      f.points = linspace_step(0, 40, 2.5);
      f.base = base_point(0, 0, 5, 0, 1);
      f.curves = {{dt}, {af, true}, {cj, true}};
      break;
    case 2:
      f.caption = "SOP vs grb, single-antenna relay, gab = 5 dB, gar = 0 dB, rho = 15 dB";
      f.axis = SweepAxis::GrbDb;
      f.points = linspace_step(-10, 40, 5);
      f.base = base_point(5, 0, 0, 15, 1);
      f.curves = {{dt}, {af, false, {Limit::AfGrbInf}}, {cj, false, {Limit::CjGrbInf}}};
      break;
    case 3:
      f.caption = "SOP vs gar, single-antenna relay, gab = 0 dB, grb = 5 dB, rho = 20 dB";
      f.axis = SweepAxis::GarDb;
      f.points = linspace_step(-30, 30, 5);
      f.base = base_point(0, 0, 5, 20, 1);
      f.curves = {{dt, false, {Limit::DtGarZero}}, {af, false, {Limit::AfGarZero}}, {cj}};
      break;
    case 4:
      f.caption = "SOP vs gab, single-antenna relay, gar = 2 dB, grb = 10 dB, rho = 10 dB";
      f.axis = SweepAxis::GabDb;
      f.points = linspace_step(-10, 30, 5);
      f.base = base_point(0, 2, 10, 10, 1);
      f.curves = {{dt}, {af}, {cj}};
      break;
    case 5:
      f.caption = "SOP vs gab = grb, single-antenna relay, gar = 2 dB, rho = 10 dB";
      f.axis = SweepAxis::GabAndGrbDb;
      f.points = linspace_step(-10, 40, 5);
      f.base = base_point(0, 2, 0, 10, 1);
      f.curves = {{dt}, {af}, {cj, false, {Limit::CjGrbInf}}};
      break;
    case 6:
      f.caption = "SOP vs K, MRC/MRT relay, gab = 5 dB, gar = 0 dB, grb = 10 dB, rho = 30 dB";
      f.axis = SweepAxis::KAntennas;
      f.points = linspace_step(1, 10, 1);
      f.base = base_point(5, 0, 10, 30, 1);
      f.curves = {{dt}, {af, true}, {cj, true}};
      break;
    case 7:
      f.caption = "SOP vs rho, K = 6 with antenna selection, gab = 5 dB, gar = 0 dB, grb = 5 dB";
      f.axis = SweepAxis::RhoDb;
      f.points = linspace_step(0, 40, 2.5);
      f.base = base_point(5, 0, 5, 0, 6);
      f.curves = {{SchemeId{Scheme::DT, Mode::SelectWithCsi}},
                  {SchemeId{Scheme::AF, Mode::SelectWithCsi}},
                  {SchemeId{Scheme::AF, Mode::SelectNoCsi}},
                  {SchemeId{Scheme::CJ, Mode::SelectWithCsi}},
                  {SchemeId{Scheme::CJ, Mode::SelectNoCsi}}};
      break;
    case 8:
      f.caption = "SOP vs K, beamforming and antenna selection, gab = gar = 0 dB, grb = 2 dB, rho = 12 dB";
      f.axis = SweepAxis::KAntennas;
      f.points = linspace_step(1, 10, 1);
      f.base = base_point(0, 0, 2, 12, 1);
      f.curves = {{dt},
                  {SchemeId{Scheme::DT, Mode::SelectWithCsi}},
                  {af},
                  {SchemeId{Scheme::AF, Mode::SelectWithCsi}},
                  {SchemeId{Scheme::AF, Mode::SelectNoCsi}},
                  {cj},
                  {SchemeId{Scheme::CJ, Mode::SelectWithCsi}},
                  {SchemeId{Scheme::CJ, Mode::SelectNoCsi}}};
      break;
    default:
      throw config_error("unknown figure " + std::to_string(id) + " (expected 1..8)");
  }
  return f;
}

struct FigureOptions {
  McConfig mc{};
  McConfig optimizer_mc{.trials = 100'000};
  double grid_step = 0.2;
  PowerConstraint constraint = PowerConstraint::PerNode;
  std::optional<double> rate;
  std::optional<std::vector<double>> points;
  std::function<void(const std::string&)> progress;
};

/// Full dataset for a figure: analytic values where closed forms exist,
/// simulated values on common random numbers, overlaid limits and
/// power-optimized curves where the figure shows them.
inline std::vector<CsvRow> run_figure(int id, const FigureOptions& opt) {
  FigurePreset f = figure_preset(id);
  if (opt.rate) f.base.rate = *opt.rate;
  if (opt.points) f.points = *opt.points;
  std::vector<CsvRow> rows;
  std::vector<SchemeId> simulated;
  for (const auto& c : f.curves) {
    if (c.montecarlo) simulated.push_back(c.scheme);
  }
  for (double x : f.points) {
    PointSpec pt = f.base;
    pt.move_to(f.axis, x);
    const LinkGains g = pt.gains();
    SystemParams p = pt.params();
    if (opt.progress) opt.progress("figure " + std::to_string(id) + ": " + std::string(to_string(f.axis)) + " = " + format_number(x));
    std::vector<SopEstimate> mc_values;
    if (!simulated.empty()) mc_values = estimate_sop_schemes(g, p, simulated, opt.mc);
    std::size_t mc_index = 0;
    for (const auto& c : f.curves) {
      PointSpec cp = pt;
      cp.scheme = c.scheme;
      SystemParams cparams = p;
      cparams.scheme = c.scheme;
      if (c.analytic && has_closed_form(cparams)) rows.push_back(make_row(cp, SopEstimate::exact(analytic_sop(g, cparams))));
      if (c.montecarlo) rows.push_back(make_row(cp, mc_values[mc_index++]));
      for (Limit l : c.asymptotes) rows.push_back(make_row(cp, evaluate_limit(g, cparams, l, opt.mc)));
      if (c.optimized) {
        const PowerOptResult r = minimize_sop(g, cparams, opt.optimizer_mc, opt.grid_step, opt.constraint);
        rows.push_back(make_row(cp, r.optimized, "optimized"));
      }
    }
  }
  return rows;
}

struct ValidationItem {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationOptions {
  McConfig mc{.trials = 200'000};
  bool factor_two_root = false;  ///< CJ threshold from the factor-two radical (expected to fail)
  int random_points = 10;
  std::uint64_t point_seed = 7;
};

inline std::vector<ValidationItem> validate(const ValidationOptions& opt) {
  std::vector<ValidationItem> items;
  auto record = [&](std::string name, double err, double tol) {
    std::ostringstream d;
    d << "error " << format_number(err) << " (tolerance " << format_number(tol) << ")";
    items.push_back({std::move(name), std::isfinite(err) && err <= tol, d.str()});
  };
  auto guarded = [&](const std::string& name, double tol, const std::function<double()>& err) {
    try {
      record(name, err(), tol);
    } catch (const std::exception& e) {
      items.push_back({name, false, std::string("threw: ") + e.what()});
    }
  };
  const RootForm root = opt.factor_two_root ? RootForm::FactorTwo : RootForm::Exact;

  std::mt19937_64 rng(opt.point_seed);
  std::uniform_real_distribution<double> gain_db(-10.0, 10.0);
  std::uniform_real_distribution<double> rho_db(0.0, 30.0);
  std::uniform_real_distribution<double> rate_u(0.05, 1.0);
  struct Point {
    LinkGains g;
    SystemParams p;
  };
  std::vector<Point> pts;
  for (int i = 0; i < opt.random_points; ++i) {
    Point pt{LinkGains::from_db(gain_db(rng), gain_db(rng), gain_db(rng)), {}};
    pt.p.rho = db_to_linear(rho_db(rng));
    pt.p.rate = rate_u(rng);
    pts.push_back(pt);
  }

  auto worst = [&](const std::function<double(const Point&)>& f) {
    double e = 0.0;
    for (const auto& pt : pts) e = std::max(e, f(pt));
    return e;
  };
  auto at_rate_zero = [](Point pt) {
    pt.p.rate = 0.0;
    return pt;
  };

  guarded("complement R=0: DT outage vs positive secrecy", 1e-9, [&] {
    return worst([&](const Point& q) { const Point z = at_rate_zero(q); return std::abs(sop_dt_single(z.g, z.p) - (1.0 - p_pos_dt(z.g))); });
  });
  guarded("complement R=0: AF outage vs positive secrecy", 1e-9, [&] {
    return worst([&](const Point& q) { const Point z = at_rate_zero(q); return std::abs(sop_af_single(z.g, z.p) - (1.0 - p_pos_af(z.g, z.p))); });
  });
  guarded("complement R=0: CJ outage vs positive secrecy", 1e-9, [&] {
    return worst([&](const Point& q) {
      const Point z = at_rate_zero(q);
      return std::abs(sop_cj_single(z.g, z.p, {}, root) - (1.0 - p_pos_cj(z.g, z.p)));
    });
  });
  guarded("CJ threshold is the zero of phi", 1e-9, [&] {
    return worst([&](const Point& q) {
      const double t = cj_threshold(q.g, q.p.rho, q.p.rate, root);
      return std::abs(cj_phi(t, q.g, q.p.rho, q.p.rate)) / (q.p.rho + 1.0);
    });
  });

  auto k1 = [&](double tol, const std::string& name, const std::function<double(const LinkGains&, const SystemParams&)>& f,
                const std::function<double(const LinkGains&, const SystemParams&)>& ref) {
    guarded(name, tol, [&] { return worst([&](const Point& q) { return std::abs(f(q.g, q.p) - ref(q.g, q.p)); }); });
  };
  auto cj21 = [&](const LinkGains& g, const SystemParams& p) { return sop_cj_single(g, p, {}, root); };
  k1(1e-9, "K=1: DT full array vs single antenna", sop_dt_multi, sop_dt_single);
  k1(1e-9, "K=1: DT selection vs single antenna", sop_dt_select, sop_dt_single);
  k1(1e-6, "K=1: AF full array vs single antenna", [](const LinkGains& g, const SystemParams& p) { return sop_af_multi(g, p); },
     sop_af_single);
  k1(1e-9, "K=1: AF selection with CSI vs single antenna", sop_af_select_csi, sop_af_single);
  k1(1e-9, "K=1: AF selection without CSI vs single antenna", sop_af_select_nocsi, sop_af_single);
  k1(1e-9, "K=1: CJ selection without CSI vs single antenna",
     [](const LinkGains& g, const SystemParams& p) { return sop_cj_select_nocsi(g, p); }, cj21);

  guarded("AF selection with CSI (indices 0..K-1) vs simulation", 1.0, [&] {
    const LinkGains g = LinkGains::from_db(5, 0, 5);
    SystemParams p;
    p.rho = db_to_linear(20);
    p.k_antennas = 6;
    p.scheme = {Scheme::AF, Mode::SelectWithCsi};
    const double a = sop_af_select_csi(g, p);
    const SopEstimate m = estimate_sop(g, p, opt.mc);
    // Ratio of the discrepancy to its allowance; passes at <= 1.
    return std::abs(a - m.value) / std::max(4.0 * m.std_error, 0.005);
  });
  return items;
}

}  // namespace sop
