// Command-line experiment runner: single points, sweeps, figure datasets,
// power optimization and the identity suite. CSV goes to --out or standard
// output; summaries go to standard error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "sop/sop.hpp"

namespace {

enum Exit { kOk = 0, kValidationFailed = 1, kConfigError = 2, kUnsupported = 3 };

struct Options {
  std::string scheme = "DT";
  std::string mode = "full";
  int k = 1;
  double rho_db = 20.0;
  double gab_db = 0.0;
  double gar_db = 0.0;
  double grb_db = 5.0;
  double rate = 0.1;
  std::uint64_t trials = 1'000'000;
  std::uint64_t validate_trials = 200'000;
  std::uint64_t seed = sop::McConfig{}.seed;
  unsigned workers = 0;
  std::string method = "analytic";
  std::string limit;
  std::string out;
  std::string constraint = "per-node";
  double grid_step = 0.2;
  std::uint64_t opt_trials = 100'000;
  std::string axis = "rho_db";
  std::vector<double> points;
  std::vector<std::string> schemes;
  int figure = 1;
  bool debug_paper_t = false;
  int random_points = 10;
};

sop::PointSpec point_from(const Options& o) {
  sop::PointSpec p;
  p.scheme = sop::SchemeId(sop::parse_scheme(o.scheme), sop::parse_mode(o.mode));
  p.k = o.k;
  p.rho_db = o.rho_db;
  p.gab_db = o.gab_db;
  p.gar_db = o.gar_db;
  p.grb_db = o.grb_db;
  p.rate = o.rate;
  return p;
}

sop::McConfig mc_from(const Options& o, std::uint64_t trials) {
  sop::McConfig mc;
  mc.trials = trials;
  mc.seed = o.seed;
  mc.workers = o.workers;
  mc.validate();
  return mc;
}

// "AF" or "AF:select-csi" -> SchemeId.
sop::SchemeId parse_scheme_spec(const std::string& s, const std::string& default_mode) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) return {sop::parse_scheme(s), sop::parse_mode(default_mode)};
  return {sop::parse_scheme(s.substr(0, colon)), sop::parse_mode(s.substr(colon + 1))};
}

void emit(const Options& o, const std::vector<sop::CsvRow>& rows) {
  if (o.out.empty()) {
    sop::write_csv(std::cout, rows);
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw sop::config_error("cannot open output file '" + o.out + "'");
  sop::write_csv(f, rows);
}

int cmd_point(const Options& o) {
  std::optional<sop::Limit> limit;
  if (!o.limit.empty()) limit = sop::parse_limit(o.limit);
  const auto res = sop::run_point(point_from(o), sop::parse_point_method(o.method), mc_from(o, o.trials), limit);
  emit(o, res.rows);
  std::cerr << res.summary;
  return kOk;
}

int cmd_sweep(const Options& o) {
  if (o.points.empty()) throw sop::config_error("sweep: --points is required");
  const sop::SweepAxis axis = sop::parse_axis(o.axis);
  std::vector<sop::SchemeId> schemes;
  if (o.schemes.empty()) {
    schemes.push_back(point_from(o).scheme);
  } else {
    for (const auto& s : o.schemes) schemes.push_back(parse_scheme_spec(s, o.mode));
  }
  sop::PointSpec base = point_from(o);
  const auto result = sop::sweep(axis, o.points, base.gains(), base.params(), schemes, mc_from(o, o.trials));
  std::vector<sop::CsvRow> rows;
  for (const auto& pt : result) {
    sop::PointSpec p = base;
    p.move_to(axis, pt.x);
    for (std::size_t i = 0; i < schemes.size(); ++i) {
      p.scheme = schemes[i];
      rows.push_back(sop::make_row(p, pt.estimates[i]));
    }
  }
  emit(o, rows);
  return kOk;
}

int cmd_figure(const Options& o, bool rate_given, bool points_given) {
  sop::FigureOptions f;
  f.mc = mc_from(o, o.trials);
  f.optimizer_mc = mc_from(o, o.opt_trials);
  f.grid_step = o.grid_step;
  f.constraint = sop::parse_constraint(o.constraint);
  if (rate_given) f.rate = o.rate;
  if (points_given) f.points = o.points;
  f.progress = [](const std::string& s) { std::cerr << s << '\n'; };
  std::cerr << sop::figure_preset(o.figure).caption << '\n';
  emit(o, sop::run_figure(o.figure, f));
  return kOk;
}

int cmd_power_opt(const Options& o) {
  const sop::PointSpec pt = point_from(o);
  const auto r = sop::minimize_sop(pt.gains(), pt.params(), mc_from(o, o.trials), o.grid_step,
                                   sop::parse_constraint(o.constraint));
  emit(o, {sop::make_row(pt, r.full_power), sop::make_row(pt, r.optimized, "optimized")});
  std::cerr << "allocation alice " << sop::format_number(r.allocation.frac_alice) << "  relay "
            << sop::format_number(r.allocation.frac_relay) << "  bob " << sop::format_number(r.allocation.frac_bob_jam)
            << "\nfull power " << sop::format_number(r.full_power.value) << "  optimized "
            << sop::format_number(r.optimized.value) << "  (" << r.evaluations << " evaluations)\n";
  return kOk;
}

int cmd_validate(const Options& o) {
  sop::ValidationOptions v;
  v.mc = mc_from(o, o.trials);
  v.factor_two_root = o.debug_paper_t;
  v.random_points = o.random_points;
  const auto items = sop::validate(v);
  bool ok = true;
  for (const auto& it : items) {
    std::cout << (it.passed ? "PASS " : "FAIL ") << it.name << ": " << it.detail << '\n';
    ok = ok && it.passed;
  }
  return ok ? kOk : kValidationFailed;
}

void add_point_options(CLI::App* app, Options& o) {
  app->add_option("--scheme", o.scheme, "DT, AF or CJ")->capture_default_str();
  app->add_option("--mode", o.mode, "full, select-csi or select-nocsi")->capture_default_str();
  app->add_option("--k", o.k, "relay antennas")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--rho-db", o.rho_db, "transmit SNR in dB")->capture_default_str();
  app->add_option("--gab-db", o.gab_db, "Alice-Bob average gain in dB")->capture_default_str();
  app->add_option("--gar-db", o.gar_db, "Alice-relay average gain in dB")->capture_default_str();
  app->add_option("--grb-db", o.grb_db, "relay-Bob average gain in dB")->capture_default_str();
}

void add_common_options(CLI::App* app, Options& o, std::uint64_t& trials) {
  app->add_option("--rate", o.rate, "target secrecy rate, bits per channel use")->capture_default_str();
  app->add_option("--trials", trials, "Monte Carlo trials")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--seed", o.seed, "Monte Carlo seed")->capture_default_str();
  app->add_option("--workers", o.workers, "worker threads (0: all cores)")->capture_default_str();
  app->add_option("--out", o.out, "CSV output path (default: standard output)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secrecy outage probability of untrusted-relay networks"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key = value configuration file");
  Options o;
  // Shared options live on the root so a flat config file can set them for any
  // subcommand; subcommands fall through to them.
  add_point_options(&app, o);
  add_common_options(&app, o, o.trials);
  app.add_option("--grid-step", o.grid_step, "power grid step in (0, 0.5]")->capture_default_str();
  app.add_option("--constraint", o.constraint, "power constraint: per-node or total")->capture_default_str();

  auto* point = app.add_subcommand("point", "evaluate one operating point")->fallthrough();
  point->add_option("--method", o.method, "analytic, montecarlo, asymptotic or both")->capture_default_str();
  point->add_option("--limit", o.limit, "limit selector for --method asymptotic");

  auto* sweep = app.add_subcommand("sweep", "simulate along one parameter axis")->fallthrough();
  sweep->add_option("--axis", o.axis, "rho_db, gab_db, gar_db, grb_db, gab_and_grb_db or k_antennas")
      ->capture_default_str();
  sweep->add_option("--points", o.points, "axis values")->required();
  sweep->add_option("--schemes", o.schemes, "schemes to compare, e.g. AF CJ:select-csi");

  auto* figure = app.add_subcommand("figure", "emit the dataset of a built-in figure preset")->fallthrough();
  figure->add_option("id", o.figure, "figure number 1..8")->required()->check(CLI::Range(1, 8));
  auto* fig_points = figure->add_option("--points", o.points, "override the axis values");
  figure->add_option("--opt-trials", o.opt_trials, "trials per power-optimizer evaluation")->capture_default_str();

  auto* power = app.add_subcommand("power-opt", "minimize the simulated SOP over node powers")->fallthrough();

  auto* validate = app.add_subcommand("validate", "run the identity and consistency suite")->fallthrough();
  validate->add_flag("--debug-paper-t", o.debug_paper_t, "CJ threshold from the factor-two radical; the R=0 identity should fail");
  validate->add_option("--random-points", o.random_points, "random points per identity")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*point) return cmd_point(o);
    if (*sweep) return cmd_sweep(o);
    if (*figure) return cmd_figure(o, app.count("--rate") > 0, fig_points->count() > 0);
    if (*power) return cmd_power_opt(o);
    if (*validate) {
      if (app.count("--trials") == 0) o.trials = o.validate_trials;
      return cmd_validate(o);
    }
  } catch (const sop::unsupported_error& e) {
    std::cerr << "unsupported: " << e.what() << '\n';
    return kUnsupported;
  } catch (const sop::range_error& e) {
    std::cerr << "unsupported: " << e.what() << '\n';
    return kUnsupported;
  } catch (const sop::config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const sop::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidationFailed;
  }
  return kOk;
}
