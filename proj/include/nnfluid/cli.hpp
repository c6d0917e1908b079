#pragma once

// Command-line front end: thresholds, verify, simulate, certify, monitor.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "nnfluid/io.hpp"

namespace nnfluid {

namespace cli_detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

inline json thresholds_json(const ThresholdSet& t) {
  return {{"q0", t.q0},
          {"q1", t.q1},
          {"K", optional_number(t.K)},
          {"K1", optional_number(t.K1)},
          {"mhd_lo", optional_number(t.mhd_lo)}};
}

struct ThresholdArgs {
  int n = 3;
  double gamma = 1.4;
  std::optional<double> q;
  double mass = 1.0;
  double A = 1.0;
  double momentum = 1.0;
  bool mhd = false;
  bool as_json = false;
};

inline int run_thresholds(const ThresholdArgs& a, std::ostream& out, std::ostream& err) {
  if (a.n < 2) throw DomainError("n must be at least 2");
  if (a.q && !(*a.q < a.n)) err << "warning: q >= n, the Sobolev constant K is undefined\n";
  const ThresholdSet t = threshold_set(a.n, a.gamma, a.q, a.mass, a.A);
  std::optional<AdmissibilityReport> adm;
  if (a.q) {
    ExponentParams p;
    p.n = a.n;
    p.gamma = a.gamma;
    p.q = *a.q;
    p.A = a.A;
    adm = admissibility(p, a.momentum, a.mhd);
  }
  if (a.as_json) {
    json j = thresholds_json(t);
    if (adm) j = {{"thresholds", j}, {"admissibility", to_json(*adm)}};
    out << j.dump(2) << '\n';
    return 0;
  }
  out << "q0 = " << fmt(t.q0) << '\n';
  out << "q1 = " << fmt(t.q1) << '\n';
  if (t.mhd_lo) out << "mhd_lo = " << fmt(*t.mhd_lo) << '\n';
  if (t.K) out << "K = " << fmt(*t.K) << '\n';
  if (t.K1) out << "K1 = " << fmt(*t.K1) << '\n';
  if (adm) {
    out << "theorem_applies = " << (adm->theorem_applies ? "true" : "false") << " ("
        << to_string(adm->which_theorem) << ")\n";
    if (!adm->failed_hypothesis.empty()) out << "failed_hypothesis = " << adm->failed_hypothesis << '\n';
  }
  return 0;
}

struct VerifyArgs {
  std::string config;
  std::string check;
  bool all = false;
  std::string gradient;
};

inline GradientChoice gradient_from_string(const std::string& s) {
  if (s == "full") return GradientChoice::Full;
  if (s == "symmetric") return GradientChoice::Symmetric;
  throw ConfigError("--gradient must be 'full' or 'symmetric'");
}

inline InequalityReport run_check(InequalityName name, const RunConfig& rc, const FluidState& s,
                                  const std::string& gradient) {
  const ExponentParams& p = rc.sim.params;
  const InequalityTolerances& tol = rc.inequality_tol;
  const double m = integral(s.rho);
  switch (name) {
    case InequalityName::Sobolev10:
      return verify_sobolev10(s.u, p.q, gradient.empty() ? GradientChoice::Full : gradient_from_string(gradient),
                              tol.discretization);
    case InequalityName::Holder11:
      return verify_holder11(s.rho, rc.sigma.value_or(0.5 * (1.0 + p.gamma)), p.gamma, tol.algebraic);
    case InequalityName::Holder13:
      return verify_holder13(s.rho, s.u, p.q, tol.algebraic);
    case InequalityName::Jensen14:
      return verify_jensen14(s.rho, p.q, p.gamma, p.A, m, tol.algebraic);
    case InequalityName::Momentum16:
      return verify_momentum16(s.rho, s.u, p, tol.algebraic);
    case InequalityName::DissipationBound:
      return dissipation_lower_bound(
          s, p, m, gradient.empty() ? GradientChoice::Symmetric : gradient_from_string(gradient),
          tol.composite);
  }
  throw DomainError("unknown check");
}

inline int run_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  const RunConfig rc = parse_config_file(a.config);
  const FluidState s = initial_data(rc.sim.initial, rc.sim.grid, rc.sim.floor_value());
  if (a.all == !a.check.empty()) throw ConfigError("give exactly one of --check <name> or --all");
  if (!a.all) {
    InequalityName name;
    try {
      name = inequality_from_string(a.check);
    } catch (const std::exception&) {
      throw ConfigError("--check: unknown inequality '" + a.check + "'");
    }
    InequalityReport r;
    try {
      r = run_check(name, rc, s, a.gradient);
    } catch (const DomainError& e) {
      err << "not applicable: " << e.what() << '\n';
      return exit_code(Disposition::HypothesisFailed);
    }
    out << to_json(r).dump(2) << '\n';
    return r.passed ? 0 : exit_code(Disposition::MonitorViolation);
  }
  json arr = json::array();
  bool ok = true;
  for (InequalityName name : {InequalityName::Sobolev10, InequalityName::Holder11, InequalityName::Holder13,
                              InequalityName::Jensen14, InequalityName::Momentum16,
                              InequalityName::DissipationBound}) {
    try {
      const InequalityReport r = run_check(name, rc, s, a.gradient);
      ok = ok && r.passed;
      arr.push_back(to_json(r));
    } catch (const DomainError& e) {
      arr.push_back({{"name", to_string(name)}, {"skipped", e.what()}});
    }
  }
  out << arr.dump(2) << '\n';
  return ok ? 0 : exit_code(Disposition::MonitorViolation);
}

inline BlowupCertificate certificate_for(const RunConfig& rc, const FluidState& s0) {
  BlowupCertificate c = certify(rc.sim.params, s0, rc.sim.mhd());
  c.config_hash = config_hash(rc);
  c.support_limit = rc.sim.support_margin * rc.sim.grid.half_width();
  return c;
}

struct SimulateArgs {
  std::string config;
  std::string out;
  int threads = 0;
};

inline void set_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

inline int run_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  const auto start = std::chrono::steady_clock::now();
  const RunConfig rc = parse_config_file(a.config);
  for (const auto& w : rc.warnings) err << "warning: " << w << '\n';
  set_threads(a.threads);
  const fs::path dir(a.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir.string() + ": " + ec.message());

  const FluidState s0 = initial_data(rc.sim.initial, rc.sim.grid, rc.sim.floor_value());
  const RunResult res = run(rc.sim, s0);
  const BlowupCertificate cert = certificate_for(rc, s0);
  const MonitorReport mon = monitor(res.series, cert, cert.params, rc.monitor_tol);
  const RunOutcome outcome{res.stop, res.stop_time};
  const Disposition d = disposition(cert, &mon, res.stop);

  std::vector<std::string> outputs{"series.csv", "cert.json", "monitor.json", "report.json",
                                   "report.txt", "manifest.json"};
  write_series_csv(res.series, rc.sim.grid.dim(), dir / "series.csv");
  write_text(dir / "cert.json", to_json(cert).dump(2) + "\n");
  write_text(dir / "monitor.json", to_json(mon).dump(2) + "\n");
  write_report(cert, &mon, outcome, dir);
  if (!res.snapshots.empty()) {
    fs::create_directories(dir / "snapshots");
    for (std::size_t i = 0; i < res.snapshots.size(); ++i) {
      char name[40];
      std::snprintf(name, sizeof name, "snap_%06zu.bin", i);
      write_snapshot(res.snapshots[i], dir / "snapshots" / name);
      outputs.push_back(std::string("snapshots/") + name);
    }
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const json manifest = {{"tool", "nnfluid"},
                         {"version", kToolVersion},
                         {"config", serialize_config(rc)},
                         {"config_hash", cert.config_hash},
                         {"outputs", outputs},
                         {"wall_seconds", wall},
                         {"steps", res.steps},
                         {"clamps", res.clamps},
                         {"stop", to_string(res.stop)},
                         {"stop_time", res.stop_time},
                         {"disposition", to_string(d)}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  out << report_summary(cert, &mon, outcome);
  return exit_code(d);
}

inline int run_certify(const std::string& config, const std::string& out_path, std::ostream& out,
                       std::ostream& err) {
  const RunConfig rc = parse_config_file(config);
  const ExponentParams& p = rc.sim.params;
  if (!(p.q < p.n)) throw ConfigError("config.model.q: certify needs q < n");
  for (const auto& w : rc.warnings) err << "warning: " << w << '\n';
  const FluidState s0 = initial_data(rc.sim.initial, rc.sim.grid, rc.sim.floor_value());
  const BlowupCertificate cert = certificate_for(rc, s0);
  const std::string text = to_json(cert).dump(2) + "\n";
  if (!out_path.empty()) write_text(out_path, text);
  out << text;
  if (!cert.certified()) err << "no certificate: " << cert.reason << '\n';
  return exit_code(disposition(cert, nullptr));
}

struct MonitorArgs {
  std::string series;
  std::string cert;
  std::string manifest;
  std::string out;
};

inline int run_monitor(const MonitorArgs& a, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  const TimeSeries ts = read_series_csv(a.series);
  json cj;
  try {
    cj = json::parse(read_text(a.cert));
  } catch (const json::parse_error& e) {
    throw IoError(a.cert + ": invalid JSON: " + e.what());
  }
  const BlowupCertificate cert = certificate_from_json(cj);
  MonitorTolerances tol;
  RunOutcome outcome;
  const fs::path manifest_path =
      a.manifest.empty() ? fs::path(a.series).parent_path() / "manifest.json" : fs::path(a.manifest);
  if (fs::exists(manifest_path)) {
    const json man = json::parse(read_text(manifest_path));
    const std::string hash = man.value("config_hash", "");
    if (hash != cert.config_hash)
      throw ConfigError("series/certificate mismatch: config hash " + hash + " vs " + cert.config_hash);
    if (man.contains("config")) tol = parse_config(man.at("config")).monitor_tol;
    const std::string stop = man.value("stop", "");
    for (StopReason r : {StopReason::Completed, StopReason::NumericalBreakdown,
                         StopReason::DomainExhausted, StopReason::StepLimit})
      if (stop == to_string(r)) outcome.stop = r;
    outcome.stop_time = man.value("stop_time", 0.0);
  } else if (!a.manifest.empty()) {
    throw IoError(manifest_path.string() + ": not found");
  } else {
    err << "warning: no manifest next to the series; config hash not checked\n";
  }
  const MonitorReport mon = monitor(ts, cert, cert.params, tol);
  if (!a.out.empty()) write_report(cert, &mon, outcome, a.out);
  out << to_json(mon).dump(2) << '\n';
  return exit_code(disposition(cert, &mon, outcome.stop));
}

}  // namespace cli_detail

/// Runs one subcommand; returns the process exit code.
inline int dispatch(std::vector<std::string> args, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  using namespace cli_detail;
  CLI::App app{"nnfluid: blow-up certificates for compressible non-Newtonian fluids"};
  app.name("nnfluid");
  app.require_subcommand(1);

  ThresholdArgs ta;
  double q_value = 0.0;
  auto* th = app.add_subcommand("thresholds", "critical exponents and constants");
  th->add_option("--n", ta.n, "spatial dimension")->required();
  th->add_option("--gamma", ta.gamma, "heat ratio")->required();
  auto* q_opt = th->add_option("--q", q_value, "coercivity exponent");
  th->add_option("--mass", ta.mass, "total mass for K1")->capture_default_str();
  th->add_option("--A", ta.A, "pressure coefficient")->capture_default_str();
  th->add_option("--momentum", ta.momentum, "|P| used by the admissibility report")->capture_default_str();
  th->add_flag("--mhd", ta.mhd, "use the MHD theorem range");
  th->add_flag("--json", ta.as_json, "JSON output");

  VerifyArgs va;
  auto* ve = app.add_subcommand("verify", "check inequalities on the configured initial data");
  ve->add_option("--config", va.config, "run config")->required();
  ve->add_option("--check", va.check, "Sobolev10|Holder11|Holder13|Jensen14|Momentum16|DissipationBound");
  ve->add_flag("--all", va.all, "run every check");
  ve->add_option("--gradient", va.gradient, "full|symmetric");

  SimulateArgs sa;
  auto* si = app.add_subcommand("simulate", "run the solver and monitor");
  si->add_option("--config", sa.config, "run config")->required();
  si->add_option("--out", sa.out, "output directory")->required();
  si->add_option("--threads", sa.threads, "worker threads (0 = default)");

  std::string cert_config, cert_out;
  auto* ce = app.add_subcommand("certify", "certificate from the initial data only");
  ce->add_option("--config", cert_config, "run config")->required();
  ce->add_option("--out", cert_out, "write cert JSON here");

  MonitorArgs ma;
  auto* mo = app.add_subcommand("monitor", "replay a recorded series against a certificate");
  mo->add_option("--series", ma.series, "series.csv")->required();
  mo->add_option("--cert", ma.cert, "cert.json")->required();
  mo->add_option("--manifest", ma.manifest, "manifest.json (default: next to the series)");
  mo->add_option("--out", ma.out, "write report.json and report.txt here");

  if (args.empty()) {
    err << app.help();
    return 1;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (th->parsed()) {
      if (q_opt->count() > 0) ta.q = q_value;
      return run_thresholds(ta, out, err);
    }
    if (ve->parsed()) return run_verify(va, out, err);
    if (si->parsed()) return run_simulate(sa, out, err);
    if (ce->parsed()) return run_certify(cert_config, cert_out, out, err);
    if (mo->parsed()) return run_monitor(ma, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  err << app.help();
  return 1;
}

inline int dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(std::move(args));
}

}  // namespace nnfluid
