// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nnfluid/cli.hpp"

using namespace nnfluid;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Run parameters shared by the flow criteria.
constexpr double kL = 8.0;
constexpr double kNu = 0.2;
constexpr double kA = 0.05;
constexpr double kGamma = 1.4;
constexpr double kQ = 2.5;

SimConfig flow_config(int n, int cells, double t_end) {
  SimConfig c;
  c.grid = make_grid(n, cells, kL);
  c.model = {PowerLaw{kNu, kQ, 0.0}, {kA, kGamma}};
  c.params = {n, kGamma, kA, kNu, kQ, 0.0};
  c.initial.rho_ambient = 0.01;
  c.initial.velocity_width = 0.6;
  c.initial.U0 = 0.5;
  c.t_end = t_end;
  return c;
}

BlowupCertificate run_certificate(const SimConfig& c) {
  const FluidState s0 = initial_data(c.initial, c.grid, c.floor_value());
  BlowupCertificate cert = certify(c.params, s0, c.mhd());
  cert.support_limit = c.support_margin * c.grid.half_width();
  return cert;
}

// Fields shared between criteria; each is computed once.
struct Runs {
  std::optional<RunResult> fluid2d, fluid3d;
  const RunResult& f2() {
    if (!fluid2d) fluid2d = run(flow_config(2, 128, 0.3));
    return *fluid2d;
  }
  const RunResult& f3() {
    if (!fluid3d) fluid3d = run(flow_config(3, 64, 0.3));
    return *fluid3d;
  }
} runs;

ScalarField random_density(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  ScalarField rho(g);
  const double scale = std::exp(4.0 * U(rng) - 2.0);
  for (double& v : rho.values()) v = scale * std::pow(U(rng), 3.0);
  return rho;
}

VectorField random_velocity(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  VectorField u(g);
  const Vec3 drift{N(rng), N(rng), N(rng)};
  for (int c = 0; c < g.dim(); ++c)
    for (double& v : u.comp(c)) v = drift[c] + N(rng);
  return u;
}

double rel_slack(const InequalityReport& r) {
  return r.slack / std::max({std::abs(r.lhs), std::abs(r.rhs), 1e-300});
}

Outcome thresholds_identities() {
  Outcome o;
  double worst = 0.0;
  for (int k = 1; k <= 50; ++k) {
    const double g = 1.0 + 4.0 * k / 50.0;
    worst = std::max(worst, std::abs(q0(3, g) - 6.0 * g / (5.0 * g - 3.0)));
  }
  if (worst > 1e-12) o.pass = false;
  int bad_order = 0, bad_c15 = 0;
  for (int n = 2; n <= 10; ++n)
    for (int k = 0; k <= 179; ++k) {
      const double g = 1.05 + 0.05 * k;
      const double a = q0(n, g), b = q1(n, g);
      if (!(b < a && a < n)) ++bad_order;
      if (condition15_value(n, g, a) < 1.0 - 1e-12) ++bad_c15;
    }
  if (bad_order || bad_c15) o.pass = false;
  o.detail = "max |q0 - 6g/(5g-3)| = " + num(worst) + ", ordering failures " +
             std::to_string(bad_order) + ", condition failures " + std::to_string(bad_c15);
  return o;
}

Outcome k1_soundness() {
  std::mt19937_64 rng(20261018);
  const Grid g = make_grid(3, 32, 2.0);
  const ExponentParams p{3, kGamma, 1.0, 1.0, kQ, 0.0};
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100; ++i) {
    const ScalarField rho = random_density(g, rng);
    const VectorField u = random_velocity(g, rng);
    worst = std::min(worst, rel_slack(verify_momentum16(rho, u, p)));
  }
  return {worst >= -1e-10, "min relative slack " + num(worst)};
}

Outcome exact_inequalities() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const Grid g = make_grid(3, 16, 1.5);
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100; ++i) {
    const ScalarField rho = random_density(g, rng);
    const VectorField u = random_velocity(g, rng);
    const double gamma = 1.1 + 3.0 * U(rng);
    const double sigma = 1.0 + (gamma - 1.0) * (0.05 + 0.9 * U(rng));
    worst = std::min(worst, rel_slack(verify_holder11(rho, sigma, gamma)));
    worst = std::min(worst, rel_slack(verify_holder13(rho, u, 1.2 + 1.7 * U(rng))));
    worst = std::min(worst, rel_slack(verify_jensen14(rho, kQ, kGamma, 1.0, integral(rho))));
  }
  // unit-volume box, constant fields: every inequality is an identity
  const Grid unit = make_grid(3, 16, 0.5);
  const ScalarField rho(unit, 0.7);
  VectorField u(unit);
  for (int c = 0; c < 3; ++c)
    for (double& v : u.comp(c)) v = 0.3 * (c + 1);
  const double eq = std::max({std::abs(verify_holder11(rho, 1.2, kGamma).slack),
                              std::abs(verify_holder13(rho, u, kQ).slack),
                              std::abs(verify_jensen14(rho, kQ, kGamma, 1.0, integral(rho)).slack)});
  return {worst >= -1e-10 && eq <= 1e-12,
          "min relative slack " + num(worst) + ", equality |slack| " + num(eq)};
}

Outcome sobolev() {
  Outcome o;
  auto bump = [](const Grid& g) {
    return sample_vector(g, [n = g.dim()](const Vec3& x) {
      double r2 = 0.0;
      for (int a = 0; a < n; ++a) r2 += x[a] * x[a];
      const double e = std::exp(-r2);
      return Vec3{e, 0.5 * e, n == 3 ? -0.25 * e : 0.0};
    });
  };
  auto check = [&](int n, int cells, double q) {
    const InequalityReport r = verify_sobolev10(bump(make_grid(n, cells, 6.0)), q);
    if (r.slack < 0.0) o.pass = false;
    o.detail += std::to_string(n) + "D " + std::to_string(cells) + " q=" + num(q) +
                " slack " + num(r.slack) + "; ";
  };
  for (int c : {64, 128, 256}) check(2, c, 1.5);
  for (double q : {2.0, 2.5})
    for (int c : {32, 64}) check(3, c, q);
  return o;
}

Outcome conservation() {
  const RunResult& r = runs.f2();
  const TimeSeries& ts = r.series;
  const EnergyBreakdown& e0 = ts.breakdowns.front();
  double dm = 0.0, dp = 0.0, rise = -std::numeric_limits<double>::infinity();
  const double p_scale = std::max(e0.momentum_norm(), std::sqrt(2.0 * e0.m * e0.total));
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const EnergyBreakdown& e = ts.breakdowns[k];
    dm = std::max(dm, std::abs(e.m - e0.m) / e0.m);
    dp = std::max(dp, std::hypot(e.P[0] - e0.P[0], e.P[1] - e0.P[1]) / p_scale);
    if (k > 0) rise = std::max(rise, (e.total - ts.breakdowns[k - 1].total) / e0.total);
  }
  const bool ok = r.stop == StopReason::Completed && r.clamps == 0 && dm <= 1e-6 && dp <= 1e-6 &&
                  rise <= 1e-10;
  return {ok, std::string("stop ") + to_string(r.stop) + ", records " + std::to_string(ts.size()) +
                  ", mass drift " + num(dm) + ", momentum drift " + num(dp) +
                  ", max energy rise/E0 " + num(rise) + ", clamps " + std::to_string(r.clamps)};
}

Outcome energy_rate() {
  Outcome o;
  auto fraction = [&](const SimConfig& c, const RunResult& r, const std::string& label) {
    const MonitorReport m = monitor(r.series, run_certificate(c), c.params);
    if (m.energy_rate_checked == 0 || m.energy_rate_fraction() < 0.99) o.pass = false;
    o.detail += label + " " + std::to_string(m.energy_rate_passed) + "/" +
                std::to_string(m.energy_rate_checked) + "; ";
  };
  fraction(flow_config(2, 128, 0.3), runs.f2(), "fluid 2D");
  fraction(flow_config(3, 64, 0.3), runs.f3(), "fluid 3D");

  SimConfig c = flow_config(3, 64, 0.3);
  c.initial.name = "mhd_loop";
  c.initial.B0 = 0.2;
  c.params.eta = 0.01;
  const RunResult r = run(c);
  if (r.stop != StopReason::Completed) o.pass = false;
  fraction(c, r, "MHD 3D");
  double div = 0.0;
  for (double d : r.series.div_h) div = std::max(div, d);
  if (div > 1e-8) o.pass = false;
  o.detail += std::string("MHD stop ") + to_string(r.stop) + ", max div H " + num(div);
  return o;
}

Outcome theorem_chain() {
  const SimConfig c = flow_config(3, 64, 0.3);
  const BlowupCertificate cert = run_certificate(c);
  if (!cert.certified()) return {false, "hypotheses failed: " + cert.reason};
  const MonitorReport m = monitor(runs.f3().series, cert, c.params);
  std::size_t judged = 0, failed = 0;
  for (const MonitorStep& s : m.steps)
    if (s.support_ok) {
      ++judged;
      if (!s.chain_ok) ++failed;
    }
  return {judged > 1 && failed == 0,
          "records judged " + std::to_string(judged) + ", failures " + std::to_string(failed) +
              ", min nu D_q / C_inst " + num(m.worst_chain_ratio)};
}

Outcome resistive_decay() {
  SimConfig c;
  c.grid = make_grid(3, 64, M_PI);
  c.model = {PowerLaw{1.0, kQ, 0.0}, {1.0, kGamma}};
  c.params = {3, kGamma, 1.0, 1.0, kQ, 0.05};
  c.initial.name = "resistive_mode";
  c.initial.B0 = 1.0;
  c.freeze_velocity = true;
  c.t_end = 1.0;
  const RunResult r = run(c);
  // least-squares slope of log E_m; |H| decays at half that rate
  const TimeSeries& ts = r.series;
  double st = 0, sy = 0, stt = 0, sty = 0;
  const double N = ts.size();
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double t = ts.times[k], y = std::log(ts.breakdowns[k].E_m);
    st += t, sy += y, stt += t * t, sty += t * y;
  }
  const double slope = (N * sty - st * sy) / (N * stt - st * st);
  const double rate = -0.5 * slope;
  const double expected = c.params.eta;  // k = pi / L = 1
  const double err = std::abs(rate - expected) / expected;
  return {r.stop == StopReason::Completed && err <= 0.02,
          "measured " + num(rate) + ", expected " + num(expected) + ", relative error " + num(err)};
}

Outcome certificate_properties() {
  Outcome o;
  const ExponentParams p{3, kGamma, kA, kNu, kQ, 0.0};
  const Grid g = make_grid(3, 32, kL);
  InitialCondition ic;
  ic.rho_ambient = 0.01;
  ic.velocity_width = 0.6;
  const BlowupCertificate c = certify(p, initial_data(ic, g, 1e-10), false);
  if (!c.certified() || *c.T_star != c.E0 / *c.C) o.pass = false;
  const double P = c.momentum_norm();
  const double C1 = certificate_constants(p, c.m, P, c.E0).C;
  const double C2 = certificate_constants(p, c.m, 2.0 * P, c.E0).C;
  const double err = std::abs(C2 / C1 / std::pow(2.0, kQ) - 1.0);
  if (err > 1e-10) o.pass = false;

  ic.name = "colliding_bumps";
  const BlowupCertificate zero = certify(p, initial_data(ic, g, 1e-10), false);
  ExponentParams low = p;
  low.q = 1.8;
  ic.name = "gaussian_drift";
  const BlowupCertificate lowq = certify(low, initial_data(ic, g, 1e-10), false);
  const bool named = std::string(to_string(disposition(zero, nullptr))) == "hypothesis-failed" &&
                     zero.hypotheses.failed_hypothesis == "momentum_nonzero" &&
                     std::string(to_string(disposition(lowq, nullptr))) == "hypothesis-failed" &&
                     lowq.hypotheses.failed_hypothesis == "in_q_range";
  if (!named) o.pass = false;
  o.detail = "C(2P)/C(P)/2^q - 1 = " + num(err) + ", P = 0 -> " + zero.hypotheses.failed_hypothesis +
             ", q < q0 -> " + lowq.hypotheses.failed_hypothesis;
  return o;
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "nnfluid_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const json cfg = {
      {"grid", {{"n", 3}, {"cells", 24}, {"L", kL}}},
      {"model", {{"model", "power_law"}, {"nu", kNu}, {"q", kQ}, {"A", kA}, {"gamma", kGamma}}},
      {"initial_condition",
       {{"name", "mhd_loop"}, {"rho_ambient", 0.01}, {"velocity_width", 0.6}, {"B0", 0.2}}},
      {"eta", 0.01},
      {"t_end", 0.1}};
  write_text(dir / "run.json", cfg.dump(2));
  std::ostringstream sink;
  int codes[2];
  for (int i = 0; i < 2; ++i)
    codes[i] = dispatch({"simulate", "--config", (dir / "run.json").string(), "--out",
                         (dir / std::to_string(i)).string(), "--threads", i == 0 ? "1" : "4"},
                        sink, sink);
  const bool same = read_text(dir / "0" / "series.csv") == read_text(dir / "1" / "series.csv") &&
                    read_text(dir / "0" / "cert.json") == read_text(dir / "1" / "cert.json");
  fs::remove_all(dir);
  return {same && codes[0] == codes[1] && codes[0] != 1,
          std::string("threads 1 vs 4, exit ") + std::to_string(codes[0]) + "/" +
              std::to_string(codes[1]) + (same ? ", identical" : ", outputs differ")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget;  // seconds
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> criteria{
      {"threshold identities", 1, thresholds_identities},
      {"momentum bound constant", 30, k1_soundness},
      {"Hoelder and Jensen inequalities", 30, exact_inequalities},
      {"Sobolev inequality", 120, sobolev},
      {"conservation", 300, conservation},
      {"energy rate bound", 900, energy_rate},
      {"dissipation chain", 900, theorem_chain},
      {"resistive decay", 120, resistive_decay},
      {"certificate properties", 1, certificate_properties},
      {"determinism", 0, determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = o.pass;
    if (criteria[i].budget > 0 && secs > criteria[i].budget) {
      pass = false;
      o.detail += " (over the " + num(criteria[i].budget) + " s budget)";
    }
    if (!pass) ++failures;
    std::printf("%s criterion %zu %s: %s [%.2f s]\n", pass ? "PASS" : "FAIL", i + 1,
                criteria[i].name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
