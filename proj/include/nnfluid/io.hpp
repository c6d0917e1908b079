#pragma once

// On-disk formats: series CSV, field snapshots, certificate / monitor JSON, reports
// and the run manifest.

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "nnfluid/config.hpp"

namespace nnfluid {

inline constexpr const char* kReportSchema = "nnfluid.report/1";
inline constexpr const char* kToolVersion = "0.1.0";

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---- series.csv -----------------------------------------------------------

inline std::vector<std::string> series_columns(int n) {
  std::vector<std::string> cols{"t", "m"};
  const char* names[3] = {"Px", "Py", "Pz"};
  for (int a = 0; a < n; ++a) cols.push_back(names[a]);
  for (const char* c : {"E_k", "E_i", "E_m", "E_total", "D_q", "support_radius", "clamps"})
    cols.push_back(c);
  return cols;
}

inline std::string series_csv(const TimeSeries& ts, int n) {
  std::string out;
  const auto cols = series_columns(n);
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += '\n';
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const EnergyBreakdown& e = ts.breakdowns[k];
    out += format_g17(ts.times[k]) + ',' + format_g17(e.m);
    for (int a = 0; a < n; ++a) out += ',' + format_g17(e.P[a]);
    for (double v : {e.E_k, e.E_i, e.E_m, e.total, e.D_q}) out += ',' + format_g17(v);
    out += ',' + format_g17(k < ts.support_radius.size() ? ts.support_radius[k] : 0.0);
    out += ',' + std::to_string(k < ts.clamps.size() ? ts.clamps[k] : 0L);
    out += '\n';
  }
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw IoError(path.string() + ": write failed");
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_series_csv(const TimeSeries& ts, int n, const std::filesystem::path& path) {
  write_text(path, series_csv(ts, n));
}

/// Parses a series CSV; the dimension follows from the momentum columns.
inline TimeSeries parse_series_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IoError("series: empty file");
  std::vector<std::string> header;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header.push_back(cell);
  }
  int n = 0;
  for (int cand = 1; cand <= 3; ++cand)
    if (header == series_columns(cand)) n = cand;
  if (n == 0) throw IoError("series: unrecognized header '" + line + "'");
  TimeSeries ts;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<double> v;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      char* end = nullptr;
      const double x = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        throw IoError("series: row " + std::to_string(row) + ": bad number '" + cell + "'");
      v.push_back(x);
    }
    if (v.size() != header.size())
      throw IoError("series: row " + std::to_string(row) + ": expected " +
                    std::to_string(header.size()) + " columns");
    EnergyBreakdown e;
    std::size_t c = 0;
    ts.times.push_back(v[c++]);
    e.m = v[c++];
    for (int a = 0; a < n; ++a) e.P[a] = v[c++];
    e.E_k = v[c++];
    e.E_i = v[c++];
    e.E_m = v[c++];
    e.total = v[c++];
    e.D_q = v[c++];
    ts.support_radius.push_back(v[c++]);
    ts.clamps.push_back(static_cast<long>(v[c++]));
    ts.breakdowns.push_back(e);
  }
  return ts;
}

inline TimeSeries read_series_csv(const std::filesystem::path& path) {
  return parse_series_csv(read_text(path));
}

// ---- snapshots ------------------------------------------------------------
// One JSON header line, then float64 little-endian values. Fields follow in the
// order listed in the header; within a field cells run with axis 0 fastest and
// the components of one cell are adjacent.

inline void write_snapshot(const FluidState& s, const std::filesystem::path& path) {
  const Grid& g = s.grid();
  const int n = g.dim();
  json cells = json::array();
  for (int a = 0; a < n; ++a) cells.push_back(g.cells(a));
  json fields = json::array({json{{"name", "rho"}, {"components", 1}},
                             json{{"name", "u"}, {"components", n}}});
  if (s.H) fields.push_back(json{{"name", "H"}, {"components", s.H->components()}});
  const json header = {{"n", n},
                       {"cells", cells},
                       {"L", g.half_width()},
                       {"time", s.time},
                       {"components", 1 + n + (s.H ? s.H->components() : 0)},
                       {"fields", fields},
                       {"layout", "cell-major axis0-fastest, components adjacent, float64 little-endian"}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << header.dump() << '\n';
  std::vector<double> buf;
  auto emit = [&](const std::vector<const std::vector<double>*>& comps) {
    const std::size_t N = g.size();
    buf.resize(N * comps.size());
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t c = 0; c < comps.size(); ++c) buf[i * comps.size() + c] = (*comps[c])[i];
    if constexpr (std::endian::native == std::endian::big) {
      for (double& d : buf) {
        auto u = std::bit_cast<std::uint64_t>(d);
        u = __builtin_bswap64(u);
        d = std::bit_cast<double>(u);
      }
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(double)));
  };
  emit({&s.rho.values()});
  std::vector<const std::vector<double>*> u;
  for (int c = 0; c < s.u.components(); ++c) u.push_back(&s.u.comp(c));
  emit(u);
  if (s.H) {
    std::vector<const std::vector<double>*> h;
    for (int c = 0; c < s.H->components(); ++c) h.push_back(&s.H->comp(c));
    emit(h);
  }
  if (!out) throw IoError(path.string() + ": write failed");
}

inline FluidState read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open");
  std::string line;
  std::getline(in, line);
  const json header = json::parse(line);
  const int n = header.at("n").get<int>();
  std::array<int, 3> cells{1, 1, 1};
  for (int a = 0; a < n; ++a) cells[a] = header.at("cells")[a].get<int>();
  const Grid g(n, cells, header.at("L").get<double>());
  FluidState s;
  s.time = header.at("time").get<double>();
  const std::size_t N = g.size();
  auto load = [&](int comps, auto& field) {
    std::vector<double> buf(N * comps);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(double)));
    if (!in) throw IoError(path.string() + ": truncated data");
    if constexpr (std::endian::native == std::endian::big)
      for (double& d : buf) d = std::bit_cast<double>(__builtin_bswap64(std::bit_cast<std::uint64_t>(d)));
    for (std::size_t i = 0; i < N; ++i)
      for (int c = 0; c < comps; ++c) field.comp(c)[i] = buf[i * comps + c];
  };
  for (const json& f : header.at("fields")) {
    const std::string name = f.at("name").get<std::string>();
    const int comps = f.at("components").get<int>();
    if (name == "rho") {
      s.rho = ScalarField(g);
      load(comps, s.rho);
    } else if (name == "u") {
      s.u = VectorField(g);
      load(comps, s.u);
    } else if (name == "H") {
      s.H = VectorField(g);
      load(comps, *s.H);
    } else {
      throw IoError(path.string() + ": unknown field '" + name + "'");
    }
  }
  return s;
}

// ---- certificate ----------------------------------------------------------

inline json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json to_json(const AdmissibilityReport& r) {
  return {{"in_q_range", r.in_q_range},
          {"in_closed_range", r.in_closed_range},
          {"in_open_range", r.in_open_range},
          {"condition15", r.condition15},
          {"momentum_nonzero", r.momentum_nonzero},
          {"theorem_applies", r.theorem_applies},
          {"which_theorem", to_string(r.which_theorem)},
          {"failed_hypothesis", r.failed_hypothesis}};
}

inline Theorem theorem_from_string(const std::string& s) {
  if (s == "Fluid") return Theorem::Fluid;
  if (s == "MHD") return Theorem::MHD;
  return Theorem::None;
}

inline json to_json(const ExponentParams& p) {
  return {{"n", p.n}, {"gamma", p.gamma}, {"A", p.A}, {"nu", p.nu}, {"q", p.q}, {"eta", p.eta}};
}

inline json to_json(const BlowupCertificate& c) {
  const int n = c.params.n;
  json P = json::array();
  for (int a = 0; a < n; ++a) P.push_back(c.P[a]);
  return {{"schema", kReportSchema},
          {"params", to_json(c.params)},
          {"m", c.m},
          {"P", P},
          {"E0", c.E0},
          {"E_i0", c.E_i0},
          {"K", optional_number(c.K)},
          {"K1", optional_number(c.K1)},
          {"C", optional_number(c.C)},
          {"C_composed", optional_number(c.C_composed)},
          {"T_star", optional_number(c.T_star)},
          {"theorem", to_string(c.theorem)},
          {"hypotheses", to_json(c.hypotheses)},
          {"reason", c.reason},
          {"config_hash", c.config_hash},
          {"support_limit", c.support_limit}};
}

inline std::optional<double> read_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

inline BlowupCertificate certificate_from_json(const json& j) {
  try {
    BlowupCertificate c;
    const json& p = j.at("params");
    c.params.n = p.at("n").get<int>();
    c.params.gamma = p.at("gamma").get<double>();
    c.params.A = p.at("A").get<double>();
    c.params.nu = p.at("nu").get<double>();
    c.params.q = p.at("q").get<double>();
    c.params.eta = p.at("eta").get<double>();
    c.m = j.at("m").get<double>();
    const json& P = j.at("P");
    for (std::size_t a = 0; a < P.size() && a < 3; ++a) c.P[a] = P[a].get<double>();
    c.E0 = j.at("E0").get<double>();
    c.E_i0 = j.at("E_i0").get<double>();
    c.K = read_optional(j, "K");
    c.K1 = read_optional(j, "K1");
    c.C = read_optional(j, "C");
    c.C_composed = read_optional(j, "C_composed");
    c.T_star = read_optional(j, "T_star");
    c.theorem = theorem_from_string(j.at("theorem").get<std::string>());
    const json& h = j.at("hypotheses");
    c.hypotheses.in_q_range = h.at("in_q_range").get<bool>();
    c.hypotheses.in_closed_range = h.at("in_closed_range").get<bool>();
    c.hypotheses.in_open_range = h.at("in_open_range").get<bool>();
    c.hypotheses.condition15 = h.at("condition15").get<bool>();
    c.hypotheses.momentum_nonzero = h.at("momentum_nonzero").get<bool>();
    c.hypotheses.theorem_applies = h.at("theorem_applies").get<bool>();
    c.hypotheses.which_theorem = theorem_from_string(h.at("which_theorem").get<std::string>());
    c.hypotheses.failed_hypothesis = h.at("failed_hypothesis").get<std::string>();
    c.reason = j.at("reason").get<std::string>();
    c.config_hash = j.at("config_hash").get<std::string>();
    c.support_limit = j.at("support_limit").get<double>();
    return c;
  } catch (const json::exception& e) {
    throw IoError(std::string("certificate: ") + e.what());
  }
}

// ---- monitor --------------------------------------------------------------

inline json to_json(const InequalityReport& r) {
  json ctx = json::object();
  for (const auto& [k, v] : r.context) ctx[k] = v;
  return {{"name", to_string(r.name)}, {"lhs", r.lhs},       {"rhs", r.rhs},
          {"slack", r.slack},          {"tol", r.tol},       {"passed", r.passed},
          {"context", ctx}};
}

inline json to_json(const MonitorReport& m) {
  json steps = json::array();
  for (const MonitorStep& s : m.steps) {
    steps.push_back({{"t", s.t},
                     {"support_ok", s.support_ok},
                     {"energy_monotone", s.energy_monotone},
                     {"energy_rate_residual", s.energy_rate_residual},
                     {"energy_rate_ok", s.energy_rate_ok},
                     {"mass_drift", s.mass_drift},
                     {"momentum_drift", s.momentum_drift},
                     {"conservation_ok", s.conservation_ok},
                     {"dissipation_bound", s.dissipation_bound ? to_json(*s.dissipation_bound) : json(nullptr)},
                     {"C_inst", s.C_inst},
                     {"chain_ok", s.chain_ok},
                     {"below_certified_line", s.below_certified_line}});
  }
  return {{"schema", kReportSchema},
          {"verdict", m.passed ? "pass" : "fail"},
          {"checked", m.checked},
          {"energy_rate_fraction", m.energy_rate_fraction()},
          {"worst_energy_increase", m.worst_energy_increase},
          {"worst_energy_rate_slack", m.worst_energy_rate_slack},
          {"worst_chain_ratio", m.worst_chain_ratio},
          {"max_mass_drift", m.max_mass_drift},
          {"max_momentum_drift", m.max_momentum_drift},
          {"violations", m.violations},
          {"steps", steps}};
}

// ---- report ---------------------------------------------------------------

struct RunOutcome {
  std::optional<StopReason> stop;
  double stop_time = 0.0;
};

inline std::string breakdown_note(const BlowupCertificate& cert, const RunOutcome& run) {
  if (run.stop != StopReason::NumericalBreakdown) return "";
  if (cert.T_star)
    return run.stop_time < *cert.T_star ? "numerical breakdown preceded T_star"
                                        : "numerical breakdown at or after T_star";
  return "numerical breakdown; no certified T_star";
}

inline json report_json(const BlowupCertificate& cert, const MonitorReport* mon, const RunOutcome& run) {
  const Disposition d = disposition(cert, mon, run.stop);
  json j = {{"schema", kReportSchema},
            {"disposition", to_string(d)},
            {"exit_code", exit_code(d)},
            {"certificate", to_json(cert)},
            {"monitor", mon ? to_json(*mon) : json(nullptr)}};
  if (run.stop) {
    j["stop"] = to_string(*run.stop);
    j["stop_time"] = run.stop_time;
  }
  const std::string note = breakdown_note(cert, run);
  if (!note.empty()) j["note"] = note;
  return j;
}

inline std::string report_summary(const BlowupCertificate& cert, const MonitorReport* mon,
                                  const RunOutcome& run) {
  std::ostringstream s;
  const Disposition d = disposition(cert, mon, run.stop);
  const AdmissibilityReport& h = cert.hypotheses;
  s << "disposition: " << to_string(d) << '\n';
  s << "theorem: " << to_string(cert.theorem) << '\n';
  s << "hypotheses:\n";
  s << "  in_q_range        " << (h.in_q_range ? "true" : "false") << '\n';
  s << "  condition15       " << (h.condition15 ? "true" : "false") << '\n';
  s << "  momentum_nonzero  " << (h.momentum_nonzero ? "true" : "false") << '\n';
  if (!cert.reason.empty()) s << "reason: " << cert.reason << '\n';
  s << "E0 = " << format_g17(cert.E0) << ", |P| = " << format_g17(cert.momentum_norm())
    << ", m = " << format_g17(cert.m) << '\n';
  if (cert.C) s << "C = " << format_g17(*cert.C) << ", T_star = " << format_g17(*cert.T_star) << '\n';
  if (mon) {
    s << "monitor: " << (mon->passed ? "pass" : "fail") << " (" << mon->checked
      << " records inside the support margin)\n";
    s << "  worst energy increase / E0  " << format_g17(mon->worst_energy_increase) << '\n';
    s << "  worst energy-rate slack     " << format_g17(mon->worst_energy_rate_slack) << '\n';
    s << "  energy-rate pass fraction   " << format_g17(mon->energy_rate_fraction()) << '\n';
    s << "  min nu D_q / C_inst         " << format_g17(mon->worst_chain_ratio) << '\n';
    s << "  max mass drift              " << format_g17(mon->max_mass_drift) << '\n';
    s << "  max momentum drift          " << format_g17(mon->max_momentum_drift) << '\n';
    for (const auto& v : mon->violations) s << "  violation: " << v << '\n';
  }
  if (run.stop) s << "run stop: " << to_string(*run.stop) << " at t = " << format_g17(run.stop_time) << '\n';
  const std::string note = breakdown_note(cert, run);
  if (!note.empty()) s << "note: " << note << '\n';
  return s.str();
}

/// Writes report.json and report.txt into `dir`.
inline void write_report(const BlowupCertificate& cert, const MonitorReport* mon,
                         const RunOutcome& run, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string() + ": " + ec.message());
  write_text(dir / "report.json", report_json(cert, mon, run).dump(2) + "\n");
  write_text(dir / "report.txt", report_summary(cert, mon, run));
}

}  // namespace nnfluid
