#pragma once

// Run configuration: strict JSON ingestion, canonical serialization and the
// content hash used to tie series, certificates and manifests together.

#include <openssl/evp.h>

#include <fstream>
#include <sstream>
#include <set>
#include <string>

#include "json.hpp"
#include "nnfluid/certifier.hpp"

namespace nnfluid {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  SimConfig sim;
  InequalityTolerances inequality_tol;
  MonitorTolerances monitor_tol;
  std::optional<double> sigma;  // density Hoelder exponent; default (1 + gamma) / 2
  std::vector<std::string> warnings;
};

namespace detail {

inline void reject_unknown(const json& obj, const std::string& path,
                           std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items())
    if (!ok.count(key)) throw ConfigError(path + "." + key + ": unknown key");
}

inline double get_number(const json& obj, const std::string& path, const char* key,
                         std::optional<double> fallback = {}) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(path + "." + key + ": missing field");
  }
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(path + "." + key + ": expected a number");
  return v.get<double>();
}

inline long get_integer(const json& obj, const std::string& path, const char* key,
                        std::optional<long> fallback = {}) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(path + "." + key + ": missing field");
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(path + "." + key + ": expected an integer");
  return v.get<long>();
}

inline bool get_bool(const json& obj, const std::string& path, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(path + "." + key + ": expected true or false");
  return v.get<bool>();
}

template <typename F>
void check(bool ok, const std::string& path, F&& message) {
  if (!ok) throw ConfigError(path + ": " + message());
}

inline Vec3 get_vec3(const json& obj, const std::string& path, const char* key, Vec3 fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_array() || v.empty() || v.size() > 3)
    throw ConfigError(path + "." + key + ": expected an array of up to 3 numbers");
  Vec3 out{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(path + "." + key + ": expected numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

}  // namespace detail

/// Parses and validates a run configuration. Unknown keys are errors.
inline RunConfig parse_config(const json& j) {
  using namespace detail;
  RunConfig rc;
  SimConfig& c = rc.sim;
  reject_unknown(j, "config",
                 {"grid", "model", "initial_condition", "t_end", "cfl", "rho_floor",
                  "support_margin", "support_threshold", "output_every", "snapshot_every",
                  "max_steps", "eta", "freeze_velocity", "hyperdiffusion", "tolerances", "sigma"});

  if (!j.contains("grid")) throw ConfigError("config.grid: missing field");
  const json& g = j.at("grid");
  reject_unknown(g, "config.grid", {"n", "cells", "L"});
  const long n = get_integer(g, "config.grid", "n");
  check(n >= 1 && n <= 3, "config.grid.n", [] { return "n must be 1, 2 or 3"; });
  std::array<int, 3> cells{1, 1, 1};
  if (!g.contains("cells")) throw ConfigError("config.grid.cells: missing field");
  if (g.at("cells").is_number_integer()) {
    for (long a = 0; a < n; ++a) cells[a] = g.at("cells").get<int>();
  } else if (g.at("cells").is_array() && g.at("cells").size() == static_cast<std::size_t>(n)) {
    for (long a = 0; a < n; ++a) {
      if (!g.at("cells")[a].is_number_integer())
        throw ConfigError("config.grid.cells: expected integers");
      cells[a] = g.at("cells")[a].get<int>();
    }
  } else {
    throw ConfigError("config.grid.cells: expected an integer or an array of n integers");
  }
  for (long a = 0; a < n; ++a)
    check(cells[a] >= 8, "config.grid.cells", [] { return "at least 8 cells per axis"; });
  const double L = get_number(g, "config.grid", "L");
  check(L > 0.0, "config.grid.L", [] { return "L must be positive"; });
  c.grid = Grid(static_cast<int>(n), cells, L);

  if (!j.contains("model")) throw ConfigError("config.model: missing field");
  const json& m = j.at("model");
  if (!m.is_object() || !m.contains("model") || !m.at("model").is_string())
    throw ConfigError("config.model.model: expected \"power_law\" or \"newtonian\"");
  const std::string kind = m.at("model").get<std::string>();
  const double gamma = get_number(m, "config.model", "gamma");
  check(gamma > 1.0, "config.model.gamma", [] { return "gamma must exceed 1"; });
  const double A = get_number(m, "config.model", "A");
  check(A > 0.0, "config.model.A", [] { return "A must be positive"; });
  c.model.pressure = {A, gamma};
  c.params.n = static_cast<int>(n);
  c.params.gamma = gamma;
  c.params.A = A;
  if (kind == "power_law") {
    reject_unknown(m, "config.model", {"model", "nu", "q", "eps_reg", "A", "gamma"});
    PowerLaw pl;
    pl.nu = get_number(m, "config.model", "nu");
    check(pl.nu > 0.0, "config.model.nu", [] { return "nu must be positive"; });
    pl.q = get_number(m, "config.model", "q");
    check(pl.q > 1.0, "config.model.q", [] { return "q must exceed 1"; });
    pl.eps_reg = get_number(m, "config.model", "eps_reg", pl.q >= 2.0 ? 0.0 : 1e-3);
    check(pl.eps_reg >= 0.0, "config.model.eps_reg", [] { return "eps_reg must be nonnegative"; });
    c.model.kind = pl;
    c.params.nu = pl.nu;
    c.params.q = pl.q;
  } else if (kind == "newtonian") {
    reject_unknown(m, "config.model", {"model", "lambda", "mu", "A", "gamma"});
    Newtonian nw;
    nw.mu = get_number(m, "config.model", "mu");
    nw.lambda = get_number(m, "config.model", "lambda", 0.0);
    check(nw.mu > 0.0, "config.model.mu", [] { return "mu must be positive"; });
    check(nw.lambda + 2.0 / n * nw.mu > 0.0, "config.model.lambda",
          [] { return "lambda + (2/n) mu must be positive"; });
    c.model.kind = nw;
    // coercive with q = 2, nu = 2 mu when lambda >= 0
    c.params.nu = 2.0 * nw.mu;
    c.params.q = 2.0;
    if (nw.lambda < 0.0) rc.warnings.push_back("lambda < 0: coercivity with nu = 2 mu not guaranteed");
  } else {
    throw ConfigError("config.model.model: unknown model '" + kind + "'");
  }

  if (!j.contains("initial_condition")) throw ConfigError("config.initial_condition: missing field");
  const json& ic = j.at("initial_condition");
  reject_unknown(ic, "config.initial_condition",
                 {"name", "rho_peak", "rho_ambient", "width", "velocity_width", "U0", "direction",
                  "separation", "B0", "field_width", "mode"});
  if (!ic.contains("name") || !ic.at("name").is_string())
    throw ConfigError("config.initial_condition.name: missing field");
  InitialCondition& init = c.initial;
  init.name = ic.at("name").get<std::string>();
  static const std::set<std::string> names{"gaussian_drift", "colliding_bumps", "mhd_loop",
                                           "resistive_mode", "uniform"};
  if (!names.count(init.name))
    throw ConfigError("config.initial_condition.name: unknown generator '" + init.name + "'");
  const std::string ip = "config.initial_condition";
  init.rho_peak = get_number(ic, ip, "rho_peak", init.rho_peak);
  init.rho_ambient = get_number(ic, ip, "rho_ambient", init.rho_ambient);
  init.width = get_number(ic, ip, "width", init.width);
  init.velocity_width = get_number(ic, ip, "velocity_width", init.velocity_width);
  init.U0 = get_number(ic, ip, "U0", init.U0);
  init.direction = get_vec3(ic, ip, "direction", init.direction);
  init.separation = get_number(ic, ip, "separation", init.separation);
  init.B0 = get_number(ic, ip, "B0", init.B0);
  init.field_width = get_number(ic, ip, "field_width", init.field_width);
  init.mode = static_cast<int>(get_integer(ic, ip, "mode", init.mode));
  check(init.rho_peak > 0.0, ip + ".rho_peak", [] { return "rho_peak must be positive"; });
  check(init.rho_ambient >= 0.0, ip + ".rho_ambient", [] { return "rho_ambient must be nonnegative"; });
  check(init.width > 0.0, ip + ".width", [] { return "width must be positive"; });
  check(init.velocity_width >= 0.0, ip + ".velocity_width", [] { return "velocity_width must be nonnegative"; });
  check(init.field_width >= 0.0, ip + ".field_width", [] { return "field_width must be nonnegative"; });
  check(init.mode >= 1, ip + ".mode", [] { return "mode must be at least 1"; });
  if ((init.name == "mhd_loop" || init.name == "resistive_mode") && n != 3)
    throw ConfigError(ip + ".name: " + init.name + " needs n = 3");

  const std::string cp = "config";
  c.t_end = get_number(j, cp, "t_end");
  check(c.t_end > 0.0, "config.t_end", [] { return "t_end must be positive"; });
  c.cfl = get_number(j, cp, "cfl", 0.4);
  check(c.cfl > 0.0 && c.cfl <= 0.9, "config.cfl", [] { return "cfl must lie in (0, 0.9]"; });
  if (j.contains("rho_floor")) {
    c.rho_floor = get_number(j, cp, "rho_floor");
    check(*c.rho_floor >= 0.0, "config.rho_floor", [] { return "rho_floor must be nonnegative"; });
  }
  c.support_margin = get_number(j, cp, "support_margin", 0.4);
  check(c.support_margin > 0.0 && c.support_margin < 1.0, "config.support_margin",
        [] { return "support_margin must lie in (0, 1)"; });
  c.support_threshold = get_number(j, cp, "support_threshold", 1e-2);
  check(c.support_threshold > 0.0 && c.support_threshold < 1.0, "config.support_threshold",
        [] { return "support_threshold must lie in (0, 1)"; });
  c.output_every = static_cast<int>(get_integer(j, cp, "output_every", 1));
  check(c.output_every >= 1, "config.output_every", [] { return "output_every must be at least 1"; });
  c.snapshot_every = static_cast<int>(get_integer(j, cp, "snapshot_every", 0));
  check(c.snapshot_every >= 0, "config.snapshot_every", [] { return "snapshot_every must be nonnegative"; });
  c.max_steps = get_integer(j, cp, "max_steps", c.max_steps);
  check(c.max_steps >= 1, "config.max_steps", [] { return "max_steps must be positive"; });
  c.params.eta = get_number(j, cp, "eta", 0.0);
  check(c.params.eta >= 0.0, "config.eta", [] { return "eta must be nonnegative"; });
  c.freeze_velocity = get_bool(j, cp, "freeze_velocity", false);
  c.hyperdiffusion = get_number(j, cp, "hyperdiffusion", 0.0);
  check(c.hyperdiffusion >= 0.0, "config.hyperdiffusion", [] { return "hyperdiffusion must be nonnegative"; });
  if (j.contains("sigma")) rc.sigma = get_number(j, cp, "sigma");

  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    const std::string tp = "config.tolerances";
    reject_unknown(t, tp,
                   {"sobolev", "algebraic", "composite", "energy_monotone", "energy_rate_relative",
                    "energy_rate_absolute", "drift", "chain_factor", "certified_line"});
    rc.inequality_tol.discretization = get_number(t, tp, "sobolev", rc.inequality_tol.discretization);
    rc.inequality_tol.algebraic = get_number(t, tp, "algebraic", rc.inequality_tol.algebraic);
    rc.inequality_tol.composite = get_number(t, tp, "composite", rc.inequality_tol.composite);
    auto& mt = rc.monitor_tol;
    mt.energy_monotone = get_number(t, tp, "energy_monotone", mt.energy_monotone);
    mt.energy_rate_relative = get_number(t, tp, "energy_rate_relative", mt.energy_rate_relative);
    mt.energy_rate_absolute = get_number(t, tp, "energy_rate_absolute", mt.energy_rate_absolute);
    mt.drift = get_number(t, tp, "drift", mt.drift);
    mt.chain_factor = get_number(t, tp, "chain_factor", mt.chain_factor);
    mt.certified_line = get_number(t, tp, "certified_line", mt.certified_line);
    mt.composite = rc.inequality_tol.composite;
  }

  if (!(c.params.q < n)) rc.warnings.push_back("q >= n: the Sobolev constant K is undefined");
  try {
    c.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return rc;
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
  return parse_config(j);
}

/// Fully explicit JSON form of a configuration (every default written out).
inline json serialize_config(const RunConfig& rc) {
  const SimConfig& c = rc.sim;
  const int n = c.grid.dim();
  json j;
  json cells = json::array();
  for (int a = 0; a < n; ++a) cells.push_back(c.grid.cells(a));
  j["grid"] = {{"n", n}, {"cells", cells}, {"L", c.grid.half_width()}};
  json m;
  if (const auto* pl = std::get_if<PowerLaw>(&c.model.kind)) {
    m = {{"model", "power_law"}, {"nu", pl->nu}, {"q", pl->q}, {"eps_reg", pl->eps_reg}};
  } else if (const auto* nw = std::get_if<Newtonian>(&c.model.kind)) {
    m = {{"model", "newtonian"}, {"lambda", nw->lambda}, {"mu", nw->mu}};
  } else {
    throw ConfigError("generalized models cannot be serialized");
  }
  m["A"] = c.model.pressure.A;
  m["gamma"] = c.model.pressure.gamma;
  j["model"] = m;
  const InitialCondition& ic = c.initial;
  json dir = json::array();
  for (int a = 0; a < n; ++a) dir.push_back(ic.direction[a]);
  j["initial_condition"] = {{"name", ic.name},         {"rho_peak", ic.rho_peak},
                            {"rho_ambient", ic.rho_ambient}, {"width", ic.width},
                            {"velocity_width", ic.velocity_width}, {"U0", ic.U0},
                            {"direction", dir},        {"separation", ic.separation},
                            {"B0", ic.B0},             {"field_width", ic.field_width},
                            {"mode", ic.mode}};
  j["t_end"] = c.t_end;
  j["cfl"] = c.cfl;
  if (c.rho_floor) j["rho_floor"] = *c.rho_floor;
  j["support_margin"] = c.support_margin;
  j["support_threshold"] = c.support_threshold;
  j["output_every"] = c.output_every;
  j["snapshot_every"] = c.snapshot_every;
  j["max_steps"] = c.max_steps;
  j["eta"] = c.params.eta;
  j["freeze_velocity"] = c.freeze_velocity;
  j["hyperdiffusion"] = c.hyperdiffusion;
  if (rc.sigma) j["sigma"] = *rc.sigma;
  const auto& it = rc.inequality_tol;
  const auto& mt = rc.monitor_tol;
  j["tolerances"] = {{"sobolev", it.discretization},       {"algebraic", it.algebraic},
                     {"composite", it.composite},          {"energy_monotone", mt.energy_monotone},
                     {"energy_rate_relative", mt.energy_rate_relative},  {"energy_rate_absolute", mt.energy_rate_absolute},
                     {"drift", mt.drift},                  {"chain_factor", mt.chain_factor},
                     {"certified_line", mt.certified_line}};
  return j;
}

/// Canonical text: sorted keys, no whitespace, shortest round-trip numbers.
inline std::string canonical_json(const json& j) { return j.dump(); }

/// Git blob hash (SHA-1 of "blob <len>\0<content>") in hex.
inline std::string git_blob_hash(const std::string& content) {
  const std::string blob = "blob " + std::to_string(content.size()) + '\0' + content;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha1(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), blob.data(), blob.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    throw std::runtime_error("sha1 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

/// Hash of the normalized configuration; invariant under key order and defaults.
inline std::string config_hash(const RunConfig& rc) {
  return git_blob_hash(canonical_json(serialize_config(rc)));
}

}  // namespace nnfluid
