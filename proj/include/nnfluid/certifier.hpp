#pragma once

// Blow-up certificate and run monitor.
//
// The certificate evaluates the hypotheses (exponent range, Jensen condition,
// nonzero momentum) and, when they hold, the guaranteed decay rate C of the total
// energy and the lifespan bound T* = E(0) / C. The monitor replays a recorded time
// series against every inequality the argument relies on.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nnfluid/inequalities.hpp"
#include "nnfluid/integrator.hpp"

namespace nnfluid {

struct BlowupCertificate {
  ExponentParams params;
  double m = 0.0;
  Vec3 P{0.0, 0.0, 0.0};
  double E0 = 0.0;
  double E_i0 = 0.0;
  std::optional<double> K;
  std::optional<double> K1;
  std::optional<double> C;
  std::optional<double> C_composed;
  std::optional<double> T_star;
  Theorem theorem = Theorem::Fluid;
  AdmissibilityReport hypotheses;
  std::string reason;  // failed hypothesis, empty when certified
  std::string config_hash;
  double support_limit = 0.0;  // margin * L of the configured box

  bool certified() const { return C.has_value(); }
  double momentum_norm() const { return euclidean_norm(P); }
};

inline constexpr double kMomentumZeroTol = 1e-12;

/// Certificate from the initial mass, momentum and energy.
inline BlowupCertificate certify_from_breakdown(const ExponentParams& params,
                                                const EnergyBreakdown& e0, bool is_mhd) {
  BlowupCertificate c;
  c.params = params;
  c.m = e0.m;
  c.P = e0.P;
  c.E0 = e0.total;
  c.E_i0 = e0.E_i;
  c.theorem = is_mhd ? Theorem::MHD : Theorem::Fluid;
  // momentum at rounding level of the momentum scale counts as zero
  const double p_scale = std::sqrt(std::max(2.0 * e0.m * e0.total, 0.0));
  const double P = e0.momentum_norm() > kMomentumZeroTol * p_scale ? e0.momentum_norm() : 0.0;
  c.hypotheses = admissibility(params, P, is_mhd);
  if (params.n >= 2 && params.q > 1.0 && params.q < params.n) c.K = sobolev_K(params.n, params.q);
  if (c.K && c.m > 0.0 && condition15(params.n, params.gamma, params.q))
    c.K1 = momentum_K1(params.n, params.gamma, params.q, c.m, params.A);
  if (!c.hypotheses.theorem_applies) {
    c.reason = c.hypotheses.failed_hypothesis + " = false";
    return c;
  }
  if (!(c.E0 > 0.0)) {
    c.reason = "initial energy is not positive";
    return c;
  }
  const CertificateConstants k = certificate_constants(params, c.m, P, c.E0, is_mhd);
  c.C = k.C;
  c.C_composed = k.C_composed;
  c.T_star = k.T_star;
  return c;
}

/// Certificate for the state; the MHD variant adds the magnetic energy to E(0).
inline BlowupCertificate certify(const ExponentParams& params, const FluidState& state0,
                                 bool is_mhd) {
  ExponentParams p = params;
  p.n = state0.grid().dim();
  EnergyBreakdown e = functionals(state0, p);
  if (!is_mhd) {
    e.total -= e.E_m;
    e.E_m = 0.0;
  }
  return certify_from_breakdown(p, e, is_mhd);
}

struct MonitorTolerances {
  double energy_monotone = 1e-10;  // relative to E(0)
  double energy_rate_relative = 0.05;
  double energy_rate_absolute = 1e-8;     // relative to E(0)
  double drift = 1e-6;
  double chain_factor = 0.9;       // nu D_q >= factor * C_inst
  double certified_line = 0.10;    // relative to E(0)
  double composite = 0.10;
};

struct MonitorStep {
  double t = 0.0;
  bool support_ok = true;
  bool energy_monotone = true;     // against the previous record
  double energy_rate_residual = 0.0;      // (E_{k} - E_{k-1}) / dt + nu D_q(t_{k-1})
  bool energy_rate_ok = true;
  double mass_drift = 0.0;
  double momentum_drift = 0.0;
  bool conservation_ok = true;
  std::optional<InequalityReport> dissipation_bound;
  double C_inst = 0.0;             // nu (1/K)(|P| / (K1 E_i^e))^q
  bool chain_ok = true;            // nu D_q >= chain_factor * C_inst
  bool below_certified_line = true;
};

struct MonitorReport {
  std::vector<MonitorStep> steps;
  bool passed = true;
  std::size_t checked = 0;          // records with support_ok
  std::size_t energy_rate_passed = 0;
  std::size_t energy_rate_checked = 0;
  std::size_t first_violation = static_cast<std::size_t>(-1);
  double worst_energy_increase = 0.0;  // max (E_k - E_{k-1}) / E(0)
  double worst_energy_rate_slack = 0.0;       // min over checked pairs of rhs - rate
  double worst_chain_ratio = 0.0;      // min nu D_q / C_inst
  double max_mass_drift = 0.0;
  double max_momentum_drift = 0.0;
  std::vector<std::string> violations;

  double energy_rate_fraction() const {
    return energy_rate_checked == 0 ? 1.0 : static_cast<double>(energy_rate_passed) / energy_rate_checked;
  }
};

/// Replays the series against the energy, conservation and dissipation checks.
/// Records after the support leaves the margin are reported but not judged.
inline MonitorReport monitor(const TimeSeries& series, const BlowupCertificate& cert,
                             const ExponentParams& params, const MonitorTolerances& tol = {}) {
  if (series.empty()) throw DomainError("empty time series");
  MonitorReport rep;
  const EnergyBreakdown& first = series.breakdowns.front();
  const double E0 = first.total;
  const double m0 = first.m;
  const double p_scale =
      std::max(first.momentum_norm(), std::sqrt(std::max(2.0 * m0 * E0, 0.0)));
  const bool chain_active = cert.certified();
  rep.worst_chain_ratio = std::numeric_limits<double>::infinity();
  rep.worst_energy_rate_slack = std::numeric_limits<double>::infinity();
  bool support_ok = true;
  auto violate = [&](std::size_t k, const std::string& what) {
    rep.passed = false;
    if (rep.first_violation == static_cast<std::size_t>(-1)) rep.first_violation = k;
    rep.violations.push_back(what + " at record " + std::to_string(k) + " (t = " +
                             std::to_string(series.times[k]) + ")");
  };

  for (std::size_t k = 0; k < series.size(); ++k) {
    const EnergyBreakdown& e = series.breakdowns[k];
    MonitorStep s;
    s.t = series.times[k];
    if (cert.support_limit > 0.0 && k < series.support_radius.size())
      support_ok = support_ok && series.support_radius[k] <= cert.support_limit;
    s.support_ok = support_ok;

    s.mass_drift = m0 > 0.0 ? std::abs(e.m - m0) / m0 : 0.0;
    Vec3 dP{e.P[0] - first.P[0], e.P[1] - first.P[1], e.P[2] - first.P[2]};
    s.momentum_drift = p_scale > 0.0 ? euclidean_norm(dP) / p_scale : 0.0;
    s.conservation_ok = s.mass_drift <= tol.drift && s.momentum_drift <= tol.drift;

    if (k > 0) {
      const EnergyBreakdown& prev = series.breakdowns[k - 1];
      const double dt = series.times[k] - series.times[k - 1];
      const double dE = e.total - prev.total;
      s.energy_monotone = dE <= tol.energy_monotone * E0;
      if (dt > 0.0) {
        const double rate = dE / dt;
        s.energy_rate_residual = rate + params.nu * prev.D_q;
        const double bound =
            -params.nu * prev.D_q * (1.0 - tol.energy_rate_relative) + tol.energy_rate_absolute * E0;
        s.energy_rate_ok = rate <= bound;
        if (support_ok) {
          ++rep.energy_rate_checked;
          if (s.energy_rate_ok) ++rep.energy_rate_passed;
          rep.worst_energy_rate_slack = std::min(rep.worst_energy_rate_slack, bound - rate);
        }
      }
      if (support_ok && E0 > 0.0) rep.worst_energy_increase = std::max(rep.worst_energy_increase, dE / E0);
    }

    if (chain_active && support_ok && e.E_i > 0.0) {
      const double lhs = dissipation_chain_lhs(params, cert.m, e.momentum_norm(), e.E_i);
      s.C_inst = params.nu * lhs;
      s.dissipation_bound = make_report(InequalityName::DissipationBound, lhs, e.D_q,
                                        tol.composite, {{"t", s.t}, {"E_i", e.E_i}});
      s.chain_ok = params.nu * e.D_q >= tol.chain_factor * s.C_inst;
      if (s.C_inst > 0.0)
        rep.worst_chain_ratio = std::min(rep.worst_chain_ratio, params.nu * e.D_q / s.C_inst);
      s.below_certified_line = e.total <= E0 - *cert.C * s.t + tol.certified_line * E0;
    }

    if (support_ok) {
      ++rep.checked;
      rep.max_mass_drift = std::max(rep.max_mass_drift, s.mass_drift);
      rep.max_momentum_drift = std::max(rep.max_momentum_drift, s.momentum_drift);
      if (!s.energy_monotone) violate(k, "energy increased");
      if (!s.energy_rate_ok) violate(k, "energy rate above -nu D_q");
      if (!s.conservation_ok) violate(k, "mass or momentum drift");
      if (s.dissipation_bound && !s.dissipation_bound->passed) violate(k, "dissipation bound");
      if (!s.chain_ok) violate(k, "dissipation below chain bound");
      if (!s.below_certified_line) violate(k, "energy above certified line");
    }
    rep.steps.push_back(std::move(s));
  }
  if (!std::isfinite(rep.worst_chain_ratio)) rep.worst_chain_ratio = 0.0;
  if (!std::isfinite(rep.worst_energy_rate_slack)) rep.worst_energy_rate_slack = 0.0;
  return rep;
}

enum class Disposition {
  CertifiedConsistent,
  HypothesisFailed,
  NumericalBreakdown,
  DomainExhausted,
  MonitorViolation
};

inline const char* to_string(Disposition d) {
  switch (d) {
    case Disposition::CertifiedConsistent: return "certified-consistent";
    case Disposition::HypothesisFailed: return "hypothesis-failed";
    case Disposition::NumericalBreakdown: return "numerical-breakdown";
    case Disposition::DomainExhausted: return "domain-exhausted";
    case Disposition::MonitorViolation: return "monitor-violation";
  }
  return "";
}

/// Process exit code for a disposition.
inline int exit_code(Disposition d) {
  switch (d) {
    case Disposition::CertifiedConsistent: return 0;
    case Disposition::HypothesisFailed: return 2;
    case Disposition::NumericalBreakdown: return 3;
    case Disposition::DomainExhausted: return 4;
    case Disposition::MonitorViolation: return 5;
  }
  return 1;
}

inline Disposition disposition(const BlowupCertificate& cert, const MonitorReport* mon,
                               std::optional<StopReason> stop = {}) {
  if (stop == StopReason::NumericalBreakdown) return Disposition::NumericalBreakdown;
  if (stop == StopReason::DomainExhausted) return Disposition::DomainExhausted;
  if (!cert.certified()) return Disposition::HypothesisFailed;
  if (mon && !mon->passed) return Disposition::MonitorViolation;
  return Disposition::CertifiedConsistent;
}

}  // namespace nnfluid
