#pragma once

// Stress models: Newtonian, power law and the general form
//   S = -p(rho) I + P(rho, D),  P = beta0(rho, div u) I + beta(rho, |D|) D,
// with the barotropic pressure p = A rho^gamma.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "nnfluid/operators.hpp"

namespace nnfluid {

struct Newtonian {
  double lambda = 0.0;
  double mu = 1.0;
};

struct PowerLaw {
  double nu = 1.0;
  double q = 2.0;
  double eps_reg = 0.0;
};

struct Generalized {
  std::function<double(double rho, double div_u)> beta0;
  std::function<double(double rho, double shear)> beta;
};

struct PressureLaw {
  double A = 1.0;
  double gamma = 1.4;
};

struct ConstitutiveModel {
  std::variant<Newtonian, PowerLaw, Generalized> kind;
  PressureLaw pressure;

  void validate(int n) const {
    if (!(pressure.A >= 0.0)) throw DomainError("A must be nonnegative");
    if (!(pressure.gamma > 1.0)) throw DomainError("gamma must exceed 1");
    if (const auto* nw = std::get_if<Newtonian>(&kind)) {
      if (!(nw->mu > 0.0)) throw DomainError("Newtonian model needs mu > 0");
      if (!(nw->lambda + 2.0 / n * nw->mu > 0.0))
        throw DomainError("Newtonian model needs lambda + (2/n) mu > 0");
    } else if (const auto* pl = std::get_if<PowerLaw>(&kind)) {
      if (!(pl->nu > 0.0)) throw DomainError("power law needs nu > 0");
      if (!(pl->q > 1.0)) throw DomainError("power law needs q > 1");
      if (!(pl->eps_reg >= 0.0)) throw DomainError("power law needs eps_reg >= 0");
    } else {
      const auto& gen = std::get<Generalized>(kind);
      if (!gen.beta0 || !gen.beta) throw DomainError("generalized model needs beta0 and beta");
      // bounded at zero: finite values on a shrinking sequence of arguments
      for (double rho : {0.0, 0.5, 1.0})
        for (double s = 1e-2; s > 1e-14; s *= 1e-2)
          if (!std::isfinite(gen.beta0(rho, s)) || !std::isfinite(gen.beta0(rho, -s)) ||
              !std::isfinite(gen.beta(rho, s)) || !std::isfinite(gen.beta(rho, 0.0)))
            throw DomainError("generalized model coefficients must be bounded at zero");
    }
  }
};

inline double pressure_value(double rho, const PressureLaw& law) {
  return law.A * std::pow(rho, law.gamma);
}

inline ScalarField pressure(const ScalarField& rho, const PressureLaw& law) {
  if (!(law.gamma > 1.0)) throw DomainError("gamma must exceed 1");
  ScalarField p(rho.grid());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (rho[i] < 0.0) throw DomainError("negative density");
    p[i] = pressure_value(rho[i], law);
  }
  return p;
}

/// Isotropic coefficient beta0 and shear coefficient beta at one cell.
inline std::array<double, 2> stress_coefficients(const ConstitutiveModel& model, double rho,
                                                 double div_u, double shear) {
  if (const auto* nw = std::get_if<Newtonian>(&model.kind))
    return {nw->lambda * div_u, 2.0 * nw->mu};
  if (const auto* pl = std::get_if<PowerLaw>(&model.kind)) {
    if (pl->q == 2.0) return {0.0, pl->nu};
    const double s2 = shear * shear + pl->eps_reg * pl->eps_reg;
    if (s2 == 0.0) return {0.0, pl->q > 2.0 ? 0.0 : std::numeric_limits<double>::infinity()};
    return {0.0, pl->nu * std::pow(s2, 0.5 * (pl->q - 2.0))};
  }
  const auto& gen = std::get<Generalized>(model.kind);
  return {gen.beta0(rho, div_u), gen.beta(rho, shear)};
}

/// Viscous stress from a precomputed shear rate tensor.
inline TensorField viscous_stress_from_shear(const ConstitutiveModel& model, const ScalarField& rho,
                                             const TensorField& D) {
  const Grid& g = D.grid();
  const int n = g.dim();
  TensorField out(g);
  const ScalarField mag = tensor_magnitude(D);
  for (std::size_t c = 0; c < g.size(); ++c) {
    double tr = 0.0;
    for (int i = 0; i < n; ++i) tr += D(i, i)[c];
    auto [b0, b] = stress_coefficients(model, rho[c], tr, mag[c]);
    // 0 * inf at D = 0 for q < 2 without regularization: the stress is 0 there
    if (!std::isfinite(b) && mag[c] == 0.0) b = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(i, j)[c] = b * D(i, j)[c] + (i == j ? b0 : 0.0);
  }
  return out;
}

inline TensorField viscous_stress(const ConstitutiveModel& model, const ScalarField& rho,
                                  const VectorField& u) {
  require_same_grid(rho.grid(), u.grid());
  return viscous_stress_from_shear(model, rho, shear_rate(u));
}

/// S = -p I + P.
inline TensorField full_stress(const ConstitutiveModel& model, const ScalarField& rho,
                               const VectorField& u) {
  TensorField S = viscous_stress(model, rho, u);
  const ScalarField p = pressure(rho, model.pressure);
  for (int i = 0; i < rho.grid().dim(); ++i) {
    auto& d = S(i, i);
    for (std::size_t c = 0; c < d.size(); ++c) d[c] -= p[c];
  }
  return S;
}

/// Effective viscosity used by the time-step limit: beta/2 for the shear part
/// (the Newtonian value is lambda + 2 mu).
inline double effective_viscosity(const ConstitutiveModel& model, double shear) {
  if (const auto* nw = std::get_if<Newtonian>(&model.kind)) return nw->lambda + 2.0 * nw->mu;
  if (const auto* pl = std::get_if<PowerLaw>(&model.kind)) {
    if (pl->q == 2.0) return pl->nu;
    const double s2 = shear * shear + pl->eps_reg * pl->eps_reg;
    if (s2 == 0.0) return pl->q > 2.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return pl->nu * std::pow(s2, 0.5 * (pl->q - 2.0));
  }
  return 0.0;
}

/// Symmetric n x n matrix, row-major in the leading n*n entries.
struct SymMatrix {
  int n = 3;
  std::array<double, 9> a{};

  double operator()(int i, int j) const { return a[i * n + j]; }
  double trace() const {
    double t = 0.0;
    for (int i = 0; i < n; ++i) t += a[i * n + i];
    return t;
  }
  double norm() const {
    double s = 0.0;
    for (int i = 0; i < n * n; ++i) s += a[i] * a[i];
    return std::sqrt(s);
  }
};

struct CoercivityReport {
  long samples_checked = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  double scale = 1.0;
  bool passed = false;
  std::string note;
};

/// Pointwise coercivity beta0(g, tr B) tr B + beta(g, |B|) |B|^2 >= nu |B|^q over the
/// product of density and matrix samples.
inline CoercivityReport coercivity_check(const ConstitutiveModel& model,
                                         const std::vector<double>& g_samples,
                                         const std::vector<SymMatrix>& B_samples, double nu,
                                         double q) {
  if (!(nu > 0.0) || !(q > 1.0)) throw DomainError("coercivity check needs nu > 0 and q > 1");
  if (g_samples.empty() || B_samples.empty()) throw DomainError("empty sample set");
  CoercivityReport r;
  double scale = 0.0;
  for (double g : g_samples) {
    for (const SymMatrix& B : B_samples) {
      const double tr = B.trace();
      const double mag = B.norm();
      auto [b0, b] = stress_coefficients(model, g, tr, mag);
      double lhs = b0 * tr;
      if (mag > 0.0) lhs += b * mag * mag;
      const double rhs = nu * std::pow(mag, q);
      r.min_slack = std::min(r.min_slack, lhs - rhs);
      scale = std::max({scale, std::abs(lhs), rhs});
      ++r.samples_checked;
    }
  }
  r.scale = std::max(scale, 1.0);
  r.passed = r.min_slack >= -1e-10 * r.scale;
  if (const auto* nw = std::get_if<Newtonian>(&model.kind); nw && nw->lambda < 0.0)
    r.note = "lambda < 0: coercivity with nu = 2 mu is not guaranteed";
  if (const auto* pl = std::get_if<PowerLaw>(&model.kind);
      pl && pl->eps_reg > 0.0 && pl->q < 2.0 && !r.passed)
    r.note = "regularized power law with q < 2 is below nu |B|^q";
  return r;
}

}  // namespace nnfluid
