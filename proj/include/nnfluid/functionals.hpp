#pragma once

// Fluid state on the grid and the integral quantities the theory is phrased in:
// mass, momentum, kinetic / internal / magnetic energy and the q-dissipation.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "nnfluid/operators.hpp"

namespace nnfluid {

/// ||div H||_2 h / ||H||_2, the dimensionless divergence error of a field.
inline double relative_divergence(const VectorField& H) {
  const double scale = lp_norm(H, 2.0);
  if (!(scale > 0.0)) return 0.0;
  return lp_norm(divergence(H), 2.0) * H.grid().min_spacing() / scale;
}

struct FluidState {
  ScalarField rho;
  VectorField u;
  std::optional<VectorField> H;
  double time = 0.0;

  const Grid& grid() const { return rho.grid(); }
  bool has_magnetic_field() const { return H.has_value(); }

  /// Nonnegative density; when present, |div H| <= 1e-8 ||H||.
  void validate() const {
    require_same_grid(rho.grid(), u.grid());
    for (double r : rho.values())
      if (!(r >= 0.0)) throw DomainError("density must be nonnegative");
    if (H) {
      require_same_grid(rho.grid(), H->grid());
      if (relative_divergence(*H) > 1e-8) throw DomainError("magnetic field is not divergence free");
    }
  }
};

struct EnergyBreakdown {
  double m = 0.0;
  Vec3 P{0.0, 0.0, 0.0};
  double E_k = 0.0;
  double E_i = 0.0;
  double E_m = 0.0;
  double total = 0.0;
  double D_q = 0.0;

  double momentum_norm() const { return euclidean_norm(P); }
};

/// int |D(u)|^q with D the symmetric gradient.
inline double dissipation_integral(const VectorField& u, double q) {
  return power_integral(tensor_magnitude(shear_rate(u)), q);
}

inline EnergyBreakdown functionals(const FluidState& s, const ExponentParams& params) {
  const Grid& g = s.grid();
  const int n = g.dim();
  const std::size_t N = g.size();
  const auto& rho = s.rho.values();
  EnergyBreakdown e;
  e.m = integral(rho, g);
  std::vector<double> w(N);
  for (int c = 0; c < n; ++c) {
    const auto& uc = s.u.comp(c);
    for (std::size_t i = 0; i < N; ++i) w[i] = rho[i] * uc[i];
    e.P[c] = integral(w, g);
  }
  for (std::size_t i = 0; i < N; ++i) {
    double u2 = 0.0;
    for (int c = 0; c < n; ++c) u2 += s.u.comp(c)[i] * s.u.comp(c)[i];
    w[i] = 0.5 * rho[i] * u2;
  }
  e.E_k = integral(w, g);
  const double coef = params.A / (params.gamma - 1.0);
  for (std::size_t i = 0; i < N; ++i) w[i] = coef * std::pow(rho[i], params.gamma);
  e.E_i = integral(w, g);
  if (s.H) {
    for (std::size_t i = 0; i < N; ++i) {
      double h2 = 0.0;
      for (int c = 0; c < n; ++c) h2 += s.H->comp(c)[i] * s.H->comp(c)[i];
      w[i] = 0.5 * h2;
    }
    e.E_m = integral(w, g);
  }
  e.total = e.E_k + e.E_i + e.E_m;
  e.D_q = dissipation_integral(s.u, params.q);
  return e;
}

/// Radius of the smallest origin-centred ball holding every cell where some field
/// exceeds `threshold` times its maximum. Density is measured above `rho_baseline`.
inline double support_radius(const FluidState& s, double threshold, double rho_baseline = 0.0) {
  if (!(threshold > 0.0)) throw DomainError("support threshold must be positive");
  const Grid& g = s.grid();
  std::vector<const std::vector<double>*> fields;
  std::vector<double> rho_excess(s.rho.values());
  for (double& r : rho_excess) r = std::max(r - rho_baseline, 0.0);
  const ScalarField umag = vector_magnitude(s.u);
  std::optional<ScalarField> hmag;
  if (s.H) hmag = vector_magnitude(*s.H);
  fields.push_back(&rho_excess);
  fields.push_back(&umag.values());
  if (hmag) fields.push_back(&hmag->values());

  double radius = 0.0;
  for (const auto* f : fields) {
    const double peak = *std::max_element(f->begin(), f->end());
    if (!(peak > 0.0)) continue;
    const double cut = threshold * peak;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if ((*f)[i] > cut) {
        const Vec3 x = g.position(i);
        radius = std::max(radius, std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
      }
    }
  }
  return radius;
}

}  // namespace nnfluid
