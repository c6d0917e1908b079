#pragma once

// Explicit midpoint (RK2) integration of the barotropic power-law system
//   d_t rho + div(rho u) = 0
//   d_t (rho u) + Div(rho u (x) u) = Div S  [+ (curl H) x H]
//   d_t H - curl(u x H) = -curl(eta curl H),  div H = 0
// in conservative form on the periodic box. Every flux enters through a central
// difference, so discrete mass and momentum telescope to zero over the grid. The
// Lorentz force is applied as the divergence of the Maxwell stress H (x) H - |H|^2/2 I.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nnfluid/constitutive.hpp"
#include "nnfluid/initial_data.hpp"
#include "nnfluid/projection.hpp"

namespace nnfluid {

struct SimConfig {
  Grid grid;
  ConstitutiveModel model;
  ExponentParams params;
  InitialCondition initial;
  double t_end = 1.0;
  double cfl = 0.4;
  std::optional<double> rho_floor;  // absolute; default 1e-10 * initial peak density
  double support_margin = 0.4;
  double support_threshold = 1e-2;
  int output_every = 1;
  int snapshot_every = 0;  // 0 disables snapshots
  long max_steps = 10'000'000;
  bool freeze_velocity = false;  // induction-only mode: rho, u held fixed
  double hyperdiffusion = 0.0;   // filter coefficient c, strength c h^3

  bool mhd() const { return initial.name == "mhd_loop" || initial.name == "resistive_mode"; }

  /// Periodic test states fill the box, so the support margin does not apply to them.
  bool localized() const { return initial.name != "resistive_mode" && initial.name != "uniform"; }

  double floor_value() const { return rho_floor.value_or(1e-10 * initial.rho_peak); }

  void validate() const {
    params.validate();
    model.validate(grid.dim());
    if (!(cfl > 0.0 && cfl <= 0.9)) throw DomainError("cfl must lie in (0, 0.9]");
    if (!(support_margin > 0.0 && support_margin < 1.0))
      throw DomainError("support_margin must lie in (0, 1)");
    if (!(support_threshold > 0.0 && support_threshold < 1.0))
      throw DomainError("support_threshold must lie in (0, 1)");
    if (!(t_end > 0.0)) throw DomainError("t_end must be positive");
    if (output_every < 1) throw DomainError("output_every must be at least 1");
    if (snapshot_every < 0) throw DomainError("snapshot_every must be nonnegative");
    if (!(hyperdiffusion >= 0.0)) throw DomainError("hyperdiffusion must be nonnegative");
    if (!(floor_value() >= 0.0)) throw DomainError("rho_floor must be nonnegative");
    if (mhd() && grid.dim() != 3) throw DomainError("MHD runs need n = 3");
  }
};

/// Conserved variables.
struct ConservedState {
  ScalarField rho;
  VectorField mom;
  std::optional<VectorField> H;
};

inline ConservedState to_conserved(const FluidState& s) {
  ConservedState c{s.rho, VectorField(s.grid()), s.H};
  for (int a = 0; a < s.grid().dim(); ++a)
    for (std::size_t i = 0; i < s.grid().size(); ++i) c.mom.comp(a)[i] = s.rho[i] * s.u.comp(a)[i];
  return c;
}

inline FluidState to_primitive(const ConservedState& c, double time) {
  FluidState s{c.rho, VectorField(c.rho.grid()), c.H, time};
  for (int a = 0; a < c.rho.grid().dim(); ++a)
    for (std::size_t i = 0; i < c.rho.size(); ++i)
      s.u.comp(a)[i] = c.rho[i] > 0.0 ? c.mom.comp(a)[i] / c.rho[i] : 0.0;
  return s;
}

struct FluidRhs {
  ScalarField drho;
  VectorField dmom;
  std::optional<VectorField> dH;
};

/// Right-hand side evaluator with reusable scratch storage.
class RhsEvaluator {
 public:
  RhsEvaluator(const Grid& grid, ConstitutiveModel model, double eta = 0.0,
               double hyperdiffusion = 0.0)
      : grid_(grid), model_(std::move(model)), eta_(eta), hyper_(hyperdiffusion) {
    const std::size_t N = grid.size();
    const int n = grid.dim();
    u_.assign(n, std::vector<double>(N));
    grad_.assign(n * n, std::vector<double>(N));
    flux_.assign(n * n, std::vector<double>(N));
    tmp_.assign(N, 0.0);
    tmp2_.assign(N, 0.0);
  }

  /// Full right-hand side; the Maxwell stress and induction terms apply when H is present.
  FluidRhs operator()(const ConservedState& s) {
    const Grid& g = grid_;
    const int n = g.dim();
    const std::size_t N = g.size();
    FluidRhs out{ScalarField(g), VectorField(g), std::nullopt};
    const auto& rho = s.rho.values();

    for (int a = 0; a < n; ++a) {
      const auto& m = s.mom.comp(a);
      for (std::size_t i = 0; i < N; ++i) u_[a][i] = rho[i] > 0.0 ? m[i] / rho[i] : 0.0;
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) central_difference(u_[i], g, j, grad_[i * n + j]);

    // flux F_ij = m_i u_j + p delta_ij - P_ij - M_ij
    const double A = model_.pressure.A, gamma = model_.pressure.gamma;
#pragma omp parallel for schedule(static)
    for (std::size_t c = 0; c < N; ++c) {
      double D[9];
      double mag2 = 0.0, tr = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double d = 0.5 * (grad_[i * n + j][c] + grad_[j * n + i][c]);
          D[i * n + j] = d;
          mag2 += d * d;
        }
      for (int i = 0; i < n; ++i) tr += D[i * n + i];
      auto [b0, b] = stress_coefficients(model_, rho[c], tr, std::sqrt(mag2));
      if (!std::isfinite(b) && mag2 == 0.0) b = 0.0;
      const double p = A * std::pow(rho[c], gamma);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double f = s.mom.comp(i)[c] * u_[j][c] - b * D[i * n + j];
          if (i == j) f += p - b0;
          flux_[i * n + j][c] = f;
        }
      if (s.H) {
        double h2 = 0.0;
        for (int i = 0; i < n; ++i) h2 += s.H->comp(i)[c] * s.H->comp(i)[c];
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            double mxw = s.H->comp(i)[c] * s.H->comp(j)[c];
            if (i == j) mxw -= 0.5 * h2;
            flux_[i * n + j][c] -= mxw;
          }
      }
    }

    for (int j = 0; j < n; ++j) central_difference(s.mom.comp(j), g, j, out.drho.values(), -1.0, true);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        central_difference(flux_[i * n + j], g, j, out.dmom.comp(i), -1.0, true);

    if (hyper_ > 0.0) {
      const double kappa = hyper_ * std::pow(g.min_spacing(), 3);
      apply_hyperdiffusion(rho, out.drho.values(), kappa);
      for (int i = 0; i < n; ++i) apply_hyperdiffusion(s.mom.comp(i), out.dmom.comp(i), kappa);
    }

    if (s.H) out.dH = induction(*s.H, u_);
    return out;
  }

  /// curl(u x H) - eta curl(curl H).
  VectorField induction(const VectorField& H, const std::vector<std::vector<double>>& u) {
    const Grid& g = grid_;
    const std::size_t N = g.size();
    VectorField e(g);  // electric field  eta curl H - u x H, dH/dt = -curl E
    if (eta_ > 0.0) {
      const VectorField J = curl(H);
      for (int a = 0; a < 3; ++a)
        for (std::size_t i = 0; i < N; ++i) e.comp(a)[i] = eta_ * J.comp(a)[i];
    }
    if (!u.empty()) {
      for (int a = 0; a < 3; ++a) {
        const int b = (a + 1) % 3, c = (a + 2) % 3;
        for (std::size_t i = 0; i < N; ++i)
          e.comp(a)[i] -= u[b][i] * H.comp(c)[i] - u[c][i] * H.comp(b)[i];
      }
    }
    VectorField dH = curl(e);
    for (int a = 0; a < 3; ++a)
      for (double& v : dH.comp(a)) v = -v;
    return dH;
  }

  const std::vector<std::vector<double>>& velocity() const { return u_; }

 private:
  void apply_hyperdiffusion(const std::vector<double>& f, std::vector<double>& out, double kappa) {
    std::fill(tmp_.begin(), tmp_.end(), 0.0);
    std::fill(tmp2_.begin(), tmp2_.end(), 0.0);
    for (int a = 0; a < grid_.dim(); ++a) second_difference(f, grid_, a, tmp_, 1.0, true);
    for (int a = 0; a < grid_.dim(); ++a) second_difference(tmp_, grid_, a, tmp2_, 1.0, true);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= kappa * tmp2_[i];
  }

  Grid grid_;
  ConstitutiveModel model_;
  double eta_;
  double hyper_;
  std::vector<std::vector<double>> u_, grad_, flux_;
  std::vector<double> tmp_, tmp2_;
};

inline FluidRhs rhs_fluid(const FluidState& state, const ConstitutiveModel& model) {
  ConservedState c = to_conserved(state);
  c.H.reset();
  RhsEvaluator eval(state.grid(), model);
  return eval(c);
}

inline FluidRhs rhs_mhd(const FluidState& state, const ConstitutiveModel& model, double eta) {
  if (state.grid().dim() != 3) throw DomainError("MHD right-hand side needs n = 3");
  if (!state.H) throw DomainError("MHD right-hand side needs a magnetic field");
  RhsEvaluator eval(state.grid(), model, eta);
  return eval(to_conserved(state));
}

/// dt = cfl min_cells [h/(|u| + c_s + c_A), h^2 rho / (2n mu_eff)] and h^2/(2n eta) with H.
inline double stable_dt(const FluidState& s, const ConstitutiveModel& model, double eta,
                        double cfl, double rho_floor) {
  const Grid& g = s.grid();
  const int n = g.dim();
  const double h = g.min_spacing();
  const TensorField D = shear_rate(s.u);
  const ScalarField shear = tensor_magnitude(D);
  const ScalarField speed = vector_magnitude(s.u);
  const auto& law = model.pressure;
  std::optional<ScalarField> field;
  if (s.H) field = vector_magnitude(*s.H);
  double dt = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < g.size(); ++c) {
    const double rho = std::max(s.rho[c], rho_floor);
    double wave = speed[c];
    if (rho > 0.0) wave += std::sqrt(law.gamma * law.A * std::pow(rho, law.gamma - 1.0));
    if (field && rho > 0.0) wave += (*field)[c] / std::sqrt(rho);  // Alfven speed
    if (wave > 0.0) dt = std::min(dt, h / wave);
    const double mu = effective_viscosity(model, shear[c]);
    if (mu > 0.0) dt = std::min(dt, h * h * rho / (2.0 * n * mu));
  }
  if (s.H && eta > 0.0) dt = std::min(dt, h * h / (2.0 * n * eta));
  dt *= cfl;
  if (!std::isfinite(dt) || !(dt > 0.0)) {
    // degenerate all-zero state: acoustic limit at the floor density
    const double rho = std::max(rho_floor, std::numeric_limits<double>::min());
    const double cs = std::sqrt(law.gamma * law.A * std::pow(rho, law.gamma - 1.0));
    dt = cs > 0.0 ? cfl * h / cs : std::numeric_limits<double>::infinity();
  }
  return dt;
}

}  // namespace nnfluid
