#pragma once

// Initial-data generators. The profiles are smooth bumps centred in the box so
// that the truncated periodic problem mimics compactly supported data in R^n.

#include <cmath>
#include <string>

#include "nnfluid/functionals.hpp"

namespace nnfluid {

struct InitialCondition {
  std::string name = "gaussian_drift";
  double rho_peak = 1.0;
  double rho_ambient = 0.0;  // uniform background added to the bumps
  double width = 1.0;
  double velocity_width = 0.0;  // 0 means "same as width"
  double U0 = 0.5;
  Vec3 direction{1.0, 0.0, 0.0};
  double separation = 2.0;  // colliding_bumps: centre offset along direction
  double B0 = 0.5;          // mhd_loop / resistive_mode amplitude
  double field_width = 0.0; // mhd_loop: 0 means "same as width"
  int mode = 1;             // resistive_mode wave number in units of pi / L

  bool operator==(const InitialCondition&) const = default;
};

namespace detail {

inline double gauss(const Vec3& x, const Vec3& centre, double w) {
  double r2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double d = x[a] - centre[a];
    r2 += d * d;
  }
  return std::exp(-r2 / (w * w));
}

inline Vec3 unit(const Vec3& d, int n) {
  Vec3 e{0.0, 0.0, 0.0};
  double s = 0.0;
  for (int a = 0; a < n; ++a) s += d[a] * d[a];
  if (!(s > 0.0)) throw DomainError("direction must be a nonzero vector in the first n axes");
  s = std::sqrt(s);
  for (int a = 0; a < n; ++a) e[a] = d[a] / s;
  return e;
}

inline void apply_floor(ScalarField& rho, double ambient, double floor) {
  for (double& r : rho.values()) {
    r += ambient;
    if (r < floor) r = floor;
  }
}

}  // namespace detail

/// Builds the named initial state. The bump generators add `rho_ambient`; densities
/// below `rho_floor` are replaced by the floor.
///
/// gaussian_drift: rho = rho_peak exp(-|x|^2/w^2), u = U0 exp(-|x|^2/wu^2) e.
/// colliding_bumps: two bumps at +-separation e moving towards each other, P = 0.
/// mhd_loop: gaussian_drift plus H = curl(0, 0, B0 w_H exp(-|x|^2/w_H^2)) (n = 3).
/// resistive_mode: uniform density at rest, H = (0, 0, B0 sin(k x)), k = mode pi / L.
/// uniform: rho = rho_peak, u = U0 e everywhere.
inline FluidState initial_data(const InitialCondition& ic, const Grid& grid, double rho_floor) {
  const int n = grid.dim();
  if (!(ic.rho_peak > 0.0)) throw DomainError("rho_peak must be positive");
  if (!(ic.width > 0.0)) throw DomainError("width must be positive");
  const double wu = ic.velocity_width > 0.0 ? ic.velocity_width : ic.width;
  const Vec3 e = detail::unit(ic.direction, n);
  const Vec3 origin{0.0, 0.0, 0.0};

  FluidState s;
  if (ic.name == "gaussian_drift" || ic.name == "mhd_loop") {
    s.rho = sample(grid, [&](const Vec3& x) { return ic.rho_peak * detail::gauss(x, origin, ic.width); });
    s.u = sample_vector(grid, [&](const Vec3& x) {
      const double a = ic.U0 * detail::gauss(x, origin, wu);
      return Vec3{a * e[0], a * e[1], a * e[2]};
    });
    if (ic.name == "mhd_loop") {
      if (n != 3) throw DomainError("mhd_loop needs n = 3");
      const double wh = ic.field_width > 0.0 ? ic.field_width : ic.width;
      VectorField potential(grid);
      potential.comp(2) =
          sample(grid, [&](const Vec3& x) { return ic.B0 * wh * detail::gauss(x, origin, wh); })
              .values();
      s.H = curl(potential);
    }
  } else if (ic.name == "colliding_bumps") {
    if (!(ic.separation > 0.0)) throw DomainError("separation must be positive");
    const Vec3 c1{ic.separation * e[0], ic.separation * e[1], ic.separation * e[2]};
    const Vec3 c2{-c1[0], -c1[1], -c1[2]};
    s.rho = sample(grid, [&](const Vec3& x) {
      return ic.rho_peak * (detail::gauss(x, c1, ic.width) + detail::gauss(x, c2, ic.width));
    });
    s.u = sample_vector(grid, [&](const Vec3& x) {
      const double a = ic.U0 * (detail::gauss(x, c2, wu) - detail::gauss(x, c1, wu));
      return Vec3{a * e[0], a * e[1], a * e[2]};
    });
  } else if (ic.name == "resistive_mode") {
    if (n != 3) throw DomainError("resistive_mode needs n = 3");
    const double k = ic.mode * M_PI / grid.half_width();
    s.rho = ScalarField(grid, ic.rho_peak);
    s.u = VectorField(grid);
    VectorField H(grid);
    H.comp(2) = sample(grid, [&](const Vec3& x) { return ic.B0 * std::sin(k * x[0]); }).values();
    s.H = std::move(H);
  } else if (ic.name == "uniform") {
    s.rho = ScalarField(grid, ic.rho_peak);
    s.u = sample_vector(grid, [&](const Vec3&) {
      return Vec3{ic.U0 * e[0], ic.U0 * e[1], ic.U0 * e[2]};
    });
  } else {
    throw DomainError("unknown initial condition '" + ic.name + "'");
  }
  const double ambient = ic.name == "resistive_mode" || ic.name == "uniform" ? 0.0 : ic.rho_ambient;
  if (!(ambient >= 0.0)) throw DomainError("rho_ambient must be nonnegative");
  detail::apply_floor(s.rho, ambient, rho_floor);
  return s;
}

}  // namespace nnfluid
