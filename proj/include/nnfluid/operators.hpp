#pragma once

// Second-order central differences with periodic wrap, and pointwise tensor
// algebra. Every derivative in the code base goes through central_difference so
// that summation by parts and div(curl) = 0 hold exactly on the discrete level.

#include <cmath>
#include <vector>

#include "nnfluid/grid.hpp"

namespace nnfluid {

/// out (+)= scale * (f[i+1] - f[i-1]) / (2h) along `axis`.
inline void central_difference(const std::vector<double>& f, const Grid& g, int axis,
                               std::vector<double>& out, double scale = 1.0,
                               bool accumulate = false) {
  const int N0 = g.cells(0), N1 = g.cells(1), N2 = g.cells(2);
  const int N = g.cells(axis);
  const std::size_t s = g.stride(axis);
  const std::size_t wrap = s * static_cast<std::size_t>(N - 1);
  const double c = scale / (2.0 * g.spacing(axis));
  if (out.size() != f.size()) out.assign(f.size(), 0.0);
#pragma omp parallel for collapse(2) schedule(static)
  for (int k = 0; k < N2; ++k) {
    for (int j = 0; j < N1; ++j) {
      const std::size_t base = g.index(0, j, k);
      const int line_coord = axis == 1 ? j : (axis == 2 ? k : 0);
      for (int i = 0; i < N0; ++i) {
        const std::size_t idx = base + i;
        const int ci = axis == 0 ? i : line_coord;
        const std::size_t up = ci == N - 1 ? idx - wrap : idx + s;
        const std::size_t dn = ci == 0 ? idx + wrap : idx - s;
        const double d = c * (f[up] - f[dn]);
        if (accumulate) out[idx] += d;
        else out[idx] = d;
      }
    }
  }
}

/// out (+)= scale * (f[i+1] - 2 f[i] + f[i-1]) / h^2 along `axis`.
inline void second_difference(const std::vector<double>& f, const Grid& g, int axis,
                              std::vector<double>& out, double scale = 1.0,
                              bool accumulate = false) {
  const int N0 = g.cells(0), N1 = g.cells(1), N2 = g.cells(2);
  const int N = g.cells(axis);
  const std::size_t s = g.stride(axis);
  const std::size_t wrap = s * static_cast<std::size_t>(N - 1);
  const double c = scale / (g.spacing(axis) * g.spacing(axis));
  if (out.size() != f.size()) out.assign(f.size(), 0.0);
#pragma omp parallel for collapse(2) schedule(static)
  for (int k = 0; k < N2; ++k) {
    for (int j = 0; j < N1; ++j) {
      const std::size_t base = g.index(0, j, k);
      const int line_coord = axis == 1 ? j : (axis == 2 ? k : 0);
      for (int i = 0; i < N0; ++i) {
        const std::size_t idx = base + i;
        const int ci = axis == 0 ? i : line_coord;
        const std::size_t up = ci == N - 1 ? idx - wrap : idx + s;
        const std::size_t dn = ci == 0 ? idx + wrap : idx - s;
        const double d = c * (f[up] - 2.0 * f[idx] + f[dn]);
        if (accumulate) out[idx] += d;
        else out[idx] = d;
      }
    }
  }
}

inline std::vector<double> laplacian(const std::vector<double>& f, const Grid& g) {
  std::vector<double> out(f.size(), 0.0);
  for (int a = 0; a < g.dim(); ++a) second_difference(f, g, a, out, 1.0, true);
  return out;
}

inline VectorField gradient(const ScalarField& f) {
  VectorField out(f.grid());
  for (int a = 0; a < f.grid().dim(); ++a) central_difference(f.values(), f.grid(), a, out.comp(a));
  return out;
}

/// G(i, j) = d u_i / d x_j.
inline TensorField gradient(const VectorField& u) {
  const Grid& g = u.grid();
  TensorField out(g);
  for (int i = 0; i < g.dim(); ++i)
    for (int j = 0; j < g.dim(); ++j) central_difference(u.comp(i), g, j, out(i, j));
  return out;
}

inline ScalarField divergence(const VectorField& v) {
  const Grid& g = v.grid();
  ScalarField out(g);
  for (int a = 0; a < g.dim(); ++a) central_difference(v.comp(a), g, a, out.values(), 1.0, true);
  return out;
}

/// Row-wise divergence, (Div T)_i = sum_j d T_ij / d x_j.
inline VectorField divergence(const TensorField& T) {
  const Grid& g = T.grid();
  VectorField out(g);
  for (int i = 0; i < g.dim(); ++i)
    for (int j = 0; j < g.dim(); ++j) central_difference(T(i, j), g, j, out.comp(i), 1.0, true);
  return out;
}

inline VectorField curl(const VectorField& v) {
  const Grid& g = v.grid();
  if (g.dim() != 3) throw DomainError("curl needs n = 3");
  VectorField out(g);
  // (curl v)_x = d_y v_z - d_z v_y, cyclic.
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    central_difference(v.comp(c), g, b, out.comp(a), 1.0, true);
    central_difference(v.comp(b), g, c, out.comp(a), -1.0, true);
  }
  return out;
}

inline TensorField symmetric_part(const TensorField& G) {
  const Grid& g = G.grid();
  const int n = g.dim();
  TensorField out(g);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto& a = G(i, j);
      const auto& b = G(j, i);
      auto& o = out(i, j);
      for (std::size_t c = 0; c < o.size(); ++c) o[c] = 0.5 * (a[c] + b[c]);
    }
  return out;
}

/// Shear rate tensor, D_ij = (d_j u_i + d_i u_j) / 2.
inline TensorField shear_rate(const VectorField& u) { return symmetric_part(gradient(u)); }

/// Frobenius magnitude sqrt(T:T) per cell.
inline ScalarField tensor_magnitude(const TensorField& T) {
  ScalarField out(T.grid());
  auto& o = out.values();
  for (int c = 0; c < T.components(); ++c) {
    const auto& t = T.comp(c);
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += t[i] * t[i];
  }
  for (double& v : o) v = std::sqrt(v);
  return out;
}

inline ScalarField vector_magnitude(const VectorField& v) {
  ScalarField out(v.grid());
  auto& o = out.values();
  for (int c = 0; c < v.components(); ++c) {
    const auto& a = v.comp(c);
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += a[i] * a[i];
  }
  for (double& x : o) x = std::sqrt(x);
  return out;
}

/// (sum_cells |f|^p h^n)^(1/p).
inline double lp_norm(const ScalarField& f, double p) {
  if (!(p >= 1.0)) throw DomainError("lp_norm needs p >= 1");
  std::vector<double> w(f.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::pow(std::abs(f[i]), p);
  return std::pow(integral(w, f.grid()), 1.0 / p);
}

inline double lp_norm(const VectorField& v, double p) { return lp_norm(vector_magnitude(v), p); }

/// int |f|^p without the outer root.
inline double power_integral(const ScalarField& f, double p) {
  std::vector<double> w(f.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::pow(std::abs(f[i]), p);
  return integral(w, f.grid());
}

}  // namespace nnfluid
