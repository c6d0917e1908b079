#pragma once

// Uniform cell-centred periodic grid on the box [-L, L)^n and the discrete
// fields that live on it.
//
// Cell ordering: axis 0 varies fastest, linear index = i0 + N0 (i1 + N1 i2).

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nnfluid/thresholds.hpp"

namespace nnfluid {

using Vec3 = std::array<double, 3>;

class Grid {
 public:
  Grid() = default;

  Grid(int n, std::array<int, 3> cells, double half_width) : n_(n), L_(half_width) {
    if (n < 1 || n > 3) throw DomainError("grid dimension must be 1, 2 or 3");
    if (!(half_width > 0.0) || !std::isfinite(half_width))
      throw DomainError("grid half width must be positive");
    for (int a = 0; a < 3; ++a) {
      if (a < n) {
        if (cells[a] < 8) throw DomainError("grid needs at least 8 cells per axis");
        cells_[a] = cells[a];
        h_[a] = 2.0 * half_width / cells[a];
      } else {
        cells_[a] = 1;
        h_[a] = 1.0;
      }
    }
    stride_ = {1, cells_[0], cells_[0] * cells_[1]};
  }

  int dim() const { return n_; }
  double half_width() const { return L_; }
  int cells(int axis) const { return cells_[axis]; }
  const std::array<int, 3>& cells() const { return cells_; }
  double spacing(int axis) const { return h_[axis]; }
  double min_spacing() const {
    double h = h_[0];
    for (int a = 1; a < n_; ++a) h = std::min(h, h_[a]);
    return h;
  }
  std::size_t stride(int axis) const { return static_cast<std::size_t>(stride_[axis]); }
  std::size_t size() const {
    return static_cast<std::size_t>(cells_[0]) * cells_[1] * cells_[2];
  }
  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < n_; ++a) v *= h_[a];
    return v;
  }
  double volume() const { return std::pow(2.0 * L_, n_); }

  std::size_t index(int i, int j = 0, int k = 0) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(cells_[0]) *
                                             (static_cast<std::size_t>(j) +
                                              static_cast<std::size_t>(cells_[1]) * k);
  }

  std::array<int, 3> coords(std::size_t idx) const {
    const int i = static_cast<int>(idx % cells_[0]);
    const std::size_t rest = idx / cells_[0];
    const int j = static_cast<int>(rest % cells_[1]);
    const int k = static_cast<int>(rest / cells_[1]);
    return {i, j, k};
  }

  /// Cell centre, x_i = -L + (i + 1/2) h. Unused axes are 0.
  Vec3 position(std::size_t idx) const {
    const auto c = coords(idx);
    Vec3 x{0.0, 0.0, 0.0};
    for (int a = 0; a < n_; ++a) x[a] = -L_ + (c[a] + 0.5) * h_[a];
    return x;
  }

  bool operator==(const Grid& o) const {
    return n_ == o.n_ && cells_ == o.cells_ && L_ == o.L_;
  }

 private:
  int n_ = 1;
  std::array<int, 3> cells_{8, 1, 1};
  std::array<int, 3> stride_{1, 8, 8};
  std::array<double, 3> h_{0.25, 1.0, 1.0};
  double L_ = 1.0;
};

inline Grid make_grid(int n, int cells, double L) { return Grid(n, {cells, cells, cells}, L); }

enum class Rank { Scalar, Vector, Tensor };

/// Field of a given tensor rank stored component-by-component (structure of arrays).
/// Vector components are indexed by axis; tensor components by i * n + j.
template <Rank R>
class Field {
 public:
  Field() = default;

  explicit Field(const Grid& grid, double fill = 0.0)
      : grid_(grid), data_(component_count(grid.dim()), std::vector<double>(grid.size(), fill)) {}

  static int component_count(int n) {
    if constexpr (R == Rank::Scalar) return 1;
    else if constexpr (R == Rank::Vector) return n;
    else return n * n;
  }

  const Grid& grid() const { return grid_; }
  int components() const { return static_cast<int>(data_.size()); }
  std::size_t size() const { return grid_.size(); }

  std::vector<double>& comp(int c) { return data_[c]; }
  const std::vector<double>& comp(int c) const { return data_[c]; }

  // tensor access
  std::vector<double>& operator()(int i, int j) { return data_[i * grid_.dim() + j]; }
  const std::vector<double>& operator()(int i, int j) const { return data_[i * grid_.dim() + j]; }

  // scalar shorthand
  std::vector<double>& values() { return data_[0]; }
  const std::vector<double>& values() const { return data_[0]; }
  double& operator[](std::size_t idx) { return data_[0][idx]; }
  double operator[](std::size_t idx) const { return data_[0][idx]; }

  bool all_finite() const {
    for (const auto& c : data_)
      for (double v : c)
        if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  Grid grid_;
  std::vector<std::vector<double>> data_;
};

using ScalarField = Field<Rank::Scalar>;
using VectorField = Field<Rank::Vector>;
using TensorField = Field<Rank::Tensor>;

/// Pairwise (tree) summation in fixed index order. The result depends only on the
/// input sequence, never on how callers schedule work.
inline double pairwise_sum(std::span<const double> v) {
  constexpr std::size_t kLeaf = 64;
  if (v.size() <= kLeaf) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline double integral(const std::vector<double>& values, const Grid& grid) {
  return pairwise_sum(values) * grid.cell_volume();
}

inline double integral(const ScalarField& f) { return integral(f.values(), f.grid()); }

/// Samples f at cell centres. Non-finite samples are rejected.
inline ScalarField sample(const Grid& grid, const std::function<double(const Vec3&)>& f) {
  ScalarField out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = f(grid.position(i));
    if (!std::isfinite(v)) throw DomainError("non-finite sample value");
    out[i] = v;
  }
  return out;
}

inline VectorField sample_vector(const Grid& grid, const std::function<Vec3(const Vec3&)>& f) {
  VectorField out(grid);
  const int n = grid.dim();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec3 v = f(grid.position(i));
    for (int c = 0; c < n; ++c) {
      if (!std::isfinite(v[c])) throw DomainError("non-finite sample value");
      out.comp(c)[i] = v[c];
    }
  }
  return out;
}

inline void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw DomainError("fields live on different grids");
}

}  // namespace nnfluid
