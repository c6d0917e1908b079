#pragma once

// Divergence cleaning for the magnetic field. Solves the discrete Poisson problem
// div(grad phi) = div H with the same central differences the solver uses and
// returns H - grad phi. Diagonal in Fourier space: with s_a = sin(k_a h_a) / h_a,
//   H_hat <- H_hat - s (s . H_hat) / |s|^2.

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <vector>

#include "nnfluid/grid.hpp"

namespace nnfluid {

class DivergenceProjector {
 public:
  explicit DivergenceProjector(const Grid& grid) : grid_(grid) {
    const int N0 = grid.cells(0), N1 = grid.cells(1), N2 = grid.cells(2);
    half_ = N0 / 2 + 1;
    real_.reset(fftw_alloc_real(grid.size()));
    spec_size_ = static_cast<std::size_t>(half_) * N1 * N2;
    for (auto& s : spectra_) s.reset(fftw_alloc_complex(spec_size_));
    // fftw is row-major with the last index fastest; axis 0 is our fastest axis.
    const int dims = grid.dim();
    int shape[3];
    if (dims == 3) { shape[0] = N2; shape[1] = N1; shape[2] = N0; }
    else if (dims == 2) { shape[0] = N1; shape[1] = N0; }
    else { shape[0] = N0; }
    forward_ = fftw_plan_dft_r2c(dims, shape, real_.get(), spectra_[0].get(), FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r(dims, shape, spectra_[0].get(), real_.get(), FFTW_ESTIMATE);
    symbol_.resize(3);
    for (int a = 0; a < 3; ++a) {
      const int N = grid.cells(a);
      symbol_[a].assign(N, 0.0);
      if (a >= dims) continue;
      for (int i = 0; i < N; ++i) {
        const int k = i <= N / 2 ? i : i - N;
        symbol_[a][i] = std::sin(2.0 * M_PI * k / N) / grid.spacing(a);
      }
    }
  }

  DivergenceProjector(const DivergenceProjector&) = delete;
  DivergenceProjector& operator=(const DivergenceProjector&) = delete;

  ~DivergenceProjector() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  /// Replaces H by its discretely divergence-free part.
  void project(VectorField& H) {
    require_same_grid(H.grid(), grid_);
    const int n = grid_.dim();
    const std::size_t N = grid_.size();
    for (int c = 0; c < n; ++c) {
      std::copy(H.comp(c).begin(), H.comp(c).end(), real_.get());
      fftw_execute_dft_r2c(forward_, real_.get(), spectra_[c].get());
    }
    const int N1 = grid_.cells(1), N2 = grid_.cells(2);
    for (int k = 0; k < N2; ++k)
      for (int j = 0; j < N1; ++j)
        for (int i = 0; i < half_; ++i) {
          const std::size_t idx = static_cast<std::size_t>(i) +
                                  static_cast<std::size_t>(half_) * (j + static_cast<std::size_t>(N1) * k);
          const double s[3] = {symbol_[0][i], symbol_[1][j], symbol_[2][k]};
          double s2 = 0.0;
          for (int a = 0; a < n; ++a) s2 += s[a] * s[a];
          if (s2 == 0.0) continue;
          std::complex<double> dot = 0.0;
          for (int a = 0; a < n; ++a)
            dot += s[a] * std::complex<double>(spectra_[a].get()[idx][0], spectra_[a].get()[idx][1]);
          dot /= s2;
          for (int a = 0; a < n; ++a) {
            spectra_[a].get()[idx][0] -= s[a] * dot.real();
            spectra_[a].get()[idx][1] -= s[a] * dot.imag();
          }
        }
    const double inv = 1.0 / static_cast<double>(N);
    for (int c = 0; c < n; ++c) {
      fftw_execute_dft_c2r(backward_, spectra_[c].get(), real_.get());
      auto& out = H.comp(c);
      for (std::size_t i = 0; i < N; ++i) out[i] = real_.get()[i] * inv;
    }
  }

 private:
  struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
  };

  Grid grid_;
  int half_ = 0;
  std::size_t spec_size_ = 0;
  std::unique_ptr<double, FftwFree> real_;
  std::unique_ptr<fftw_complex, FftwFree> spectra_[3];
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
  std::vector<std::vector<double>> symbol_;
};

}  // namespace nnfluid
