#pragma once

// Exponents, constants and hypothesis checks of the nonexistence theorems for
// compressible power-law fluids. Everything here is a closed-form function of
// the model parameters.

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace nnfluid {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Model parameters shared by the thresholds, the certifier and the solver.
struct ExponentParams {
  int n = 3;           // spatial dimension
  double gamma = 1.4;  // heat ratio
  double A = 1.0;      // pressure coefficient, p = A rho^gamma
  double nu = 1.0;     // coercivity constant
  double q = 2.5;      // coercivity exponent
  double eta = 0.0;    // magnetic resistivity

  void validate() const {
    if (n < 1 || n > 3) throw DomainError("n must be 1, 2 or 3");
    if (!(gamma > 1.0)) throw DomainError("gamma must exceed 1");
    if (!(A > 0.0)) throw DomainError("A must be positive");
    if (!(nu > 0.0)) throw DomainError("nu must be positive");
    if (!(q > 1.0)) throw DomainError("q must exceed 1");
    if (!(eta >= 0.0)) throw DomainError("eta must be nonnegative");
  }
};

struct ThresholdSet {
  double q0 = 0.0;
  double q1 = 0.0;
  std::optional<double> K;       // needs 1 < q < n
  std::optional<double> K1;      // needs q, mass and the Jensen condition
  std::optional<double> mhd_lo;  // only for n = 3
};

enum class Theorem { Fluid, MHD, None };

inline const char* to_string(Theorem t) {
  switch (t) {
    case Theorem::Fluid: return "Fluid";
    case Theorem::MHD: return "MHD";
    case Theorem::None: return "None";
  }
  return "None";
}

struct AdmissibilityReport {
  bool in_q_range = false;       // membership used by the selected theorem
  bool in_closed_range = false;  // q in [q0, n)
  bool in_open_range = false;    // q in (q0, n)
  bool condition15 = false;
  bool momentum_nonzero = false;
  bool theorem_applies = false;
  Theorem which_theorem = Theorem::None;
  std::string failed_hypothesis;  // empty when theorem_applies
};

namespace detail {

inline void require_theory_dimension(int n) {
  if (n < 2) throw DomainError("theorem quantities need n >= 2");
}

inline void require_gamma(double gamma) {
  if (!(gamma > 1.0)) throw DomainError("gamma must exceed 1");
}

}  // namespace detail

inline double q0(int n, double gamma) {
  detail::require_theory_dimension(n);
  detail::require_gamma(gamma);
  return 2.0 * n * gamma / (n * (gamma - 1.0) + 2.0 * gamma);
}

inline double q1(int n, double gamma) {
  detail::require_theory_dimension(n);
  detail::require_gamma(gamma);
  return n * gamma / ((n + 1) * (gamma - 1.0) + 1.0);
}

/// Integrability exponent for u when rho is known to lie in L^sigma.
inline double q_sigma(int n, double sigma) {
  detail::require_theory_dimension(n);
  if (!(sigma > 1.0)) throw DomainError("sigma must exceed 1");
  return 2.0 * n * sigma / ((sigma - 1.0) * n + 2.0 * sigma);
}

/// Lower end of the MHD exponent range, 6 gamma / (5 gamma - 3).
inline double mhd_lower(double gamma) {
  detail::require_gamma(gamma);
  return 6.0 * gamma / (5.0 * gamma - 3.0);
}

/// Constant of the Sobolev-type inequality ||u||_{qn/(n-q)}^q <= K int |Du|^q.
inline double sobolev_K(int n, double q) {
  if (!(q > 1.0)) throw DomainError("sobolev_K needs q > 1");
  if (!(q < n)) throw DomainError("sobolev_K needs q < n");
  return q * (n - 1) / (2.0 * (n - q));
}

/// Left side of the Jensen condition: (gamma-1)(n(q-1)+q)/(n-q). Jensen's step needs >= 1.
inline double condition15_value(int n, double gamma, double q) {
  if (!(q < n)) throw DomainError("Jensen condition needs q < n");
  return (gamma - 1.0) * (n * (q - 1.0) + q) / (n - q);
}

inline bool condition15(int n, double gamma, double q) {
  if (!(q < n)) return false;
  return condition15_value(n, gamma, q) >= 1.0;
}

/// Exponent of rho in the momentum Hoelder step, qn/(n(q-1)+q).
inline double density_exponent(int n, double q) { return q * n / (n * (q - 1.0) + q); }

/// Exponent of |u| in the Sobolev-side integral, qn/(n-q).
inline double velocity_exponent(int n, double q) { return q * n / (n - q); }

/// Exponent of E_i in the momentum bound, (n-q)/(qn(gamma-1)).
inline double internal_energy_exponent(int n, double gamma, double q) {
  return (n - q) / (q * n * (gamma - 1.0));
}

/// K1 in |P| <= K1 E_i^((n-q)/(qn(gamma-1))) (int |u|^(qn/(n-q)))^((n-q)/(qn)).
///
/// Composition of the momentum Hoelder bound with Jensen:
///   int rho^s <= m ((gamma-1) E_i / (m A))^(1/a),  s = qn/(n(q-1)+q),
///   a = (gamma-1)(n(q-1)+q)/(n-q), and 1/(a s) = (n-q)/(qn(gamma-1)).
inline double momentum_K1(int n, double gamma, double q, double m, double A) {
  detail::require_theory_dimension(n);
  detail::require_gamma(gamma);
  if (!(q > 1.0 && q < n)) throw DomainError("momentum_K1 needs 1 < q < n");
  if (!(m > 0.0)) throw DomainError("momentum_K1 needs positive mass");
  if (!(A > 0.0)) throw DomainError("momentum_K1 needs A > 0");
  if (!condition15(n, gamma, q)) throw DomainError("Jensen condition fails: Jensen step invalid");
  const double mass_exp = (n * (q - 1.0) + q) / (q * n);
  const double ei_exp = internal_energy_exponent(n, gamma, q);
  return std::pow(m, mass_exp) * std::pow((gamma - 1.0) / (m * A), ei_exp);
}

template <std::size_t D>
double euclidean_norm(const std::array<double, D>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

/// Fluid theorem uses q in (q0, n); MHD theorem needs n = 3 and q in [6g/(5g-3), 3).
inline AdmissibilityReport admissibility(const ExponentParams& params, double momentum_norm,
                                         bool is_mhd) {
  AdmissibilityReport r;
  r.momentum_nonzero = momentum_norm > 0.0;
  if (params.n < 2 || !(params.gamma > 1.0) || !(params.q > 1.0)) {
    r.failed_hypothesis = "in_q_range";
    return r;
  }
  const double lo = q0(params.n, params.gamma);
  r.in_closed_range = params.q >= lo && params.q < params.n;
  r.in_open_range = params.q > lo && params.q < params.n;
  r.condition15 = condition15(params.n, params.gamma, params.q);
  if (is_mhd) {
    r.in_q_range = params.n == 3 && params.q >= mhd_lower(params.gamma) && params.q < 3.0;
  } else {
    r.in_q_range = r.in_open_range;
  }
  r.theorem_applies = r.in_q_range && r.condition15 && r.momentum_nonzero;
  if (r.theorem_applies) {
    r.which_theorem = is_mhd ? Theorem::MHD : Theorem::Fluid;
  } else if (!r.in_q_range) {
    r.failed_hypothesis = "in_q_range";
  } else if (!r.condition15) {
    r.failed_hypothesis = "condition15";
  } else {
    r.failed_hypothesis = "momentum_nonzero";
  }
  return r;
}

struct CertificateConstants {
  double K = 0.0;
  double K1 = 0.0;
  double C = 0.0;           // decay rate with the E(0) exponent as stated in the theorem proof
  double C_composed = 0.0;  // decay rate with the exponent obtained by composing the chain
  double T_star = 0.0;      // E0 / C
};

/// Guaranteed energy decay rate and lifespan bound.
///
/// C = nu |P|^q / (K1^q K) * E0^(-(n-q)/(qn(gamma-1))). Composing the dissipation
/// bound with the momentum bound raises E_i to q times that exponent; that rate is
/// returned as C_composed and bounds the instantaneous chain from below.
inline CertificateConstants certificate_constants(const ExponentParams& params, double m,
                                                  double momentum_norm, double E0,
                                                  bool is_mhd = false) {
  const AdmissibilityReport adm = admissibility(params, momentum_norm, is_mhd);
  if (!adm.theorem_applies)
    throw DomainError("hypothesis failed: " + adm.failed_hypothesis);
  if (!(E0 > 0.0)) throw DomainError("initial energy must be positive");
  const int n = params.n;
  const double q = params.q;
  CertificateConstants c;
  c.K = sobolev_K(n, q);
  c.K1 = momentum_K1(n, params.gamma, q, m, params.A);
  const double e = internal_energy_exponent(n, params.gamma, q);
  const double base = params.nu * std::pow(momentum_norm, q) / (std::pow(c.K1, q) * c.K);
  c.C = base * std::pow(E0, -e);
  c.C_composed = base * std::pow(E0, -q * e);
  c.T_star = E0 / c.C;
  return c;
}

inline ThresholdSet threshold_set(int n, double gamma, std::optional<double> q = {},
                                  std::optional<double> m = {}, double A = 1.0) {
  ThresholdSet t;
  t.q0 = q0(n, gamma);
  t.q1 = q1(n, gamma);
  if (n == 3) t.mhd_lo = mhd_lower(gamma);
  if (q && *q > 1.0 && *q < n) {
    t.K = sobolev_K(n, *q);
    if (m && *m > 0.0 && condition15(n, gamma, *q)) t.K1 = momentum_K1(n, gamma, *q, *m, A);
  }
  return t;
}

}  // namespace nnfluid
