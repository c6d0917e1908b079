#pragma once

// Two-sided evaluation of the functional inequalities used in the nonexistence
// argument. Hoelder and Jensen are exact for the discrete (counting-measure)
// integrals; the Sobolev step only holds up to discretization error.

#include <cmath>
#include <map>
#include <string>

#include "nnfluid/functionals.hpp"

namespace nnfluid {

enum class InequalityName { Sobolev10, Holder11, Holder13, Jensen14, Momentum16, DissipationBound };

inline const char* to_string(InequalityName n) {
  switch (n) {
    case InequalityName::Sobolev10: return "Sobolev10";
    case InequalityName::Holder11: return "Holder11";
    case InequalityName::Holder13: return "Holder13";
    case InequalityName::Jensen14: return "Jensen14";
    case InequalityName::Momentum16: return "Momentum16";
    case InequalityName::DissipationBound: return "DissipationBound";
  }
  return "";
}

inline InequalityName inequality_from_string(const std::string& s) {
  for (auto n : {InequalityName::Sobolev10, InequalityName::Holder11, InequalityName::Holder13,
                 InequalityName::Jensen14, InequalityName::Momentum16,
                 InequalityName::DissipationBound})
    if (s == to_string(n)) return n;
  throw DomainError("unknown inequality '" + s + "'");
}

enum class GradientChoice { Full, Symmetric };

struct InequalityTolerances {
  double discretization = 0.05;  // Sobolev
  double algebraic = 1e-10;      // Hoelder, Jensen, momentum bound
  double composite = 0.10;       // dissipation lower bound
};

/// One "lhs <= rhs" check. slack = rhs - lhs.
struct InequalityReport {
  InequalityName name = InequalityName::Sobolev10;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double tol = 0.0;
  bool passed = false;
  std::map<std::string, double> context;
};

inline InequalityReport make_report(InequalityName name, double lhs, double rhs, double tol,
                                    std::map<std::string, double> context = {}) {
  InequalityReport r;
  r.name = name;
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.tol = tol;
  r.passed = r.slack >= -tol * std::max({std::abs(lhs), std::abs(rhs), 1.0});
  r.context = std::move(context);
  return r;
}

namespace detail {

inline void require_sobolev_range(int n, double q) {
  if (n < 2) throw DomainError("inequality needs n >= 2");
  if (!(q > 1.0 && q < n)) throw DomainError("q must lie in (1, n)");
}

inline double density_power_integral(const ScalarField& rho, double p) {
  std::vector<double> w(rho.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::pow(rho[i], p);
  return integral(w, rho.grid());
}

inline Vec3 momentum(const ScalarField& rho, const VectorField& u) {
  Vec3 P{0.0, 0.0, 0.0};
  std::vector<double> w(rho.size());
  for (int c = 0; c < rho.grid().dim(); ++c) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = rho[i] * u.comp(c)[i];
    P[c] = integral(w, rho.grid());
  }
  return P;
}

inline double gradient_power_integral(const VectorField& u, double q, GradientChoice choice) {
  const TensorField G = choice == GradientChoice::Full ? gradient(u) : shear_rate(u);
  return power_integral(tensor_magnitude(G), q);
}

}  // namespace detail

/// (int |u|^(qn/(n-q)))^((n-q)/n) <= K int |G u|^q.
inline InequalityReport verify_sobolev10(const VectorField& u, double q,
                                         GradientChoice choice = GradientChoice::Full,
                                         double tol = InequalityTolerances{}.discretization) {
  const int n = u.grid().dim();
  detail::require_sobolev_range(n, q);
  const double r = velocity_exponent(n, q);
  const double lhs = std::pow(power_integral(vector_magnitude(u), r), (n - q) / n);
  const double K = sobolev_K(n, q);
  const double rhs = K * detail::gradient_power_integral(u, q, choice);
  return make_report(InequalityName::Sobolev10, lhs, rhs, tol,
                     {{"n", n}, {"q", q}, {"K", K},
                      {"symmetric_gradient", choice == GradientChoice::Symmetric ? 1.0 : 0.0}});
}

/// int rho^sigma <= (int rho)^((g-s)/(g-1)) (int rho^g)^((s-1)/(g-1)).
inline InequalityReport verify_holder11(const ScalarField& rho, double sigma, double gamma,
                                        double tol = InequalityTolerances{}.algebraic) {
  if (!(sigma > 1.0 && sigma < gamma)) throw DomainError("sigma must lie in (1, gamma)");
  const double lhs = detail::density_power_integral(rho, sigma);
  const double m = integral(rho);
  const double ig = detail::density_power_integral(rho, gamma);
  const double rhs = std::pow(m, (gamma - sigma) / (gamma - 1.0)) *
                     std::pow(ig, (sigma - 1.0) / (gamma - 1.0));
  return make_report(InequalityName::Holder11, lhs, rhs, tol, {{"sigma", sigma}, {"gamma", gamma}});
}

/// |int rho u| <= ||rho||_s ||u||_{qn/(n-q)}, s = qn/(n(q-1)+q).
inline InequalityReport verify_holder13(const ScalarField& rho, const VectorField& u, double q,
                                        double tol = InequalityTolerances{}.algebraic) {
  const int n = rho.grid().dim();
  detail::require_sobolev_range(n, q);
  const double s = density_exponent(n, q);
  const double r = velocity_exponent(n, q);
  const double lhs = euclidean_norm(detail::momentum(rho, u));
  const double rhs = std::pow(detail::density_power_integral(rho, s), 1.0 / s) *
                     std::pow(power_integral(vector_magnitude(u), r), 1.0 / r);
  return make_report(InequalityName::Holder13, lhs, rhs, tol, {{"n", n}, {"q", q}});
}

/// ((1/m) int rho^s)^a <= (int rho^gamma) / m, a = (gamma-1)(n(q-1)+q)/(n-q) >= 1.
inline InequalityReport verify_jensen14(const ScalarField& rho, double q, double gamma, double A,
                                        double m, double tol = InequalityTolerances{}.algebraic) {
  const int n = rho.grid().dim();
  detail::require_sobolev_range(n, q);
  if (!condition15(n, gamma, q))
    throw DomainError("Jensen condition violated: Jensen direction not guaranteed");
  if (!(m > 0.0)) throw DomainError("Jensen check needs positive mass");
  const double s = density_exponent(n, q);
  const double a = condition15_value(n, gamma, q);
  const double lhs = std::pow(detail::density_power_integral(rho, s) / m, a);
  const double rhs = detail::density_power_integral(rho, gamma) / m;
  return make_report(InequalityName::Jensen14, lhs, rhs, tol,
                     {{"n", n}, {"q", q}, {"gamma", gamma}, {"A", A}, {"m", m}, {"exponent", a}});
}

/// |P| <= K1 E_i^((n-q)/(qn(gamma-1))) (int |u|^(qn/(n-q)))^((n-q)/(qn)).
inline InequalityReport verify_momentum16(const ScalarField& rho, const VectorField& u,
                                          const ExponentParams& params,
                                          double tol = InequalityTolerances{}.algebraic) {
  const int n = rho.grid().dim();
  const double q = params.q;
  detail::require_sobolev_range(n, q);
  const double m = integral(rho);
  const double K1 = momentum_K1(n, params.gamma, q, m, params.A);
  const double Ei = params.A / (params.gamma - 1.0) *
                    detail::density_power_integral(rho, params.gamma);
  const double lhs = euclidean_norm(detail::momentum(rho, u));
  const double rhs = K1 * std::pow(Ei, internal_energy_exponent(n, params.gamma, q)) *
                     std::pow(power_integral(vector_magnitude(u), velocity_exponent(n, q)),
                              (n - q) / (q * n));
  return make_report(InequalityName::Momentum16, lhs, rhs, tol,
                     {{"n", n}, {"q", q}, {"gamma", params.gamma}, {"K1", K1}, {"E_i", Ei}});
}

/// Lower bound on the q-dissipation implied by the momentum bound and Sobolev:
///   (1/K) (|P| / (K1 E_i^e))^q <= int |D u|^q.
inline double dissipation_chain_lhs(const ExponentParams& params, double m, double momentum_norm,
                                    double E_i) {
  const int n = params.n;
  const double q = params.q;
  const double K = sobolev_K(n, q);
  const double K1 = momentum_K1(n, params.gamma, q, m, params.A);
  if (momentum_norm == 0.0) return 0.0;
  const double e = internal_energy_exponent(n, params.gamma, q);
  return std::pow(momentum_norm / (K1 * std::pow(E_i, e)), q) / K;
}

inline InequalityReport dissipation_lower_bound(const FluidState& state,
                                                const ExponentParams& params, double m,
                                                GradientChoice choice = GradientChoice::Symmetric,
                                                double tol = InequalityTolerances{}.composite) {
  const AdmissibilityReport adm = admissibility(params, 1.0, false);
  if (!adm.in_open_range || !adm.condition15)
    throw DomainError("inadmissible parameters for the dissipation bound");
  const EnergyBreakdown e = functionals(state, params);
  if (!(e.E_i > 0.0)) throw DomainError("dissipation bound needs positive internal energy");
  const double lhs = dissipation_chain_lhs(params, m, e.momentum_norm(), e.E_i);
  const double rhs = choice == GradientChoice::Symmetric
                         ? e.D_q
                         : detail::gradient_power_integral(state.u, params.q, choice);
  return make_report(InequalityName::DissipationBound, lhs, rhs, tol,
                     {{"n", params.n}, {"q", params.q}, {"gamma", params.gamma}, {"m", m},
                      {"P", e.momentum_norm()}, {"E_i", e.E_i},
                      {"symmetric_gradient", choice == GradientChoice::Symmetric ? 1.0 : 0.0}});
}

}  // namespace nnfluid
