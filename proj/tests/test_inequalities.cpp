#include <gtest/gtest.h>

#include <random>

#include "nnfluid/inequalities.hpp"

using namespace nnfluid;

namespace {

ScalarField random_density(const Grid& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> ud(0.0, 2.0);
  std::bernoulli_distribution zero(0.2);
  ScalarField rho(g);
  for (double& v : rho.values()) v = zero(rng) ? 0.0 : ud(rng);
  return rho;
}

VectorField random_velocity(const Grid& g, std::mt19937& rng) {
  std::normal_distribution<double> nd(0.3, 1.0);
  VectorField u(g);
  for (int c = 0; c < g.dim(); ++c)
    for (double& v : u.comp(c)) v = nd(rng);
  return u;
}

VectorField gaussian_velocity(const Grid& g, double amp, double w, Vec3 e) {
  return sample_vector(g, [&](const Vec3& x) {
    const double b = amp * std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (w * w));
    return Vec3{b * e[0], b * e[1], b * e[2]};
  });
}

ScalarField indicator(const Grid& g, double r, double value) {
  return sample(g, [&](const Vec3& x) {
    return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] < r * r ? value : 0.0;
  });
}

}  // namespace

TEST(Sobolev10, ZeroField) {
  const Grid g = make_grid(2, 16, 4.0);
  const auto r = verify_sobolev10(VectorField(g), 1.5);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.rhs, 0.0);
  EXPECT_TRUE(r.passed);
}

TEST(Sobolev10, Homogeneity) {
  const Grid g = make_grid(3, 24, 6.0);
  const double q = 2.0;
  const auto a = verify_sobolev10(gaussian_velocity(g, 1.0, 1.0, {1, 0, 0}), q);
  const auto b = verify_sobolev10(gaussian_velocity(g, 2.0, 1.0, {1, 0, 0}), q);
  EXPECT_NEAR(b.lhs / a.lhs, std::pow(2.0, q), 1e-10);
  EXPECT_NEAR(b.rhs / a.rhs, std::pow(2.0, q), 1e-10);
}

TEST(Sobolev10, GaussianBumpAcrossResolutions) {
  std::vector<double> slack;
  for (int N : {64, 128, 256}) {
    const Grid g = make_grid(2, N, 8.0);
    const auto r = verify_sobolev10(gaussian_velocity(g, 1.0, 1.0, {0.6, 0.8, 0}), 1.5);
    EXPECT_TRUE(r.passed);
    EXPECT_GE(r.slack, 0.0);
    slack.push_back(r.slack / r.rhs);
  }
  EXPECT_NEAR(slack[2], slack[1], 0.05);
}

TEST(Sobolev10, SymmetricChoiceAndRange) {
  const Grid g = make_grid(3, 24, 6.0);
  const VectorField u = gaussian_velocity(g, 1.0, 1.0, {1, 0, 0});
  const auto full = verify_sobolev10(u, 2.5, GradientChoice::Full);
  const auto sym = verify_sobolev10(u, 2.5, GradientChoice::Symmetric);
  EXPECT_EQ(full.lhs, sym.lhs);
  EXPECT_LE(sym.rhs, full.rhs);
  EXPECT_THROW(verify_sobolev10(u, 3.0), DomainError);
  EXPECT_THROW(verify_sobolev10(u, 1.0), DomainError);
}

TEST(Holder11, Examples) {
  const Grid g = make_grid(2, 16, 1.0);
  const auto c = verify_holder11(ScalarField(g, 1.7), 1.2, 1.4);
  EXPECT_LE(std::abs(c.slack), 1e-12 * c.rhs);
  const auto z = verify_holder11(ScalarField(g, 0.0), 1.2, 1.4);
  EXPECT_EQ(z.lhs, 0.0);
  EXPECT_TRUE(z.passed);
  EXPECT_THROW(verify_holder11(ScalarField(g, 1.0), 1.5, 1.4), DomainError);
}

TEST(Holder11, RandomFields) {
  std::mt19937 rng(21);
  const Grid g = make_grid(3, 12, 1.0);
  for (int k = 0; k < 100; ++k) {
    const double gamma = 1.1 + 2.0 * (k % 10) / 10.0;
    const auto r = verify_holder11(random_density(g, rng), 0.5 * (1.0 + gamma), gamma);
    EXPECT_GE(r.slack, -1e-10 * std::max({r.lhs, r.rhs, 1.0}));
  }
}

TEST(Holder13, Examples) {
  const Grid g = make_grid(3, 16, 2.0);
  std::mt19937 rng(3);
  const auto z = verify_holder13(random_density(g, rng), VectorField(g), 2.5);
  EXPECT_EQ(z.lhs, 0.0);
  EXPECT_TRUE(z.passed);
  const ScalarField ind = indicator(g, 1.2, 1.0);
  VectorField u(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    u.comp(0)[i] = 0.3 * ind[i];
    u.comp(2)[i] = -0.4 * ind[i];
  }
  const auto eq = verify_holder13(ind, u, 2.5);
  EXPECT_NEAR(eq.lhs, eq.rhs, 1e-10 * eq.rhs);
}

TEST(Holder13, RandomAndScaleCovariance) {
  std::mt19937 rng(31);
  const Grid g = make_grid(3, 12, 1.0);
  for (int k = 0; k < 100; ++k) {
    const ScalarField rho = random_density(g, rng);
    const VectorField u = random_velocity(g, rng);
    const double q = 1.2 + 1.7 * (k % 10) / 10.0;
    const auto r = verify_holder13(rho, u, q);
    EXPECT_GE(r.slack, -1e-10 * std::max({r.lhs, r.rhs, 1.0}));
    if (k < 10) {
      ScalarField scaled = rho;
      for (double& v : scaled.values()) v *= 3.0;
      const auto s = verify_holder13(scaled, u, q);
      EXPECT_NEAR(s.lhs, 3.0 * r.lhs, 1e-12 * s.lhs);
      EXPECT_NEAR(s.rhs, 3.0 * r.rhs, 1e-12 * s.rhs);
    }
  }
}

TEST(Jensen14, Examples) {
  const Grid g = make_grid(3, 16, 2.0);
  const ScalarField ind = indicator(g, 1.3, 0.8);
  const double m = integral(ind);
  const auto eq = verify_jensen14(ind, 2.5, 1.4, 1.0, m);
  EXPECT_NEAR(eq.lhs, eq.rhs, 1e-10 * eq.rhs);
  EXPECT_FALSE(condition15(3, 1.05, 1.2));
  EXPECT_THROW(verify_jensen14(ind, 1.2, 1.05, 1.0, m), DomainError);
}

TEST(Jensen14, RandomFields) {
  std::mt19937 rng(41);
  const Grid g = make_grid(3, 12, 1.0);
  for (int k = 0; k < 100; ++k) {
    const ScalarField rho = random_density(g, rng);
    const auto r = verify_jensen14(rho, 2.5, 1.4, 1.0, integral(rho));
    EXPECT_GE(r.slack, -1e-10 * std::max({r.lhs, r.rhs, 1.0}));
  }
}

TEST(Momentum16, RandomFields) {
  std::mt19937 rng(51);
  const Grid g = make_grid(3, 16, 1.0);
  const ExponentParams p{3, 1.4, 0.6, 1.0, 2.5, 0.0};
  for (int k = 0; k < 40; ++k) {
    const auto r = verify_momentum16(random_density(g, rng), random_velocity(g, rng), p);
    EXPECT_TRUE(r.passed) << r.lhs << " " << r.rhs;
  }
}

TEST(DissipationBound, ZeroMomentum) {
  const Grid g = make_grid(3, 16, 4.0);
  const ExponentParams p{3, 1.4, 1.0, 1.0, 2.5, 0.0};
  FluidState s{indicator(g, 1.5, 1.0), VectorField(g), std::nullopt, 0.0};
  const auto r = dissipation_lower_bound(s, p, integral(s.rho));
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(dissipation_chain_lhs(p, 1.0, 0.0, 1.0), 0.0);
}

TEST(DissipationBound, MatchesCertificateConstant) {
  // nu * lhs evaluated with E_i replaced by E0 = 1 equals the composed rate
  const ExponentParams p{3, 1.4, 0.7, 0.9, 2.5, 0.0};
  const double m = 1.7, P = 0.4;
  const auto k = certificate_constants(p, m, P, 1.0);
  EXPECT_NEAR(p.nu * dissipation_chain_lhs(p, m, P, 1.0), k.C_composed, 1e-12 * k.C_composed);
}

TEST(DissipationBound, UniformVelocityHasNoDissipation) {
  // a uniform velocity is not compactly supported, so the Sobolev step does not apply:
  // D_q vanishes while the momentum bound stays positive
  const Grid g = make_grid(3, 32, 6.0);
  const ExponentParams p{3, 1.4, 1.0, 1.0, 2.5, 0.0};
  FluidState s;
  s.rho = sample(g, [](const Vec3& x) { return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])); });
  s.u = sample_vector(g, [](const Vec3&) { return Vec3{1, 0, 0}; });
  const auto r = dissipation_lower_bound(s, p, integral(s.rho));
  EXPECT_EQ(r.rhs, 0.0);
  EXPECT_GT(r.lhs, 0.0);
  EXPECT_FALSE(r.passed);
}

TEST(DissipationBound, ImpliedByChain) {
  // wherever the symmetric Sobolev, momentum Hoelder and Jensen checks hold, the bound holds
  std::mt19937 rng(61);
  std::uniform_real_distribution<double> ud(0.5, 1.5), dir(-1.0, 1.0);
  const Grid g = make_grid(3, 32, 8.0);
  const ExponentParams p{3, 1.4, 0.5, 1.0, 2.5, 0.0};
  int checked = 0;
  for (int k = 0; k < 12; ++k) {
    const double w = ud(rng), wu = ud(rng), amp = ud(rng), rp = ud(rng);
    FluidState s;
    s.rho = sample(g, [&](const Vec3& x) { return rp * std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (w * w)); });
    s.u = gaussian_velocity(g, amp, wu, {dir(rng), dir(rng), dir(rng)});
    const double m = integral(s.rho);
    const bool chain = verify_sobolev10(s.u, p.q, GradientChoice::Symmetric).passed &&
                       verify_holder13(s.rho, s.u, p.q).passed &&
                       verify_jensen14(s.rho, p.q, p.gamma, p.A, m).passed;
    if (!chain) continue;
    ++checked;
    EXPECT_TRUE(dissipation_lower_bound(s, p, m).passed);
  }
  EXPECT_GT(checked, 0);
}

TEST(DissipationBound, RejectsInadmissible) {
  const Grid g = make_grid(3, 16, 4.0);
  FluidState s{indicator(g, 1.5, 1.0), VectorField(g), std::nullopt, 0.0};
  const ExponentParams p{3, 1.4, 1.0, 1.0, 1.5, 0.0};
  EXPECT_THROW(dissipation_lower_bound(s, p, 1.0), DomainError);
}

TEST(Report, PassRule) {
  EXPECT_TRUE(make_report(InequalityName::Holder11, 1.0 + 1e-11, 1.0, 1e-10).passed);
  EXPECT_FALSE(make_report(InequalityName::Holder11, 1.0 + 1e-9, 1.0, 1e-10).passed);
  EXPECT_EQ(inequality_from_string("Jensen14"), InequalityName::Jensen14);
  EXPECT_THROW(inequality_from_string("jensen"), DomainError);
}
