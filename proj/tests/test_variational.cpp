#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "subohmic/critical.hpp"
#include "subohmic/errors.hpp"
#include "subohmic/model.hpp"
#include "subohmic/numerics.hpp"
#include "subohmic/variational.hpp"

using namespace subohmic;
using namespace subohmic::variational;
using model::ModelParams;

namespace {

constexpr double kPi = std::numbers::pi;

double quad(const std::function<double(double)>& f, double a, double b) {
  static thread_local boost::math::quadrature::tanh_sinh<double> ts(15);
  return ts.integrate(f, a, b, 1e-14);
}

// RHS exponent of the self-consistency for the continuum bath, by tanh-sinh
double exponent_oracle(double m, double dt, const ModelParams& p) {
  const double r2 = 1.0 - m * m, r = std::sqrt(r2);
  auto f = [&](double w) { return r2 * std::pow(w, p.s) / ((dt + r * w) * (dt + r * w)); };
  return p.alpha * std::pow(p.omega_c, 1.0 - p.s) * quad(f, 0.0, p.omega_c);
}

// ground-state energy written term by term: tunnelling, spin-up and spin-down branches.
// Below w0 the bracket tends to -M^2 / (4 w), integrated analytically.
double energy_oracle(double m, double dt, const ModelParams& p) {
  auto bracket = [&](double w) {
    const auto d = displacements(w, m, dt);
    return 0.5 * (1.0 + m) * (d.plus + d.plus * d.plus * w) - 0.5 * (1.0 - m) * (d.minus - d.minus * d.minus * w);
  };
  const double w0 = 1e-30;
  auto f = [&](double t) {
    const double w = std::exp(t);
    return w * model::spectral_density(w, p) / kPi * bracket(w);
  };
  const double head = 2.0 * p.alpha * std::pow(p.omega_c, 1.0 - p.s) * (1e-40 * bracket(1e-40)) * std::pow(w0, p.s) / p.s;
  return -0.5 * dt * std::sqrt(1.0 - m * m) + head + quad(f, std::log(w0), std::log(p.omega_c));
}

double entropy_bits(double p) { return p <= 0.0 || p >= 1.0 ? 0.0 : -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p); }

}  // namespace

TEST(Displacements, Examples) {
  for (double dt : {0.3, 1.0}) {
    for (double w : {0.01, 1.0, 7.0}) {
      const auto d = displacements(w, 0.0, dt);
      EXPECT_NEAR(d.plus, -1.0 / (2.0 * (dt + w)), 1e-15);
      EXPECT_NEAR(d.minus, 1.0 / (2.0 * (dt + w)), 1e-15);
      const auto one = displacements(w, 1.0, dt);
      EXPECT_NEAR(one.plus, -1.0 / (2.0 * w), 1e-14);
      EXPECT_NEAR(one.minus, -1.0 / (2.0 * w), 1e-14);
    }
  }
  const double r = std::sqrt(0.75);
  const auto d = displacements(1.0, 0.5, 1.0);
  EXPECT_NEAR(d.plus, -(0.5 + r) / (2.0 * (1.0 + r)), 1e-15);
  EXPECT_NEAR(d.minus, -(0.5 - r) / (2.0 * (1.0 + r)), 1e-15);
  EXPECT_FALSE(std::isfinite(displacements(0.0, 0.4, 1.0).plus));
}

TEST(Displacements, CrossoverScale) {
  const double m = 0.4, dt = 0.2, r = std::sqrt(1.0 - m * m);
  const double wstar = m * dt / r;
  auto ratio = [&](double w) {
    const auto d = displacements(w, m, dt);
    return d.plus / d.minus;
  };
  EXPECT_NEAR(ratio(1e-9 * wstar), 1.0, 1e-6);
  EXPECT_NEAR(ratio(1e9 * wstar), -1.0, 1e-6);
  EXPECT_GT(ratio(0.99 * wstar), 0.0);
  EXPECT_LT(ratio(1.01 * wstar), 0.0);
}

TEST(VariationalState, Amplitudes) {
  for (double m : {0.0, 0.3, -0.7, 1.0}) {
    const auto st = VariationalState::make(m, 0.5);
    EXPECT_NEAR(st.c_plus * st.c_plus + st.c_minus * st.c_minus, 1.0, 1e-12);
    EXPECT_NEAR(st.c_plus * st.c_plus - st.c_minus * st.c_minus, m, 1e-12);
  }
}

TEST(DeltaTilde, ExactResidualGrid) {
  const ModelParams base{0.3, 0.0, 1.0, 10.0};
  const double ac = critical::critical_coupling_closed({0.3, 1.0, 10.0}).alpha_c;
  int finite = 0;
  for (int i = 0; i < 20; ++i) {
    const double alpha = 2.0 * ac * (i + 1) / 20.0;
    for (int j = 0; j < 20; ++j) {
      const double m = 0.95 * j / 19.0;
      const auto p = base.with_alpha(alpha);
      const double dt = solve_delta_tilde_exact(m, p);
      if (dt == 0.0) continue;
      ++finite;
      const double rhs = p.delta * std::exp(-exponent_oracle(m, dt, p));
      EXPECT_LE(std::fabs(dt - rhs) / dt, 1e-10) << alpha << " " << m;
    }
  }
  EXPECT_GT(finite, 300);
}

TEST(DeltaTilde, ExactExamples) {
  const ModelParams p{0.3, 0.0, 1.0, 10.0};
  EXPECT_EQ(solve_delta_tilde_exact(0.4, p), 1.0);
  const auto q = p.with_alpha(0.05);
  const double dt = solve_delta_tilde_exact(0.0, q);
  EXPECT_GT(dt, 0.0);
  EXPECT_LT(dt, 1.0);
  // dense scan of the fixed-point map: the returned root is the largest crossing
  double last_crossing = 0.0;
  double prev = 1e-6 * q.delta - q.delta * std::exp(-exponent_oracle(0.0, 1e-6 * q.delta, q));
  for (int i = 1; i <= 200; ++i) {
    const double x = q.delta * std::pow(1e-6, 1.0 - i / 200.0);
    const double g = x - q.delta * std::exp(-exponent_oracle(0.0, x, q));
    if ((g > 0.0) != (prev > 0.0)) last_crossing = x;
    prev = g;
  }
  EXPECT_NEAR(dt / last_crossing, 1.0, 0.1);
  EXPECT_NEAR(solve_delta_tilde_scaling(0.0, q) / dt, 1.0, 0.03);
}

TEST(DeltaTilde, LargestRootTendsToDeltaAsMToOne) {
  // the exponent carries a factor (1 - M^2), so the largest finite root is pulled up to Delta
  const ModelParams p{0.3, 0.05, 1.0, 10.0};
  double prev = 0.0;
  for (double eps : {1e-2, 1e-4, 1e-6, 1e-8}) {
    const double dt = solve_delta_tilde_exact(1.0 - eps, p);
    EXPECT_GT(dt, prev);
    prev = dt;
  }
  EXPECT_GT(prev, 0.99 * p.delta);
}

TEST(DeltaTilde, ScalingResidual) {
  for (double s : {0.1, 0.25, 0.4}) {
    for (double alpha : {0.001, 0.01, 0.05}) {
      for (double m : {0.0, 0.3, 0.8}) {
        const ModelParams p{s, alpha, 1.0, 100.0};
        const double dt = solve_delta_tilde_scaling(m, p);
        if (dt == 0.0) continue;
        const double d = p.delta * std::exp(alpha / (1.0 - s));
        const double c = alpha * kPi * s / std::sin(kPi * s) * std::pow(p.omega_c * std::sqrt(1.0 - m * m), 1.0 - s);
        EXPECT_LE(std::fabs(dt - d * std::exp(-c * std::pow(dt, -(1.0 - s)))) / dt, 1e-10);
      }
    }
  }
  EXPECT_EQ(solve_delta_tilde_scaling(0.3, ModelParams{0.3, 0.0, 1.0, 10.0}), 1.0);
}

TEST(Energy, NoCoupling) {
  const ModelParams p{0.3, 0.0, 1.0, 10.0};
  for (double m : {0.0, 0.2, 0.9}) EXPECT_NEAR(energy_exact(m, p), -0.5 * std::sqrt(1.0 - m * m), 1e-14);
  const auto sol = minimize_energy(p);
  EXPECT_EQ(sol.state.m, 0.0);
  EXPECT_NEAR(sol.energy, -0.5, 1e-14);
  EXPECT_NEAR(sol.sx, 1.0, 1e-14);
}

TEST(Energy, StaticShiftEndpoint) {
  for (double s : {0.2, 0.4}) {
    const ModelParams p{s, 0.07, 1.0, 10.0};
    EXPECT_NEAR(energy_exact(1.0, p), -p.alpha * p.omega_c / (2.0 * s), 1e-10);
  }
}

TEST(Energy, MatchesTermByTermOracle) {
  const ModelParams p{0.3, 0.04, 1.0, 10.0};
  for (double m : {0.0, 0.25, 0.6}) {
    const double dt = solve_delta_tilde_exact(m, p);
    EXPECT_NEAR(energy_exact(m, p), energy_oracle(m, dt, p), 1e-10) << m;
  }
}

TEST(Energy, EvenInM) {
  const ModelParams p{0.3, 0.04, 1.0, 10.0};
  for (double m : {0.1, 0.5, 0.9}) EXPECT_EQ(energy_exact(m, p), energy_exact(-m, p));
}

TEST(Energy, ScalingAgreesWithExactAtLargeCutoff) {
  const ModelParams p{0.3, 0.0, 1.0, 1000.0};
  const double ac = critical::critical_coupling_closed({0.3, 1.0, 1000.0}).alpha_c;
  for (double f : {0.2, 0.5}) {
    const auto q = p.with_alpha(f * ac);
    for (double m : {0.0, 0.3}) {
      const double ex = energy_exact(m, q), sc = energy_scaling(m, q);
      EXPECT_LE(std::fabs(sc - ex) / std::fabs(ex), 5e-3) << f << " " << m;
    }
  }
  EXPECT_NEAR(energy_scaling(0.0, p), -0.5, 1e-14);
  EXPECT_NEAR(energy_scaling(0.0, p, TunnelingPrefactor::printed_unity), -1.0, 1e-14);
}

TEST(Energy, DisplacementsOfSingleModeAtZeroTunnelling) {
  model::BathSpectrum sp{{2.0}, {0.36}};
  std::vector<double> shape{-1.0 / 4.0};
  EXPECT_NEAR(energy_of_displacements(sp, 1.0, 1.0, shape, shape), -0.36 / 8.0, 1e-15);
}

TEST(Energy, OptimalDisplacementsAreStationary) {
  const ModelParams p{0.3, 0.04, 1.0, 10.0};
  const auto sp = model::continuum_spectrum(p);
  std::mt19937 rng(7);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (double m : {0.0, 0.4}) {
    const double dt = solve_delta_tilde_exact(m, p);
    std::vector<double> fp(sp.size()), fm(sp.size());
    for (std::size_t i = 0; i < sp.size(); ++i) {
      const auto d = displacements(sp.frequencies[i], m, dt);
      fp[i] = d.plus;
      fm[i] = d.minus;
    }
    const double e0 = energy_of_displacements(sp, m, p.delta, fp, fm);
    EXPECT_NEAR(e0, energy_at(sp, m, dt), 1e-12);
    EXPECT_NEAR(e0, energy_exact(m, p), 1e-12);
    for (int trial = 0; trial < 20; ++trial) {
      // smooth relative perturbation of both shapes
      const double a = noise(rng), b = noise(rng), c = noise(rng);
      auto gp = fp, gm = fm;
      for (std::size_t i = 0; i < sp.size(); ++i) {
        const double x = sp.frequencies[i] / p.omega_c;
        gp[i] *= 1.0 + 1e-6 * (a + b * x);
        gm[i] *= 1.0 + 1e-6 * (c - b * x);
      }
      EXPECT_GE(energy_of_displacements(sp, m, p.delta, gp, gm), e0 - 1e-10);
      for (std::size_t i = 0; i < sp.size(); ++i) {
        gp[i] = fp[i] * (1.0 + 0.1 * a);
        gm[i] = fm[i] * (1.0 + 0.1 * c);
      }
      EXPECT_GT(energy_of_displacements(sp, m, p.delta, gp, gm), e0);
    }
  }
}

TEST(Minimize, Delocalized) {
  const ModelParams p{0.3, 0.005, 1.0, 10.0};
  const auto sol = minimize_energy(p);
  EXPECT_EQ(sol.state.m, 0.0);
  EXPECT_NEAR(sol.sx, sol.state.delta_tilde / p.delta, 1e-14);
  EXPECT_NEAR(sol.state.delta_tilde, solve_delta_tilde_exact(0.0, p), 1e-12);
  // Silbey-Harris symmetry
  for (double w : {0.01, 0.5, 5.0}) EXPECT_EQ(sol.state.shape(w).plus, -sol.state.shape(w).minus);
  EXPECT_TRUE(sol.occupation_finite);
}

TEST(Minimize, LocalizedAgainstGridScan) {
  const ModelParams p{0.3, 0.0, 1.0, 10.0};
  const double ac = critical::critical_coupling_numeric({0.3, 1.0, 10.0});
  for (double f : {1.5, 3.0}) {
    const auto q = p.with_alpha(f * ac);
    const auto sol = minimize_energy(q);
    const auto land = EnergyLandscape::exact(q);
    double grid_min = land.energy(0.0);
    for (int i = 1; i <= 1000; ++i) grid_min = std::min(grid_min, land.energy(i / 1000.0 * (1.0 - 1e-9)));
    EXPECT_GT(sol.state.m, 0.0);
    EXPECT_LE(sol.energy, grid_min + 1e-12);
    EXPECT_LT(sol.energy, land.energy(0.0));
    EXPECT_FALSE(sol.occupation_finite);
  }
  EXPECT_GT(minimize_energy(p.with_alpha(20.0 * ac)).state.m, 0.9);
}

TEST(Observables, Formulas) {
  const ModelParams p{0.3, 0.01, 1.0, 10.0};
  const auto zero = observables(VariationalState::make(0.0, 0.6), p);
  EXPECT_NEAR(zero.sx, 0.6, 1e-15);
  EXPECT_NEAR(zero.entanglement, entropy_bits(0.5 * (1.0 + 0.6)), 1e-14);
  EXPECT_EQ(zero.crossover_scale, 0.0);

  const auto one = observables(VariationalState::make(1.0, 0.0), p);
  EXPECT_EQ(one.sx, 0.0);
  EXPECT_NEAR(one.entanglement, 0.0, 1e-15);
  EXPECT_TRUE(std::isinf(one.crossover_scale));

  const double m = 0.5, dt = 0.4;
  const auto mid = observables(VariationalState::make(m, dt), p);
  const double sx = std::sqrt(1.0 - m * m) * dt;
  EXPECT_NEAR(mid.sx, sx, 1e-15);
  EXPECT_NEAR(mid.sz, m, 1e-15);
  const double pp = 0.5 * (1.0 + std::hypot(sx, m));
  EXPECT_NEAR(mid.p_plus, pp, 1e-15);
  EXPECT_NEAR(mid.entanglement, entropy_bits(pp), 1e-14);
  EXPECT_NEAR(mid.crossover_scale, m * dt / std::sqrt(1.0 - m * m), 1e-15);
}

TEST(Occupation, DensityAndTotal) {
  const ModelParams p{0.3, 0.01, 1.0, 10.0};
  const double dt = solve_delta_tilde_exact(0.0, p);
  const auto st = VariationalState::make(0.0, dt);
  for (double w : {0.001, 0.3, 4.0}) {
    EXPECT_NEAR(occupation_density(st, p, w), model::spectral_density(w, p) / kPi / (4.0 * (dt + w) * (dt + w)), 1e-14);
  }
  const double total = total_occupation(st, p);
  const double ref = quad([&](double w) { return occupation_density(st, p, w); }, 0.0, p.omega_c);
  EXPECT_GT(total, 0.0);
  EXPECT_NEAR(total / ref, 1.0, 1e-10);

  const auto loc = VariationalState::make(0.3, dt);
  EXPECT_TRUE(std::isinf(total_occupation(loc, p)));
  // n(w) -> (1/pi) J M^2 / (4 w^2) at small w
  const double w = 1e-9;
  EXPECT_NEAR(occupation_density(loc, p, w) / (model::spectral_density(w, p) / kPi * 0.09 / (4.0 * w * w)), 1.0, 1e-6);
}

TEST(Landau, WeakCoupling) {
  const ModelParams p{0.3, 0.0, 1.0, 10.0};
  const auto lc = landau_coefficients(p);
  EXPECT_NEAR(lc.c0, -0.5, 1e-14);
  EXPECT_NEAR(lc.c1, 0.25, 1e-9);
  EXPECT_NEAR(susceptibility(p), 1.0, 1e-8);
}

TEST(Landau, C1MatchesEnvelopeDerivative) {
  for (double alpha : {0.01, 0.03, 0.05}) {
    const ModelParams p{0.3, alpha, 1.0, 10.0};
    const double d0 = solve_delta_tilde_exact(0.0, p);
    const double sum = 2.0 * alpha * std::pow(p.omega_c, 1.0 - p.s) *
                       quad([&](double w) { return std::pow(w, p.s - 1.0) / ((d0 + w) * (d0 + w)); }, 0.0, p.omega_c);
    const double c1 = 0.25 * d0 * (1.0 - d0 * sum);
    EXPECT_NEAR(landau_coefficients(p).c1, c1, 1e-9) << alpha;
  }
}

TEST(Landau, AtCriticalCoupling) {
  const critical::BathShape bath{0.3, 1.0, 10.0};
  const double ac = critical::critical_coupling_numeric(bath);
  const auto lc = landau_coefficients(bath.at(ac));
  EXPECT_LE(std::fabs(lc.c1), 1e-6);
  EXPECT_GT(lc.c2, 0.0);
  EXPECT_THROW(susceptibility(bath.at(1.1 * ac)), DomainError);
}

TEST(Landau, SusceptibilityDiverges) {
  const critical::BathShape bath{0.3, 1.0, 1000.0};
  const double ac = critical::critical_coupling_numeric(bath);
  std::vector<double> xs, ys;
  double prev = 0.0;
  for (int i = 0; i <= 9; ++i) {
    const double a = (0.90 + 0.01 * i) * ac;
    const double chi = susceptibility(bath.at(a));
    EXPECT_GT(chi, prev);
    prev = chi;
    xs.push_back(1.0 - a / ac);
    ys.push_back(chi);
  }
  EXPECT_NEAR(numerics::fit_power_law(xs, ys).exponent, -1.0, 0.02);
}

TEST(Landau, ScalingPrefactorConvention) {
  // the derived prefactor approaches the closed-form critical coupling as w_c grows, the printed one does not
  double prev = 1.0;
  for (double wc : {1e2, 1e4, 1e6}) {
    const critical::BathShape bath{0.3, 1.0, wc};
    const double ac = critical::critical_coupling_closed(bath).alpha_c;
    auto root = [&](TunnelingPrefactor t) {
      return critical::critical_coupling_from_c1([&](double a) { return landau_c1(EnergyLandscape::scaling(bath.at(a), t)); }, ac);
    };
    const double half = std::fabs(root(TunnelingPrefactor::derived_half) / ac - 1.0);
    EXPECT_LT(half, 0.1 * prev);
    prev = half;
    EXPECT_GT(root(TunnelingPrefactor::printed_unity) / ac, 1.4);
  }
  EXPECT_LT(prev, 1e-4);
}
