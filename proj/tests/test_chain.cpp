#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "subohmic/chain.hpp"
#include "subohmic/critical.hpp"
#include "subohmic/errors.hpp"
#include "subohmic/numerics.hpp"
#include "subohmic/variational.hpp"

using namespace subohmic;
using namespace subohmic::chain;
using model::ModelParams;

namespace {

Eigen::MatrixXd jacobi_matrix(const ChainRepresentation& c, int n) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    h(i, i) = c.site_energies[i];
    if (i + 1 < n) h(i, i + 1) = h(i + 1, i) = c.hoppings[i];
  }
  return h;
}

double tail_mean(const std::vector<double>& v, int lo, int hi) {
  double sum = 0.0;
  for (int n = lo; n <= hi; ++n) sum += v[n];
  return sum / (hi - lo + 1);
}

struct Localized {
  ModelParams p;
  variational::GroundStateSolution sol;
  ChainRepresentation chain;
};

Localized localized(double s) {
  const critical::BathShape b{s, 1.0, 10.0};
  const auto p = b.at(1.2 * critical::critical_coupling_numeric(b));
  return {p, variational::minimize_energy(p), chain_map(p, 400)};
}

}  // namespace

TEST(ChainMap, LowMoments) {
  for (double s : {0.2, 0.3, 0.45}) {
    const ModelParams p{s, 0.03, 1.0, 10.0};
    const auto c = chain_map(p, 10);
    EXPECT_NEAR(c.site_energies[0], p.omega_c * (s + 1.0) / (s + 2.0), 1e-12);
    EXPECT_NEAR(c.system_coupling * c.system_coupling, model::bath_mass(p), 1e-12 * model::bath_mass(p));
    EXPECT_EQ(c.n_sites(), 10);
    EXPECT_EQ(c.omega_c, p.omega_c);
  }
}

TEST(ChainMap, Orthonormality) {
  const ModelParams p{0.3, 0.03, 1.0, 10.0};
  const auto c = chain_map(p, 120);
  EXPECT_LT(gram_residual(c, p.s), 1e-8);
  // Gram matrix built here on a Gauss-Jacobi rule in omega_c units
  const auto rule = numerics::gauss_jacobi_power(140, p.s, 1.0);
  const double mass = 1.0 / (p.s + 1.0);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(120, 120);
  for (std::size_t i = 0; i < rule.order(); ++i) {
    const auto poly = c.polynomials(rule.nodes[i] * p.omega_c);
    Eigen::Map<const Eigen::VectorXd> v(poly.data(), 120);
    g += rule.weights[i] / mass * v * v.transpose();
  }
  EXPECT_LT((g - Eigen::MatrixXd::Identity(120, 120)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(ChainMap, MatchesTridiagonalizedGaussBath) {
  const ModelParams p{0.3, 0.03, 1.0, 10.0};
  const auto c = chain_map(p, 21);
  const auto tri = tridiagonalize(model::discretize_bath(p, 2000), 21);
  EXPECT_NEAR(tri.chain.system_coupling / c.system_coupling, 1.0, 1e-10);
  for (int n = 0; n <= 20; ++n) {
    EXPECT_NEAR(tri.chain.site_energies[n] / c.site_energies[n], 1.0, 1e-8) << n;
    EXPECT_NEAR(tri.chain.hoppings[n] / c.hoppings[n], 1.0, 1e-8) << n;
  }
}

TEST(ChainMap, Asymptotics) {
  const ModelParams p{0.2, 0.03, 1.0, 10.0};
  const auto c = chain_map(p, 400);
  for (int n = 50; n < 400; ++n) {
    EXPECT_NEAR(c.site_energies[n] / (0.5 * p.omega_c), 1.0, 0.01) << n;
    EXPECT_NEAR(c.hoppings[n] / (0.25 * p.omega_c), 1.0, 0.01) << n;
  }
  for (int n = 0; n < 400; ++n) {
    EXPECT_GT(c.site_energies[n], 0.0);
    EXPECT_LT(c.site_energies[n], p.omega_c);
    EXPECT_GT(c.hoppings[n], 0.0);
  }
}

TEST(ChainMap, TwoSiteChainReproducesTwoModeBath) {
  const ModelParams p{0.3, 0.05, 1.0, 10.0};
  const auto bath = model::discretize_bath(p, 2);
  // truncated two-site continuum chain: eigenvalues are the 2-point Gauss nodes,
  // first eigenvector components give the couplings
  const auto c = chain_map(p, 2);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi_matrix(c, 2));
  for (int l = 0; l < 2; ++l) {
    EXPECT_NEAR(es.eigenvalues()[l], bath.frequencies[l], 1e-10);
    EXPECT_NEAR(std::fabs(c.system_coupling * es.eigenvectors()(0, l)), bath.couplings[l], 1e-10);
  }
  const auto tri = tridiagonalize(bath);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> et(jacobi_matrix(tri.chain, 2));
  for (int l = 0; l < 2; ++l) EXPECT_NEAR(et.eigenvalues()[l], bath.frequencies[l], 1e-12);
  EXPECT_NEAR((tri.unitary * tri.unitary.transpose() - Eigen::MatrixXd::Identity(2, 2)).norm(), 0.0, 1e-13);
}

TEST(Occupations, NoCoupling) {
  const ModelParams p{0.3, 0.0, 1.0, 10.0};
  const auto c = chain_map(p.with_alpha(0.01), 50);
  const auto sol = variational::minimize_energy(p);
  for (double v : chain_occupations(sol.state, p, c).n_av) EXPECT_EQ(v, 0.0);
}

TEST(Occupations, MatchStarDisplacementsRotatedIntoChain) {
  // continuum d_n against U f for a fine Gauss bath
  const ModelParams p{0.3, 0.01, 1.0, 10.0};
  const auto sol = variational::minimize_energy(p);
  ASSERT_EQ(sol.state.m, 0.0);
  const auto bath = model::discretize_bath(p, 2000);
  const auto tri = tridiagonalize(bath, 15);
  const auto c = chain_map(p, 15);
  auto shape = [&](double w) { return sol.state.shape(w).plus; };
  const auto d = chain_displacements(shape, p, c);
  Eigen::VectorXd f(bath.size());
  for (std::size_t l = 0; l < bath.size(); ++l) f[l] = bath.couplings[l] * shape(bath.frequencies[l]);
  const Eigen::VectorXd ref = tri.unitary * f;
  for (int n = 0; n < 15; ++n) EXPECT_NEAR(d[n], ref[n], 1e-6 * std::fabs(ref[0])) << n;
}

TEST(Occupations, DelocalizedDecayAndConservation) {
  const critical::BathShape b{0.3, 1.0, 10.0};
  const auto p = b.at(0.5 * critical::critical_coupling_numeric(b));
  const auto sol = variational::minimize_energy(p);
  const auto c = chain_map(p, 400);
  const auto prof = chain_occupations(sol.state, p, c);
  EXPECT_EQ(prof.frame, Frame::bare);
  // monotone down to the round-off floor
  int n = 5;
  for (; n < 399 && prof.n_av[n + 1] > 1e-24 * prof.n_av[0]; ++n) EXPECT_LE(prof.n_av[n + 1], prof.n_av[n]) << n;
  EXPECT_GT(n, 20);
  EXPECT_LT(prof.n_av[200], 1e-24 * prof.n_av[0]);
  double sum = 0.0;
  for (double v : prof.n_av) {
    EXPECT_GE(v, 0.0);
    sum += v;
  }
  EXPECT_NEAR(sum / variational::total_occupation(sol.state, p), 1.0, 0.01);
}

TEST(Occupations, LocalizedTailExponent) {
  for (double s : {0.2, 0.3, 0.4}) {
    const auto loc = localized(s);
    ASSERT_GT(loc.sol.state.m, 0.0);
    const auto prof = chain_occupations(loc.sol.state, loc.p, loc.chain);
    std::vector<double> xs, ys;
    for (int n = 20; n <= 200; ++n) {
      xs.push_back(n);
      ys.push_back(prof.n_av[n]);
    }
    EXPECT_NEAR(numerics::fit_power_law(xs, ys).exponent, 1.0 - 2.0 * s, 0.1) << s;
  }
}

TEST(DisplacedFrame, RemovesTail) {
  const auto loc = localized(0.3);
  const auto bare = chain_occupations(loc.sol.state, loc.p, loc.chain);
  const auto frame = displaced_frame(loc.sol.state);
  EXPECT_TRUE(frame.active);
  const auto disp = chain_occupations(loc.sol.state, loc.p, loc.chain, frame);
  EXPECT_EQ(disp.frame, Frame::displaced);
  EXPECT_EQ(disp.frame_m, loc.sol.state.m);
  EXPECT_LT(tail_mean(disp.n_av, 100, 200) / tail_mean(bare.n_av, 100, 200), 0.01);
  EXPECT_LT(disp.n_av[200], disp.n_av[20]);
}

TEST(DisplacedFrame, ShiftedShapesFiniteAtZero) {
  const double m = 0.6, dt = 0.3, r = std::sqrt(1.0 - m * m);
  const auto st = variational::VariationalState::make(m, dt);
  const auto f = displaced_frame(st);
  const auto at0 = f.shifted(st, 1e-300);
  EXPECT_NEAR(at0.plus, -r * (1.0 - m) / (2.0 * dt), 1e-14);
  EXPECT_NEAR(at0.minus, r * (1.0 + m) / (2.0 * dt), 1e-14);
  for (double w : {1e-3, 0.5, 4.0}) {
    const auto sh = f.shifted(st, w);
    EXPECT_NEAR(sh.plus, st.shape(w).plus + m / (2.0 * w), 1e-10 / w);
    EXPECT_NEAR(sh.minus, st.shape(w).minus + m / (2.0 * w), 1e-10 / w);
  }
  EXPECT_FALSE(displaced_frame(variational::VariationalState::make(0.0, dt)).active);
  EXPECT_EQ(displaced_frame(0.0).lambda_over_g(1.0), 0.0);
  EXPECT_THROW(displaced_frame(1.0), DomainError);
}

TEST(DisplacedFrame, ShiftIsExactLinearAlgebra) {
  const auto loc = localized(0.3);
  const auto& st = loc.sol.state;
  const auto frame = displaced_frame(st);
  const auto disp = chain_occupations(st, loc.p, loc.chain, frame);
  const auto dp = chain_displacements([&](double w) { return frame.shifted(st, w).plus; }, loc.p, loc.chain);
  const auto dm = chain_displacements([&](double w) { return frame.shifted(st, w).minus; }, loc.p, loc.chain);
  double total = 0.0, ref = 0.0;
  for (int n = 0; n < loc.chain.n_sites(); ++n) {
    total += disp.n_av[n];
    ref += st.c_plus * st.c_plus * dp[n] * dp[n] + st.c_minus * st.c_minus * dm[n] * dm[n];
  }
  EXPECT_NEAR(total, ref, 1e-10 * ref);
}

TEST(DisplacedFrame, WrongMagnetisationLeavesQuadraticTail) {
  const auto loc = localized(0.3);
  const double m = loc.sol.state.m;
  auto tail = [&](double trial) {
    return tail_mean(chain_occupations(loc.sol.state, loc.p, loc.chain, displaced_frame(trial)).n_av, 100, 200);
  };
  const double t1 = tail(m - 0.1), t2 = tail(m - 0.2), t1p = tail(std::min(m + 0.1, 0.999));
  EXPECT_NEAR(t2 / t1, 4.0, 0.4);
  EXPECT_NEAR(t1p / t1, 1.0, 0.1);
  const auto prof = chain_occupations(loc.sol.state, loc.p, loc.chain, displaced_frame(m - 0.1));
  std::vector<double> xs, ys;
  for (int n = 20; n <= 200; ++n) {
    xs.push_back(n);
    ys.push_back(prof.n_av[n]);
  }
  EXPECT_NEAR(numerics::fit_power_law(xs, ys).exponent, 1.0 - 2.0 * 0.3, 0.1);
}

TEST(Occupations, RejectsChainOfOtherCutoff) {
  const ModelParams p{0.3, 0.01, 1.0, 10.0};
  const auto c = chain_map(ModelParams{0.3, 0.01, 1.0, 20.0}, 10);
  EXPECT_THROW(chain_occupations(variational::VariationalState::make(0.0, 0.9), p, c), DomainError);
}
