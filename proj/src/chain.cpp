#include "subohmic/chain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "subohmic/errors.hpp"
#include "subohmic/numerics.hpp"

namespace subohmic::chain {
namespace {

// Recurrence of the measure x^s dx / mass on [0, 1]: diag a_n, off-diagonal b_{n+1}.
struct UnitRecurrence {
  std::vector<double> a;
  std::vector<double> b;  // b[n] couples n and n+1
};

UnitRecurrence stieltjes(const numerics::QuadratureRule& rule, int n) {
  const std::size_t m = rule.order();
  const double mass = rule.total_mass();
  std::vector<double> w(m), prev(m, 0.0), cur(m, 1.0), next(m);
  for (std::size_t i = 0; i < m; ++i) w[i] = rule.weights[i] / mass;
  UnitRecurrence rec;
  double b_prev = 0.0;
  for (int k = 0; k < n; ++k) {
    double a = 0.0;
    for (std::size_t i = 0; i < m; ++i) a += w[i] * rule.nodes[i] * cur[i] * cur[i];
    double norm2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      next[i] = (rule.nodes[i] - a) * cur[i] - b_prev * prev[i];
      norm2 += w[i] * next[i] * next[i];
    }
    // One re-orthogonalisation pass against p_k and p_{k-1} keeps the discrete vectors orthonormal.
    double c0 = 0.0, c1 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      c0 += w[i] * next[i] * cur[i];
      c1 += w[i] * next[i] * prev[i];
    }
    a += c0;
    norm2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      next[i] -= c0 * cur[i] + c1 * prev[i];
      norm2 += w[i] * next[i] * next[i];
    }
    const double b = std::sqrt(norm2);
    if (!(b > 0.0)) throw ConvergenceError("chain_map: recurrence broke down at n = " + std::to_string(k), b);
    for (std::size_t i = 0; i < m; ++i) next[i] /= b;
    rec.a.push_back(a);
    rec.b.push_back(b);
    std::swap(prev, cur);
    std::swap(cur, next);
    b_prev = b;
  }
  return rec;
}

double max_relative_difference(const UnitRecurrence& x, const UnitRecurrence& y) {
  double d = 0.0;
  for (std::size_t k = 0; k < x.a.size(); ++k) {
    d = std::max(d, std::abs(x.a[k] - y.a[k]) / std::abs(y.a[k]));
    d = std::max(d, std::abs(x.b[k] - y.b[k]) / std::abs(y.b[k]));
  }
  return d;
}

UnitRecurrence unit_recurrence(double s, int n) {
  static std::mutex mutex;
  static std::map<std::pair<double, int>, UnitRecurrence> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find({s, n}); it != cache.end()) return it->second;
  }
  constexpr double kAgreement = 1e-10;
  constexpr int kMaxRefinements = 6;
  int panels = std::max(32, n);
  UnitRecurrence coarse = stieltjes(numerics::cosine_mapped_power_rule(s, 1.0, panels), n);
  for (int k = 0;; ++k) {
    panels *= 2;
    UnitRecurrence fine = stieltjes(numerics::cosine_mapped_power_rule(s, 1.0, panels), n);
    const double diff = max_relative_difference(coarse, fine);
    coarse = std::move(fine);
    if (diff < kAgreement) break;
    if (k == kMaxRefinements) throw ConvergenceError("chain_map: recurrence did not settle under refinement", diff);
  }
  std::lock_guard lock(mutex);
  return cache.emplace(std::make_pair(s, n), std::move(coarse)).first->second;
}

std::vector<double> unit_polynomials(const ChainRepresentation& chain, double x) {
  const int n = chain.n_sites();
  std::vector<double> p(n);
  if (n == 0) return p;
  p[0] = 1.0;
  double prev = 0.0;
  for (int k = 0; k + 1 < n; ++k) {
    const double a = chain.site_energies[k] / chain.omega_c;
    const double b = chain.hoppings[k] / chain.omega_c;
    const double b_prev = k > 0 ? chain.hoppings[k - 1] / chain.omega_c : 0.0;
    p[k + 1] = ((x - a) * p[k] - b_prev * prev) / b;
    prev = p[k];
  }
  return p;
}

}  // namespace

std::vector<double> ChainRepresentation::polynomials(double omega) const {
  return unit_polynomials(*this, omega / omega_c);
}

ChainRepresentation chain_map(const ModelParams& p, int n_sites) {
  p.validate();
  if (n_sites < 1) throw DomainError("chain_map: need at least one site");
  const UnitRecurrence rec = unit_recurrence(p.s, n_sites);
  ChainRepresentation chain;
  chain.omega_c = p.omega_c;
  chain.system_coupling = std::sqrt(model::bath_mass(p));
  chain.site_energies.resize(n_sites);
  chain.hoppings.resize(n_sites);
  for (int k = 0; k < n_sites; ++k) {
    chain.site_energies[k] = p.omega_c * rec.a[k];
    chain.hoppings[k] = p.omega_c * rec.b[k];
  }
  return chain;
}

double gram_residual(const ChainRepresentation& chain, double s) {
  const int n = chain.n_sites();
  const auto rule = numerics::gauss_jacobi_power(n + 8, s, 1.0);
  const double mass = rule.total_mass();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < rule.order(); ++i) {
    const auto pv = unit_polynomials(chain, rule.nodes[i]);
    const Eigen::Map<const Eigen::VectorXd> v(pv.data(), n);
    gram.noalias() += (rule.weights[i] / mass) * v * v.transpose();
  }
  return (gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
}

Tridiagonalization tridiagonalize(const DiscretizedBath& bath, int n_sites) {
  const int n = static_cast<int>(bath.size());
  if (n < 1) throw DomainError("tridiagonalize: empty bath");
  const int sites = n_sites <= 0 ? n : std::min(n, n_sites);
  const Eigen::Map<const Eigen::VectorXd> w(bath.frequencies.data(), n);
  const Eigen::Map<const Eigen::VectorXd> g(bath.couplings.data(), n);
  const double norm = g.norm();
  if (!(norm > 0.0)) throw DomainError("tridiagonalize: all couplings vanish");

  Tridiagonalization out;
  out.unitary = Eigen::MatrixXd::Zero(sites, n);
  out.chain.system_coupling = norm;
  out.chain.omega_c = w.maxCoeff();
  Eigen::VectorXd v = g / norm;
  for (int k = 0; k < sites; ++k) {
    out.unitary.row(k) = v.transpose();
    Eigen::VectorXd r = w.cwiseProduct(v);
    out.chain.site_energies.push_back(v.dot(r));
    const auto basis = out.unitary.topRows(k + 1);
    for (int pass = 0; pass < 2; ++pass) r -= basis.transpose() * (basis * r);
    const double b = k + 1 < n ? r.norm() : 0.0;
    out.chain.hoppings.push_back(b);
    if (k + 1 < sites) {
      if (!(b > 1e-14 * out.chain.omega_c)) throw DomainError("tridiagonalize: degenerate bath frequencies");
      v = r / b;
    }
  }
  return out;
}

variational::DisplacementShape DisplacedFrame::shifted(const VariationalState& state, double omega) const {
  if (!active) return state.shape(omega);
  const double r = std::sqrt(std::max(0.0, (1.0 - state.m) * (1.0 + state.m)));
  const double dt = state.delta_tilde;
  if (m == state.m) {
    // f_{+-}/g + m/(2w) = -+ r (1 -+ m) / (2 (dt + r w)), free of the 1/w cancellation.
    const double q = 2.0 * (dt + r * omega);
    return {-r * (1.0 - m) / q, r * (1.0 + m) / q};
  }
  const auto f = state.shape(omega);
  const double shift = lambda_over_g(omega);
  return {f.plus + shift, f.minus + shift};
}

DisplacedFrame displaced_frame(const VariationalState& state) { return displaced_frame(state.m); }

DisplacedFrame displaced_frame(double trial_m) {
  if (!(std::abs(trial_m) < 1.0)) throw DomainError("displaced_frame: need |m| < 1");
  return {trial_m, trial_m != 0.0};
}

std::vector<double> chain_displacements(const std::function<double(double)>& shape, const ModelParams& p,
                                        const ChainRepresentation& chain) {
  const int n = chain.n_sites();
  std::vector<double> d(n, 0.0);
  if (p.alpha == 0.0 || chain.system_coupling == 0.0) return d;
  // (1/pi) J dw = 2 alpha w_c^2 x^s dx; the rule carries x^{s-1} so shape(w) * x stays bounded.
  const auto rule = numerics::cosine_mapped_power_rule(p.s - 1.0, 1.0, std::max(64, 2 * n));
  const double scale = 2.0 * p.alpha * p.omega_c * p.omega_c / chain.system_coupling;
  for (std::size_t i = 0; i < rule.order(); ++i) {
    const double x = rule.nodes[i];
    const double f = rule.weights[i] * x * shape(x * p.omega_c) * scale;
    const auto pv = unit_polynomials(chain, x);
    for (int k = 0; k < n; ++k) d[k] += f * pv[k];
  }
  return d;
}

OccupationProfile chain_occupations(const VariationalState& state, const ModelParams& p,
                                    const ChainRepresentation& chain, const DisplacedFrame& frame) {
  if (std::abs(chain.omega_c - p.omega_c) > 1e-12 * p.omega_c)
    throw DomainError("chain_occupations: chain built for a different cutoff");
  const auto dp = chain_displacements([&](double w) { return frame.shifted(state, w).plus; }, p, chain);
  const auto dm = chain_displacements([&](double w) { return frame.shifted(state, w).minus; }, p, chain);
  OccupationProfile out;
  out.frame = frame.active ? Frame::displaced : Frame::bare;
  out.frame_m = frame.m;
  out.n_av.resize(chain.n_sites());
  const double cp2 = state.c_plus * state.c_plus, cm2 = state.c_minus * state.c_minus;
  for (int k = 0; k < chain.n_sites(); ++k) out.n_av[k] = cp2 * dp[k] * dp[k] + cm2 * dm[k] * dm[k];
  return out;
}

}  // namespace subohmic::chain
