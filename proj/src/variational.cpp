#include "subohmic/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "subohmic/errors.hpp"
#include "subohmic/numerics.hpp"

namespace subohmic::variational {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCollapse = 1e-12;   // dt below kCollapse * Delta counts as the dt = 0 root
constexpr double kFixedPointTol = 1e-12;
constexpr int kMaxDampedIterations = 200000;
constexpr double kMaxMagnetisation = 1.0 - 1e-9;

double root_one_minus_m2(double m) { return std::sqrt(std::max(0.0, (1.0 - m) * (1.0 + m))); }

struct DressingSums {
  double phi;    // dressing exponent
  double slope;  // d phi / d log dt
};

DressingSums dressing(const BathSpectrum& sp, double r, double dt) {
  double phi = 0.0, cube = 0.0;
  const double r2 = r * r;
  for (std::size_t l = 0; l < sp.size(); ++l) {
    const double q = dt + r * sp.frequencies[l];
    const double t = sp.weights[l] * r2 / (q * q);
    phi += t;
    cube += t / q;
  }
  return {0.5 * phi, -dt * cube};
}

double static_shift_energy(const BathSpectrum& sp) {
  double e = 0.0;
  for (std::size_t l = 0; l < sp.size(); ++l) e -= sp.weights[l] / (4.0 * sp.frequencies[l]);
  return e;
}

// (dE/dM)/M with optimal displacements at fixed dt.
double reduced_slope_at(const BathSpectrum& sp, double m, double dt) {
  const double r = root_one_minus_m2(m);
  if (r == 0.0) return kInf;
  if (dt == 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t l = 0; l < sp.size(); ++l) {
    const double w = sp.frequencies[l];
    const double q = dt + r * w;
    sum += sp.weights[l] / (w * q * q);
  }
  return 0.5 * dt * (1.0 / r - dt * sum);
}

}  // namespace

DisplacementShape displacements(double omega, double m, double delta_tilde) {
  const double r = root_one_minus_m2(m);
  const double q = delta_tilde + r * omega;
  if (q == 0.0) {
    // dt = 0 and (|M| = 1 or w = 0): static-shift limit
    const double v = omega > 0.0 ? -m / (2.0 * omega) : -std::copysign(kInf, m);
    if (r == 0.0) return {v, v};
    return {-kInf, kInf};
  }
  const double md = m * delta_tilde;
  const double common = md == 0.0 ? 0.0 : -md / (2.0 * omega * q);
  const double anti = r / (2.0 * q);
  return {common - anti, common + anti};
}

VariationalState VariationalState::make(double m, double delta_tilde) {
  VariationalState st;
  st.m = m;
  st.delta_tilde = delta_tilde;
  st.c_plus = std::sqrt(0.5 * (1.0 + m));
  st.c_minus = std::sqrt(0.5 * (1.0 - m));
  return st;
}

double dressing_exponent(const BathSpectrum& spectrum, double m, double delta_tilde) {
  return dressing(spectrum, root_one_minus_m2(m), delta_tilde).phi;
}

double energy_at(const BathSpectrum& sp, double m, double dt) {
  const double r = root_one_minus_m2(m);
  if (r == 0.0) return static_shift_energy(sp);
  const double m2d2 = m * m * dt * dt;
  double sum = 0.0;
  for (std::size_t l = 0; l < sp.size(); ++l) {
    const double w = sp.frequencies[l];
    const double q = dt + r * w;
    sum += sp.weights[l] * (m2d2 / w + 2.0 * dt * r + r * r * w) / (q * q);
  }
  return -0.5 * dt * r - 0.25 * sum;
}

double energy_of_displacements(const BathSpectrum& sp, double m, double delta, std::span<const double> shape_plus,
                               std::span<const double> shape_minus) {
  if (shape_plus.size() != sp.size() || shape_minus.size() != sp.size())
    throw DomainError("energy_of_displacements: shape length mismatch");
  double overlap = 0.0, plus = 0.0, minus = 0.0;
  for (std::size_t l = 0; l < sp.size(); ++l) {
    const double w = sp.weights[l];
    const double om = sp.frequencies[l];
    const double ap = shape_plus[l];
    const double am = shape_minus[l];
    overlap += w * (ap - am) * (ap - am);
    plus += w * (ap + ap * ap * om);
    minus += w * (am - am * am * om);
  }
  const double dt = delta * std::exp(-0.5 * overlap);
  return -0.5 * dt * root_one_minus_m2(m) + 0.5 * (1.0 + m) * plus - 0.5 * (1.0 - m) * minus;
}

SelfConsistentTunneling solve_delta_tilde(const BathSpectrum& sp, double m, double delta) {
  SelfConsistentTunneling out;
  const double r = root_one_minus_m2(m);
  const double log_delta = std::log(delta);
  auto residual = [&](double x) { return x - log_delta + dressing(sp, r, std::exp(x)).phi; };

  double x = log_delta;
  const double floor = log_delta + std::log(kCollapse);
  bool converged = false;
  for (int it = 0; it < kMaxDampedIterations; ++it) {
    ++out.iterations;
    const DressingSums d = dressing(sp, r, std::exp(x));
    const double next = 0.5 * x + 0.5 * (log_delta - d.phi);
    if (next < floor) {
      out.collapsed = true;
      break;
    }
    const double change = std::abs(next - x);
    x = next;
    if (change <= kFixedPointTol) {
      converged = true;
      break;
    }
    // Close to the root: Newton on G(x) = x - log Delta + phi(e^x).
    if (change < 1e-4) {
      double xn = x;
      bool ok = false;
      for (int k = 0; k < 12; ++k) {
        const DressingSums dn = dressing(sp, r, std::exp(xn));
        const double g = xn - log_delta + dn.phi;
        const double gp = 1.0 + dn.slope;
        if (!(gp > 0.05)) break;
        const double step = g / gp;
        if (std::abs(step) > 1e-3) break;
        xn -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(xn))) {
          ok = true;
          break;
        }
      }
      if (ok) {
        x = xn;
        converged = true;
        break;
      }
    }
  }
  if (!converged && !out.collapsed) throw ConvergenceError("solve_delta_tilde: fixed point not reached", 0.0);
  if (out.collapsed) {
    out.delta_tilde = 0.0;
    return out;
  }

  // Further finite fixed points below the largest one: scan for sign changes of G.
  std::vector<double> roots{x};
  const double span = x - floor;
  constexpr int kScan = 32;
  double prev_x = x - 1e-3 * std::max(1.0, span);
  double prev_g = residual(prev_x);
  for (int j = 1; j <= kScan; ++j) {
    const double xj = x - span * std::pow(1e-3, 1.0 - static_cast<double>(j) / kScan);
    if (xj >= prev_x) continue;
    const double gj = residual(xj);
    if (std::signbit(gj) != std::signbit(prev_g)) {
      roots.push_back(numerics::find_root(residual, xj, prev_x, 1e-14));
    }
    prev_x = xj;
    prev_g = gj;
  }
  out.finite_roots = static_cast<int>(roots.size());
  double best = std::exp(roots.front());
  if (roots.size() > 1) {
    double best_e = energy_at(sp, m, best);
    for (std::size_t k = 1; k < roots.size(); ++k) {
      const double dt = std::exp(roots[k]);
      const double e = energy_at(sp, m, dt);
      if (e < best_e) {
        best_e = e;
        best = dt;
      }
    }
  }
  out.delta_tilde = best;
  return out;
}

double solve_delta_tilde_exact(double m, const ModelParams& p) {
  p.validate();
  if (!(std::abs(m) < 1.0)) throw DomainError("solve_delta_tilde_exact: need |m| < 1");
  if (p.alpha == 0.0) return p.delta;
  return solve_delta_tilde(model::continuum_spectrum(p), m, p.delta).delta_tilde;
}

double solve_delta_tilde_scaling(double m, const ModelParams& p) {
  p.validate();
  if (!(std::abs(m) < 1.0)) throw DomainError("solve_delta_tilde_scaling: need |m| < 1");
  if (p.alpha == 0.0) return p.delta;
  const double s = p.s;
  const double r = root_one_minus_m2(m);
  const double d = p.delta * std::exp(p.alpha / (1.0 - s));
  const double c = p.alpha * kPi * s / std::sin(kPi * s) * std::pow(p.omega_c * r, 1.0 - s);
  // z = (1-s) C dt^{-(1-s)} satisfies z e^{-z} = X; the physical branch is z = -W0(-X).
  const double x = (1.0 - s) * c * std::pow(d, -(1.0 - s));
  if (x > std::exp(-1.0)) return 0.0;
  const double z = -numerics::lambert_w0(-x);
  return d * std::exp(-z / (1.0 - s));
}

double energy_exact(double m, const ModelParams& p) {
  p.validate();
  if (std::abs(m) > 1.0) throw DomainError("energy_exact: need |m| <= 1");
  return EnergyLandscape::exact(p).energy(m);
}

double energy_scaling(double m, const ModelParams& p, TunnelingPrefactor prefactor) {
  p.validate();
  if (!(std::abs(m) < 1.0)) throw DomainError("energy_scaling: need |m| < 1");
  return EnergyLandscape::scaling(p, prefactor).energy(m);
}

EnergyLandscape EnergyLandscape::exact(const ModelParams& p) {
  p.validate();
  EnergyLandscape l = on_spectrum(model::continuum_spectrum(p), p.delta);
  l.params_ = p;
  return l;
}

EnergyLandscape EnergyLandscape::scaling(const ModelParams& p, TunnelingPrefactor prefactor) {
  p.validate();
  EnergyLandscape l;
  l.kind_ = Kind::scaling;
  l.params_ = p;
  l.prefactor_ = prefactor;
  l.delta_ = p.delta;
  l.localized_energy_ = -p.alpha * p.omega_c / (2.0 * p.s);
  return l;
}

EnergyLandscape EnergyLandscape::on_spectrum(BathSpectrum spectrum, double delta) {
  if (!(delta > 0.0)) throw DomainError("EnergyLandscape: delta must be positive");
  EnergyLandscape l;
  l.kind_ = Kind::spectrum;
  l.spectrum_ = std::move(spectrum);
  l.delta_ = delta;
  l.localized_energy_ = static_shift_energy(l.spectrum_);
  return l;
}

EnergyLandscape::Point EnergyLandscape::evaluate(double m) const {
  const double r = root_one_minus_m2(m);
  if (r == 0.0) return {m, 0.0, localized_energy_, kInf};

  if (kind_ == Kind::spectrum) {
    const double dt = solve_delta_tilde(spectrum_, m, delta_).delta_tilde;
    return {m, dt, energy_at(spectrum_, m, dt), reduced_slope_at(spectrum_, m, dt)};
  }

  const ModelParams& p = params_;
  const double s = p.s;
  const double a = prefactor_ == TunnelingPrefactor::derived_half ? 0.5 : 1.0;
  const double dt = solve_delta_tilde_scaling(m, p);
  const double k = p.alpha * kPi * p.omega_c * (1.0 - s) / (2.0 * std::sin(kPi * s));
  const double energy =
      -a * dt * r + localized_energy_ + (dt > 0.0 ? k * r * r * std::pow(dt / (p.omega_c * r), s) : 0.0);
  double slope = 0.0;
  if (dt > 0.0) {
    const double b = p.alpha * kPi * s / std::sin(kPi * s);
    const double u = (1.0 - s) * b * std::pow(p.omega_c * r / dt, 1.0 - s);
    const double h = -a * (1.0 - 2.0 * u) / (1.0 - u) + u / (2.0 * s) * (2.0 - s / (1.0 - u));
    slope = -(dt / r) * h;
  }
  return {m, dt, energy, slope};
}

GroundStateSolution observables(const VariationalState& state, const ModelParams& p) {
  GroundStateSolution sol;
  sol.params = p;
  sol.state = state;
  const double m = state.m;
  const double r = root_one_minus_m2(m);
  sol.sz = m;
  sol.sx = r * state.delta_tilde / p.delta;
  const double bloch = std::min(1.0, std::sqrt(sol.sx * sol.sx + m * m));
  sol.p_plus = 0.5 * (1.0 + bloch);
  sol.p_minus = 0.5 * (1.0 - bloch);
  auto h = [](double x) { return x > 0.0 ? -x * std::log2(x) : 0.0; };
  sol.entanglement = h(sol.p_plus) + h(sol.p_minus);
  sol.occupation_finite = m == 0.0;
  sol.crossover_scale = r == 0.0 ? kInf : std::abs(m) * state.delta_tilde / r;
  return sol;
}

GroundStateSolution minimize_landscape(const EnergyLandscape& landscape, const ModelParams& p) {
  constexpr int kGrid = 64;
  std::vector<EnergyLandscape::Point> grid;
  grid.reserve(kGrid);
  for (int i = 0; i < kGrid; ++i) grid.push_back(landscape.evaluate(kMaxMagnetisation * i / (kGrid - 1)));
  const auto best_it =
      std::min_element(grid.begin(), grid.end(), [](const auto& a, const auto& b) { return a.energy < b.energy; });
  const int best = static_cast<int>(best_it - grid.begin());
  const auto& lo = grid[std::max(0, best - 1)];
  const auto& hi = grid[std::min(kGrid - 1, best + 1)];

  const auto brent = numerics::minimize_scalar([&](double m) { return landscape.energy(m); }, lo.m, hi.m, 1e-9);
  EnergyLandscape::Point chosen = landscape.evaluate(brent.argmin);

  // Polish on dE/dM = 0 where the slope brackets a minimum.
  if (lo.reduced_slope < 0.0 && hi.reduced_slope > 0.0 && std::isfinite(hi.reduced_slope)) {
    auto slope = [&](double m) { return landscape.evaluate(m).reduced_slope; };
    try {
      const double root = numerics::find_root(slope, lo.m, hi.m, 1e-15);
      const auto polished = landscape.evaluate(root);
      if (polished.energy <= chosen.energy + 1e-13 * std::max(1.0, std::abs(chosen.energy))) chosen = polished;
    } catch (const BracketError&) {
    }
  }
  if (grid.front().energy <= chosen.energy && grid.front().reduced_slope >= 0.0) chosen = grid.front();
  if (best == kGrid - 1 && grid.back().energy < chosen.energy) chosen = grid.back();

  GroundStateSolution sol = observables(VariationalState::make(chosen.m, chosen.delta_tilde), p);
  sol.energy = chosen.energy;
  return sol;
}

GroundStateSolution minimize_energy(const ModelParams& p, Functional functional) {
  p.validate();
  const auto landscape = functional == Functional::exact ? EnergyLandscape::exact(p) : EnergyLandscape::scaling(p);
  return minimize_landscape(landscape, p);
}

double occupation_density(const VariationalState& state, const ModelParams& p, double omega) {
  if (!(omega > 0.0 && omega <= p.omega_c)) throw DomainError("occupation_density: need 0 < w <= w_c");
  const auto f = state.shape(omega);
  const double weight = model::spectral_density(omega, p) / kPi;
  return weight * (state.c_plus * state.c_plus * f.plus * f.plus + state.c_minus * state.c_minus * f.minus * f.minus);
}

double total_occupation(const VariationalState& state, const ModelParams& p) {
  if (state.m != 0.0 && p.alpha > 0.0) return kInf;
  const auto sp = model::continuum_spectrum(p);
  double sum = 0.0;
  for (std::size_t l = 0; l < sp.size(); ++l) {
    const auto f = state.shape(sp.frequencies[l]);
    sum += sp.weights[l] *
           (state.c_plus * state.c_plus * f.plus * f.plus + state.c_minus * state.c_minus * f.minus * f.minus);
  }
  return sum;
}

namespace {

// g(h) = (E(h) - E(0)) / h^2 = c1 + c2 h^2 + c3 h^4 + ... sampled at h, 2h, 4h.
struct QuadraticInH2 {
  double constant;
  double linear;
};

QuadraticInH2 fit_even_expansion(const EnergyLandscape& l, double e0, double h) {
  double g[3];
  double x[3];
  const double hs[3] = {h, 2.0 * h, 4.0 * h};
  for (int k = 0; k < 3; ++k) {
    x[k] = hs[k] * hs[k];
    g[k] = (l.energy(hs[k]) - e0) / x[k];
  }
  // Newton divided differences of the quadratic through (x_k, g_k).
  const double f01 = (g[1] - g[0]) / (x[1] - x[0]);
  const double f12 = (g[2] - g[1]) / (x[2] - x[1]);
  const double f012 = (f12 - f01) / (x[2] - x[0]);
  const double linear = f01 - f012 * (x[0] + x[1]);
  const double constant = g[0] - linear * x[0] - f012 * x[0] * x[0];
  return {constant, linear};
}

}  // namespace

double landau_c1(const EnergyLandscape& landscape) {
  const double e0 = landscape.energy(0.0);
  return fit_even_expansion(landscape, e0, 1e-3).constant;
}

LandauCoefficients landau_coefficients(const EnergyLandscape& landscape) {
  const double e0 = landscape.energy(0.0);
  const double c1 = fit_even_expansion(landscape, e0, 1e-3).constant;
  const double c2 = fit_even_expansion(landscape, e0, 2e-2).linear;
  return {e0, c1, c2};
}

LandauCoefficients landau_coefficients(const ModelParams& p, Functional functional) {
  p.validate();
  return landau_coefficients(functional == Functional::exact ? EnergyLandscape::exact(p)
                                                             : EnergyLandscape::scaling(p));
}

double susceptibility(const ModelParams& p, Functional functional) {
  const double c1 = landau_coefficients(p, functional).c1;
  if (!(c1 > 0.0)) throw DomainError("susceptibility: c1 <= 0, the state is already localised");
  return 1.0 / (4.0 * c1);
}

}  // namespace subohmic::variational
