#include "subohmic/critical.hpp"

#include <boost/math/tools/roots.hpp>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "subohmic/errors.hpp"
#include "subohmic/parallel.hpp"

namespace subohmic::critical {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kAlphaRelTol = 1e-10;

variational::EnergyLandscape landscape_for(const ModelParams& p, Functional functional) {
  return functional == Functional::exact ? variational::EnergyLandscape::exact(p)
                                         : variational::EnergyLandscape::scaling(p);
}

void check_bath(const BathShape& bath) { bath.at(0.0).validate(); }

}  // namespace

ClosedFormCritical critical_coupling_closed(const BathShape& bath) {
  check_bath(bath);
  const double s = bath.s;
  if (!(s > 0.0 && s < 0.5)) throw DomainError("critical_coupling_closed: need 0 < s < 0.5");
  const double alpha_c = std::sin(kPi * s) * std::exp(-0.5 * s) / (2.0 * kPi * (1.0 - s)) *
                         std::pow(bath.delta / bath.omega_c, 1.0 - s);
  return {alpha_c, bath.delta * std::exp(-s / (2.0 * (1.0 - s)))};
}

double critical_coupling_from_c1(const std::function<double(double)>& c1_of_alpha, double guess) {
  if (!(guess > 0.0)) throw DomainError("critical_coupling_from_c1: guess must be positive");
  constexpr int kMaxGrowth = 80;
  constexpr double kGrowth = 1.5;

  // lo: c1 > 0 (delocalised side); hi: c1 < 0.
  double lo = 0.0, hi = guess;
  double c_hi = c1_of_alpha(hi);
  int steps = 0;
  // A collapsed tunnelling gives c1 == 0 identically; step back towards lo until negative.
  while (!(c_hi < 0.0)) {
    if (++steps > kMaxGrowth) throw NoTransition("no transition in range: c1 keeps its sign up to alpha = " +
                                                 std::to_string(hi));
    if (c_hi > 0.0) {
      lo = hi;
      hi *= kGrowth;
    } else {
      hi = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi;
    }
    c_hi = c1_of_alpha(hi);
  }
  double c_lo;
  if (lo == 0.0) {
    lo = hi;
    for (;;) {
      if (++steps > kMaxGrowth) throw NoTransition("no transition in range: c1 negative down to alpha = " +
                                                   std::to_string(lo));
      lo /= kGrowth;
      c_lo = c1_of_alpha(lo);
      if (c_lo > 0.0) break;
      hi = lo;
      c_hi = c_lo;
    }
  } else {
    c_lo = c1_of_alpha(lo);
  }

  auto done = [](double a, double b) { return std::abs(b - a) <= kAlphaRelTol * std::abs(b); };
  std::uintmax_t max_iter = 500;
  const auto [a, b] = boost::math::tools::toms748_solve(c1_of_alpha, lo, hi, c_lo, c_hi, done, max_iter);
  if (max_iter >= 500) throw ConvergenceError("critical coupling bisection did not converge", b - a);
  return 0.5 * (a + b);
}

double critical_coupling_numeric(const BathShape& bath, Functional functional) {
  check_bath(bath);
  double guess;
  if (bath.s < 0.5) {
    guess = critical_coupling_closed(bath).alpha_c;
  } else {
    guess = std::sin(kPi * bath.s) / (2.0 * kPi) * std::pow(bath.delta / bath.omega_c, 1.0 - bath.s);
  }
  auto c1 = [&](double alpha) { return variational::landau_c1(landscape_for(bath.at(alpha), functional)); };
  return critical_coupling_from_c1(c1, guess);
}

CriticalPoint locate_critical_point(const BathShape& bath, Functional functional) {
  const auto closed = critical_coupling_closed(bath);
  CriticalPoint cp{};
  cp.bath = bath;
  cp.alpha_c_closed = closed.alpha_c;
  cp.alpha_c_numeric = critical_coupling_numeric(bath, functional);
  cp.delta_tilde_c = landscape_for(bath.at(cp.alpha_c_numeric), functional).evaluate(0.0).delta_tilde;
  cp.sx_c = cp.delta_tilde_c / bath.delta;
  return cp;
}

SweepTable sweep_alpha(const BathShape& bath, std::span<const double> alphas, Functional functional,
                       int threads) {
  check_bath(bath);
  for (std::size_t i = 1; i < alphas.size(); ++i) {
    if (!(alphas[i] > alphas[i - 1])) throw DomainError("sweep_alpha: alphas must be strictly increasing");
  }
  SweepTable table;
  table.bath = bath;
  table.functional = functional;
  table.rows.resize(alphas.size());
  parallel_for(alphas.size(), threads, [&](std::size_t i) {
    SweepRow& row = table.rows[i];
    row = {alphas[i], kNaN, kNaN, kNaN, kNaN, kNaN, std::nullopt};
    try {
      const auto p = bath.at(alphas[i]);
      p.validate();
      const auto landscape = landscape_for(p, functional);
      const auto sol = variational::minimize_landscape(landscape, p);
      row.m = sol.state.m;
      row.sx = sol.sx;
      row.entanglement = sol.entanglement;
      row.energy = sol.energy;
      row.c1 = variational::landau_c1(landscape);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  return table;
}

std::vector<double> exponent_grid(double alpha_c, const FitWindow& window, int points_per_side) {
  if (!(alpha_c > 0.0)) throw DomainError("exponent_grid: alpha_c must be positive");
  if (!(window.lo > 0.0 && window.hi > window.lo && window.hi < 1.0))
    throw DomainError("exponent_grid: need 0 < lo < hi < 1");
  if (points_per_side < 2) throw DomainError("exponent_grid: need at least two points per side");
  std::vector<double> ts(points_per_side);
  const double llo = std::log(window.lo), lhi = std::log(window.hi);
  for (int k = 0; k < points_per_side; ++k) ts[k] = std::exp(llo + (lhi - llo) * k / (points_per_side - 1));
  std::vector<double> alphas;
  for (auto it = ts.rbegin(); it != ts.rend(); ++it) alphas.push_back(alpha_c * (1.0 - *it));
  for (double t : ts) alphas.push_back(alpha_c * (1.0 + t));
  return alphas;
}

CriticalExponents extract_exponents(const SweepTable& table, double alpha_c, const FitWindow& window) {
  // Small slack so grid points generated exactly on the window edges are kept.
  const double lo = window.lo * (1.0 - 1e-9), hi = window.hi * (1.0 + 1e-9);
  std::vector<double> xb, yb, xg, yg;
  for (const auto& row : table.rows) {
    if (row.error) continue;
    const double t = (row.alpha - alpha_c) / alpha_c;
    if (t > 0.0 && t >= lo && t <= hi && row.m > 0.0) {
      xb.push_back(t);
      yb.push_back(row.m);
    } else if (t < 0.0 && -t >= lo && -t <= hi && row.c1 > 0.0) {
      xg.push_back(-t);
      yg.push_back(1.0 / (4.0 * row.c1));
    }
  }
  if (xb.size() < 3) throw DomainError("extract_exponents: fewer than three localised points in the fit window");
  if (xg.size() < 3) throw DomainError("extract_exponents: fewer than three delocalised points in the fit window");
  CriticalExponents out{numerics::fit_power_law(xb, yb), numerics::fit_power_law(xg, yg)};
  out.gamma.exponent = -out.gamma.exponent;
  return out;
}

std::vector<PhaseDiagramRow> phase_diagram(std::span<const double> s_grid, double delta,
                                           std::span<const double> omega_c_list, int threads) {
  if (s_grid.empty() || omega_c_list.empty()) throw DomainError("phase_diagram: grids must be non-empty");
  std::vector<PhaseDiagramRow> rows(s_grid.size() * omega_c_list.size());
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    const double s = s_grid[i / omega_c_list.size()];
    const double wc = omega_c_list[i % omega_c_list.size()];
    PhaseDiagramRow& row = rows[i];
    row = {s, wc, kNaN, kNaN, std::nullopt};
    try {
      const BathShape bath{s, delta, wc};
      row.alpha_c_closed = critical_coupling_closed(bath).alpha_c;
      row.alpha_c_numeric = critical_coupling_numeric(bath);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  return rows;
}

}  // namespace subohmic::critical
