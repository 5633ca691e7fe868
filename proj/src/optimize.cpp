#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <algorithm>
#include <cmath>
#include <cstdint>

#include "subohmic/errors.hpp"
#include "subohmic/numerics.hpp"

namespace subohmic::numerics {

ScalarMinimum minimize_scalar(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (!(lo < hi)) throw DomainError("minimize_scalar: need lo < hi");
  // Boost's tolerance is 2^{1-bits} relative plus a quarter of that absolute.
  const int bits = std::clamp(static_cast<int>(std::ceil(1.0 - std::log2(tol))), 8, 52);
  std::uintmax_t max_iter = 500;
  const auto [x, fx] = boost::math::tools::brent_find_minima(f, lo, hi, bits, max_iter);
  // Boost caps the precision at half the mantissa.
  const double slack = std::max(tol, 2.0 * std::ldexp(1.0, 1 - std::min(bits, 26)) * (std::abs(x) + 1.0));
  ScalarMinimum result{x, fx, x - lo <= slack || hi - x <= slack};
  // Brent never evaluates the endpoints themselves.
  if (result.at_boundary) {
    const double edge = x - lo <= slack ? lo : hi;
    const double fe = f(edge);
    if (fe <= fx) result = {edge, fe, true};
  }
  return result;
}

double find_root(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (!(lo <= hi)) throw DomainError("find_root: need lo <= hi");
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::signbit(flo) == std::signbit(fhi)) throw BracketError("find_root: no sign change on bracket");
  if (std::abs(flo) < tol) return lo;
  if (std::abs(fhi) < tol) return hi;

  // Values below tol terminate the search through an exact zero.
  auto g = [&](double x) {
    const double v = f(x);
    return std::abs(v) < tol ? 0.0 : v;
  };
  auto width_ok = [tol](double a, double b) { return std::abs(b - a) <= tol; };
  std::uintmax_t max_iter = 1000;
  const auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, flo, fhi, width_ok, max_iter);
  return a == b ? a : 0.5 * (a + b);
}

FitResult fit_power_law(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DomainError("fit_power_law: length mismatch");
  if (xs.size() < 3) throw DomainError("fit_power_law: need at least three points");
  const std::size_t n = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw DomainError("fit_power_law: data must be positive");
    const double lx = std::log(xs[i]);
    const double ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double mx = sx / n;
  const double my = sy / n;
  const double varx = sxx / n - mx * mx;
  if (!(varx > 0.0)) throw DomainError("fit_power_law: abscissae must not all coincide");
  const double slope = (sxy / n - mx * my) / varx;
  const double intercept = my - slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::log(ys[i]) - (intercept + slope * std::log(xs[i]));
    ss += d * d;
  }
  return {slope, std::exp(intercept), std::sqrt(ss / n)};
}

}  // namespace subohmic::numerics
