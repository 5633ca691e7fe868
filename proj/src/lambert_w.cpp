#include <cmath>
#include <limits>

#include "subohmic/errors.hpp"
#include "subohmic/numerics.hpp"

namespace subohmic::numerics {
namespace {

constexpr double kInvE = 0.36787944117144232159552377016146;
constexpr double kE = 2.71828182845904523536028747135266;
constexpr int kMaxIterations = 40;

double initial_guess(double x) {
  if (x < -0.32) {
    // Branch-point series in p = sqrt(2(e x + 1)).
    const double p = std::sqrt(std::max(0.0, 2.0 * (kE * x + 1.0)));
    return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)));
  }
  if (x < kE) {
    // Winitzki's approximation, good to a few percent on this range.
    const double l = std::log1p(x);
    return l * (1.0 - std::log1p(l) / (2.0 + l));
  }
  const double l1 = std::log(x);
  const double l2 = std::log(l1);
  return l1 - l2 + l2 / l1;
}

}  // namespace

double lambert_w0(double x) {
  if (std::isnan(x)) return x;
  if (x == std::numeric_limits<double>::infinity()) return x;
  if (x == 0.0) return 0.0;
  if (x <= -kInvE) {
    if (x >= -kInvE - 1e-14) return -1.0;
    throw DomainError("lambert_w0: argument below -1/e");
  }

  double w = initial_guess(x);
  if (x < kE) {
    // Halley on f(w) = w e^w - x.
    for (int it = 0; it < kMaxIterations; ++it) {
      const double ew = std::exp(w);
      const double f = w * ew - x;
      const double wp1 = w + 1.0;
      if (wp1 <= 0.0) return -1.0;
      const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
      const double step = f / denom;
      double next = w - step;
      if (next <= -1.0) next = 0.5 * (w - 1.0);
      const bool done = std::abs(next - w) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(next));
      w = next;
      if (done) break;
    }
    return w;
  }

  // Large arguments: Halley on g(w) = w + ln w - ln x, which cannot overflow.
  const double lx = std::log(x);
  for (int it = 0; it < kMaxIterations; ++it) {
    const double g = w + std::log(w) - lx;
    const double g1 = 1.0 + 1.0 / w;
    const double g2 = -1.0 / (w * w);
    const double step = g / (g1 - 0.5 * g * g2 / g1);
    const double next = w - step;
    const bool done = std::abs(next - w) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(next);
    w = next;
    if (done) break;
  }
  return w;
}

}  // namespace subohmic::numerics
