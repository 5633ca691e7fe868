#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "subohmic/errors.hpp"
#include "subohmic/numerics.hpp"

namespace subohmic::numerics {
namespace {

struct Recurrence {
  std::vector<double> alpha;  // diagonal
  std::vector<double> beta;   // beta[0] = total mass, beta[k] = squared off-diagonal
};

// Monic recurrence of x^p dx on [0, b]: Jacobi (a=0, b=p) on [-1, 1] mapped by
// x = b (1 + t) / 2.
Recurrence jacobi_power_recurrence(int n, double p, double b) {
  Recurrence r;
  r.alpha.resize(n);
  r.beta.resize(n);
  const double a = 0.0;
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + p;
    double at;
    if (k == 0) {
      at = (p - a) / (a + p + 2.0);
    } else {
      at = (p * p - a * a) / (s * (s + 2.0));
    }
    r.alpha[k] = b * 0.5 * (at + 1.0);
    if (k == 0) {
      r.beta[k] = std::pow(b, p + 1.0) / (p + 1.0);
    } else {
      const double bt = 4.0 * k * (k + a) * (k + p) * (k + a + p) / (s * s * (s + 1.0) * (s - 1.0));
      r.beta[k] = b * b * 0.25 * bt;
    }
  }
  return r;
}

// Gauss rule from n+1 recurrence coefficients (the extra one drives the Newton
// polish of the nodes as zeros of the degree-n orthonormal polynomial).
QuadratureRule golub_welsch(const Recurrence& rec, int n) {
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) diag[k] = rec.alpha[k];
  for (int k = 0; k + 1 < n; ++k) sub[k] = std::sqrt(rec.beta[k + 1]);

  std::vector<double> nodes(n);
  if (n == 1) {
    nodes[0] = rec.alpha[0];
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    for (int k = 0; k < n; ++k) nodes[k] = solver.eigenvalues()[k];
  }

  const double p0 = 1.0 / std::sqrt(rec.beta[0]);
  auto evaluate = [&](double x, double& value, double& derivative, double& christoffel) {
    double prev = 0.0, cur = p0, dprev = 0.0, dcur = 0.0;
    christoffel = cur * cur;
    for (int k = 0; k < n; ++k) {
      const double sb_next = std::sqrt(rec.beta[k + 1]);
      const double sb_k = k > 0 ? std::sqrt(rec.beta[k]) : 0.0;
      const double next = ((x - rec.alpha[k]) * cur - sb_k * prev) / sb_next;
      const double dnext = ((x - rec.alpha[k]) * dcur + cur - sb_k * dprev) / sb_next;
      prev = cur;
      cur = next;
      dprev = dcur;
      dcur = dnext;
      if (k + 1 < n) christoffel += cur * cur;
    }
    value = cur;
    derivative = dcur;
  };

  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int j = 0; j < n; ++j) {
    double x = nodes[j];
    const double gap_lo = j > 0 ? x - nodes[j - 1] : std::abs(x);
    const double gap_hi = j + 1 < n ? nodes[j + 1] - x : std::abs(x);
    const double max_step = 0.1 * std::min(gap_lo, gap_hi);
    double value, derivative, christoffel;
    for (int it = 0; it < 3; ++it) {
      evaluate(x, value, derivative, christoffel);
      if (derivative == 0.0) break;
      const double step = value / derivative;
      if (!(std::abs(step) < max_step)) break;
      x -= step;
    }
    evaluate(x, value, derivative, christoffel);
    rule.nodes[j] = x;
    rule.weights[j] = 1.0 / christoffel;
  }
  return rule;
}

void append_mapped(QuadratureRule& out, const QuadratureRule& reference, double a, double b) {
  // reference lives on [0, 1]
  for (std::size_t i = 0; i < reference.nodes.size(); ++i) {
    out.nodes.push_back(a + (b - a) * reference.nodes[i]);
    out.weights.push_back((b - a) * reference.weights[i]);
  }
}

}  // namespace

double QuadratureRule::total_mass() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

QuadratureRule gauss_jacobi_power(int n, double p, double b) {
  if (n < 1) throw DomainError("gauss_jacobi_power: need at least one node");
  if (!(p > -1.0)) throw DomainError("gauss_jacobi_power: weight exponent must exceed -1");
  if (!(b > 0.0)) throw DomainError("gauss_jacobi_power: interval must have positive length");
  QuadratureRule rule = golub_welsch(jacobi_power_recurrence(n + 1, p, 1.0), n);
  const double scale = std::pow(b, p + 1.0);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    rule.nodes[i] *= b;
    rule.weights[i] *= scale;
  }
  return rule;
}

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (!(b > a)) throw DomainError("gauss_legendre: need a < b");
  QuadratureRule unit = gauss_jacobi_power(n, 0.0, 1.0);
  QuadratureRule rule;
  append_mapped(rule, unit, a, b);
  return rule;
}

QuadratureRule graded_power_rule(double p, double b, const GradedRuleOptions& options) {
  if (!(p > -1.0)) throw DomainError("graded_power_rule: weight exponent must exceed -1");
  if (!(options.ratio > 0.0 && options.ratio < 1.0)) throw DomainError("graded_power_rule: ratio must lie in (0,1)");
  const int panels = static_cast<int>(std::ceil(std::log(options.floor) / std::log(options.ratio)));
  const double inner = b * std::pow(options.ratio, panels);

  QuadratureRule rule = gauss_jacobi_power(options.order, p, inner);
  const QuadratureRule unit = gauss_jacobi_power(options.order, 0.0, 1.0);
  for (int k = panels - 1; k >= 0; --k) {
    const double lo = b * std::pow(options.ratio, k + 1);
    const double hi = k == 0 ? b : b * std::pow(options.ratio, k);
    for (std::size_t i = 0; i < unit.nodes.size(); ++i) {
      const double x = lo + (hi - lo) * unit.nodes[i];
      rule.nodes.push_back(x);
      rule.weights.push_back((hi - lo) * unit.weights[i] * std::pow(x, p));
    }
  }
  return rule;
}

QuadratureRule cosine_mapped_power_rule(double p, double b, int panels, int order) {
  if (!(p > -1.0)) throw DomainError("cosine_mapped_power_rule: weight exponent must exceed -1");
  if (panels < 1 || order < 2) throw DomainError("cosine_mapped_power_rule: bad panel layout");
  constexpr int kGradedPanels = 40;
  const double pi = std::acos(-1.0);
  const double q = 2.0 * p + 1.0;  // theta exponent of the weight near theta = 0
  const double scale = std::pow(b, p + 1.0);
  const double width = pi / panels;
  const double inner = width * std::ldexp(1.0, -kGradedPanels);

  // x^p dx = b^{p+1} sin^{2p+1}(t/2) cos(t/2) dt with x = b sin^2(t/2)
  auto weight_over_power = [&](double t) {
    const double ratio = t > 0.0 ? std::sin(0.5 * t) / t : 0.5;
    return scale * std::pow(ratio, q) * std::cos(0.5 * t);
  };
  auto to_x = [&](double t) {
    const double sh = std::sin(0.5 * t);
    return b * sh * sh;
  };

  QuadratureRule rule;
  const QuadratureRule jac = gauss_jacobi_power(order, q, inner);
  for (std::size_t i = 0; i < jac.nodes.size(); ++i) {
    rule.nodes.push_back(to_x(jac.nodes[i]));
    rule.weights.push_back(jac.weights[i] * weight_over_power(jac.nodes[i]));
  }
  const QuadratureRule unit = gauss_jacobi_power(order, 0.0, 1.0);
  auto add_panel = [&](double lo, double hi) {
    for (std::size_t i = 0; i < unit.nodes.size(); ++i) {
      const double t = lo + (hi - lo) * unit.nodes[i];
      rule.nodes.push_back(to_x(t));
      rule.weights.push_back((hi - lo) * unit.weights[i] * std::pow(t, q) * weight_over_power(t));
    }
  };
  for (int k = kGradedPanels; k >= 1; --k) add_panel(width * std::ldexp(1.0, -k), width * std::ldexp(1.0, -k + 1));
  for (int k = 1; k < panels; ++k) add_panel(k * width, k + 1 == panels ? pi : (k + 1) * width);
  return rule;
}

}  // namespace subohmic::numerics
