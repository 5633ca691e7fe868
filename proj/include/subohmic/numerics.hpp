#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace subohmic::numerics {

/// Principal branch of the Lambert W function, W0(x) e^{W0(x)} = x, x >= -1/e.
///
/// Halley iteration from a piecewise initial guess (branch-point series near
/// -1/e, rational fit on the middle range, log asymptotics for large x).
/// Arguments up to 1e-14 below -1/e are clamped onto the branch point; anything
/// further out throws DomainError.
double lambert_w0(double x);

/// Nodes and positive weights of a quadrature rule for some measure on (a, b).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t order() const { return nodes.size(); }
  double total_mass() const;
};

/// Gauss-Legendre rule with n nodes on [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

/// Gauss-Jacobi rule with n nodes for the measure x^p dx on [0, b], p > -1.
/// Built by Golub-Welsch from the Jacobi recurrence, nodes Newton-polished and
/// weights from the Christoffel function, so large n stays O(n^2).
QuadratureRule gauss_jacobi_power(int n, double p, double b);

struct GradedRuleOptions {
  double ratio = 1.0 / 3.0;   // geometric panel ratio towards the origin
  double floor = 1e-30;       // innermost panel is [0, floor * b]
  int order = 16;             // nodes per panel
};

/// Composite rule for x^p dx on [0, b] resolving every scale down to floor*b:
/// Gauss-Legendre on geometric panels plus a Gauss-Jacobi innermost panel.
/// Suited to integrands x^p F(x) where F has structure at an unknown small scale.
QuadratureRule graded_power_rule(double p, double b, const GradedRuleOptions& options = {});

/// Composite rule for x^p dx on [0, b] in the variable x = b sin^2(theta/2),
/// uniform panels in theta plus a graded first panel. Integrates polynomials of
/// degree well above `panels` to near machine precision, which is what
/// orthogonal-polynomial recurrences of high index need.
QuadratureRule cosine_mapped_power_rule(double p, double b, int panels, int order = 24);

/// Sum of weights * f(nodes).
template <typename F>
double integrate(F&& f, const QuadratureRule& rule) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(rule.nodes[i]);
  return sum;
}

struct IntegrationReport {
  double value;
  std::optional<double> first_nonfinite_node;  // set when some f(node) was inf/nan
};

template <typename F>
IntegrationReport integrate_with_report(F&& f, const QuadratureRule& rule) {
  IntegrationReport report{0.0, std::nullopt};
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double v = f(rule.nodes[i]);
    if (!std::isfinite(v) && !report.first_nonfinite_node) report.first_nonfinite_node = rule.nodes[i];
    report.value += rule.weights[i] * v;
  }
  return report;
}

struct ScalarMinimum {
  double argmin;
  double value;
  bool at_boundary;  // argmin is within tol of lo or hi
};

/// Brent minimisation (golden section with parabolic steps) on [lo, hi].
ScalarMinimum minimize_scalar(const std::function<double(double)>& f, double lo, double hi,
                              double tol);

/// Bracketing root of f on [lo, hi]; requires f(lo) * f(hi) <= 0.
/// Stops when |f(root)| < tol or the bracket is narrower than tol.
double find_root(const std::function<double(double)>& f, double lo, double hi, double tol);

struct FitResult {
  double exponent;
  double prefactor;
  double residual;  // rms of the log-space misfit
};

/// Least-squares line through (log x, log y): y ~ prefactor * x^exponent.
FitResult fit_power_law(std::span<const double> xs, std::span<const double> ys);

}  // namespace subohmic::numerics
