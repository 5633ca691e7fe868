#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "subohmic/model.hpp"
#include "subohmic/numerics.hpp"
#include "subohmic/variational.hpp"

namespace subohmic::critical {

using model::ModelParams;
using variational::Functional;

/// Bath parameters without the coupling.
struct BathShape {
  double s;
  double delta;
  double omega_c;

  ModelParams at(double alpha) const { return {s, alpha, delta, omega_c}; }
};

struct ClosedFormCritical {
  double alpha_c;
  double delta_tilde_c;  // Delta exp(-s / (2 (1 - s)))
};

/// Scaling-limit critical coupling
/// alpha_c = sin(pi s) e^{-s/2} / (2 pi (1 - s)) (Delta / w_c)^{1-s}, for 0 < s < 1/2.
ClosedFormCritical critical_coupling_closed(const BathShape& bath);

/// Thrown when c1(alpha) has no sign change within the searched range.
class NoTransition : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Root of c1(alpha) by bracketed search, relative tolerance 1e-8 in alpha.
/// `guess` seeds the bracket, which grows geometrically until c1 changes sign.
double critical_coupling_from_c1(const std::function<double(double)>& c1_of_alpha, double guess);

/// alpha where c1 of the chosen continuum functional vanishes.
double critical_coupling_numeric(const BathShape& bath, Functional functional = Functional::exact);

struct CriticalPoint {
  BathShape bath;
  double alpha_c_numeric;
  double alpha_c_closed;
  double delta_tilde_c;  // numeric, at alpha_c_numeric and M = 0
  double sx_c;
  double ratio() const { return alpha_c_numeric / alpha_c_closed; }
};

CriticalPoint locate_critical_point(const BathShape& bath, Functional functional = Functional::exact);

struct SweepRow {
  double alpha;
  double m;
  double sx;
  double entanglement;
  double energy;
  double c1;
  std::optional<std::string> error;  // per-row failure, other columns NaN
};

struct SweepTable {
  BathShape bath;
  Functional functional = Functional::exact;
  std::vector<SweepRow> rows;
};

/// One independent minimisation per alpha (alphas strictly increasing).
/// Rows run on up to `threads` workers and come back in input order.
SweepTable sweep_alpha(const BathShape& bath, std::span<const double> alphas,
                       Functional functional = Functional::exact, int threads = 1);

struct FitWindow {
  double lo = 1e-4;
  double hi = 1e-2;
};

/// alpha_c (1 -+ t) for t log-spaced over the window, below then above; sorted.
std::vector<double> exponent_grid(double alpha_c, const FitWindow& window = {}, int points_per_side = 12);

struct CriticalExponents {
  numerics::FitResult beta;   // M ~ ((alpha - alpha_c)/alpha_c)^beta
  numerics::FitResult gamma;  // chi ~ ((alpha_c - alpha)/alpha_c)^{-gamma}; exponent reported as gamma
};

/// Fits on rows whose reduced coupling lies inside `window`; needs >= 3 per side.
CriticalExponents extract_exponents(const SweepTable& table, double alpha_c, const FitWindow& window = {});

struct PhaseDiagramRow {
  double s;
  double omega_c;
  double alpha_c_numeric;
  double alpha_c_closed;
  std::optional<std::string> error;
};

std::vector<PhaseDiagramRow> phase_diagram(std::span<const double> s_grid, double delta,
                                           std::span<const double> omega_c_list, int threads = 1);

}  // namespace subohmic::critical
