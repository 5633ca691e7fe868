#pragma once

#include <span>
#include <vector>

#include "subohmic/model.hpp"

namespace subohmic::variational {

using model::BathSpectrum;
using model::ModelParams;

/// Optimal displacements divided by the mode coupling, f_{l+-} / g_l.
struct DisplacementShape {
  double plus;
  double minus;
};

/// f_{+-}/g = -(M dt +- sqrt(1-M^2) w) / (2 w (dt + sqrt(1-M^2) w)).
/// At w = 0 with M dt != 0 the result is -inf * sign(M) (infrared divergence).
DisplacementShape displacements(double omega, double m, double delta_tilde);

struct VariationalState {
  double m = 0.0;
  double delta_tilde = 0.0;
  double c_plus = 1.0 / 1.4142135623730951;
  double c_minus = 1.0 / 1.4142135623730951;

  /// C_+- = sqrt((1 +- M) / 2).
  static VariationalState make(double m, double delta_tilde);
  DisplacementShape shape(double omega) const { return displacements(omega, m, delta_tilde); }
};

enum class Functional { exact, scaling };

/// Prefactor of the tunnelling term in the scaling-limit energy. `derived_half`
/// is the scaling limit of the full variational energy; `printed_unity` keeps
/// the alternative prefactor 1 for comparison only.
enum class TunnelingPrefactor { derived_half, printed_unity };

// ---------------------------------------------------------------------------
// Bath sums for a given spectrum (continuum quadrature or a finite bath).

/// (1/2) sum_l g_l^2 (1-M^2) / (dt + sqrt(1-M^2) w_l)^2, i.e. -log(dt/Delta).
double dressing_exponent(const BathSpectrum& spectrum, double m, double delta_tilde);

struct SelfConsistentTunneling {
  double delta_tilde = 0.0;
  int iterations = 0;
  int finite_roots = 0;  // distinct finite fixed points detected
  bool collapsed = false;
};

/// Largest (lowest-energy) finite solution of dt = Delta exp(-dressing_exponent),
/// by damped iteration log dt <- (log dt + log RHS)/2 from dt = Delta, finished
/// with Newton steps. Returns dt = 0 when the iteration collapses below 1e-12 Delta.
SelfConsistentTunneling solve_delta_tilde(const BathSpectrum& spectrum, double m, double delta);

/// Variational energy at magnetisation m with optimal displacements for the given dt.
double energy_at(const BathSpectrum& spectrum, double m, double delta_tilde);

/// Energy of arbitrary displacements (per-node shapes f/g) with dt from the overlap.
double energy_of_displacements(const BathSpectrum& spectrum, double m, double delta,
                               std::span<const double> shape_plus, std::span<const double> shape_minus);

// ---------------------------------------------------------------------------
// Continuum functionals.

double solve_delta_tilde_exact(double m, const ModelParams& p);

/// Lambert-W solution of the scaling-limit self-consistency; 0 when none exists.
double solve_delta_tilde_scaling(double m, const ModelParams& p);

double energy_exact(double m, const ModelParams& p);
double energy_scaling(double m, const ModelParams& p,
                      TunnelingPrefactor prefactor = TunnelingPrefactor::derived_half);

/// E(M) for one functional, with the tunnelling re-solved at every M.
class EnergyLandscape {
 public:
  struct Point {
    double m;
    double delta_tilde;
    double energy;
    double reduced_slope;  // (dE/dM) / M; tends to 2 c1 as M -> 0
  };

  static EnergyLandscape exact(const ModelParams& p);
  static EnergyLandscape scaling(const ModelParams& p,
                                 TunnelingPrefactor prefactor = TunnelingPrefactor::derived_half);
  static EnergyLandscape on_spectrum(BathSpectrum spectrum, double delta);

  Point evaluate(double m) const;
  double energy(double m) const { return evaluate(m).energy; }
  double delta() const { return delta_; }

 private:
  enum class Kind { spectrum, scaling };
  Kind kind_ = Kind::spectrum;
  BathSpectrum spectrum_;
  ModelParams params_;
  TunnelingPrefactor prefactor_ = TunnelingPrefactor::derived_half;
  double delta_ = 1.0;
  double localized_energy_ = 0.0;
};

struct GroundStateSolution {
  ModelParams params;
  VariationalState state;
  double energy = 0.0;
  double sx = 0.0;
  double sz = 0.0;
  double p_plus = 1.0;
  double p_minus = 0.0;
  double entanglement = 0.0;  // bits
  bool occupation_finite = true;
  double crossover_scale = 0.0;  // M dt / sqrt(1-M^2); +inf at |M| = 1
};

/// Spin observables of a state; the log in the entanglement is base 2.
GroundStateSolution observables(const VariationalState& state, const ModelParams& p);

/// Minimise E(M) on [0, 1 - 1e-9]: 64-point pre-scan, Brent on the best cell,
/// Newton-free polish on the root of dE/dM.
GroundStateSolution minimize_landscape(const EnergyLandscape& landscape, const ModelParams& p);
GroundStateSolution minimize_energy(const ModelParams& p, Functional functional = Functional::exact);

/// Boson occupation per unit frequency of the variational state.
double occupation_density(const VariationalState& state, const ModelParams& p, double omega);

/// Integrated occupation; +inf whenever M != 0 (infrared divergence).
double total_occupation(const VariationalState& state, const ModelParams& p);

struct LandauCoefficients {
  double c0;
  double c1;
  double c2;
};

/// E = c0 + c1 M^2 + c2 M^4 + ..., from finite differences of E(M) with
/// Richardson extrapolation (step 1e-3 for c1, 2e-2 for c2).
LandauCoefficients landau_coefficients(const EnergyLandscape& landscape);
LandauCoefficients landau_coefficients(const ModelParams& p, Functional functional = Functional::exact);

/// Only c1, for root searches.
double landau_c1(const EnergyLandscape& landscape);

/// chi = 1 / (4 c1): linear response of M to a bias -(eps/2) sigma_z. Throws
/// DomainError if c1 <= 0.
double susceptibility(const ModelParams& p, Functional functional = Functional::exact);

}  // namespace subohmic::variational
