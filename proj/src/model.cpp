#include "subohmic/model.hpp"

#include <cmath>
#include <string>

#include "subohmic/errors.hpp"
#include "subohmic/numerics.hpp"

namespace subohmic::model {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void ModelParams::validate() const {
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  if (!(omega_c > 0.0)) throw DomainError("omega_c must be positive");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be finite and non-negative");
  if (!(s > 0.0 && s < 1.0)) throw DomainError("s must lie in (0, 1), got " + std::to_string(s));
}

double spectral_density(double omega, const ModelParams& p) {
  if (omega < 0.0) throw DomainError("spectral_density: negative frequency");
  if (omega > p.omega_c) return 0.0;
  return 2.0 * kPi * p.alpha * std::pow(p.omega_c, 1.0 - p.s) * std::pow(omega, p.s);
}

double bath_mass(const ModelParams& p) { return 2.0 * p.alpha * p.omega_c * p.omega_c / (p.s + 1.0); }

DiscretizedBath discretize_bath(const ModelParams& p, int n_modes) {
  p.validate();
  if (n_modes < 1) throw DomainError("discretize_bath: need at least one mode");
  const auto rule = numerics::gauss_jacobi_power(n_modes, p.s, p.omega_c);
  const double prefactor = 2.0 * p.alpha * std::pow(p.omega_c, 1.0 - p.s);
  DiscretizedBath bath;
  bath.frequencies = rule.nodes;
  bath.couplings.resize(rule.order());
  for (std::size_t l = 0; l < rule.order(); ++l) bath.couplings[l] = std::sqrt(prefactor * rule.weights[l]);
  return bath;
}

BathSpectrum BathSpectrum::scaled(double factor) const {
  BathSpectrum out = *this;
  for (double& w : out.weights) w *= factor;
  return out;
}

BathSpectrum continuum_spectrum(const ModelParams& p) {
  p.validate();
  const auto rule = numerics::graded_power_rule(p.s - 1.0, p.omega_c);
  const double prefactor = 2.0 * p.alpha * std::pow(p.omega_c, 1.0 - p.s);
  BathSpectrum spectrum;
  spectrum.frequencies = rule.nodes;
  spectrum.weights.resize(rule.order());
  for (std::size_t i = 0; i < rule.order(); ++i) spectrum.weights[i] = prefactor * rule.weights[i] * rule.nodes[i];
  return spectrum;
}

BathSpectrum spectrum_of(const DiscretizedBath& bath) {
  BathSpectrum spectrum;
  spectrum.frequencies = bath.frequencies;
  spectrum.weights.resize(bath.size());
  for (std::size_t l = 0; l < bath.size(); ++l) spectrum.weights[l] = bath.couplings[l] * bath.couplings[l];
  return spectrum;
}

}  // namespace subohmic::model
