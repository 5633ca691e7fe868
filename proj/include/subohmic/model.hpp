#pragma once

#include <vector>

namespace subohmic::model {

/// Physical inputs of the spin-boson model with spectral density
/// J(w) = 2 pi alpha w_c^{1-s} w^s for 0 <= w <= w_c (hard cutoff).
struct ModelParams {
  double s = 0.3;        // bath exponent
  double alpha = 0.0;    // dimensionless coupling
  double delta = 1.0;    // bare tunnelling (energy)
  double omega_c = 10.0; // cutoff (energy)

  /// Throws DomainError unless delta > 0, omega_c > 0, alpha >= 0, 0 < s < 1.
  void validate() const;
  /// Mean-field theory applies for 0 < s < 1/2 only.
  bool theory_valid() const { return s > 0.0 && s < 0.5; }

  ModelParams with_alpha(double a) const {
    ModelParams p = *this;
    p.alpha = a;
    return p;
  }
};

double spectral_density(double omega, const ModelParams& p);

/// (1/pi) \int_0^{w_c} J(w) dw = 2 alpha w_c^2 / (s + 1).
double bath_mass(const ModelParams& p);

/// Finite star bath: H_B = sum_l w_l a_l^+ a_l, coupling (1/2) sigma_z sum_l g_l (a_l + a_l^+).
struct DiscretizedBath {
  std::vector<double> frequencies;
  std::vector<double> couplings;

  std::size_t size() const { return frequencies.size(); }
};

/// Gauss rule of the measure (1/pi) J(w) dw: g_l^2 = weight_l, w_l = node_l.
DiscretizedBath discretize_bath(const ModelParams& p, int n_modes);

/// Discrete measure sum_l weights_l delta(w - w_l) standing in for (1/pi) J(w) dw;
/// weights are g_l^2. Every bath sum of the variational theory is taken over one
/// of these, whether it comes from a finite bath or a quadrature of the continuum.
struct BathSpectrum {
  std::vector<double> frequencies;
  std::vector<double> weights;

  std::size_t size() const { return frequencies.size(); }
  BathSpectrum scaled(double factor) const;
};

/// High-resolution quadrature of the continuum: graded rule for w^{s-1} dw, so
/// integrands carrying 1/w stay smooth on every panel.
BathSpectrum continuum_spectrum(const ModelParams& p);

BathSpectrum spectrum_of(const DiscretizedBath& bath);

}  // namespace subohmic::model
