#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "subohmic/model.hpp"
#include "subohmic/variational.hpp"

namespace subohmic::chain {

using model::DiscretizedBath;
using model::ModelParams;
using variational::VariationalState;

/// H_B = sum_n eps_n b_n^+ b_n + sum_n t_n (b_n^+ b_{n+1} + h.c.), spin coupling
/// (1/2) sigma_z t_{-1} (b_0 + b_0^+). t_{-1}^2 is the total bath mass, so the
/// 1/2 of the star coupling stays in front of sigma_z.
struct ChainRepresentation {
  std::vector<double> site_energies;  // eps_n
  std::vector<double> hoppings;       // t_n couples n and n+1; the last one leads out of the truncated chain
  double system_coupling = 0.0;       // t_{-1}
  double omega_c = 1.0;

  int n_sites() const { return static_cast<int>(site_energies.size()); }
  /// Orthonormal polynomials p_0..p_{n_sites-1} of the normalised measure at w.
  std::vector<double> polynomials(double omega) const;
};

/// Stieltjes procedure for (1/pi) J(w) dw over a cosine-mapped composite rule,
/// refined until two successive rules agree to 1e-10; memoised on (s, n_sites).
ChainRepresentation chain_map(const ModelParams& p, int n_sites);

/// Max |G - I| of the polynomial Gram matrix of `chain` on an independent rule
/// (Gauss-Jacobi with n_sites + 8 nodes, exact for these degrees).
double gram_residual(const ChainRepresentation& chain, double s);

struct Tridiagonalization {
  ChainRepresentation chain;
  Eigen::MatrixXd unitary;  // b_n = sum_l unitary(n, l) a_l; n_sites x L
};

/// Lanczos with full reorthogonalisation on diag(w_l) from the start vector g / |g|.
/// Only the first `n_sites` sites are built (all of them when n_sites <= 0).
Tridiagonalization tridiagonalize(const DiscretizedBath& bath, int n_sites = 0);

enum class Frame { bare, displaced };

struct OccupationProfile {
  std::vector<double> n_av;
  Frame frame = Frame::bare;
  double frame_m = 0.0;  // magnetisation used for the shift
};

/// Shift of the displaced frame, lambda(w)/g = m / (2 w), and the shapes seen in it.
struct DisplacedFrame {
  double m = 0.0;
  bool active = false;  // false for m == 0: the transformation is the identity

  double lambda_over_g(double omega) const { return active ? m / (2.0 * omega) : 0.0; }
  /// f_{+-}/g + lambda/g; finite as w -> 0.
  variational::DisplacementShape shifted(const VariationalState& state, double omega) const;
};

DisplacedFrame displaced_frame(const VariationalState& state);
/// Frame built with a trial magnetisation instead of the state's own.
DisplacedFrame displaced_frame(double trial_m);

/// N_av(n) = C+^2 d_{n,+}^2 + C-^2 d_{n,-}^2 with d_{n,+-} the chain components of
/// the coherent displacements (in `frame`).
OccupationProfile chain_occupations(const VariationalState& state, const ModelParams& p,
                                    const ChainRepresentation& chain, const DisplacedFrame& frame = {});

/// Chain-basis displacements d_n of an arbitrary shape f(w)/g(w).
std::vector<double> chain_displacements(const std::function<double(double)>& shape, const ModelParams& p,
                                        const ChainRepresentation& chain);

}  // namespace subohmic::chain
