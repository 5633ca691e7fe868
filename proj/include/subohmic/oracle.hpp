#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <span>
#include <vector>

#include "subohmic/chain.hpp"
#include "subohmic/model.hpp"
#include "subohmic/variational.hpp"

namespace subohmic::oracle {

using model::DiscretizedBath;
using model::ModelParams;
using variational::VariationalState;

enum class Basis { star, chain };

/// Which ADO state the fidelity compares with: the minimiser on the discrete
/// bath, or the continuum solution restricted to the L modes (chain basis: the
/// first L chain sites of the continuum chain).
enum class AdoSource { discrete, continuum };

struct OracleConfig {
  int n_modes = 4;   // L
  int n_boson = 8;   // N_b Fock states per mode
  Basis basis = Basis::star;
  AdoSource ado = AdoSource::discrete;

  /// Throws DomainError unless L >= 1, N_b >= 2 and 2 N_b^L <= 2e6.
  void validate() const;
  long long dimension() const;
};

/// -(1/2) Delta sigma_x + (1/2) eps sigma_z + (1/2) sigma_z sum_l c_l (a_l + a_l^+)
///   + sum_l k_l (a_l + a_l^+) + sum_lm h_lm a_l^+ a_m + offset.
/// Star basis: h = diag(w), c = g. Chain basis: h tridiagonal, c = (t_{-1}, 0, ...).
struct QuadraticModel {
  double delta = 1.0;
  double bias = 0.0;
  double offset = 0.0;
  Eigen::MatrixXd h;
  Eigen::VectorXd c;
  Eigen::VectorXd k;
  Eigen::MatrixXd to_modes;  // working-basis operators b = to_modes * a (star modes a)
  Eigen::VectorXd shift;     // b -> b + shift applied (displaced frame), working basis
};

/// Star or chain form of a discrete bath.
QuadraticModel quadratic_model(const DiscretizedBath& bath, const ModelParams& p, Basis basis);

/// The first n sites of a continuum chain: h tridiagonal (eps_n, t_n), c = (t_{-1}, 0, ...).
/// to_modes is left empty: the chain is not a rotation of a finite star bath.
QuadraticModel chain_model(const chain::ChainRepresentation& chain, const ModelParams& p);

/// Same model with every working-basis mode shifted by its mean-field
/// displacement -m' g / (2 w) (star modes), rotated into the working basis.
QuadraticModel displaced(const QuadraticModel& model, const DiscretizedBath& bath, double trial_m);

struct Hamiltonian {
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
  int n_modes = 0;
  int n_boson = 0;
  double norm_bound = 0.0;  // max absolute row sum
};

/// Product basis, spin slowest (index 0 is sigma_z = +1), mode 1 next, last mode fastest.
Hamiltonian build_hamiltonian(const QuadraticModel& model, int n_boson);
Hamiltonian build_hamiltonian(const DiscretizedBath& bath, const ModelParams& p, const OracleConfig& cfg);

struct EigenPair {
  double energy = 0.0;
  Eigen::VectorXd vector;  // sign fixed: entry 0 (|+, vacuum>) non-negative
  int iterations = 0;      // matrix-vector products
  double residual = 0.0;   // |H v - E v|
};

/// Lowest eigenpair by restarted Lanczos with full reorthogonalisation from the
/// normalised all-ones vector; stops at |Hv - Ev| <= 1e-10 * norm_bound.
EigenPair ground_state(const Hamiltonian& h, int max_iterations = 10000);

double sigma_z(const Hamiltonian& h, const Eigen::VectorXd& v);

struct AdoOnDiscrete {
  double energy;
  VariationalState state;
};

/// The variational minimisation with bath sums running over the discrete modes.
AdoOnDiscrete ado_on_discrete(const DiscretizedBath& bath, const ModelParams& p);

/// Critical coupling of the variational theory on the discrete bath made for
/// (s, Delta, w_c) with n_modes modes (g^2 scales linearly with alpha).
double critical_coupling_discrete(const ModelParams& shape, int n_modes);

struct Fidelity {
  double fidelity = 0.0;
  double truncation_loss = 0.0;  // 1 - |P Psi|^2 of the ADO state in the truncated space
  bool low_confidence = false;   // truncation_loss > 0.1
};

/// C+ |+> prod_l |d+_l> + C- |-> prod_l |d-_l>, coherent states cut at n_boson levels.
Eigen::VectorXd coherent_product_vector(double c_plus, double c_minus, const Eigen::VectorXd& d_plus,
                                        const Eigen::VectorXd& d_minus, int n_boson);

/// Projected ADO state, coherent amplitudes e^{-f^2/2} f^k / sqrt(k!) per working mode.
Eigen::VectorXd ado_vector(const VariationalState& state, const DiscretizedBath& bath, const QuadraticModel& model,
                           int n_boson);
Fidelity fidelity(const VariationalState& state, const DiscretizedBath& bath, const QuadraticModel& model,
                  const Hamiltonian& h, const Eigen::VectorXd& exact_vector);

struct ScanRow {
  double trial_m;
  int iterations;
  double truncation_loss;  // ED ground-state weight on the highest Fock level of any mode
  double sigma_z;
  double energy;
  double metric;           // truncation_loss; smallest where the frame matches the magnetisation
};

std::vector<ScanRow> convergence_scan(std::span<const double> trial_ms, const DiscretizedBath& bath,
                                      const ModelParams& p, const OracleConfig& cfg);

/// Weight of v on basis states where some mode occupies its highest Fock level.
double top_level_weight(const Hamiltonian& h, const Eigen::VectorXd& v);

struct OracleResult {
  ModelParams params;
  OracleConfig config;
  double energy_exact = 0.0;
  double energy_ado_discrete = 0.0;
  double fidelity = 0.0;
  double truncation_loss = 0.0;
  bool low_confidence = false;
  bool converged_nb = false;  // |E(N_b) - E(N_b - 1)| <= 1e-6 max(1, |E|)
  double sigma_z_exact = 0.0;
  double m_ado = 0.0;  // magnetisation of the ADO state used for the fidelity
  int iterations = 0;
};

OracleResult run_oracle(const ModelParams& p, const OracleConfig& cfg);

}  // namespace subohmic::oracle
