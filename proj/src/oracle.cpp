#include "subohmic/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "subohmic/chain.hpp"
#include "subohmic/critical.hpp"
#include "subohmic/errors.hpp"

namespace subohmic::oracle {
namespace {

constexpr long long kMaxDimension = 2000000;
constexpr double kResidualScale = 1e-10;
constexpr double kKrylovBudget = 3e7;  // doubles kept in the Krylov basis

std::vector<long long> mode_strides(int n_modes, int n_boson) {
  std::vector<long long> stride(n_modes);
  long long s = 1;
  for (int l = n_modes - 1; l >= 0; --l) {
    stride[l] = s;
    s *= n_boson;
  }
  return stride;
}

long long power(int base, int exp) {
  long long r = 1;
  for (int i = 0; i < exp; ++i) {
    r *= base;
    if (r > kMaxDimension) return kMaxDimension + 1;
  }
  return r;
}

// Coherent-state amplitudes <k|d> = e^{-d^2/2} d^k / sqrt(k!), k < n.
std::vector<double> coherent_amplitudes(double d, int n) {
  std::vector<double> a(n);
  a[0] = std::exp(-0.5 * d * d);
  for (int k = 1; k < n; ++k) a[k] = a[k - 1] * d / std::sqrt(static_cast<double>(k));
  return a;
}

}  // namespace

void OracleConfig::validate() const {
  if (n_modes < 1) throw DomainError("oracle: need at least one mode");
  if (n_boson < 2) throw DomainError("oracle: need at least two Fock states per mode");
  if (dimension() > kMaxDimension)
    throw DomainError("oracle: dimension 2 N_b^L exceeds the cap of 2e6 (L = " + std::to_string(n_modes) +
                      ", N_b = " + std::to_string(n_boson) + ")");
}

long long OracleConfig::dimension() const { return 2 * power(n_boson, n_modes); }

QuadraticModel quadratic_model(const DiscretizedBath& bath, const ModelParams& p, Basis basis) {
  const int n = static_cast<int>(bath.size());
  if (n < 1) throw DomainError("quadratic_model: empty bath");
  const Eigen::Map<const Eigen::VectorXd> w(bath.frequencies.data(), n);
  const Eigen::Map<const Eigen::VectorXd> g(bath.couplings.data(), n);
  QuadraticModel m;
  m.delta = p.delta;
  m.k = Eigen::VectorXd::Zero(n);
  m.shift = Eigen::VectorXd::Zero(n);
  if (basis == Basis::star || g.norm() == 0.0) {
    m.h = w.asDiagonal();
    m.c = g;
    m.to_modes = Eigen::MatrixXd::Identity(n, n);
    return m;
  }
  const auto tri = chain::tridiagonalize(bath);
  m.h = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m.h(i, i) = tri.chain.site_energies[i];
    if (i + 1 < n) m.h(i, i + 1) = m.h(i + 1, i) = tri.chain.hoppings[i];
  }
  m.c = Eigen::VectorXd::Zero(n);
  m.c(0) = tri.chain.system_coupling;
  m.to_modes = tri.unitary;
  return m;
}

QuadraticModel displaced(const QuadraticModel& model, const DiscretizedBath& bath, double trial_m) {
  const int n = static_cast<int>(bath.size());
  Eigen::VectorXd star(n);
  for (int l = 0; l < n; ++l) star(l) = -trial_m * bath.couplings[l] / (2.0 * bath.frequencies[l]);
  const Eigen::VectorXd beta = model.to_modes * star;
  QuadraticModel out = model;
  const Eigen::VectorXd hb = model.h * beta;
  out.bias += 2.0 * model.c.dot(beta);
  out.offset += beta.dot(hb) + 2.0 * model.k.dot(beta);
  out.k += hb;
  out.shift -= beta;
  return out;
}

Hamiltonian build_hamiltonian(const QuadraticModel& model, int n_boson) {
  const int n_modes = static_cast<int>(model.c.size());
  OracleConfig cfg{n_modes, n_boson};
  cfg.validate();
  const long long bath_dim = power(n_boson, n_modes);
  const long long dim = 2 * bath_dim;
  const auto stride = mode_strides(n_modes, n_boson);

  std::vector<std::pair<int, int>> hops;  // (l, m) with h_lm != 0, l != m
  for (int l = 0; l < n_modes; ++l)
    for (int m = 0; m < n_modes; ++m)
      if (l != m && model.h(l, m) != 0.0) hops.emplace_back(l, m);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(dim) * (2 + 2 * n_modes + hops.size()));
  std::vector<int> occ(n_modes);
  for (long long i = 0; i < dim; ++i) {
    const bool up = i < bath_dim;
    const double sigma = up ? 1.0 : -1.0;
    long long rest = i % bath_dim;
    for (int l = 0; l < n_modes; ++l) {
      occ[l] = static_cast<int>(rest / stride[l]);
      rest %= stride[l];
    }
    double diag = 0.5 * sigma * model.bias + model.offset;
    for (int l = 0; l < n_modes; ++l) diag += model.h(l, l) * occ[l];
    if (diag != 0.0) triplets.emplace_back(i, i, diag);
    if (model.delta != 0.0) triplets.emplace_back(i, up ? i + bath_dim : i - bath_dim, -0.5 * model.delta);
    for (int l = 0; l < n_modes; ++l) {
      const double lin = 0.5 * sigma * model.c(l) + model.k(l);
      if (lin == 0.0) continue;
      if (occ[l] + 1 < n_boson) triplets.emplace_back(i, i + stride[l], lin * std::sqrt(occ[l] + 1.0));
      if (occ[l] > 0) triplets.emplace_back(i, i - stride[l], lin * std::sqrt(static_cast<double>(occ[l])));
    }
    // a_l^+ a_m
    for (const auto& [l, m] : hops) {
      if (occ[m] == 0 || occ[l] + 1 >= n_boson) continue;
      triplets.emplace_back(i, i + stride[l] - stride[m], model.h(l, m) * std::sqrt((occ[l] + 1.0) * occ[m]));
    }
  }
  Hamiltonian h;
  h.n_modes = n_modes;
  h.n_boson = n_boson;
  h.matrix.resize(dim, dim);
  h.matrix.setFromTriplets(triplets.begin(), triplets.end());
  h.matrix.makeCompressed();
  for (Eigen::Index r = 0; r < h.matrix.outerSize(); ++r) {
    double row = 0.0;
    for (decltype(h.matrix)::InnerIterator it(h.matrix, r); it; ++it) row += std::abs(it.value());
    h.norm_bound = std::max(h.norm_bound, row);
  }
  return h;
}

Hamiltonian build_hamiltonian(const DiscretizedBath& bath, const ModelParams& p, const OracleConfig& cfg) {
  cfg.validate();
  if (static_cast<int>(bath.size()) != cfg.n_modes) throw DomainError("build_hamiltonian: bath size differs from L");
  return build_hamiltonian(quadratic_model(bath, p, cfg.basis), cfg.n_boson);
}

EigenPair ground_state(const Hamiltonian& h, int max_iterations) {
  const Eigen::Index n = h.matrix.rows();
  if (n == 0) throw DomainError("ground_state: empty operator");
  const double tol = kResidualScale * std::max(h.norm_bound, 1e-300);
  const Eigen::Index krylov =
      std::min<Eigen::Index>(n, std::clamp<Eigen::Index>(static_cast<Eigen::Index>(kKrylovBudget / n), 20, 120));

  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  Eigen::MatrixXd basis(n, krylov);
  EigenPair out;
  double last_residual = 0.0;
  while (true) {
    std::vector<double> alpha, beta;
    basis.col(0) = x;
    Eigen::VectorXd ritz_y;
    double theta = 0.0;
    Eigen::Index used = 0;
    for (Eigen::Index j = 0; j < krylov; ++j) {
      Eigen::VectorXd r = h.matrix * basis.col(j);
      ++out.iterations;
      alpha.push_back(basis.col(j).dot(r));
      for (int pass = 0; pass < 2; ++pass) {
        const auto v = basis.leftCols(j + 1);
        r -= v * (v.transpose() * r);
      }
      const double b = r.norm();
      used = j + 1;

      Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), used);
      Eigen::VectorXd off = used > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), used - 1))
                                     : Eigen::VectorXd();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
      theta = tri.eigenvalues()(0);
      ritz_y = tri.eigenvectors().col(0);
      const double estimate = b * std::abs(ritz_y(used - 1));
      const bool exhausted = b <= 1e-14 * std::max(h.norm_bound, 1e-300) || j + 1 == krylov;
      if (estimate <= 0.5 * tol || exhausted || out.iterations >= max_iterations) break;
      beta.push_back(b);
      basis.col(j + 1) = r / b;
    }
    x = basis.leftCols(used) * ritz_y;
    x.normalize();
    Eigen::VectorXd res = h.matrix * x - theta * x;
    last_residual = res.norm();
    if (last_residual <= tol) {
      out.energy = theta;
      out.residual = last_residual;
      if (x(0) < 0.0) x = -x;
      out.vector = std::move(x);
      return out;
    }
    if (out.iterations >= max_iterations)
      throw ConvergenceError("ground_state: Lanczos did not converge in " + std::to_string(max_iterations) +
                                 " iterations",
                             last_residual);
  }
}

double sigma_z(const Hamiltonian& h, const Eigen::VectorXd& v) {
  const Eigen::Index half = v.size() / 2;
  (void)h;
  return v.head(half).squaredNorm() - v.tail(half).squaredNorm();
}

double top_level_weight(const Hamiltonian& h, const Eigen::VectorXd& v) {
  const auto stride = mode_strides(h.n_modes, h.n_boson);
  const long long bath_dim = v.size() / 2;
  double w = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    long long rest = i % bath_dim;
    for (int l = 0; l < h.n_modes; ++l) {
      if (rest / stride[l] == h.n_boson - 1) {
        w += v(i) * v(i);
        break;
      }
      rest %= stride[l];
    }
  }
  return w;
}

AdoOnDiscrete ado_on_discrete(const DiscretizedBath& bath, const ModelParams& p) {
  const auto landscape = variational::EnergyLandscape::on_spectrum(model::spectrum_of(bath), p.delta);
  const auto sol = variational::minimize_landscape(landscape, p);
  return {sol.energy, sol.state};
}

double critical_coupling_discrete(const ModelParams& shape, int n_modes) {
  const auto unit = model::spectrum_of(model::discretize_bath(shape.with_alpha(1.0), n_modes));
  auto c1 = [&](double alpha) {
    return variational::landau_c1(variational::EnergyLandscape::on_spectrum(unit.scaled(alpha), shape.delta));
  };
  const critical::BathShape bath{shape.s, shape.delta, shape.omega_c};
  const double guess = shape.theory_valid() ? critical::critical_coupling_closed(bath).alpha_c : 0.05;
  return critical::critical_coupling_from_c1(c1, guess);
}

QuadraticModel chain_model(const chain::ChainRepresentation& ch, const ModelParams& p) {
  const int n = ch.n_sites();
  QuadraticModel m;
  m.delta = p.delta;
  m.h = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m.h(i, i) = ch.site_energies[i];
    if (i + 1 < n) m.h(i, i + 1) = m.h(i + 1, i) = ch.hoppings[i];
  }
  m.c = Eigen::VectorXd::Zero(n);
  m.c(0) = ch.system_coupling;
  m.k = Eigen::VectorXd::Zero(n);
  m.shift = Eigen::VectorXd::Zero(n);
  return m;
}

Eigen::VectorXd coherent_product_vector(double c_plus, double c_minus, const Eigen::VectorXd& d_plus,
                                        const Eigen::VectorXd& d_minus, int n_boson) {
  const int n = static_cast<int>(d_plus.size());
  const long long bath_dim = power(n_boson, n);
  if (bath_dim > kMaxDimension) throw DomainError("coherent_product_vector: dimension cap exceeded");
  const auto stride = mode_strides(n, n_boson);
  Eigen::VectorXd v(2 * bath_dim);
  for (int branch = 0; branch < 2; ++branch) {
    const Eigen::VectorXd& d = branch == 0 ? d_plus : d_minus;
    const double c = branch == 0 ? c_plus : c_minus;
    std::vector<std::vector<double>> amp(n);
    for (int l = 0; l < n; ++l) amp[l] = coherent_amplitudes(d(l), n_boson);
    for (long long i = 0; i < bath_dim; ++i) {
      double a = c;
      long long rest = i;
      for (int l = 0; l < n; ++l) {
        a *= amp[l][rest / stride[l]];
        rest %= stride[l];
      }
      v(branch * bath_dim + i) = a;
    }
  }
  return v;
}

Eigen::VectorXd ado_vector(const VariationalState& state, const DiscretizedBath& bath, const QuadraticModel& model,
                           int n_boson) {
  const int n = static_cast<int>(bath.size());
  Eigen::VectorXd fp(n), fm(n);
  for (int l = 0; l < n; ++l) {
    const auto shape = state.shape(bath.frequencies[l]);
    fp(l) = bath.couplings[l] * shape.plus;
    fm(l) = bath.couplings[l] * shape.minus;
  }
  return coherent_product_vector(state.c_plus, state.c_minus, model.to_modes * fp + model.shift,
                                 model.to_modes * fm + model.shift, n_boson);
}

Fidelity fidelity(const VariationalState& state, const DiscretizedBath& bath, const QuadraticModel& model,
                  const Hamiltonian& h, const Eigen::VectorXd& exact_vector) {
  const Eigen::VectorXd ado = ado_vector(state, bath, model, h.n_boson);
  if (ado.size() != exact_vector.size()) throw DomainError("fidelity: basis mismatch");
  Fidelity f;
  f.truncation_loss = std::max(0.0, 1.0 - ado.squaredNorm());
  f.fidelity = std::min(1.0, std::abs(ado.dot(exact_vector)));
  f.low_confidence = f.truncation_loss > 0.1;
  return f;
}

std::vector<ScanRow> convergence_scan(std::span<const double> trial_ms, const DiscretizedBath& bath,
                                      const ModelParams& p, const OracleConfig& cfg) {
  cfg.validate();
  const QuadraticModel base = quadratic_model(bath, p, cfg.basis);
  std::vector<ScanRow> rows;
  for (double m : trial_ms) {
    if (!(m >= 0.0 && m < 1.0)) throw DomainError("convergence_scan: trial magnetisation must lie in [0, 1)");
    const auto h = build_hamiltonian(displaced(base, bath, m), cfg.n_boson);
    const auto gs = ground_state(h);
    ScanRow row{m, gs.iterations, top_level_weight(h, gs.vector), sigma_z(h, gs.vector), gs.energy, 0.0};
    row.metric = row.truncation_loss;
    rows.push_back(row);
  }
  return rows;
}

OracleResult run_oracle(const ModelParams& p, const OracleConfig& cfg) {
  p.validate();
  cfg.validate();
  const auto bath = model::discretize_bath(p, cfg.n_modes);
  const auto ado = ado_on_discrete(bath, p);

  QuadraticModel model;
  Eigen::VectorXd ado_state;
  VariationalState state = ado.state;
  if (cfg.ado == AdoSource::continuum) state = variational::minimize_energy(p).state;
  if (cfg.ado == AdoSource::continuum && cfg.basis == Basis::chain && p.alpha > 0.0) {
    const auto ch = chain::chain_map(p, cfg.n_modes);
    model = chain_model(ch, p);
    const auto dp = chain::chain_displacements([&](double w) { return state.shape(w).plus; }, p, ch);
    const auto dm = chain::chain_displacements([&](double w) { return state.shape(w).minus; }, p, ch);
    ado_state = coherent_product_vector(state.c_plus, state.c_minus, Eigen::Map<const Eigen::VectorXd>(dp.data(), dp.size()),
                                        Eigen::Map<const Eigen::VectorXd>(dm.data(), dm.size()), cfg.n_boson);
  } else {
    model = quadratic_model(bath, p, cfg.basis);
    ado_state = ado_vector(state, bath, model, cfg.n_boson);
  }
  const auto h = build_hamiltonian(model, cfg.n_boson);
  const auto gs = ground_state(h);

  OracleResult out;
  out.params = p;
  out.config = cfg;
  out.energy_exact = gs.energy;
  out.energy_ado_discrete = ado.energy;
  out.truncation_loss = std::max(0.0, 1.0 - ado_state.squaredNorm());
  out.fidelity = std::min(1.0, std::abs(ado_state.dot(gs.vector)));
  out.low_confidence = out.truncation_loss > 0.1;
  out.sigma_z_exact = sigma_z(h, gs.vector);
  out.m_ado = state.m;
  out.iterations = gs.iterations;
  if (cfg.n_boson > 2) {
    const double coarser = ground_state(build_hamiltonian(model, cfg.n_boson - 1)).energy;
    out.converged_nb = std::abs(coarser - gs.energy) <= 1e-6 * std::max(1.0, std::abs(gs.energy));
  }
  return out;
}

}  // namespace subohmic::oracle
