#pragma once

#include <Eigen/Dense>
#include <vector>

#include "chainhydro/eigenbasis.hpp"
#include "chainhydro/gibbs.hpp"

namespace chainhydro {

/// Mean fields in mode coordinates: u_k = <psi^k, p>, v_k = <strain^k, r>
/// (v_0 = 0 by convention). Each pair (u_k, v_k) rotates rigidly at omega_k,
/// so evolution to any real time is a single closed-form map.
struct ModeState {
  Eigen::VectorXd u;  // n
  Eigen::VectorXd v;  // n, v[0] == 0
  double time = 0.0;
};

/// Mean fields in site coordinates: r on bonds 1..n-1, p on sites 1..n.
struct MeanState {
  Eigen::VectorXd r;  // n-1
  Eigen::VectorXd p;  // n
  double time = 0.0;
};

/// Second moments of the centered ensemble in mode coordinates.
/// suv[j][k] = <u~_j v~_k>; row/column 0 of svv and suv are structurally zero.
struct ModeCovariance {
  Eigen::MatrixXd suu, svv, suv;  // n x n
  double time = 0.0;
};

struct SiteVariances {
  Eigen::VectorXd var_r;  // n-1
  Eigen::VectorXd var_p;  // n
};

ModeState project_mean(const InitialMoments& moments, const EigenBasis& basis);

/// Rotates every mode pair by omega_k * dt. Composing rotations commutes with
/// adding times; u_0 is constant (omega_0 = 0).
ModeState evolve_mode_state(const ModeState& s, const EigenBasis& basis, double dt);

/// Inverse of project_mean: r = sum_k v_k strain^k, p = sum_k u_k M psi^k.
MeanState reconstruct(const ModeState& s, const EigenBasis& basis);

/// Mode covariance of the product Gibbs state:
/// suu[j,k] = sum_x psi^j_x psi^k_x var_p[x], svv[j,k] = sum_x st^j st^k var_r[x].
ModeCovariance initial_mode_covariance(const InitialMoments& moments,
                                       const EigenBasis& basis);

/// Exact second-moment transport: the 2x2 rotation on every (u_j,v_j)x(u_k,v_k)
/// block. Preserves positive semidefiniteness and the per-mode diagonal of
/// suu + svv.
ModeCovariance evolve_covariance(const ModeCovariance& cov, const EigenBasis& basis,
                                 double dt);

/// Thermal (fluctuation) variances per site:
/// var_p[x] = m_x^2 sum_{jk} psi^j_x psi^k_x suu[j,k], and the strain analogue.
/// Single fixed contraction order (one dense product), bitwise reproducible.
SiteVariances site_thermal_variances(const ModeCovariance& cov,
                                     const EigenBasis& basis);

/// Same contraction restricted to every `stride`-th site (cheap probe for
/// sweeps; the full evaluation above stays the reference path).
struct ProbeVariances {
  std::vector<int> r_sites, p_sites;  // 1-based site indices
  Eigen::VectorXd var_r, var_p;
};
ProbeVariances site_thermal_variances_probe(const ModeCovariance& cov,
                                            const EigenBasis& basis, int stride);

struct Conserved {
  double h;  // (1/2)(<p, M^-1 p> + <r, r>)
  double i;  // (1/2)(<grad_- r, M^-1 grad_- r> + |grad_+ M^-1 p|^2)
};

/// Direct-formula conserved quantities of a configuration (r_0 = r_n = 0
/// implied for the gradient of r).
Conserved conserved_quantities(const Eigen::VectorXd& r, const Eigen::VectorXd& p,
                               const MassField& mf);

/// E_k = (1/2)(u_k^2 + v_k^2), individually conserved.
Eigen::VectorXd mode_energies(const ModeState& s);

/// H in mode coordinates: sum of mode energies.
double hamiltonian_mode(const ModeState& s);

/// I in mode coordinates: (1/2) sum_{k>=1} omega_k^2 (u_k^2 + v_k^2).
double gradient_invariant_mode(const ModeState& s, const EigenBasis& basis);

/// (1/2) tr(suu + svv): total thermal energy, conserved by evolve_covariance.
double thermal_energy(const ModeCovariance& cov);

}  // namespace chainhydro
