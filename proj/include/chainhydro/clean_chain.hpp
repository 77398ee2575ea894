#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

#include "chainhydro/profiles.hpp"

namespace chainhydro {

/// Dispersion relation of the equal-mass chain: omega(k) = |2 sin(pi k)|.
double dispersion(double k);

/// Wave function on the periodic lattice Z/nZ: phi_hat[j] approximates
/// phi(k_j) at k_j = j/n, built from the stretch/momentum pair as
/// phi = (a*/omega) r_hat + i p_hat with a(k) = e^{-2 pi i k} - 1
/// (equivalently omega q_hat + i p_hat whenever r = grad_+ q).
struct WaveField {
  Eigen::VectorXcd phi_hat;
  double time = 0.0;
  int n() const { return static_cast<int>(phi_hat.size()); }
};

WaveField make_wave_field(const Eigen::VectorXd& stretch,
                          const Eigen::VectorXd& momentum);

/// phi(k, t + dt) = e^{-i omega(k) dt} phi(k, t); per-mode modulus preserved.
WaveField evolve_wavefield(const WaveField& w, double dt);

/// Total energy: (1/2n) sum_j |phi_hat_j|^2 equals H = (1/2) sum (p^2 + r^2).
double wavefield_energy(const WaveField& w);

/// Draws `samples` equilibrium configurations (r, p i.i.d. N(0, 1/beta)),
/// evolves them by the exact phase map to time t, and measures the maximal
/// entrywise deviation of the empirical covariances <r r>, <p p>, <r p> from
/// beta^{-1} delta / 0. Also propagates the covariance analytically
/// (max_dev_exact, no sampling) and reports the per-entry Monte Carlo sigma.
struct CovarianceInvariance {
  double max_dev_mc = 0.0;
  double mc_sigma = 0.0;
  double max_dev_exact = 0.0;
};
CovarianceInvariance covariance_invariance_check(double beta, double t, int n,
                                                 int samples, std::uint64_t seed);

/// Covariance matrix C[j,l] = <phi*(k_j) phi(k_l)> of thermal equilibrium:
/// 2 n / beta on the diagonal, zero elsewhere.
Eigen::MatrixXcd equilibrium_wave_covariance(int n, double beta);

/// Local-Gibbs covariance for a slowly varying temperature profile beta(x/n):
/// C[j,l] = theta_hat(l-j) (1 + g_j* g_l) with theta(x) = 1/beta(x/n).
Eigen::MatrixXcd local_gibbs_wave_covariance(int n, const Profile& beta);

/// Evolved covariance C(tau)[j,l] = exp(i (omega_j - omega_l) tau) C[j,l].
Eigen::MatrixXcd evolve_wave_covariance(const Eigen::MatrixXcd& cov, double tau);

/// Finite-n Wigner phase identity at W(xi, k) = (2/N) <phi*(k_j) phi(k_{j+xi})>
/// with j = k_index on the dual grid of big_n = n sites:
///   lhs  = evolved-covariance entry at time big_n * t,
///   rhs  = initial entry times exp(i [omega(k_j) - omega(k_{j+xi})] big_n t).
/// identity_error = |lhs - rhs|; omega_prime_error = |exact phase angle -
/// (-omega'(k) xi t)|, the group-velocity approximation gap (shrinks as 1/N).
struct WignerIdentity {
  std::complex<double> lhs, rhs;
  double identity_error = 0.0;
  double omega_prime_error = 0.0;
};
WignerIdentity wigner_phase_identity(const Eigen::MatrixXcd& cov0, int xi_index,
                                     int k_index, double t, int big_n);

}  // namespace chainhydro
