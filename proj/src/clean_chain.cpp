#include "chainhydro/clean_chain.hpp"

#include <fftw3.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "chainhydro/numeric.hpp"

namespace chainhydro {

namespace {

using complexd = std::complex<double>;

// a(k) = e^{-2 pi i k} - 1, so r_hat = a q_hat and |a| = omega.
complexd hop_symbol(double k) {
  return complexd(cospi(2.0 * k) - 1.0, -sinpi(2.0 * k));
}

// Analysis transform sum_x e^{+2 pi i j x / n} f_x (paper's sign convention);
// FFTW_BACKWARD carries the +i kernel.
Eigen::VectorXcd dft_forward(const Eigen::VectorXd& f) {
  const int n = static_cast<int>(f.size());
  std::vector<complexd> in(n), out(n);
  for (int x = 0; x < n; ++x) in[x] = f[x];
  fftw_plan plan = fftw_plan_dft_1d(
      n, reinterpret_cast<fftw_complex*>(in.data()),
      reinterpret_cast<fftw_complex*>(out.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  Eigen::VectorXcd result(n);
  for (int j = 0; j < n; ++j) result[j] = out[j];
  return result;
}

}  // namespace

double dispersion(double k) { return std::abs(2.0 * sinpi(k)); }

WaveField make_wave_field(const Eigen::VectorXd& stretch,
                          const Eigen::VectorXd& momentum) {
  const int n = static_cast<int>(momentum.size());
  if (stretch.size() != n)
    throw std::invalid_argument("make_wave_field: stretch/momentum size mismatch");
  const Eigen::VectorXcd r_hat = dft_forward(stretch);
  const Eigen::VectorXcd p_hat = dft_forward(momentum);

  WaveField w;
  w.time = 0.0;
  w.phi_hat.resize(n);
  w.phi_hat[0] = r_hat[0] + complexd(0.0, 1.0) * p_hat[0];
  for (int j = 1; j < n; ++j) {
    const double k = static_cast<double>(j) / n;
    const complexd g = std::conj(hop_symbol(k)) / dispersion(k);
    w.phi_hat[j] = g * r_hat[j] + complexd(0.0, 1.0) * p_hat[j];
  }
  return w;
}

WaveField evolve_wavefield(const WaveField& w, double dt) {
  const int n = w.n();
  WaveField out;
  out.time = w.time + dt;
  out.phi_hat.resize(n);
  for (int j = 0; j < n; ++j) {
    const double omega = dispersion(static_cast<double>(j) / n);
    out.phi_hat[j] = std::polar(1.0, -omega * dt) * w.phi_hat[j];
  }
  return out;
}

double wavefield_energy(const WaveField& w) {
  return w.phi_hat.squaredNorm() / (2.0 * w.n());
}

CovarianceInvariance covariance_invariance_check(double beta, double t, int n,
                                                 int samples, std::uint64_t seed) {
  if (!(beta > 0.0))
    throw std::invalid_argument("covariance_invariance_check: beta > 0 required");
  if (n < 2 || samples < 1)
    throw std::invalid_argument("covariance_invariance_check: bad sizes");

  // Per-mode rotation coefficients (k = 0 stays put).
  std::vector<double> cos_wt(n), sin_wt(n);
  std::vector<complexd> hop_over_omega(n);
  for (int j = 0; j < n; ++j) {
    const double k = static_cast<double>(j) / n;
    const double omega = dispersion(k);
    cos_wt[j] = std::cos(omega * t);
    sin_wt[j] = std::sin(omega * t);
    hop_over_omega[j] = (j == 0) ? complexd(0.0, 0.0) : hop_symbol(k) / omega;
  }

  std::vector<complexd> buf_in(n), buf_out(n);
  fftw_plan fwd = fftw_plan_dft_1d(
      n, reinterpret_cast<fftw_complex*>(buf_in.data()),
      reinterpret_cast<fftw_complex*>(buf_out.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_plan inv = fftw_plan_dft_1d(
      n, reinterpret_cast<fftw_complex*>(buf_in.data()),
      reinterpret_cast<fftw_complex*>(buf_out.data()), FFTW_FORWARD, FFTW_ESTIMATE);

  auto forward = [&](const Eigen::VectorXd& f, Eigen::VectorXcd& fhat) {
    for (int x = 0; x < n; ++x) buf_in[x] = f[x];
    fftw_execute(fwd);
    for (int j = 0; j < n; ++j) fhat[j] = buf_out[j];
  };
  auto inverse_real = [&](const Eigen::VectorXcd& fhat, Eigen::VectorXd& f) {
    for (int j = 0; j < n; ++j) buf_in[j] = fhat[j];
    fftw_execute(inv);
    for (int x = 0; x < n; ++x) f[x] = buf_out[x].real() / n;
  };

  Rng rng(seed);
  const double sigma = std::sqrt(1.0 / beta);
  Eigen::VectorXd r(n), p(n);
  Eigen::VectorXcd r_hat(n), p_hat(n);
  Eigen::MatrixXd acc_rr = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd acc_pp = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd acc_rp = Eigen::MatrixXd::Zero(n, n);

  for (int s = 0; s < samples; ++s) {
    for (int x = 0; x < n; ++x) r[x] = sigma * rng.gaussian();
    for (int x = 0; x < n; ++x) p[x] = sigma * rng.gaussian();
    forward(r, r_hat);
    forward(p, p_hat);
    for (int j = 0; j < n; ++j) {
      const complexd rj = r_hat[j], pj = p_hat[j];
      r_hat[j] = cos_wt[j] * rj + hop_over_omega[j] * sin_wt[j] * pj;
      p_hat[j] = cos_wt[j] * pj - std::conj(hop_over_omega[j]) * sin_wt[j] * rj;
    }
    inverse_real(r_hat, r);
    inverse_real(p_hat, p);
    acc_rr.noalias() += r * r.transpose();
    acc_pp.noalias() += p * p.transpose();
    acc_rp.noalias() += r * p.transpose();
  }
  fftw_destroy_plan(fwd);
  fftw_destroy_plan(inv);

  CovarianceInvariance out;
  out.mc_sigma = 1.0 / (beta * std::sqrt(static_cast<double>(samples)));
  const double inv_s = 1.0 / samples;
  const double inv_beta = 1.0 / beta;
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      const double target = (x == y) ? inv_beta : 0.0;
      out.max_dev_mc = std::max(out.max_dev_mc,
                                std::abs(acc_rr(x, y) * inv_s - target));
      out.max_dev_mc = std::max(out.max_dev_mc,
                                std::abs(acc_pp(x, y) * inv_s - target));
      out.max_dev_mc = std::max(out.max_dev_mc, std::abs(acc_rp(x, y) * inv_s));
    }
  }

  // Exact path: propagate the diagonal mode covariance and transform back.
  Eigen::VectorXcd crr(n), cpp(n), crp(n);
  for (int j = 0; j < n; ++j) {
    const double c = cos_wt[j], s = sin_wt[j];
    const complexd g = hop_over_omega[j];  // |g| = 1 for j != 0, 0 at j = 0
    const double v = static_cast<double>(n) / beta;
    const double gg = (j == 0) ? 1.0 : std::norm(g);
    crr[j] = (c * c + gg * s * s) * v;
    cpp[j] = (c * c + gg * s * s) * v;
    crp[j] = c * s * v * (-std::conj(g) + std::conj(g));  // cancels identically
    if (j == 0) {
      crr[j] = v;
      cpp[j] = v;
      crp[j] = 0.0;
    }
  }
  for (int d = 0; d < n; ++d) {
    complexd srr = 0.0, spp = 0.0, srp = 0.0;
    for (int j = 0; j < n; ++j) {
      const double angle = -2.0 * M_PI * j * d / n;
      const complexd phase = std::polar(1.0, angle);
      srr += phase * crr[j];
      spp += phase * cpp[j];
      srp += phase * crp[j];
    }
    const double target = (d == 0) ? inv_beta : 0.0;
    const double nn = static_cast<double>(n) * n;
    out.max_dev_exact = std::max(out.max_dev_exact,
                                 std::abs(srr / nn - target));
    out.max_dev_exact = std::max(out.max_dev_exact,
                                 std::abs(spp / nn - target));
    out.max_dev_exact = std::max(out.max_dev_exact, std::abs(srp) / nn);
  }
  return out;
}

Eigen::MatrixXcd equilibrium_wave_covariance(int n, double beta) {
  Eigen::MatrixXcd cov = Eigen::MatrixXcd::Zero(n, n);
  for (int j = 0; j < n; ++j) cov(j, j) = 2.0 * n / beta;
  return cov;
}

Eigen::MatrixXcd local_gibbs_wave_covariance(int n, const Profile& beta) {
  Eigen::VectorXd theta(n);
  for (int x = 0; x < n; ++x) theta[x] = 1.0 / beta(static_cast<double>(x) / n);
  // theta_hat(d) = sum_x e^{+2 pi i d x / n} theta(x)
  Eigen::VectorXcd theta_hat(n);
  for (int d = 0; d < n; ++d) {
    complexd acc = 0.0;
    for (int x = 0; x < n; ++x)
      acc += std::polar(theta[x], 2.0 * M_PI * d * x / n);
    theta_hat[d] = acc;
  }
  Eigen::VectorXcd g(n);
  g[0] = 1.0;
  for (int j = 1; j < n; ++j) {
    const double k = static_cast<double>(j) / n;
    g[j] = std::conj(hop_symbol(k)) / dispersion(k);
  }
  Eigen::MatrixXcd cov(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l)
      cov(j, l) = theta_hat[((l - j) % n + n) % n] *
                  (1.0 + std::conj(g[j]) * g[l]);
  return cov;
}

Eigen::MatrixXcd evolve_wave_covariance(const Eigen::MatrixXcd& cov, double tau) {
  const int n = static_cast<int>(cov.rows());
  Eigen::VectorXcd phase(n);
  for (int j = 0; j < n; ++j)
    phase[j] = std::polar(1.0, -dispersion(static_cast<double>(j) / n) * tau);
  // <phi_j* phi_l>(tau): row phase conjugated, column phase direct.
  return phase.conjugate().asDiagonal() * cov * phase.asDiagonal();
}

WignerIdentity wigner_phase_identity(const Eigen::MatrixXcd& cov0, int xi_index,
                                     int k_index, double t, int big_n) {
  const int n = static_cast<int>(cov0.rows());
  if (big_n != n)
    throw std::invalid_argument("wigner_phase_identity: scaling N must match the lattice");
  if (k_index < 0 || k_index >= n)
    throw std::invalid_argument("wigner_phase_identity: k index off the dual grid");
  if (std::abs(xi_index) >= n / 2)
    throw std::invalid_argument("wigner_phase_identity: xi index off the dual grid");

  const int j = k_index;
  const int l = ((k_index + xi_index) % n + n) % n;
  const double tau = static_cast<double>(big_n) * t;
  const double omega_j = dispersion(static_cast<double>(j) / n);
  const double omega_l = dispersion(static_cast<double>(l) / n);
  const double scale = 2.0 / big_n;

  const Eigen::MatrixXcd evolved = evolve_wave_covariance(cov0, tau);

  WignerIdentity out;
  out.lhs = scale * evolved(j, l);
  const double exact_angle = omega_j * tau - omega_l * tau;
  out.rhs = scale * cov0(j, l) * std::polar(1.0, exact_angle);
  out.identity_error = std::abs(out.lhs - out.rhs);

  const double k = static_cast<double>(j) / n;
  const double omega_prime = 2.0 * M_PI * cospi(k);
  const double approx_angle = -omega_prime * xi_index * t;
  out.omega_prime_error = std::abs(exact_angle - approx_angle);
  return out;
}

}  // namespace chainhydro
