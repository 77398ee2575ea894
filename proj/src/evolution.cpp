#include "chainhydro/evolution.hpp"

#include <cmath>
#include <stdexcept>

namespace chainhydro {

namespace {

void rotation_phases(const EigenBasis& basis, double dt, Eigen::VectorXd& c,
                     Eigen::VectorXd& s) {
  const int n = basis.n();
  c.resize(n);
  s.resize(n);
  for (int k = 0; k < n; ++k) {
    c[k] = std::cos(basis.omegas[k] * dt);
    s[k] = std::sin(basis.omegas[k] * dt);
  }
}

}  // namespace

ModeState project_mean(const InitialMoments& moments, const EigenBasis& basis) {
  const int n = basis.n();
  if (moments.n() != n)
    throw std::invalid_argument("project_mean: size mismatch");
  ModeState s;
  s.time = 0.0;
  s.u = basis.modes.transpose() * moments.mean_p;
  s.v.resize(n);
  s.v[0] = 0.0;
  s.v.tail(n - 1) = basis.strain_modes.transpose() * moments.mean_r;
  return s;
}

ModeState evolve_mode_state(const ModeState& s, const EigenBasis& basis, double dt) {
  Eigen::VectorXd c, sn;
  rotation_phases(basis, dt, c, sn);
  ModeState out;
  out.time = s.time + dt;
  out.u = c.cwiseProduct(s.u) - sn.cwiseProduct(s.v);
  out.v = c.cwiseProduct(s.v) + sn.cwiseProduct(s.u);
  out.v[0] = 0.0;
  return out;
}

MeanState reconstruct(const ModeState& s, const EigenBasis& basis) {
  const int n = basis.n();
  MeanState m;
  m.time = s.time;
  m.r = basis.strain_modes * s.v.tail(n - 1);
  m.p = basis.masses.cwiseProduct(basis.modes * s.u);
  return m;
}

ModeCovariance initial_mode_covariance(const InitialMoments& moments,
                                       const EigenBasis& basis) {
  const int n = basis.n();
  if (moments.n() != n)
    throw std::invalid_argument("initial_mode_covariance: size mismatch");
  ModeCovariance cov;
  cov.time = 0.0;
  cov.suu.noalias() =
      basis.modes.transpose() * moments.var_p.asDiagonal() * basis.modes;
  cov.svv = Eigen::MatrixXd::Zero(n, n);
  cov.svv.block(1, 1, n - 1, n - 1).noalias() =
      basis.strain_modes.transpose() * moments.var_r.asDiagonal() *
      basis.strain_modes;
  cov.suv = Eigen::MatrixXd::Zero(n, n);
  return cov;
}

ModeCovariance evolve_covariance(const ModeCovariance& cov, const EigenBasis& basis,
                                 double dt) {
  Eigen::VectorXd c, s;
  rotation_phases(basis, dt, c, s);
  const auto C = c.asDiagonal();
  const auto S = s.asDiagonal();
  const Eigen::MatrixXd suvT = cov.suv.transpose();

  ModeCovariance out;
  out.time = cov.time + dt;
  out.suu = C * cov.suu * C + S * cov.svv * S - C * cov.suv * S - S * suvT * C;
  out.svv = S * cov.suu * S + C * cov.svv * C + S * cov.suv * C + C * suvT * S;
  out.suv = C * cov.suu * S - S * cov.svv * C + C * cov.suv * C - S * suvT * S;
  return out;
}

SiteVariances site_thermal_variances(const ModeCovariance& cov,
                                     const EigenBasis& basis) {
  const int n = basis.n();
  SiteVariances out;

  Eigen::MatrixXd t;
  t.noalias() = basis.modes * cov.suu;
  out.var_p = basis.masses.array().square() *
              t.cwiseProduct(basis.modes).rowwise().sum().array();

  Eigen::MatrixXd tr;
  tr.noalias() = basis.strain_modes * cov.svv.block(1, 1, n - 1, n - 1);
  out.var_r = tr.cwiseProduct(basis.strain_modes).rowwise().sum();

  out.var_p = out.var_p.cwiseMax(0.0);
  out.var_r = out.var_r.cwiseMax(0.0);
  return out;
}

ProbeVariances site_thermal_variances_probe(const ModeCovariance& cov,
                                            const EigenBasis& basis, int stride) {
  if (stride < 1)
    throw std::invalid_argument("site_thermal_variances_probe: stride >= 1");
  const int n = basis.n();
  ProbeVariances out;
  for (int x = 1; x <= n; x += stride) out.p_sites.push_back(x);
  for (int x = 1; x <= n - 1; x += stride) out.r_sites.push_back(x);
  out.var_p.resize(static_cast<int>(out.p_sites.size()));
  out.var_r.resize(static_cast<int>(out.r_sites.size()));

  const auto svv = cov.svv.block(1, 1, n - 1, n - 1);
  for (std::size_t i = 0; i < out.p_sites.size(); ++i) {
    const int x = out.p_sites[i] - 1;
    const double m = basis.masses[x];
    const Eigen::VectorXd row = basis.modes.row(x).transpose();
    out.var_p[static_cast<int>(i)] =
        std::max(0.0, m * m * row.dot(cov.suu * row));
  }
  for (std::size_t i = 0; i < out.r_sites.size(); ++i) {
    const int x = out.r_sites[i] - 1;
    const Eigen::VectorXd row = basis.strain_modes.row(x).transpose();
    out.var_r[static_cast<int>(i)] = std::max(0.0, row.dot(svv * row));
  }
  return out;
}

Conserved conserved_quantities(const Eigen::VectorXd& r, const Eigen::VectorXd& p,
                               const MassField& mf) {
  const int n = mf.n;
  if (p.size() != n || r.size() != n - 1)
    throw std::invalid_argument("conserved_quantities: size mismatch");

  double h = 0.0;
  for (int x = 0; x < n; ++x) h += p[x] * p[x] / mf.masses[x];
  h += r.squaredNorm();
  h *= 0.5;

  // grad_- r on sites 1..n with r_0 = r_n = 0.
  double grad_r = 0.0;
  for (int x = 0; x < n; ++x) {
    const double left = (x >= 1) ? r[x - 1] : 0.0;
    const double right = (x <= n - 2) ? r[x] : 0.0;
    const double g = right - left;
    grad_r += g * g / mf.masses[x];
  }
  double grad_v = 0.0;
  for (int x = 0; x + 1 < n; ++x) {
    const double w = p[x + 1] / mf.masses[x + 1] - p[x] / mf.masses[x];
    grad_v += w * w;
  }
  return Conserved{h, 0.5 * (grad_r + grad_v)};
}

Eigen::VectorXd mode_energies(const ModeState& s) {
  return 0.5 * (s.u.array().square() + s.v.array().square());
}

double hamiltonian_mode(const ModeState& s) {
  return 0.5 * (s.u.squaredNorm() + s.v.squaredNorm());
}

double gradient_invariant_mode(const ModeState& s, const EigenBasis& basis) {
  double acc = 0.0;
  for (int k = 1; k < basis.n(); ++k) {
    const double w2 = basis.omegas[k] * basis.omegas[k];
    acc += w2 * (s.u[k] * s.u[k] + s.v[k] * s.v[k]);
  }
  return 0.5 * acc;
}

double thermal_energy(const ModeCovariance& cov) {
  return 0.5 * (cov.suu.trace() + cov.svv.trace());
}

}  // namespace chainhydro
