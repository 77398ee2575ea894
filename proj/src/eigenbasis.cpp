#include "chainhydro/eigenbasis.hpp"

#include <lapacke.h>

#include <cmath>
#include <fstream>
#include <vector>
#include <stdexcept>
#include <string>

namespace chainhydro {

namespace {

constexpr double kKernelTol = 1e-12;
constexpr double kOrthoTol = 1e-10;

void fix_sign(Eigen::Ref<Eigen::VectorXd> column) {
  int best = 0;
  double best_abs = std::abs(column[0]);
  for (int i = 1; i < column.size(); ++i) {
    const double a = std::abs(column[i]);
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  if (column[best] < 0.0) column = -column;
}

void verify_basis(const EigenBasis& basis, const MassField& mf,
                  const TridiagonalMatrix& tri) {
  const int n = basis.n();
  if (std::abs(basis.omegas[0]) > 0.0)
    throw std::runtime_error("eigendecompose: zero mode not clamped");

  // Residual of the generalized problem, checked for every mode.
  for (int k = 0; k < n; ++k) {
    const auto psi = basis.modes.col(k);
    const double w2 = basis.omegas[k] * basis.omegas[k];
    double res2 = 0.0;
    for (int x = 0; x < n; ++x) {
      double lap = (x == 0 || x == n - 1) ? psi[x] : 2.0 * psi[x];
      if (x > 0) lap -= psi[x - 1];
      if (x + 1 < n) lap -= psi[x + 1];
      const double r = lap / mf.masses[x] - w2 * psi[x];
      res2 += r * r;
    }
    if (std::sqrt(res2) > 1e-9 * w2 + 1e-12)
      throw std::runtime_error("eigendecompose: eigen-residual tolerance exceeded");
  }
  (void)tri;

  // Orthonormality spot checks; the full pairwise check lives in the tests.
  auto m_inner = [&](int j, int k) {
    return (basis.modes.col(j).array() * mf.masses.array() *
            basis.modes.col(k).array())
        .sum();
  };
  for (int k = 0; k < n; ++k) {
    if (std::abs(m_inner(k, k) - 1.0) > kOrthoTol)
      throw std::runtime_error("eigendecompose: M-normalization tolerance exceeded");
    if (k + 1 < n && std::abs(m_inner(k, k + 1)) > kOrthoTol)
      throw std::runtime_error("eigendecompose: M-orthogonality tolerance exceeded");
  }
  for (int k = 1; k < n - 1; ++k) {
    const double d =
        basis.strain_modes.col(k - 1).dot(basis.strain_modes.col(k - 1));
    if (std::abs(d - 1.0) > kOrthoTol)
      throw std::runtime_error("eigendecompose: strain normalization tolerance exceeded");
  }

  // The kernel mode is flat: psi^0 = (sum m)^{-1/2} (1, ..., 1).
  const double expect = 1.0 / std::sqrt(mf.masses.sum());
  if ((basis.modes.col(0).array() - expect).abs().maxCoeff() > 1e-8 * expect)
    throw std::runtime_error("eigendecompose: kernel mode is not flat");
}

}  // namespace

EigenBasis eigendecompose(const MassField& mf) {
  const int n = mf.n;
  TridiagonalMatrix tri = build_dynamical_matrix(mf);

  // MRRR tridiagonal solver; inputs are destroyed, E needs length n.
  Eigen::VectorXd diag = tri.diag;
  Eigen::VectorXd off(n);
  off.head(n - 1) = tri.off;
  off[n - 1] = 0.0;
  Eigen::VectorXd evals(n);
  Eigen::MatrixXd z(n, n);
  std::vector<lapack_int> isuppz(2 * n);
  lapack_int found = 0;
  lapack_logical tryrac = 1;
  const lapack_int info = LAPACKE_dstemr(
      LAPACK_COL_MAJOR, 'V', 'A', n, diag.data(), off.data(), 0.0, 0.0, 0, 0,
      &found, evals.data(), z.data(), n, n, isuppz.data(), &tryrac);
  if (info != 0 || found != n)
    throw std::runtime_error("eigendecompose: LAPACK dstemr failed, info=" +
                             std::to_string(info));

  if (std::abs(evals[0]) > kKernelTol)
    throw std::runtime_error("eigendecompose: kernel eigenvalue above tolerance");

  EigenBasis basis;
  basis.masses = mf.masses;
  basis.omegas.resize(n);
  basis.omegas[0] = 0.0;
  for (int k = 1; k < n; ++k) basis.omegas[k] = std::sqrt(std::max(evals[k], 0.0));

  // psi^k = M^{-1/2} phi^k, then the sign convention.
  basis.modes = z;
  const Eigen::ArrayXd inv_sqrt_m = mf.masses.array().rsqrt();
  for (int k = 0; k < n; ++k) {
    basis.modes.col(k).array() *= inv_sqrt_m;
    fix_sign(basis.modes.col(k));
  }

  basis.strain_modes.resize(n - 1, n - 1);
  for (int k = 1; k < n; ++k) {
    const auto psi = basis.modes.col(k);
    basis.strain_modes.col(k - 1) =
        (psi.segment(1, n - 1) - psi.segment(0, n - 1)) / basis.omegas[k];
  }

  verify_basis(basis, mf, tri);
  return basis;
}

void save_eigenbasis(const std::string& path, const EigenBasis& basis,
                     const MassField& mf) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_eigenbasis: cannot open " + path);
  out.precision(17);
  out << "# chainhydro eigenbasis v1\n";
  out << "n=" << basis.n() << "\n";
  out << "seed=" << mf.seed << "\n";
  out << "law=" << mf.law.label() << "\n";
  out << "omegas\n";
  for (int k = 0; k < basis.n(); ++k) out << basis.omegas[k] << "\n";
  out << "modes\n";
  for (int k = 0; k < basis.n(); ++k)
    for (int x = 0; x < basis.n(); ++x) out << basis.modes(x, k) << "\n";
  out << "end\n";
  if (!out) throw std::runtime_error("save_eigenbasis: write failed for " + path);
}

EigenBasis load_eigenbasis(const std::string& path, const MassField& expected) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_eigenbasis: cannot open " + path);
  std::string line;
  auto next = [&]() {
    if (!std::getline(in, line))
      throw std::runtime_error("load_eigenbasis: truncated file " + path);
    return line;
  };
  if (next() != "# chainhydro eigenbasis v1")
    throw std::runtime_error("load_eigenbasis: bad header in " + path);
  if (next() != "n=" + std::to_string(expected.n))
    throw std::runtime_error("load_eigenbasis: chain size mismatch");
  if (next() != "seed=" + std::to_string(expected.seed))
    throw std::runtime_error("load_eigenbasis: seed mismatch");
  if (next() != "law=" + expected.law.label())
    throw std::runtime_error("load_eigenbasis: mass law mismatch");
  if (next() != "omegas") throw std::runtime_error("load_eigenbasis: missing omegas");

  const int n = expected.n;
  EigenBasis basis;
  basis.masses = expected.masses;
  basis.omegas.resize(n);
  for (int k = 0; k < n; ++k) basis.omegas[k] = std::stod(next());
  if (next() != "modes") throw std::runtime_error("load_eigenbasis: missing modes");
  basis.modes.resize(n, n);
  for (int k = 0; k < n; ++k)
    for (int x = 0; x < n; ++x) basis.modes(x, k) = std::stod(next());
  if (next() != "end") throw std::runtime_error("load_eigenbasis: missing end marker");

  basis.strain_modes.resize(n - 1, n - 1);
  for (int k = 1; k < n; ++k) {
    const auto psi = basis.modes.col(k);
    basis.strain_modes.col(k - 1) =
        (psi.segment(1, n - 1) - psi.segment(0, n - 1)) / basis.omegas[k];
  }
  return basis;
}

}  // namespace chainhydro
