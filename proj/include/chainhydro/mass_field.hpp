#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace chainhydro {

enum class MassLawKind { Constant, Uniform };

/// Single-site mass distribution. Masses are quenched: drawn once per
/// replica and then fixed for the whole run.
struct MassLaw {
  MassLawKind kind = MassLawKind::Constant;
  double lo = 1.0;
  double hi = 1.0;

  static MassLaw constant(double m);
  static MassLaw uniform(double lo, double hi);  // requires 0 < lo <= hi

  double mean() const { return 0.5 * (lo + hi); }
  double min() const { return lo; }
  double max() const { return hi; }
  std::string label() const;
};

struct MassField {
  int n = 0;
  std::uint64_t seed = 0;
  MassLaw law;
  Eigen::VectorXd masses;  // size n, entries in [law.min(), law.max()]

  /// Mean of the law (the macroscopic mass density), not the empirical mean.
  double mean_mass() const { return law.mean(); }
};

/// Draws n i.i.d. masses. Deterministic: identical (law, n, seed) give
/// bit-identical output.
MassField sample_masses(const MassLaw& law, int n, std::uint64_t seed);

/// Symmetric tridiagonal matrix stored as diagonal + subdiagonal.
struct TridiagonalMatrix {
  Eigen::VectorXd diag;  // size n
  Eigen::VectorXd off;   // size n-1
};

/// The free-boundary dynamical matrix M^{-1/2} (-Laplacian) M^{-1/2}:
/// diagonal c_x/m_x with c_1 = c_N = 1, c_x = 2 in the bulk; off-diagonal
/// -1/sqrt(m_x m_{x+1}). Positive semidefinite with a one-dimensional kernel.
TridiagonalMatrix build_dynamical_matrix(const MassField& mf);

}  // namespace chainhydro
