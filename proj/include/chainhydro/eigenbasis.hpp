#pragma once

#include <Eigen/Dense>
#include <string>

#include "chainhydro/mass_field.hpp"

namespace chainhydro {

/// Full eigenmode set of one disorder realization.
///
/// modes column k holds psi^k with M-orthonormality <psi^j, M psi^k> = delta,
/// frequencies ascending and omegas[0] clamped to exactly 0 (the translation
/// mode). strain_modes column k-1 holds the strain eigenvector
/// grad_+ psi^k / omega_k for k = 1..n-1; these are orthonormal in the plain
/// inner product on R^{n-1}. The site masses are carried along so downstream
/// contractions stay self-contained.
struct EigenBasis {
  Eigen::VectorXd omegas;        // n
  Eigen::MatrixXd modes;         // n x n
  Eigen::MatrixXd strain_modes;  // (n-1) x (n-1)
  Eigen::VectorXd masses;        // n

  int n() const { return static_cast<int>(omegas.size()); }
};

/// Diagonalizes the chain. Signs are fixed so each mode's largest-magnitude
/// entry is positive (ties: lowest site index). Throws std::runtime_error if
/// the kernel eigenvalue, the eigen-residual, or spot-checked orthonormality
/// miss their tolerances.
EigenBasis eigendecompose(const MassField& mf);

/// Plain-text cache (full double precision, decimal). Header records
/// (n, seed, law); load verifies these against `expected` and rebuilds the
/// strain modes.
void save_eigenbasis(const std::string& path, const EigenBasis& basis,
                     const MassField& mf);
EigenBasis load_eigenbasis(const std::string& path, const MassField& expected);

}  // namespace chainhydro
