#pragma once

#include <Eigen/Dense>
#include <iosfwd>

#include "chainhydro/profiles.hpp"

namespace chainhydro {

enum class FieldKind { R, P, E };

/// Closed-form spectral solution of the macroscopic system
///   dt r = (1/mbar) dy p,   dt p = dy r,   r(0,t) = r(1,t) = 0,
/// with the energy slaved: e = p^2/2mbar + r^2/2 + 1/beta(y).
/// r lives in the sin(n pi y) basis, p in the cosine basis plus a constant;
/// each coefficient pair rotates at n pi / sqrt(mbar). The n = 0 cosine
/// coefficient has no sine partner and never moves.
struct MacroFields {
  double m_bar = 1.0;
  int truncation = 0;              // K
  Eigen::VectorXd sine_coeffs;     // a_n, n = 1..K
  Eigen::VectorXd cosine_coeffs;   // b_n, n = 0..K
  Profile beta;
  double tail_fraction = 0.0;      // dropped l2 coefficient energy / total

  double r(double y, double t) const;
  double p(double y, double t) const;
};

/// Expands the initial profiles on a 4096-interval grid (DST-I / DCT-I) and
/// keeps the first `truncation` harmonics. Throws if truncation is out of
/// [1, 2048]; tail_fraction reports the discarded coefficient energy.
MacroFields solve_wave(const MacroProfiles& profiles, double m_bar, int truncation);

/// e(y, t); the 1/beta(y) term is time independent.
double energy_field(const MacroFields& fields, double y, double t);

/// Weak-field value integral_0^1 field(y,t) f(y) dy by adaptive quadrature
/// (absolute error <= 1e-9, non-convergence throws).
double limit_field(const MacroFields& fields, const TestFunction& f, double t,
                   FieldKind which);

/// CSV snapshot on a uniform grid: columns y, r, p, e.
void export_field_snapshot(const MacroFields& fields, double t, int grid_points,
                           std::ostream& out);

}  // namespace chainhydro
