#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "chainhydro/eigenbasis.hpp"
#include "chainhydro/euler.hpp"
#include "chainhydro/evolution.hpp"
#include "chainhydro/profiles.hpp"

namespace chainhydro {

/// Empirical field (1/N) sum_x f(x/N) <field_x> at the state's time.
/// R sums bonds 1..N-1 (r_N treated as 0), P sums sites 1..N. The E variant
/// needs the thermal variances:
/// <e_x> = <p_x>^2/2m_x + var_p[x]/2m_x + <r_x>^2/2 + var_r[x]/2.
double empirical_field(const MeanState& mean, const MassField& mf,
                       const TestFunction& f, FieldKind which);
double empirical_field(const MeanState& mean, const SiteVariances& vars,
                       const MassField& mf, const TestFunction& f,
                       FieldKind which);

/// E_N = A_N + F_N: squares of the ensemble means vs centered fluctuations.
struct EnergySplit {
  double mechanical;  // A_N
  double thermal;     // F_N
};
EnergySplit energy_split(const MeanState& mean, const SiteVariances& vars,
                         const MassField& mf, const TestFunction& f);

/// A_N alone (mean fields only).
double mechanical_field(const MeanState& mean, const MassField& mf,
                        const TestFunction& f);

/// Mode-space Gram matrices of a test function:
/// gp[j,k] = sum_x f(x/N) m_x psi^j_x psi^k_x   (N x N),
/// gr[j,k] = sum_x f(x/N) strain^j_x strain^k_x (rows/cols 1..N-1 of an N x N
/// matrix, 0-block empty). With these, F_N(t) = (1/2N)(<gp, suu(t)> + <gr, svv(t)>)
/// is an O(N^2) contraction per time.
struct FieldWeights {
  Eigen::MatrixXd gp;  // n x n
  Eigen::MatrixXd gr;  // n x n, row/col 0 zero
};
FieldWeights make_field_weights(const EigenBasis& basis, const TestFunction& f);

/// F_N at the covariance's time.
double fluctuation_field(const ModeCovariance& cov, const FieldWeights& weights);

/// F_N at time cov.time + dt without materializing the rotated covariance.
double fluctuation_field_at(const ModeCovariance& cov, const EigenBasis& basis,
                            const FieldWeights& weights, double dt);

/// Band-restricted fluctuation energy: F1 over modes [0, N^{1-alpha}], F2 over
/// (N^{1-alpha}, N-1], plus the mixed-band remainder (F_N = f1 + f2 + cross).
struct BandSplit {
  double f1, f2, cross;
};
BandSplit mode_band_split(const ModeCovariance& cov, const EigenBasis& basis,
                          const FieldWeights& weights, double alpha);
BandSplit mode_band_split(const ModeCovariance& cov, const EigenBasis& basis,
                          const TestFunction& f, double alpha);

/// The four a-priori sums, mass-weighted exactly as they appear in H and I so
/// that l2_r + l2_p = 2 H(mean) and h1_r + h1_p = 2 I(mean) identically:
///   l2_r = sum <r_x>^2            l2_p = sum <p_x>^2 / m_x
///   h1_r = sum <(grad_- r)_x>^2 / m_x   h1_p = sum <(grad_+ M^-1 p)_x>^2
struct AprioriSums {
  double l2_r, l2_p, h1_r, h1_p;
};
AprioriSums apriori_bounds(const MeanState& mean, const MassField& mf);

/// Deterministic pair lattice spanning scales |x - x'| in {1, 2, 4, ..., n/2},
/// about `target` pairs total.
std::vector<std::pair<int, int>> holder_pair_lattice(int n, int target = 1024);

/// max over pairs of |delta r| / sqrt(|dx|/N) and |delta (p/m)| / sqrt(|dx|/N).
/// Pairs with x == x' contribute nothing; r-pairs touching site N are skipped.
struct HolderModuli {
  double r_modulus, p_modulus;
};
HolderModuli holder_modulus(const MeanState& mean, const MassField& mf,
                            const std::vector<std::pair<int, int>>& pairs);

/// Mass-homogenization sums
///   linear  = (1/N) sum f(x/N) (<p_x>/m_x)   (m_x - mbar)
///   squared = (1/N) sum f(x/N) (<p_x>/m_x)^2 (m_x - mbar)
/// Both vanish identically for constant masses.
struct AveragingSums {
  double linear, squared;
};
AveragingSums averaging_sums(const MeanState& mean, const MassField& mf,
                             const TestFunction& f);

}  // namespace chainhydro
