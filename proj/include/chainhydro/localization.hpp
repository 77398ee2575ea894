#pragma once

#include <Eigen/Dense>
#include <vector>

#include "chainhydro/eigenbasis.hpp"

namespace chainhydro {

/// Spatial support summary of one eigenmode.
struct ModeSupport {
  int k = 0;
  int center = 0;           // argmax_x m_x (psi^k_x)^2, ties to the lowest site
  int lo = 0, hi = 0;       // [center - N^gamma, center + N^gamma] clipped to [1, N]
  double outside_max = 0.0; // exhaustive max |psi^k_x| over x outside [lo, hi]
  double ipr = 0.0;         // sum psi^4 / (sum psi^2)^2
};

/// Requires 0 < gamma < 1.
ModeSupport mode_support(const EigenBasis& basis, int k, double gamma);

/// Fraction of modes k in (N^{1-alpha}, N-1] whose outside_max stays below
/// N^{-1/gamma}. Requires 2 alpha < gamma < 1.
double lemma3_pass_rate(const EigenBasis& basis, double alpha, double gamma);

/// Least-squares decay rate of log|mode| against distance from `center`
/// (1-based site). Amplitudes below 1e-250 are dropped. A localized mode with
/// envelope exp(-d/zeta) returns about 1/zeta; extended modes return about 0.
double envelope_decay_rate(const Eigen::VectorXd& mode, int center);

/// Per-frequency-band localization length estimates. The mode range 1..N-1 is
/// partitioned into `band_count` equal-count bands ordered by frequency; a
/// band's rate is the mean envelope decay rate of its modes, and
/// zeta = 1/rate (rates self-average; lengths do not). Bands with fewer than
/// 3 modes are skipped.
struct BandLocalization {
  double omega_mid = 0.0;  // mean frequency of the band
  double rate = 0.0;       // mean decay rate
  double zeta = 0.0;       // 1 / rate (inf if rate <= 0)
  int modes = 0;
};
std::vector<BandLocalization> localization_length_profile(const EigenBasis& basis,
                                                          int band_count);

}  // namespace chainhydro
