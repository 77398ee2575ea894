#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

#include "chainhydro/mass_field.hpp"
#include "chainhydro/profiles.hpp"

namespace chainhydro {

/// First and second moments of the product local Gibbs state at t = 0.
/// p-type quantities live on sites x = 1..n (index x-1); r-type on bonds
/// x = 1..n-1. All cross-covariances vanish (product measure).
struct InitialMoments {
  Eigen::VectorXd mean_r;  // n-1:  r(x/n)
  Eigen::VectorXd mean_p;  // n:    m_x p(x/n) / mbar
  Eigen::VectorXd var_r;   // n-1:  1 / beta(x/n)
  Eigen::VectorXd var_p;   // n:    m_x / beta(x/n)

  int n() const { return static_cast<int>(mean_p.size()); }
};

/// Reads the Gaussian moments off the local Gibbs density. Rejects profiles
/// whose beta is not positive at every grid point x/n.
InitialMoments initial_moments(const MacroProfiles& profiles, const MassField& mf);

/// Draws one (r, p) configuration with independent Gaussian components.
/// Deterministic given the seed. Variances below 1e-16 are clamped to 1e-16.
std::pair<Eigen::VectorXd, Eigen::VectorXd> sample_configuration(
    const InitialMoments& moments, std::uint64_t seed);

}  // namespace chainhydro
