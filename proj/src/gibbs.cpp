#include "chainhydro/gibbs.hpp"

#include <cmath>
#include <stdexcept>

#include "chainhydro/numeric.hpp"

namespace chainhydro {

InitialMoments initial_moments(const MacroProfiles& profiles, const MassField& mf) {
  const int n = mf.n;
  const double mbar = mf.mean_mass();
  InitialMoments mom;
  mom.mean_r.resize(n - 1);
  mom.var_r.resize(n - 1);
  mom.mean_p.resize(n);
  mom.var_p.resize(n);

  for (int x = 1; x <= n; ++x) {
    const double y = static_cast<double>(x) / n;
    const double beta = profiles.beta(y);
    if (!(beta > 0.0))
      throw std::invalid_argument("initial_moments: beta(x/n) must be positive");
    mom.mean_p[x - 1] = mf.masses[x - 1] * profiles.p_bar(y) / mbar;
    mom.var_p[x - 1] = mf.masses[x - 1] / beta;
    if (x <= n - 1) {
      mom.mean_r[x - 1] = profiles.r_bar(y);
      mom.var_r[x - 1] = 1.0 / beta;
    }
  }
  return mom;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> sample_configuration(
    const InitialMoments& moments, std::uint64_t seed) {
  Rng rng(seed);
  const int n = moments.n();
  Eigen::VectorXd r(n - 1), p(n);
  for (int x = 0; x < n - 1; ++x)
    r[x] = moments.mean_r[x] +
           std::sqrt(std::max(moments.var_r[x], 1e-16)) * rng.gaussian();
  for (int x = 0; x < n; ++x)
    p[x] = moments.mean_p[x] +
           std::sqrt(std::max(moments.var_p[x], 1e-16)) * rng.gaussian();
  return {std::move(r), std::move(p)};
}

}  // namespace chainhydro
