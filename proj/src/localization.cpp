#include "chainhydro/localization.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace chainhydro {

ModeSupport mode_support(const EigenBasis& basis, int k, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("mode_support: gamma must lie in (0, 1)");
  const int n = basis.n();
  if (k < 0 || k >= n) throw std::out_of_range("mode_support: mode index");
  const auto psi = basis.modes.col(k);

  ModeSupport sup;
  sup.k = k;
  int best = 0;
  double best_w = basis.masses[0] * psi[0] * psi[0];
  for (int x = 1; x < n; ++x) {
    const double w = basis.masses[x] * psi[x] * psi[x];
    if (w > best_w) {
      best_w = w;
      best = x;
    }
  }
  sup.center = best + 1;  // 1-based

  const double radius = std::pow(n, gamma) + 1e-9;
  sup.lo = std::max(1, static_cast<int>(std::ceil(sup.center - radius)));
  sup.hi = std::min(n, static_cast<int>(std::floor(sup.center + radius)));

  sup.outside_max = 0.0;
  for (int x = 1; x <= n; ++x) {
    if (x >= sup.lo && x <= sup.hi) continue;
    sup.outside_max = std::max(sup.outside_max, std::abs(psi[x - 1]));
  }

  const double norm2 = psi.squaredNorm();
  sup.ipr = psi.array().square().square().sum() / (norm2 * norm2);
  return sup;
}

double lemma3_pass_rate(const EigenBasis& basis, double alpha, double gamma) {
  if (!(alpha > 0.0 && 2.0 * alpha < gamma && gamma < 1.0))
    throw std::invalid_argument("lemma3_pass_rate: need 0 < 2 alpha < gamma < 1");
  const int n = basis.n();
  const int k_min =
      static_cast<int>(std::floor(std::pow(n, 1.0 - alpha) + 1e-9)) + 1;
  const double threshold = std::pow(n, -1.0 / gamma);

  int band = 0, passed = 0;
  for (int k = k_min; k <= n - 1; ++k) {
    ++band;
    if (mode_support(basis, k, gamma).outside_max <= threshold) ++passed;
  }
  if (band == 0) return 0.0;
  return static_cast<double>(passed) / static_cast<double>(band);
}

double envelope_decay_rate(const Eigen::VectorXd& mode, int center) {
  const int n = static_cast<int>(mode.size());
  if (center < 1 || center > n)
    throw std::out_of_range("envelope_decay_rate: center outside [1, n]");
  std::vector<double> d, logamp;
  d.reserve(n);
  logamp.reserve(n);
  for (int x = 1; x <= n; ++x) {
    if (x == center) continue;
    const double a = std::abs(mode[x - 1]);
    if (a < 1e-250) continue;
    d.push_back(std::abs(static_cast<double>(x - center)));
    logamp.push_back(std::log(a));
  }
  if (d.size() < 2) return std::numeric_limits<double>::infinity();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    sx += d[i];
    sy += logamp[i];
  }
  const double mx = sx / m, my = sy / m;
  for (std::size_t i = 0; i < d.size(); ++i) {
    sxx += (d[i] - mx) * (d[i] - mx);
    sxy += (d[i] - mx) * (logamp[i] - my);
  }
  return -sxy / sxx;  // positive for decaying envelopes
}

std::vector<BandLocalization> localization_length_profile(const EigenBasis& basis,
                                                          int band_count) {
  if (band_count < 2)
    throw std::invalid_argument("localization_length_profile: band_count >= 2");
  const int n = basis.n();
  const int modes = n - 1;  // k = 1..n-1, already frequency sorted
  std::vector<BandLocalization> out;
  for (int b = 0; b < band_count; ++b) {
    const int k_lo = 1 + (modes * b) / band_count;
    const int k_hi = (modes * (b + 1)) / band_count;  // inclusive
    const int count = k_hi - k_lo + 1;
    if (count < 3) continue;  // skipped with notice at the call site
    double rate_sum = 0.0, omega_sum = 0.0;
    for (int k = k_lo; k <= k_hi; ++k) {
      const int center = mode_support(basis, k, 0.5).center;
      rate_sum += envelope_decay_rate(basis.modes.col(k), center);
      omega_sum += basis.omegas[k];
    }
    BandLocalization band;
    band.modes = count;
    band.omega_mid = omega_sum / count;
    band.rate = rate_sum / count;
    band.zeta = band.rate > 0.0 ? 1.0 / band.rate
                                : std::numeric_limits<double>::infinity();
    out.push_back(band);
  }
  return out;
}

}  // namespace chainhydro
