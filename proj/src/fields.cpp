#include "chainhydro/fields.hpp"

#include <cmath>
#include <stdexcept>

namespace chainhydro {

namespace {

// Open-ended band boundary floor(N^{1-alpha}), robust at exact powers.
int band_cutoff(int n, double alpha) {
  return static_cast<int>(std::floor(std::pow(n, 1.0 - alpha) + 1e-9));
}

double frob(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.cwiseProduct(b).sum();
}

}  // namespace

double empirical_field(const MeanState& mean, const MassField& mf,
                       const TestFunction& f, FieldKind which) {
  const int n = mf.n;
  double acc = 0.0;
  switch (which) {
    case FieldKind::R:
      for (int x = 1; x <= n - 1; ++x)
        acc += f(static_cast<double>(x) / n) * mean.r[x - 1];
      break;
    case FieldKind::P:
      for (int x = 1; x <= n; ++x)
        acc += f(static_cast<double>(x) / n) * mean.p[x - 1];
      break;
    case FieldKind::E:
      throw std::invalid_argument(
          "empirical_field: E needs the thermal variances overload");
  }
  return acc / n;
}

double empirical_field(const MeanState& mean, const SiteVariances& vars,
                       const MassField& mf, const TestFunction& f,
                       FieldKind which) {
  if (which != FieldKind::E) return empirical_field(mean, mf, f, which);
  const int n = mf.n;
  double acc = 0.0;
  for (int x = 1; x <= n; ++x) {
    const double w = f(static_cast<double>(x) / n);
    double e = (mean.p[x - 1] * mean.p[x - 1] + vars.var_p[x - 1]) /
               (2.0 * mf.masses[x - 1]);
    if (x <= n - 1)
      e += 0.5 * (mean.r[x - 1] * mean.r[x - 1] + vars.var_r[x - 1]);
    acc += w * e;
  }
  return acc / n;
}

double mechanical_field(const MeanState& mean, const MassField& mf,
                        const TestFunction& f) {
  const int n = mf.n;
  double acc = 0.0;
  for (int x = 1; x <= n; ++x) {
    const double w = f(static_cast<double>(x) / n);
    double e = mean.p[x - 1] * mean.p[x - 1] / (2.0 * mf.masses[x - 1]);
    if (x <= n - 1) e += 0.5 * mean.r[x - 1] * mean.r[x - 1];
    acc += w * e;
  }
  return acc / n;
}

EnergySplit energy_split(const MeanState& mean, const SiteVariances& vars,
                         const MassField& mf, const TestFunction& f) {
  const int n = mf.n;
  double thermal = 0.0;
  for (int x = 1; x <= n; ++x) {
    const double w = f(static_cast<double>(x) / n);
    double e = vars.var_p[x - 1] / (2.0 * mf.masses[x - 1]);
    if (x <= n - 1) e += 0.5 * vars.var_r[x - 1];
    thermal += w * e;
  }
  return EnergySplit{mechanical_field(mean, mf, f), thermal / n};
}

FieldWeights make_field_weights(const EigenBasis& basis, const TestFunction& f) {
  const int n = basis.n();
  Eigen::VectorXd wp(n), wr(n - 1);
  for (int x = 1; x <= n; ++x)
    wp[x - 1] = f(static_cast<double>(x) / n) * basis.masses[x - 1];
  for (int x = 1; x <= n - 1; ++x) wr[x - 1] = f(static_cast<double>(x) / n);

  FieldWeights weights;
  weights.gp.noalias() = basis.modes.transpose() * wp.asDiagonal() * basis.modes;
  weights.gr = Eigen::MatrixXd::Zero(n, n);
  weights.gr.block(1, 1, n - 1, n - 1).noalias() =
      basis.strain_modes.transpose() * wr.asDiagonal() * basis.strain_modes;
  return weights;
}

double fluctuation_field(const ModeCovariance& cov, const FieldWeights& weights) {
  const int n = static_cast<int>(cov.suu.rows());
  return (frob(weights.gp, cov.suu) + frob(weights.gr, cov.svv)) / (2.0 * n);
}

double fluctuation_field_at(const ModeCovariance& cov, const EigenBasis& basis,
                            const FieldWeights& weights, double dt) {
  const int n = basis.n();
  Eigen::VectorXd c(n), s(n);
  for (int k = 0; k < n; ++k) {
    c[k] = std::cos(basis.omegas[k] * dt);
    s[k] = std::sin(basis.omegas[k] * dt);
  }
  const auto C = c.asDiagonal();
  const auto S = s.asDiagonal();
  double acc = frob(C * weights.gp * C, cov.suu) + frob(S * weights.gp * S, cov.svv) +
               frob(S * weights.gr * S, cov.suu) + frob(C * weights.gr * C, cov.svv);
  if (!cov.suv.isZero(0.0)) {
    const Eigen::MatrixXd suvT = cov.suv.transpose();
    acc += -frob(C * weights.gp * S, cov.suv) - frob(S * weights.gp * C, suvT) +
           frob(S * weights.gr * C, cov.suv) + frob(C * weights.gr * S, suvT);
  }
  return acc / (2.0 * n);
}

BandSplit mode_band_split(const ModeCovariance& cov, const EigenBasis& basis,
                          const FieldWeights& weights, double alpha) {
  if (!(alpha > 0.0 && alpha < 0.5))
    throw std::invalid_argument("mode_band_split: alpha must lie in (0, 1/2)");
  const int n = basis.n();
  const int cut = band_cutoff(n, alpha);  // F1 = [0, cut], F2 = [cut+1, n-1]
  const int m1 = std::min(cut + 1, n);
  const int m2 = n - m1;

  const double total = fluctuation_field(cov, weights);
  double f1 = (frob(weights.gp.topLeftCorner(m1, m1), cov.suu.topLeftCorner(m1, m1)) +
               frob(weights.gr.topLeftCorner(m1, m1), cov.svv.topLeftCorner(m1, m1))) /
              (2.0 * n);
  double f2 = 0.0;
  if (m2 > 0) {
    f2 = (frob(weights.gp.bottomRightCorner(m2, m2),
               cov.suu.bottomRightCorner(m2, m2)) +
          frob(weights.gr.bottomRightCorner(m2, m2),
               cov.svv.bottomRightCorner(m2, m2))) /
         (2.0 * n);
  }
  return BandSplit{f1, f2, total - f1 - f2};
}

BandSplit mode_band_split(const ModeCovariance& cov, const EigenBasis& basis,
                          const TestFunction& f, double alpha) {
  return mode_band_split(cov, basis, make_field_weights(basis, f), alpha);
}

AprioriSums apriori_bounds(const MeanState& mean, const MassField& mf) {
  const int n = mf.n;
  AprioriSums sums{0.0, 0.0, 0.0, 0.0};
  sums.l2_r = mean.r.squaredNorm();
  for (int x = 0; x < n; ++x)
    sums.l2_p += mean.p[x] * mean.p[x] / mf.masses[x];
  for (int x = 0; x < n; ++x) {
    const double left = (x >= 1) ? mean.r[x - 1] : 0.0;
    const double right = (x <= n - 2) ? mean.r[x] : 0.0;
    const double g = right - left;
    sums.h1_r += g * g / mf.masses[x];
  }
  for (int x = 0; x + 1 < n; ++x) {
    const double w = mean.p[x + 1] / mf.masses[x + 1] - mean.p[x] / mf.masses[x];
    sums.h1_p += w * w;
  }
  return sums;
}

std::vector<std::pair<int, int>> holder_pair_lattice(int n, int target) {
  std::vector<int> scales;
  for (int s = 1; s <= n / 2; s *= 2) scales.push_back(s);
  const int per_scale = std::max(1, target / static_cast<int>(scales.size()));
  std::vector<std::pair<int, int>> pairs;
  for (int s : scales) {
    const int span = n - s;  // x in [1, n-s]
    const int stride = std::max(1, span / per_scale);
    for (int x = 1; x <= span; x += stride) pairs.emplace_back(x, x + s);
  }
  return pairs;
}

HolderModuli holder_modulus(const MeanState& mean, const MassField& mf,
                            const std::vector<std::pair<int, int>>& pairs) {
  const int n = mf.n;
  HolderModuli mod{0.0, 0.0};
  for (const auto& [x, xp] : pairs) {
    if (x < 1 || xp < 1 || x > n || xp > n)
      throw std::out_of_range("holder_modulus: pair index outside [1, n]");
    if (x == xp) continue;
    const double scale =
        std::sqrt(std::abs(static_cast<double>(xp - x)) / static_cast<double>(n));
    const double dp = mean.p[xp - 1] / mf.masses[xp - 1] -
                      mean.p[x - 1] / mf.masses[x - 1];
    mod.p_modulus = std::max(mod.p_modulus, std::abs(dp) / scale);
    if (x <= n - 1 && xp <= n - 1) {
      const double dr = mean.r[xp - 1] - mean.r[x - 1];
      mod.r_modulus = std::max(mod.r_modulus, std::abs(dr) / scale);
    }
  }
  return mod;
}

AveragingSums averaging_sums(const MeanState& mean, const MassField& mf,
                             const TestFunction& f) {
  const int n = mf.n;
  const double mbar = mf.mean_mass();
  AveragingSums sums{0.0, 0.0};
  for (int x = 1; x <= n; ++x) {
    const double w = f(static_cast<double>(x) / n);
    const double v = mean.p[x - 1] / mf.masses[x - 1];
    const double dm = mf.masses[x - 1] - mbar;
    sums.linear += w * v * dm;
    sums.squared += w * v * v * dm;
  }
  sums.linear /= n;
  sums.squared /= n;
  return sums;
}

}  // namespace chainhydro
