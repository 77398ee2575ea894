#include "chainhydro/numeric.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <stdexcept>

namespace chainhydro {

double sinpi(double x) {
  double r = std::fmod(x, 2.0);
  if (r < 0.0) r += 2.0;  // [0, 2)
  double sign = 1.0;
  if (r >= 1.0) {
    r -= 1.0;
    sign = -1.0;
  }
  if (r > 0.5) r = 1.0 - r;  // exact: both operands in [1/2, 1]
  return sign * std::sin(M_PI * r);
}

double cospi(double x) { return sinpi(0.5 + x); }

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed ^ (0x5851f42d4c957f2dULL * (stream + 1));
  std::uint64_t s = splitmix64(state);
  return splitmix64(state) ^ s;
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] so the log is finite.
  double u1 = static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
  double u2 = uniform01();
  double radius = std::sqrt(-2.0 * std::log(u1));
  double angle = 2.0 * M_PI * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("linear_fit: need >= 2 paired points");
  const std::size_t n = x.size();
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = y[i] - (fit.intercept + fit.slope * x[i]);
      ss_res += e * e;
    }
    fit.slope_stderr =
        std::sqrt(ss_res / (static_cast<double>(n) - 2.0) / sxx);
  }
  return fit;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol) {
  double error = 0.0;
  double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, a, b, 15, 1e-12, &error);
  if (!(error <= abs_tol || error <= 1e-12 * (1.0 + std::abs(value))))
    throw std::runtime_error("integrate: quadrature did not converge");
  return value;
}

double integrate_gauss(const std::function<double(double)>& f, double a,
                       double b, int panels) {
  if (panels < 1) throw std::invalid_argument("integrate_gauss: panels >= 1");
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    total += boost::math::quadrature::gauss<double, 32>::integrate(
        f, a + i * h, a + (i + 1) * h);
  }
  return total;
}

}  // namespace chainhydro
