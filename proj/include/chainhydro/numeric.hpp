#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace chainhydro {

/// sin(pi*x) with exact zeros at integer x; argument folded into [0, 1/2]
/// before calling libm so large trig grids stay accurate.
double sinpi(double x);

/// cos(pi*x) with exact zeros at half-integer x.
double cospi(double x);

/// SplitMix64 step; `state` is advanced in place.
std::uint64_t splitmix64(std::uint64_t& state);

/// Derives an independent substream seed from (seed, stream index).
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream);

/// Deterministic random source. mt19937_64 has a standard-mandated output
/// sequence; the uniform and gaussian mappings are spelled out here because
/// std::*_distribution is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform double in [0, 1), 53 random bits.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller.
  double gaussian();

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

/// Ordinary least squares y ~ intercept + slope*x. Needs >= 2 points;
/// slope_stderr is 0 when there are exactly 2.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Adaptive Gauss-Kronrod integral of f over [a, b]. Throws std::runtime_error
/// if the estimated absolute error cannot be brought below abs_tol.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-9);

/// Composite fixed-order Gauss-Legendre integral over [a, b] with `panels`
/// equal panels. No error estimate; intended for smooth integrands.
double integrate_gauss(const std::function<double(double)>& f, double a,
                       double b, int panels);

}  // namespace chainhydro
