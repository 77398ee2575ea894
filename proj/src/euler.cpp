#include "chainhydro/euler.hpp"

#include <fftw3.h>

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "chainhydro/numeric.hpp"

namespace chainhydro {

namespace {

constexpr int kGrid = 4096;  // transform intervals; cap K at kGrid/2

// a_n(t), b_n(t) for one harmonic: the (a_n, b_n/sqrt(mbar)) pair rotates at
// n pi / sqrt(mbar).
inline void rotated_pair(double a0, double b0, double nu, double t,
                         double sqrt_m, double& a, double& b) {
  const double c = std::cos(nu * t);
  const double s = std::sin(nu * t);
  const double bt = b0 / sqrt_m;
  a = a0 * c - bt * s;
  b = sqrt_m * (bt * c + a0 * s);
}

}  // namespace

double MacroFields::r(double y, double t) const {
  const double sqrt_m = std::sqrt(m_bar);
  double acc = 0.0;
  for (int n = 1; n <= truncation; ++n) {
    const double nu = n * M_PI / sqrt_m;
    double a, b;
    rotated_pair(sine_coeffs[n - 1], cosine_coeffs[n], nu, t, sqrt_m, a, b);
    acc += a * sinpi(n * y);
  }
  return acc;
}

double MacroFields::p(double y, double t) const {
  const double sqrt_m = std::sqrt(m_bar);
  double acc = cosine_coeffs[0];
  for (int n = 1; n <= truncation; ++n) {
    const double nu = n * M_PI / sqrt_m;
    double a, b;
    rotated_pair(sine_coeffs[n - 1], cosine_coeffs[n], nu, t, sqrt_m, a, b);
    acc += b * cospi(n * y);
  }
  return acc;
}

MacroFields solve_wave(const MacroProfiles& profiles, double m_bar, int truncation) {
  if (!(m_bar > 0.0)) throw std::invalid_argument("solve_wave: m_bar must be positive");
  if (truncation < 1 || truncation > kGrid / 2)
    throw std::invalid_argument("solve_wave: truncation outside [1, " +
                                std::to_string(kGrid / 2) + "]");

  // DST-I of the interior stretch samples: coefficient of sin(n pi y) is
  // (2/G) sum_{j=1}^{G-1} r(j/G) sin(n pi j / G), exact for band-limited input.
  std::vector<double> rin(kGrid - 1), rout(kGrid - 1);
  for (int j = 1; j < kGrid; ++j)
    rin[j - 1] = profiles.r_bar(static_cast<double>(j) / kGrid);
  {
    fftw_plan plan = fftw_plan_r2r_1d(kGrid - 1, rin.data(), rout.data(),
                                      FFTW_RODFT00, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }

  // DCT-I of the momentum samples including endpoints (trapezoid weights).
  std::vector<double> pin(kGrid + 1), pout(kGrid + 1);
  for (int j = 0; j <= kGrid; ++j)
    pin[j] = profiles.p_bar(static_cast<double>(j) / kGrid);
  {
    fftw_plan plan = fftw_plan_r2r_1d(kGrid + 1, pin.data(), pout.data(),
                                      FFTW_REDFT00, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }

  MacroFields fields;
  fields.m_bar = m_bar;
  fields.truncation = truncation;
  fields.beta = profiles.beta;
  fields.sine_coeffs.resize(truncation);
  fields.cosine_coeffs.resize(truncation + 1);
  fields.cosine_coeffs[0] = pout[0] / (2.0 * kGrid);
  for (int n = 1; n <= truncation; ++n) {
    fields.sine_coeffs[n - 1] = rout[n - 1] / kGrid;
    fields.cosine_coeffs[n] = pout[n] / kGrid;
  }

  // l2 tail of the discarded harmonics, relative to the total.
  double kept = fields.sine_coeffs.squaredNorm() +
                fields.cosine_coeffs.tail(truncation).squaredNorm();
  double tail = 0.0;
  for (int n = truncation + 1; n <= kGrid - 1; ++n) {
    const double a = rout[n - 1] / kGrid;
    tail += a * a;
  }
  for (int n = truncation + 1; n <= kGrid; ++n) {
    const double b = pout[n] / kGrid;
    tail += b * b;
  }
  const double total = kept + tail;
  fields.tail_fraction = total > 0.0 ? tail / total : 0.0;
  return fields;
}

double energy_field(const MacroFields& fields, double y, double t) {
  if (y < 0.0 || y > 1.0) throw std::out_of_range("energy_field: y outside [0,1]");
  const double r = fields.r(y, t);
  const double p = fields.p(y, t);
  return p * p / (2.0 * fields.m_bar) + 0.5 * r * r + 1.0 / fields.beta(y);
}

double limit_field(const MacroFields& fields, const TestFunction& f, double t,
                   FieldKind which) {
  auto integrand = [&](double y) {
    switch (which) {
      case FieldKind::R:
        return fields.r(y, t) * f(y);
      case FieldKind::P:
        return fields.p(y, t) * f(y);
      case FieldKind::E:
        return energy_field(fields, y, t) * f(y);
    }
    return 0.0;
  };
  return integrate(integrand, 0.0, 1.0, 1e-9);
}

void export_field_snapshot(const MacroFields& fields, double t, int grid_points,
                           std::ostream& out) {
  out.precision(17);
  out << "y,r,p,e\n";
  for (int i = 0; i <= grid_points; ++i) {
    const double y = static_cast<double>(i) / grid_points;
    out << y << ',' << fields.r(y, t) << ',' << fields.p(y, t) << ','
        << energy_field(fields, y, t) << '\n';
  }
}

}  // namespace chainhydro
