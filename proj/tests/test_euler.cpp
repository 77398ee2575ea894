#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "chainhydro/euler.hpp"
#include "chainhydro/numeric.hpp"
#include "chainhydro/profiles.hpp"

using namespace chainhydro;

namespace {

MacroProfiles separable() {
  return MacroProfiles(Profile::constant(1.0), Profile::sine_series({1.0}),
                       Profile::constant(0.0));
}

// d'Alembert oracle for m_bar = 1: with rt the odd 2-periodic extension of the
// initial stretch and pt the even 2-periodic extension of the initial
// momentum, r(y,t) = (rt(y+t) + rt(y-t))/2 + (pt(y+t) - pt(y-t))/2.
double odd_extension(const Profile& f, double z) {
  double r = std::fmod(z, 2.0);
  if (r < 0) r += 2.0;
  return r <= 1.0 ? f(r) : -f(2.0 - r);
}
double even_extension(const Profile& f, double z) {
  double r = std::fmod(z, 2.0);
  if (r < 0) r += 2.0;
  return r <= 1.0 ? f(r) : f(2.0 - r);
}
double dalembert_r(const MacroProfiles& p, double y, double t) {
  return 0.5 * (odd_extension(p.r_bar, y + t) + odd_extension(p.r_bar, y - t)) +
         0.5 * (even_extension(p.p_bar, y + t) - even_extension(p.p_bar, y - t));
}

}  // namespace

TEST_CASE("separable solution r = sin(pi y) cos(pi t)") {
  const MacroFields fields = solve_wave(separable(), 1.0, 512);
  CHECK(fields.tail_fraction < 1e-20);
  for (double t : {0.0, 0.25, 0.5, 1.0, 2.7}) {
    for (int i = 0; i <= 1000; ++i) {
      const double y = i / 1000.0;
      CHECK(std::abs(fields.r(y, t) - sinpi(y) * cospi(t)) < 1e-9);
      CHECK(std::abs(fields.p(y, t) - cospi(y) * sinpi(t)) < 1e-9);
    }
  }
}

TEST_CASE("constant momentum sits in the wave kernel") {
  const double c = 0.42;
  const MacroProfiles profiles(Profile::constant(1.0), Profile::sine_series({0.0}),
                               Profile::constant(c));
  const MacroFields fields = solve_wave(profiles, 1.3, 64);
  for (double t : {0.0, 0.8, 5.0}) {
    for (double y : {0.0, 0.31, 0.77, 1.0}) {
      CHECK(std::abs(fields.r(y, t)) < 1e-12);
      CHECK(fields.p(y, t) == doctest::Approx(c).epsilon(1e-12));
    }
  }
}

TEST_CASE("t = 0 reproduces the profiles") {
  const MacroProfiles profiles = canonical_profiles();
  const MacroFields fields = solve_wave(profiles, 1.0, 512);
  for (int i = 0; i <= 200; ++i) {
    const double y = i / 200.0;
    CHECK(std::abs(fields.r(y, 0.0) - profiles.r_bar(y)) < 1e-10);
    CHECK(std::abs(fields.p(y, 0.0) - profiles.p_bar(y)) < 1e-10);
  }
}

TEST_CASE("truncation cap and tail report") {
  CHECK_THROWS_AS(solve_wave(canonical_profiles(), 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(solve_wave(canonical_profiles(), 1.0, 4096), std::invalid_argument);

  // A slowly decaying profile leaves energy in the tail when truncated hard.
  const MacroProfiles rough(Profile::constant(1.0),
                            Profile::polynomial({0.0, 1.0, -3.0, 2.0}),
                            Profile::constant(0.0));
  const MacroFields coarse = solve_wave(rough, 1.0, 2);
  const MacroFields fine = solve_wave(rough, 1.0, 512);
  CHECK(coarse.tail_fraction > fine.tail_fraction);
  CHECK(fine.tail_fraction < 1e-8);
}

TEST_CASE("wave energy functional is conserved") {
  const MacroProfiles profiles = canonical_profiles();
  const double m_bar = 1.1;
  const MacroFields fields = solve_wave(profiles, m_bar, 256);
  auto functional = [&](double t) {
    return integrate(
        [&](double y) {
          const double p = fields.p(y, t), r = fields.r(y, t);
          return p * p / (2.0 * m_bar) + 0.5 * r * r;
        },
        0.0, 1.0, 1e-11);
  };
  const double e0 = functional(0.0);
  for (double t : {0.3, 1.7, 9.2})
    CHECK(std::abs(functional(t) - e0) < 1e-10 * e0);
}

TEST_CASE("energy field: thermal-only and pointwise t = 0 value") {
  const MacroProfiles thermal(Profile::sin_squared(1.0, 0.5),
                              Profile::sine_series({0.0}), Profile::constant(0.0));
  const MacroFields fields = solve_wave(thermal, 1.0, 64);
  for (double t : {0.0, 2.2}) {
    for (double y : {0.1, 0.5, 0.9}) {
      CHECK(energy_field(fields, y, t) ==
            doctest::Approx(1.0 / thermal.beta(y)).epsilon(1e-12));
    }
  }

  const double beta_bar = 2.0;
  const MacroProfiles mixed(Profile::constant(beta_bar), Profile::sine_series({0.3}),
                            Profile::cosine_series(0.0, {0.3}));
  const double m_bar = 1.2;
  const MacroFields f2 = solve_wave(mixed, m_bar, 128);
  for (double y : {0.2, 0.6}) {
    const double pb = mixed.p_bar(y), rb = mixed.r_bar(y);
    CHECK(energy_field(f2, y, 0.0) ==
          doctest::Approx(1.0 / beta_bar + pb * pb / (2.0 * m_bar) + 0.5 * rb * rb)
              .epsilon(1e-9));
  }
}

TEST_CASE("energy transport: dt e = (1/m) dy (r p) by finite differences") {
  const MacroProfiles profiles = canonical_profiles();
  const double m_bar = 1.0;
  const MacroFields fields = solve_wave(profiles, m_bar, 256);
  const double h = 1e-4;
  for (double y : {0.25, 0.5, 0.65}) {
    for (double t : {0.2, 0.6}) {
      const double de_dt =
          (energy_field(fields, y, t + h) - energy_field(fields, y, t - h)) /
          (2.0 * h);
      auto rp = [&](double yy) { return fields.r(yy, t) * fields.p(yy, t); };
      const double flux = (rp(y + h) - rp(y - h)) / (2.0 * h * m_bar);
      CHECK(std::abs(de_dt - flux) < 1e-6);
    }
  }
}

TEST_CASE("limit fields: momentum functional, zero function, thermal energy") {
  const MacroProfiles profiles = canonical_profiles();
  const MacroFields fields = solve_wave(profiles, 1.0, 256);
  const TestFunction one =
      TestFunction::make(TestFunction::Kind::C0, Profile::constant(1.0), "one");
  const TestFunction zero =
      TestFunction::make(TestFunction::Kind::C0, Profile::constant(0.0), "zero");

  // P(1, t) equals the constant cosine coefficient at all times.
  const double p0 = limit_field(fields, one, 0.0, FieldKind::P);
  for (double t : {0.4, 1.3, 6.0})
    CHECK(limit_field(fields, one, t, FieldKind::P) ==
          doctest::Approx(p0).epsilon(1e-10));

  for (auto which : {FieldKind::R, FieldKind::P, FieldKind::E})
    CHECK(std::abs(limit_field(fields, zero, 0.7, which)) < 1e-12);

  const MacroProfiles thermal(Profile::sin_squared(1.0, 0.5),
                              Profile::sine_series({0.0}), Profile::constant(0.0));
  const MacroFields tf = solve_wave(thermal, 1.0, 64);
  const double expected =
      integrate([&](double y) { return 1.0 / thermal.beta(y); }, 0.0, 1.0, 1e-12);
  for (double t : {0.0, 3.3})
    CHECK(limit_field(tf, one, t, FieldKind::E) ==
          doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("weak-form characterizations of R and P") {
  const MacroProfiles profiles = canonical_profiles();
  const double m_bar = 1.0;
  const MacroFields fields = solve_wave(profiles, m_bar, 256);

  struct Probe {
    TestFunction f;
    TestFunction fprime;
  };
  const std::vector<Probe> probes = {
      {TestFunction::make(TestFunction::Kind::C1VanishingEnds,
                          Profile::sine_series({1.0}), "sin_pi"),
       TestFunction::make(TestFunction::Kind::C1,
                          Profile::cosine_series(0.0, {M_PI}), "pi_cos_pi")},
      {TestFunction::make(TestFunction::Kind::C1VanishingEnds,
                          Profile::polynomial({0.0, 1.0, -1.0}), "y(1-y)"),
       TestFunction::make(TestFunction::Kind::C1,
                          Profile::polynomial({1.0, -2.0}), "1-2y")},
  };
  for (const auto& probe : probes) {
    for (double t : {0.3, 0.7}) {
      const double lhs_r = limit_field(fields, probe.f, t, FieldKind::R);
      const double rhs_r =
          limit_field(fields, probe.f, 0.0, FieldKind::R) -
          integrate_gauss(
              [&](double s) {
                return limit_field(fields, probe.fprime, s, FieldKind::P);
              },
              0.0, t, 4) /
              m_bar;
      CHECK(std::abs(lhs_r - rhs_r) < 1e-7);

      const double lhs_p = limit_field(fields, probe.f, t, FieldKind::P);
      const double rhs_p =
          limit_field(fields, probe.f, 0.0, FieldKind::P) -
          integrate_gauss(
              [&](double s) {
                return limit_field(fields, probe.fprime, s, FieldKind::R);
              },
              0.0, t, 4);
      CHECK(std::abs(lhs_p - rhs_p) < 1e-7);
    }
  }
}

TEST_CASE("d'Alembert consistency at unit mean mass") {
  const MacroProfiles profiles = canonical_profiles();
  const MacroFields fields = solve_wave(profiles, 1.0, 512);
  for (double t : {0.17, 0.5, 1.31, 3.0}) {
    for (int i = 0; i <= 64; ++i) {
      const double y = i / 64.0;
      CHECK(std::abs(fields.r(y, t) - dalembert_r(profiles, y, t)) < 1e-9);
    }
  }
}

TEST_CASE("snapshot export schema") {
  const MacroFields fields = solve_wave(canonical_profiles(), 1.0, 64);
  std::ostringstream out;
  export_field_snapshot(fields, 0.5, 8, out);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "y,r,p,e");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == 9);
}
