#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "chainhydro/fields.hpp"
#include "chainhydro/numeric.hpp"

using namespace chainhydro;

namespace {

struct Setup {
  MassField mf;
  EigenBasis basis;
  InitialMoments moments;
  ModeState s0;
  ModeCovariance cov0;
};

Setup make(int n, std::uint64_t seed, const MacroProfiles& profiles,
           const MassLaw& law = MassLaw::uniform(0.8, 1.2)) {
  Setup s{sample_masses(law, n, seed), {}, {}, {}, {}};
  s.basis = eigendecompose(s.mf);
  s.moments = initial_moments(profiles, s.mf);
  s.s0 = project_mean(s.moments, s.basis);
  s.cov0 = initial_mode_covariance(s.moments, s.basis);
  return s;
}

TestFunction tf_one() {
  return TestFunction::make(TestFunction::Kind::C1, Profile::constant(1.0), "one");
}
TestFunction tf_zero() {
  return TestFunction::make(TestFunction::Kind::C0, Profile::constant(0.0), "zero");
}
TestFunction tf_sin2() {
  return TestFunction::make(TestFunction::Kind::C1VanishingEnds,
                            Profile::sine_series({0.0, 1.0}), "sin_2pi");
}

}  // namespace

TEST_CASE("zero test function annihilates all fields") {
  const auto s = make(32, 1, canonical_profiles());
  const MeanState mean = reconstruct(s.s0, s.basis);
  const SiteVariances vars = site_thermal_variances(s.cov0, s.basis);
  CHECK(empirical_field(mean, s.mf, tf_zero(), FieldKind::R) == 0.0);
  CHECK(empirical_field(mean, s.mf, tf_zero(), FieldKind::P) == 0.0);
  CHECK(empirical_field(mean, vars, s.mf, tf_zero(), FieldKind::E) == 0.0);
}

TEST_CASE("equilibrium energy field at f = 1 is 1 - 1/2N") {
  const int n = 64;
  const MacroProfiles eq(Profile::constant(1.0), Profile::constant(0.0),
                         Profile::constant(0.0));
  const auto s = make(n, 2, eq);
  const MeanState mean = reconstruct(s.s0, s.basis);
  const SiteVariances vars = site_thermal_variances(s.cov0, s.basis);
  const double e_n = empirical_field(mean, vars, s.mf, tf_one(), FieldKind::E);
  // (1/N)(N * 1/2 + (N-1) * 1/2): the missing bond is the boundary effect.
  CHECK(e_n == doctest::Approx(1.0 - 0.5 / n).epsilon(1e-10));
}

TEST_CASE("total momentum field is constant in time") {
  const auto s = make(48, 3, canonical_profiles());
  const MeanState m0 = reconstruct(s.s0, s.basis);
  const double p0 = empirical_field(m0, s.mf, tf_one(), FieldKind::P);
  for (double t : {17.0, 48.0 * 48.0}) {
    const MeanState mt = reconstruct(evolve_mode_state(s.s0, s.basis, t), s.basis);
    CHECK(std::abs(empirical_field(mt, s.mf, tf_one(), FieldKind::P) - p0) < 1e-10);
  }
}

TEST_CASE("energy split: A vanishes for centered states, A + F = E") {
  const MacroProfiles centered(Profile::sin_squared(1.0, 0.5),
                               Profile::constant(0.0), Profile::constant(0.0));
  const auto s = make(40, 4, centered);
  const MeanState mean = reconstruct(s.s0, s.basis);
  const SiteVariances vars = site_thermal_variances(s.cov0, s.basis);
  const EnergySplit split = energy_split(mean, vars, s.mf, tf_one());
  CHECK(split.mechanical == 0.0);

  const auto s2 = make(40, 5, canonical_profiles());
  for (double t : {0.0, 9.7}) {
    const MeanState mt = reconstruct(evolve_mode_state(s2.s0, s2.basis, t), s2.basis);
    const SiteVariances vt =
        site_thermal_variances(evolve_covariance(s2.cov0, s2.basis, t), s2.basis);
    const EnergySplit sp = energy_split(mt, vt, s2.mf, tf_sin2());
    const double e_n = empirical_field(mt, vt, s2.mf, tf_sin2(), FieldKind::E);
    CHECK(std::abs(sp.mechanical + sp.thermal - e_n) < 1e-12);
  }
}

TEST_CASE("constant beta freezes F_N for every mass configuration") {
  const MacroProfiles eq(Profile::constant(1.0), Profile::sine_series({0.3}),
                         Profile::cosine_series(0.0, {0.3}));
  for (std::uint64_t seed : {11u, 12u}) {
    const auto s = make(48, seed, eq, MassLaw::uniform(0.5, 1.9));
    const FieldWeights w = make_field_weights(s.basis, tf_sin2());
    const double f0 = fluctuation_field(s.cov0, w);
    CHECK(f0 == doctest::Approx(
                    empirical_field(reconstruct(s.s0, s.basis),
                                    site_thermal_variances(s.cov0, s.basis), s.mf,
                                    tf_sin2(), FieldKind::E) -
                    mechanical_field(reconstruct(s.s0, s.basis), s.mf, tf_sin2()))
                    .epsilon(1e-10));
    for (double t : {5.0, 48.0 * 48.0}) {
      CHECK(std::abs(fluctuation_field_at(s.cov0, s.basis, w, t) - f0) < 1e-8);
    }
  }
}

TEST_CASE("equipartition value of F_N at beta 1") {
  const int n = 128;
  const MacroProfiles eq(Profile::constant(1.0), Profile::constant(0.0),
                         Profile::constant(0.0));
  const auto s = make(n, 6, eq);
  const FieldWeights w = make_field_weights(s.basis, tf_one());
  CHECK(fluctuation_field(s.cov0, w) == doctest::Approx(1.0 - 0.5 / n).epsilon(1e-9));
}

TEST_CASE("fast fluctuation path equals materialized covariance evolution") {
  const auto s = make(56, 7, canonical_profiles());
  const FieldWeights w = make_field_weights(s.basis, tf_sin2());
  for (double t : {0.0, 3.1, 777.0}) {
    const double fast = fluctuation_field_at(s.cov0, s.basis, w, t);
    const double slow =
        fluctuation_field(evolve_covariance(s.cov0, s.basis, t), w);
    CHECK(fast == doctest::Approx(slow).epsilon(1e-11));
  }
  // Also from a state with nonzero suv (evolve in two hops).
  const ModeCovariance mid = evolve_covariance(s.cov0, s.basis, 3.1);
  CHECK(fluctuation_field_at(mid, s.basis, w, 4.2) ==
        doctest::Approx(fluctuation_field(evolve_covariance(mid, s.basis, 4.2), w))
            .epsilon(1e-11));
}

TEST_CASE("band split: validation, tiny-alpha limit, additivity") {
  const auto s = make(64, 8, canonical_profiles());
  const FieldWeights w = make_field_weights(s.basis, tf_one());
  CHECK_THROWS_AS(mode_band_split(s.cov0, s.basis, w, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(mode_band_split(s.cov0, s.basis, w, 0.5), std::invalid_argument);

  // alpha -> 0+: every mode lands in F1.
  const BandSplit tiny = mode_band_split(s.cov0, s.basis, w, 1e-3);
  CHECK(tiny.f1 == doctest::Approx(fluctuation_field(s.cov0, w)).epsilon(1e-12));
  CHECK(tiny.f2 == 0.0);
  CHECK(std::abs(tiny.cross) < 1e-15);

  // Additivity holds at any time and alpha.
  for (double t : {0.0, 12.0}) {
    const ModeCovariance cov = evolve_covariance(s.cov0, s.basis, t);
    const BandSplit split = mode_band_split(cov, s.basis, w, 0.3);
    CHECK(split.f1 + split.f2 + split.cross ==
          doctest::Approx(fluctuation_field(cov, w)).epsilon(1e-11));
  }
}

TEST_CASE("constant beta: banded sums still reproduce F_N(0) at all times") {
  const MacroProfiles eq(Profile::constant(1.0), Profile::constant(0.0),
                         Profile::constant(0.0));
  const auto s = make(48, 9, eq);
  const FieldWeights w = make_field_weights(s.basis, tf_sin2());
  const double f0 = fluctuation_field(s.cov0, w);
  for (double t : {0.0, 21.5}) {
    const BandSplit split =
        mode_band_split(evolve_covariance(s.cov0, s.basis, t), s.basis, w, 0.25);
    CHECK(split.f1 + split.f2 + split.cross == doctest::Approx(f0).epsilon(1e-9));
  }
}

TEST_CASE("low band carries O(N^{-alpha}) fluctuation energy") {
  // Calibrate the constant at N=256 and check the trend value at N=1024.
  const double alpha = 0.3;
  auto f1_at = [&](int n) {
    const auto s = make(n, 10, canonical_profiles());
    const FieldWeights w = make_field_weights(s.basis, tf_one());
    const double tau = 0.5 * n;
    const BandSplit split =
        mode_band_split(evolve_covariance(s.cov0, s.basis, tau), s.basis, w, alpha);
    return std::abs(split.f1);
  };
  const double c = f1_at(256) * std::pow(256.0, alpha);
  CHECK(f1_at(1024) <= 1.25 * c * std::pow(1024.0, -alpha));
}

TEST_CASE("a priori sums: zeros, exact H/I pairing, time invariance") {
  const auto s = make(64, 11, canonical_profiles());

  MeanState zero;
  zero.r = Eigen::VectorXd::Zero(63);
  zero.p = Eigen::VectorXd::Zero(64);
  const AprioriSums z = apriori_bounds(zero, s.mf);
  CHECK(z.l2_r == 0.0);
  CHECK(z.l2_p == 0.0);
  CHECK(z.h1_r == 0.0);
  CHECK(z.h1_p == 0.0);

  const MeanState m0 = reconstruct(s.s0, s.basis);
  const Conserved c0 = conserved_quantities(m0.r, m0.p, s.mf);
  for (double t : {0.0, 31.0, 4096.0}) {
    const MeanState mt = reconstruct(evolve_mode_state(s.s0, s.basis, t), s.basis);
    const AprioriSums sums = apriori_bounds(mt, s.mf);
    const Conserved ct = conserved_quantities(mt.r, mt.p, s.mf);
    // The sums tile 2H and 2I exactly.
    CHECK(sums.l2_r + sums.l2_p == doctest::Approx(2.0 * ct.h).epsilon(1e-12));
    CHECK(sums.h1_r + sums.h1_p == doctest::Approx(2.0 * ct.i).epsilon(1e-12));
    const double guard = 1.0 + 1e-9;
    CHECK(sums.l2_r <= 2.0 * c0.h * guard);
    CHECK(sums.l2_p <= 2.0 * c0.h * guard);
    CHECK(sums.h1_r <= 2.0 * c0.i * guard);
    CHECK(sums.h1_p <= 2.0 * c0.i * guard);
  }
}

TEST_CASE("h1 sums scale like 1/N for smooth profiles") {
  double prev = 0.0;
  for (int n : {128, 256, 512}) {
    const auto s = make(n, 12, canonical_profiles());
    const MeanState m0 = reconstruct(s.s0, s.basis);
    const double scaled = apriori_bounds(m0, s.mf).h1_r * n;
    if (prev != 0.0) {
      CHECK(scaled > 0.5 * prev);
      CHECK(scaled < 2.0 * prev);
    }
    prev = scaled;
  }
}

TEST_CASE("holder modulus: degenerate pairs, constants, Cauchy-Schwarz bound") {
  const auto s = make(256, 13, canonical_profiles());
  MeanState flat;
  flat.r = Eigen::VectorXd::Constant(255, 0.4);
  flat.p = 0.9 * s.mf.masses;  // constant p/m
  const auto pairs = holder_pair_lattice(256);
  const HolderModuli none = holder_modulus(flat, s.mf, {{5, 5}, {9, 9}});
  CHECK(none.r_modulus == 0.0);
  CHECK(none.p_modulus == 0.0);
  const HolderModuli fm = holder_modulus(flat, s.mf, pairs);
  CHECK(fm.r_modulus == 0.0);
  CHECK(fm.p_modulus < 1e-13);  // rounding of p/m = 0.9 (1 +- eps), scaled by sqrt(N)

  for (double t : {0.0, 128.0}) {
    const MeanState mt = reconstruct(evolve_mode_state(s.s0, s.basis, t), s.basis);
    const AprioriSums sums = apriori_bounds(mt, s.mf);
    const HolderModuli mod = holder_modulus(mt, s.mf, pairs);
    const double m_plus = s.mf.law.max();
    CHECK(mod.r_modulus <= std::sqrt(256.0 * m_plus * sums.h1_r) + 1e-12);
    CHECK(mod.p_modulus <= std::sqrt(256.0 * sums.h1_p) + 1e-12);
  }
}

TEST_CASE("holder pair lattice spans dyadic scales") {
  const auto pairs = holder_pair_lattice(1024);
  CHECK(pairs.size() > 500);
  CHECK(pairs.size() < 2000);
  bool saw_one = false, saw_half = false;
  for (const auto& [a, b] : pairs) {
    CHECK(a >= 1);
    CHECK(b <= 1024);
    if (b - a == 1) saw_one = true;
    if (b - a == 512) saw_half = true;
  }
  CHECK(saw_one);
  CHECK(saw_half);
}

TEST_CASE("averaging sums vanish identically for constant masses") {
  const auto s = make(64, 14, canonical_profiles(), MassLaw::constant(1.0));
  const MeanState mt =
      reconstruct(evolve_mode_state(s.s0, s.basis, 32.0), s.basis);
  const AveragingSums sums = averaging_sums(mt, s.mf, tf_one());
  CHECK(sums.linear == 0.0);
  CHECK(sums.squared == 0.0);

  const auto sd = make(64, 15, canonical_profiles());
  const MeanState md = reconstruct(evolve_mode_state(sd.s0, sd.basis, 32.0), sd.basis);
  CHECK(averaging_sums(md, sd.mf, tf_zero()).linear == 0.0);
  CHECK(averaging_sums(md, sd.mf, tf_one()).linear != 0.0);
}
