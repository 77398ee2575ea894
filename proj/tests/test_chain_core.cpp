#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "chainhydro/eigenbasis.hpp"
#include "chainhydro/mass_field.hpp"
#include "chainhydro/numeric.hpp"

using namespace chainhydro;

namespace {

// Independent RNG stream (SplitMix64, unrelated to the mt19937_64 sampler)
// used as the law-of-large-numbers cross-check.
double splitmix_uniform_mean(double lo, double hi, int n, std::uint64_t seed) {
  std::uint64_t state = seed;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    sum += lo + (hi - lo) * u;
  }
  return sum / n;
}

}  // namespace

TEST_CASE("constant law gives constant masses") {
  const MassField mf = sample_masses(MassLaw::constant(1.0), 4, 7);
  REQUIRE(mf.n == 4);
  for (int x = 0; x < 4; ++x) CHECK(mf.masses[x] == 1.0);
}

TEST_CASE("uniform law: range, empirical mean, determinism") {
  const MassLaw law = MassLaw::uniform(0.8, 1.2);
  const MassField mf = sample_masses(law, 100000, 1);
  CHECK(mf.masses.minCoeff() >= 0.8);
  CHECK(mf.masses.maxCoeff() <= 1.2);
  CHECK(std::abs(mf.masses.mean() - 1.0) < 0.005);
  // Same bound holds for an independent generator: the check is about the
  // law, not the sampler.
  CHECK(std::abs(splitmix_uniform_mean(0.8, 1.2, 100000, 99) - 1.0) < 0.005);

  const MassField a = sample_masses(law, 16, 42);
  const MassField b = sample_masses(law, 16, 42);
  for (int x = 0; x < 16; ++x) CHECK(a.masses[x] == b.masses[x]);
  const MassField c = sample_masses(law, 16, 43);
  CHECK(a.masses != c.masses);
}

TEST_CASE("mass law validation") {
  CHECK_THROWS_AS(MassLaw::uniform(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(MassLaw::uniform(-0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(MassLaw::uniform(1.2, 0.8), std::invalid_argument);
  CHECK_THROWS_AS(MassLaw::constant(0.0), std::invalid_argument);
  CHECK_THROWS_AS(sample_masses(MassLaw::constant(1.0), 1, 0), std::invalid_argument);
}

TEST_CASE("dynamical matrix: N=2 unit masses") {
  const MassField mf = sample_masses(MassLaw::constant(1.0), 2, 0);
  const TridiagonalMatrix t = build_dynamical_matrix(mf);
  CHECK(t.diag[0] == 1.0);
  CHECK(t.diag[1] == 1.0);
  CHECK(t.off[0] == -1.0);
}

TEST_CASE("dynamical matrix: N=3 masses (1,4,1) by hand") {
  MassField mf = sample_masses(MassLaw::constant(1.0), 3, 0);
  mf.masses << 1.0, 4.0, 1.0;
  const TridiagonalMatrix t = build_dynamical_matrix(mf);
  CHECK(t.diag[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(t.diag[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(t.diag[2] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(t.off[0] == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(t.off[1] == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("constant-mass spectrum matches the closed form") {
  // Free-boundary Laplacian eigenvalues are 4 sin^2(k pi / 2N) / m.
  const int n = 16;
  const double m = 2.0;
  const MassField mf = sample_masses(MassLaw::constant(m), n, 0);
  const EigenBasis basis = eigendecompose(mf);
  for (int k = 0; k < n; ++k) {
    const double s = sinpi(0.5 * k / n);
    const double expected = std::sqrt(4.0 * s * s / m);
    CHECK(basis.omegas[k] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("N=2 eigenmodes by hand") {
  const MassField mf = sample_masses(MassLaw::constant(1.0), 2, 0);
  const EigenBasis basis = eigendecompose(mf);
  CHECK(basis.omegas[0] == 0.0);
  CHECK(basis.omegas[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  const double isq2 = 1.0 / std::sqrt(2.0);
  CHECK(basis.modes(0, 0) == doctest::Approx(isq2).epsilon(1e-14));
  CHECK(basis.modes(1, 0) == doctest::Approx(isq2).epsilon(1e-14));
  // Sign rule: tie in magnitude, lowest index wins and is positive.
  CHECK(basis.modes(0, 1) == doctest::Approx(isq2).epsilon(1e-14));
  CHECK(basis.modes(1, 1) == doctest::Approx(-isq2).epsilon(1e-14));
}

TEST_CASE("disordered basis: orthonormality, residual, kernel, flat zero mode") {
  const int n = 64;
  const MassField mf = sample_masses(MassLaw::uniform(0.8, 1.2), n, 5);
  const EigenBasis basis = eigendecompose(mf);

  // Full pairwise M-orthonormality.
  Eigen::MatrixXd gram = basis.modes.transpose() * mf.masses.asDiagonal() * basis.modes;
  gram -= Eigen::MatrixXd::Identity(n, n);
  CHECK(gram.cwiseAbs().maxCoeff() < 1e-10);

  // Full pairwise strain orthonormality.
  Eigen::MatrixXd sgram = basis.strain_modes.transpose() * basis.strain_modes;
  sgram -= Eigen::MatrixXd::Identity(n - 1, n - 1);
  CHECK(sgram.cwiseAbs().maxCoeff() < 1e-10);

  CHECK(basis.omegas[0] == 0.0);
  for (int k = 1; k < n; ++k) CHECK(basis.omegas[k] > 0.0);

  // Simple spectrum for disordered masses.
  double min_gap = 1e300;
  for (int k = 0; k + 1 < n; ++k)
    min_gap = std::min(min_gap, basis.omegas[k + 1] * basis.omegas[k + 1] -
                                    basis.omegas[k] * basis.omegas[k]);
  CHECK(min_gap > 0.0);

  const double expect = 1.0 / std::sqrt(mf.masses.sum());
  for (int x = 0; x < n; ++x)
    CHECK(basis.modes(x, 0) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("mass scaling: omega^2(c m) * c = omega^2(m)") {
  const int n = 48;
  const MassField mf = sample_masses(MassLaw::uniform(0.8, 1.2), n, 11);
  const EigenBasis basis = eigendecompose(mf);
  const double c = 2.7;
  MassField scaled = mf;
  scaled.law = MassLaw::uniform(0.8 * c, 1.2 * c);
  scaled.masses *= c;
  const EigenBasis basis_scaled = eigendecompose(scaled);
  for (int k = 1; k < n; ++k) {
    const double lhs = basis_scaled.omegas[k] * basis_scaled.omegas[k] * c;
    const double rhs = basis.omegas[k] * basis.omegas[k];
    CHECK(std::abs(lhs - rhs) <= 1e-9 * rhs);
  }
}

TEST_CASE("eigenbasis disk cache round-trips") {
  const MassField mf = sample_masses(MassLaw::uniform(0.8, 1.2), 32, 9);
  const EigenBasis basis = eigendecompose(mf);
  const std::string path =
      (std::filesystem::temp_directory_path() / "chainhydro_basis_test.txt").string();
  save_eigenbasis(path, basis, mf);
  const EigenBasis loaded = load_eigenbasis(path, mf);
  CHECK((loaded.omegas - basis.omegas).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.modes - basis.modes).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.strain_modes - basis.strain_modes).cwiseAbs().maxCoeff() < 1e-15);

  MassField other = sample_masses(MassLaw::uniform(0.8, 1.2), 32, 10);
  CHECK_THROWS_AS(load_eigenbasis(path, other), std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("sinpi/cospi hit exact zeros") {
  CHECK(sinpi(0.0) == 0.0);
  CHECK(sinpi(1.0) == 0.0);
  CHECK(sinpi(2.0) == 0.0);
  CHECK(sinpi(123.0) == 0.0);
  CHECK(cospi(0.5) == 0.0);
  CHECK(cospi(1.5) == 0.0);
  CHECK(sinpi(0.5) == 1.0);
  CHECK(cospi(0.0) == 1.0);
  CHECK(sinpi(1.0 / 6.0) == doctest::Approx(0.5).epsilon(1e-15));
}
