#include "chainhydro/mass_field.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "chainhydro/numeric.hpp"

namespace chainhydro {

MassLaw MassLaw::constant(double m) {
  if (!(m > 0.0)) throw std::invalid_argument("MassLaw: mass must be positive");
  return MassLaw{MassLawKind::Constant, m, m};
}

MassLaw MassLaw::uniform(double lo, double hi) {
  if (!(lo > 0.0)) throw std::invalid_argument("MassLaw: lower bound must be positive");
  if (hi < lo) throw std::invalid_argument("MassLaw: upper bound below lower bound");
  return MassLaw{MassLawKind::Uniform, lo, hi};
}

std::string MassLaw::label() const {
  std::ostringstream out;
  out.precision(17);
  if (kind == MassLawKind::Constant) {
    out << "constant:" << lo;
  } else {
    out << "uniform:" << lo << ":" << hi;
  }
  return out.str();
}

MassField sample_masses(const MassLaw& law, int n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("sample_masses: n >= 2 required");
  MassField mf;
  mf.n = n;
  mf.seed = seed;
  mf.law = law;
  mf.masses.resize(n);
  if (law.kind == MassLawKind::Constant) {
    mf.masses.setConstant(law.lo);
    return mf;
  }
  Rng rng(seed);
  const double width = law.hi - law.lo;
  for (int x = 0; x < n; ++x) mf.masses[x] = law.lo + width * rng.uniform01();
  return mf;
}

TridiagonalMatrix build_dynamical_matrix(const MassField& mf) {
  const int n = mf.n;
  TridiagonalMatrix t;
  t.diag.resize(n);
  t.off.resize(n - 1);
  for (int x = 0; x < n; ++x) {
    const double c = (x == 0 || x == n - 1) ? 1.0 : 2.0;
    t.diag[x] = c / mf.masses[x];
  }
  for (int x = 0; x + 1 < n; ++x)
    t.off[x] = -1.0 / std::sqrt(mf.masses[x] * mf.masses[x + 1]);
  return t;
}

}  // namespace chainhydro
