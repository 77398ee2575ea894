#pragma once

#include <string>
#include <vector>

namespace chainhydro {

/// Scalar profile on [0,1]: a named closed form (exactly evaluable, with an
/// analytic derivative) or a sampled table interpolated with a monotone
/// (Fritsch-Carlson) cubic.
class Profile {
 public:
  enum class Kind { Constant, Polynomial, SineSeries, CosineSeries, SinSquared, Table };

  Profile() = default;  // constant 0

  static Profile constant(double c);
  /// sum_i coeffs[i] * y^i
  static Profile polynomial(std::vector<double> coeffs);
  /// sum_{j} coeffs[j] * sin((j+1) pi y); vanishes exactly at y = 0, 1.
  static Profile sine_series(std::vector<double> coeffs);
  /// c0 + sum_j coeffs[j] * cos((j+1) pi y)
  static Profile cosine_series(double c0, std::vector<double> coeffs);
  /// base + amplitude * sin^2(pi y)
  static Profile sin_squared(double base, double amplitude);
  /// Sampled table over strictly increasing nodes covering [0,1].
  static Profile table(std::vector<double> ys, std::vector<double> values);
  /// Two-column decimal text file: y value, one pair per line; '#' comments.
  static Profile table_from_file(const std::string& path);

  double operator()(double y) const;
  double derivative(double y) const;
  Kind kind() const { return kind_; }

 private:
  Kind kind_ = Kind::Constant;
  double a_ = 0.0, b_ = 0.0;       // constant / sin_squared parameters
  std::vector<double> coeffs_;     // polynomial / series coefficients
  std::vector<double> ty_, tv_, tm_;  // table nodes, values, node slopes
};

/// Macroscopic initial data (beta, r, p) for the local Gibbs state.
/// Construction validates beta > 0 on a dense grid and the stretch boundary
/// condition r(0) = r(1) = 0 (exact for closed forms, 1e-12 for tables).
struct MacroProfiles {
  Profile beta, r_bar, p_bar;

  MacroProfiles(Profile beta_profile, Profile r_profile, Profile p_profile);

  /// Minimum of beta over the validation grid (a positive lower bound).
  double beta_min() const { return beta_min_; }

 private:
  double beta_min_ = 0.0;
};

/// The acceptance profiles used throughout:
///   beta(y) = 1 + 0.5 sin^2(pi y),  r(y) = 0.3 sin(pi y),  p(y) = 0.3 cos(pi y).
MacroProfiles canonical_profiles();

/// Test function f : [0,1] -> R for the empirical fields.
struct TestFunction {
  enum class Kind { C0, C1, C1VanishingEnds };

  Kind kind = Kind::C1;
  Profile f;
  std::string name;

  static TestFunction make(Kind kind, Profile f, std::string name);

  double operator()(double y) const { return f(y); }
  double derivative(double y) const;
};

}  // namespace chainhydro
