#include "chainhydro/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "chainhydro/numeric.hpp"

namespace chainhydro {

Profile Profile::constant(double c) {
  Profile p;
  p.kind_ = Kind::Constant;
  p.a_ = c;
  return p;
}

Profile Profile::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) throw std::invalid_argument("Profile: empty polynomial");
  Profile p;
  p.kind_ = Kind::Polynomial;
  p.coeffs_ = std::move(coeffs);
  return p;
}

Profile Profile::sine_series(std::vector<double> coeffs) {
  if (coeffs.empty()) throw std::invalid_argument("Profile: empty sine series");
  Profile p;
  p.kind_ = Kind::SineSeries;
  p.coeffs_ = std::move(coeffs);
  return p;
}

Profile Profile::cosine_series(double c0, std::vector<double> coeffs) {
  Profile p;
  p.kind_ = Kind::CosineSeries;
  p.a_ = c0;
  p.coeffs_ = std::move(coeffs);
  return p;
}

Profile Profile::sin_squared(double base, double amplitude) {
  Profile p;
  p.kind_ = Kind::SinSquared;
  p.a_ = base;
  p.b_ = amplitude;
  return p;
}

Profile Profile::table(std::vector<double> ys, std::vector<double> values) {
  if (ys.size() != values.size() || ys.size() < 2)
    throw std::invalid_argument("Profile: table needs >= 2 (y, value) pairs");
  for (std::size_t i = 1; i < ys.size(); ++i)
    if (!(ys[i] > ys[i - 1]))
      throw std::invalid_argument("Profile: table nodes must be strictly increasing");
  if (ys.front() > 1e-12 || ys.back() < 1.0 - 1e-12)
    throw std::invalid_argument("Profile: table must cover [0, 1]");

  Profile p;
  p.kind_ = Kind::Table;
  p.ty_ = std::move(ys);
  p.tv_ = std::move(values);

  // Fritsch-Carlson monotone slopes: C^1 and shape preserving.
  const std::size_t m = p.ty_.size();
  std::vector<double> h(m - 1), delta(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    h[i] = p.ty_[i + 1] - p.ty_[i];
    delta[i] = (p.tv_[i + 1] - p.tv_[i]) / h[i];
  }
  p.tm_.assign(m, 0.0);
  p.tm_[0] = delta[0];
  p.tm_[m - 1] = delta[m - 2];
  for (std::size_t i = 1; i + 1 < m; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0)
      p.tm_[i] = 0.0;
    else
      p.tm_[i] = 0.5 * (delta[i - 1] + delta[i]);
  }
  for (std::size_t i = 0; i + 1 < m; ++i) {
    if (delta[i] == 0.0) {
      p.tm_[i] = p.tm_[i + 1] = 0.0;
      continue;
    }
    const double alpha = p.tm_[i] / delta[i];
    const double beta = p.tm_[i + 1] / delta[i];
    const double s = alpha * alpha + beta * beta;
    if (s > 9.0) {
      const double tau = 3.0 / std::sqrt(s);
      p.tm_[i] = tau * alpha * delta[i];
      p.tm_[i + 1] = tau * beta * delta[i];
    }
  }
  return p;
}

Profile Profile::table_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("Profile: cannot open table file " + path);
  std::vector<double> ys, vs;
  std::string line;
  while (std::getline(in, line)) {
    const auto pos = line.find('#');
    if (pos != std::string::npos) line.erase(pos);
    std::istringstream row(line);
    double y, v;
    if (row >> y >> v) {
      ys.push_back(y);
      vs.push_back(v);
    }
  }
  return table(std::move(ys), std::move(vs));
}

double Profile::operator()(double y) const {
  switch (kind_) {
    case Kind::Constant:
      return a_;
    case Kind::Polynomial: {
      double acc = 0.0;
      for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
        acc = acc * y + *it;
      return acc;
    }
    case Kind::SineSeries: {
      double acc = 0.0;
      for (std::size_t j = 0; j < coeffs_.size(); ++j)
        acc += coeffs_[j] * sinpi(static_cast<double>(j + 1) * y);
      return acc;
    }
    case Kind::CosineSeries: {
      double acc = a_;
      for (std::size_t j = 0; j < coeffs_.size(); ++j)
        acc += coeffs_[j] * cospi(static_cast<double>(j + 1) * y);
      return acc;
    }
    case Kind::SinSquared: {
      const double s = sinpi(y);
      return a_ + b_ * s * s;
    }
    case Kind::Table: {
      if (y < ty_.front() - 1e-12 || y > ty_.back() + 1e-12)
        throw std::out_of_range("Profile: table query outside node range");
      const auto upper = std::upper_bound(ty_.begin(), ty_.end(), y);
      std::size_t i = upper == ty_.begin()
                          ? 0
                          : static_cast<std::size_t>(upper - ty_.begin()) - 1;
      if (i + 1 >= ty_.size()) i = ty_.size() - 2;
      const double h = ty_[i + 1] - ty_[i];
      const double t = (y - ty_[i]) / h;
      const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
      const double h10 = t * (1 - t) * (1 - t);
      const double h01 = t * t * (3 - 2 * t);
      const double h11 = t * t * (t - 1);
      return h00 * tv_[i] + h10 * h * tm_[i] + h01 * tv_[i + 1] + h11 * h * tm_[i + 1];
    }
  }
  return 0.0;
}

double Profile::derivative(double y) const {
  switch (kind_) {
    case Kind::Constant:
      return 0.0;
    case Kind::Polynomial: {
      double acc = 0.0;
      for (std::size_t j = coeffs_.size(); j-- > 1;)
        acc = acc * y + static_cast<double>(j) * coeffs_[j];
      return acc;
    }
    case Kind::SineSeries: {
      double acc = 0.0;
      for (std::size_t j = 0; j < coeffs_.size(); ++j) {
        const double n = static_cast<double>(j + 1);
        acc += coeffs_[j] * n * M_PI * cospi(n * y);
      }
      return acc;
    }
    case Kind::CosineSeries: {
      double acc = 0.0;
      for (std::size_t j = 0; j < coeffs_.size(); ++j) {
        const double n = static_cast<double>(j + 1);
        acc -= coeffs_[j] * n * M_PI * sinpi(n * y);
      }
      return acc;
    }
    case Kind::SinSquared:
      return b_ * M_PI * sinpi(2.0 * y);  // d/dy sin^2(pi y) = pi sin(2 pi y)
    case Kind::Table: {
      if (y < ty_.front() - 1e-12 || y > ty_.back() + 1e-12)
        throw std::out_of_range("Profile: table query outside node range");
      const auto upper = std::upper_bound(ty_.begin(), ty_.end(), y);
      std::size_t i = upper == ty_.begin()
                          ? 0
                          : static_cast<std::size_t>(upper - ty_.begin()) - 1;
      if (i + 1 >= ty_.size()) i = ty_.size() - 2;
      const double h = ty_[i + 1] - ty_[i];
      const double t = (y - ty_[i]) / h;
      const double d00 = 6 * t * (t - 1) / h;
      const double d10 = (1 - t) * (1 - 3 * t);
      const double d01 = -6 * t * (t - 1) / h;
      const double d11 = t * (3 * t - 2);
      return d00 * tv_[i] + d10 * tm_[i] + d01 * tv_[i + 1] + d11 * tm_[i + 1];
    }
  }
  return 0.0;
}

MacroProfiles::MacroProfiles(Profile beta_profile, Profile r_profile,
                             Profile p_profile)
    : beta(std::move(beta_profile)),
      r_bar(std::move(r_profile)),
      p_bar(std::move(p_profile)) {
  // beta must be bounded away from zero; scan a dense grid.
  constexpr int kGrid = 4096;
  double lo = beta(0.0);
  for (int i = 1; i <= kGrid; ++i)
    lo = std::min(lo, beta(static_cast<double>(i) / kGrid));
  if (!(lo > 0.0))
    throw std::invalid_argument("MacroProfiles: beta must be positive on [0,1]");
  beta_min_ = lo;

  const double bc_tol = r_bar.kind() == Profile::Kind::Table ? 1e-12 : 0.0;
  if (std::abs(r_bar(0.0)) > bc_tol || std::abs(r_bar(1.0)) > bc_tol)
    throw std::invalid_argument("MacroProfiles: stretch profile must vanish at 0 and 1");
}

MacroProfiles canonical_profiles() {
  return MacroProfiles(Profile::sin_squared(1.0, 0.5),
                       Profile::sine_series({0.3}),
                       Profile::cosine_series(0.0, {0.3}));
}

TestFunction TestFunction::make(Kind kind, Profile f, std::string name) {
  if (kind == Kind::C1VanishingEnds &&
      (std::abs(f(0.0)) > 1e-14 || std::abs(f(1.0)) > 1e-14))
    throw std::invalid_argument("TestFunction '" + name +
                                "': must vanish at the endpoints");
  return TestFunction{kind, std::move(f), std::move(name)};
}

double TestFunction::derivative(double y) const {
  if (kind == Kind::C0)
    throw std::logic_error("TestFunction '" + name + "': C0 has no derivative");
  return f.derivative(y);
}

}  // namespace chainhydro
