#pragma once

#include <cstdint>
#include <string>

#include "papevo/field.hpp"

namespace papevo {

/// Exact rational with int64 numerator/denominator, always reduced, den > 0.
class Rational {
 public:
  Rational(std::int64_t num = 0, std::int64_t den = 1);

  /// Best rational approximation with denominator <= max_den; throws if
  /// the approximation is off by more than 1e-12 relative.
  static Rational from_double(double x, std::int64_t max_den = 1000000);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  Rational inverse() const;
  std::string to_string() const;

  friend Rational operator+(Rational a, Rational b);
  friend Rational operator-(Rational a, Rational b);
  friend Rational operator*(Rational a, Rational b);
  friend Rational operator/(Rational a, Rational b);
  friend Rational operator-(Rational a) { return {-a.num_, a.den_}; }
  friend bool operator==(Rational a, Rational b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend bool operator<(Rational a, Rational b);
  friend bool operator>(Rational a, Rational b) { return b < a; }
  friend bool operator<=(Rational a, Rational b) { return !(b < a); }
  friend bool operator>=(Rational a, Rational b) { return !(a < b); }

 private:
  std::int64_t num_;
  std::int64_t den_;
};

/// p with 1/p = (1-theta)/p0 + theta/p1.
double interpolate_exponent(double p0, double p1, double theta);
Rational interpolate_exponent(Rational p0, Rational p1, Rational theta);

/// (L^{e0}, L^{e1})_{theta, q} = L^{eq}.
struct InterpolationCouple {
  LorentzExponents e0;
  LorentzExponents e1;
  double theta;
  LorentzExponents eq;
};

InterpolationCouple interpolation_couple(const LorentzExponents& e0, const LorentzExponents& e1,
                                         double theta, double q);

struct GitBoundReport {
  double bound = 0.0;  ///< M0^{1-theta} M1^theta
  double measured = 0.0;
  double tol = 0.0;
  bool ok = false;
};

inline constexpr double kGitBoundTol = 0.05;

/// ok iff M <= M0^{1-theta} M1^theta (1 + tol).
GitBoundReport git_bound_check(double M0, double M1, double M, double theta,
                               double tol = kGitBoundTol);

/// The full parameter pack of the rough-coefficient diffusion application.
///
/// Everything is stored both as doubles and, when r is rational, exactly.
struct ApplicationExponents {
  int d = 0;
  int m = 0;
  Rational r;
  bool exact = true;  ///< r was representable; exact fields are authoritative

  Rational pX, pY, pY1, pY2, pZ1, pZ2, pT;
  Rational alpha1, alpha2, theta;
  Rational q1, q2, theta_tilde, beta1, beta2, gamma;

  double r_value = 0.0;  ///< r itself when !exact
  /// Double views (always populated).
  struct Values {
    double pX, pY, pY1, pY2, pZ1, pZ2, pT;
    double alpha1, alpha2, theta;
    double q1, q2, theta_tilde, beta1, beta2, gamma;
  } v{};

  LorentzExponents X() const { return LorentzExponents::weak(v.pX); }
  LorentzExponents Y() const { return LorentzExponents::weak(v.pY); }
  LorentzExponents Y1() const { return LorentzExponents::weak(v.pY1); }
  LorentzExponents Y2() const { return LorentzExponents::weak(v.pY2); }
  /// Predual realization (pY', 1) = (Z1, Z2)_{1/2,1}.
  LorentzExponents Z() const { return LorentzExponents(v.pY / (v.pY - 1.0), 1.0); }
  LorentzExponents T() const { return LorentzExponents::weak(v.pT); }
  LorentzExponents Q() const { return LorentzExponents::weak(r_value); }

  /// Flat key=value text block, one key per line, %.17g values.
  std::string to_key_value() const;
};

/// Throws InvalidArgument naming the violated inequality.
ApplicationExponents derive_application_exponents(int d, int m, Rational r);
ApplicationExponents derive_application_exponents(int d, int m, double r);

}  // namespace papevo
