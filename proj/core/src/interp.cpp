#include "papevo/interp.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "papevo/format.hpp"

namespace papevo {

namespace {

__extension__ typedef __int128 i128;

Rational make(i128 num, i128 den) {
  if (den == 0) throw InvalidArgument("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 a = num < 0 ? -num : num;
  i128 b = den;
  while (b != 0) {
    const i128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  constexpr i128 lim = std::numeric_limits<std::int64_t>::max();
  if (num > lim || num < -lim || den > lim) throw InvalidArgument("Rational: overflow");
  return {static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
  if (den == 0) throw InvalidArgument("Rational: zero denominator");
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
}

Rational Rational::from_double(double x, std::int64_t max_den) {
  if (!std::isfinite(x)) throw InvalidArgument("Rational: non-finite value");
  // Continued fraction convergents.
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double y = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(y);
    if (std::abs(a) > 1e15) break;
    const auto ai = static_cast<std::int64_t>(a);
    const std::int64_t h2 = ai * h1 + h0;
    const std::int64_t k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    const double approx = static_cast<double>(h1) / static_cast<double>(k1);
    if (std::abs(approx - x) <= 1e-15 * std::max(1.0, std::abs(x))) break;
    const double frac = y - a;
    if (frac == 0.0) break;
    y = 1.0 / frac;
  }
  if (k1 == 0) throw InvalidArgument("Rational: no rational approximation");
  const Rational r(h1, k1);
  if (std::abs(r.value() - x) > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
    throw InvalidArgument("Rational: value is not a small-denominator rational");
  }
  return r;
}

Rational Rational::inverse() const {
  if (num_ == 0) throw InvalidArgument("Rational: inverse of zero");
  return {den_, num_};
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(Rational a, Rational b) {
  return make(static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_,
              static_cast<i128>(a.den_) * b.den_);
}

Rational operator-(Rational a, Rational b) { return a + (-b); }

Rational operator*(Rational a, Rational b) {
  return make(static_cast<i128>(a.num_) * b.num_, static_cast<i128>(a.den_) * b.den_);
}

Rational operator/(Rational a, Rational b) { return a * b.inverse(); }

bool operator<(Rational a, Rational b) {
  return static_cast<i128>(a.num_) * b.den_ < static_cast<i128>(b.num_) * a.den_;
}

double interpolate_exponent(double p0, double p1, double theta) {
  if (!(p0 > 1.0) || !(p1 > 1.0)) throw InvalidArgument("interpolate_exponent: need p0, p1 > 1");
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("interpolate_exponent: need theta in (0,1)");
  return 1.0 / ((1.0 - theta) / p0 + theta / p1);
}

Rational interpolate_exponent(Rational p0, Rational p1, Rational theta) {
  if (!(p0 > Rational(1)) || !(p1 > Rational(1))) {
    throw InvalidArgument("interpolate_exponent: need p0, p1 > 1");
  }
  if (!(theta > Rational(0) && theta < Rational(1))) {
    throw InvalidArgument("interpolate_exponent: need theta in (0,1)");
  }
  return ((Rational(1) - theta) / p0 + theta / p1).inverse();
}

InterpolationCouple interpolation_couple(const LorentzExponents& e0, const LorentzExponents& e1,
                                         double theta, double q) {
  const double p = interpolate_exponent(e0.p(), e1.p(), theta);
  return {e0, e1, theta, LorentzExponents(p, q)};
}

GitBoundReport git_bound_check(double M0, double M1, double M, double theta, double tol) {
  if (M0 < 0.0 || M1 < 0.0) throw InvalidArgument("git_bound_check: norms must be non-negative");
  GitBoundReport rep;
  rep.bound = std::pow(M0, 1.0 - theta) * std::pow(M1, theta);
  rep.measured = M;
  rep.tol = tol;
  rep.ok = M <= rep.bound * (1.0 + tol);
  return rep;
}

namespace {

// The derivation is written once over a number type: Rational when r is
// rational, double otherwise.
double to_d(Rational x) { return x.value(); }
double to_d(double x) { return x; }

template <class N>
struct Pack {
  N pX, pY, pY1, pY2, pZ1, pZ2, pT, alpha1, alpha2, theta, q1, q2, theta_tilde, beta1, beta2, gamma;
};

template <class N>
Pack<N> derive(int d, int m, N r) {
  const N D(d), M(m), one(1), two(2);
  Pack<N> k;
  k.pX = D * (M - one) / (two * M);
  k.pY = D * (M - one) / two;
  k.pY1 = two * D * (M - one) / (N(5) - M);
  k.pY2 = two * D * (M - one) / (M + N(3));
  k.pZ1 = two * D * (M - one) / ((two * D + one) * (M - one) - N(4));
  k.pZ2 = two * D * (M - one) / ((two * D - one) * (M - one) - N(4));
  k.alpha1 = N(5) / N(4);
  k.alpha2 = N(3) / N(4);
  k.theta = one / two;
  k.pT = D * r / (D + two * r);
  k.gamma = one / (M - one) - D / (two * r);
  const N c = (r - one) / r;                             // 1/(r/(r-1))
  const N e = (D * (r - one) - two * r) / (D * r);       // 1/(dr/(d(r-1)-2r))
  const N inv_q1 = (one + c) / two;
  const N inv_q2 = (c + e) / two;
  k.q1 = one / inv_q1;
  k.q2 = one / inv_q2;
  k.theta_tilde = (inv_q1 - c) / (inv_q1 - inv_q2);
  k.beta1 = D / two * (inv_q1 - e);
  k.beta2 = D / two * (inv_q2 - e);
  return k;
}

bool same(Rational a, Rational b) { return a == b; }
bool same(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

template <class N>
void verify(const Pack<N>& k, int d, int m) {
  const N one(1), two(2);
  const N D(d), M(m);
  auto fail = [](const std::string& what) { throw InvalidArgument("derived exponents violate " + what); };
  if (!same((one - k.theta) * k.alpha1 + k.theta * k.alpha2, one)) fail("(1-theta)alpha1 + theta alpha2 = 1");
  const N inv_pX = two * M / (D * (M - one));
  if (!same(D / two * (inv_pX - one / k.pY1), k.alpha1)) fail("(d/2)(1/pX - 1/pY1) = alpha1");
  if (!same(D / two * (inv_pX - one / k.pY2), k.alpha2)) fail("(d/2)(1/pX - 1/pY2) = alpha2");
  if (!(k.theta_tilde > N(0) && k.theta_tilde < one)) fail("0 < theta_tilde < 1");
  if (!(N(0) < k.beta2 && k.beta2 < one && one < k.beta1)) fail("0 < beta2 < 1 < beta1");
  if (!same((one - k.theta_tilde) * k.beta1 + k.theta_tilde * k.beta2, one)) {
    fail("(1-theta_tilde)beta1 + theta_tilde beta2 = 1");
  }
  if (!(N(0) < k.gamma && k.gamma < one)) fail("0 < gamma < 1");
  for (const N& p : {k.pX, k.pY, k.pY1, k.pY2, k.pZ1, k.pZ2, k.pT, k.q1, k.q2}) {
    if (!(p > one)) fail("all space exponents > 1");
  }
}

void check_pre(int d, int m, double r) {
  if (d < 3) throw InvalidArgument("exponents: d >= 3 violated");
  // m > d/(d-2)  <=>  m (d-2) > d
  if (!(m * (d - 2) > d)) throw InvalidArgument("exponents: m > d/(d-2) violated");
  if (!(m < 5)) throw InvalidArgument("exponents: m < 5 violated");
  if (!(r > d * (m - 1) / 2.0)) throw InvalidArgument("exponents: r > d(m-1)/2 violated");
}

template <class N>
ApplicationExponents::Values values_of(const Pack<N>& k) {
  return {to_d(k.pX), to_d(k.pY), to_d(k.pY1), to_d(k.pY2), to_d(k.pZ1), to_d(k.pZ2),
          to_d(k.pT), to_d(k.alpha1), to_d(k.alpha2), to_d(k.theta), to_d(k.q1), to_d(k.q2),
          to_d(k.theta_tilde), to_d(k.beta1), to_d(k.beta2), to_d(k.gamma)};
}

}  // namespace

ApplicationExponents derive_application_exponents(int d, int m, Rational r) {
  check_pre(d, m, r.value());
  const auto k = derive<Rational>(d, m, r);
  verify(k, d, m);
  ApplicationExponents a;
  a.d = d;
  a.m = m;
  a.r = r;
  a.exact = true;
  a.r_value = r.value();
  a.pX = k.pX;
  a.pY = k.pY;
  a.pY1 = k.pY1;
  a.pY2 = k.pY2;
  a.pZ1 = k.pZ1;
  a.pZ2 = k.pZ2;
  a.pT = k.pT;
  a.alpha1 = k.alpha1;
  a.alpha2 = k.alpha2;
  a.theta = k.theta;
  a.q1 = k.q1;
  a.q2 = k.q2;
  a.theta_tilde = k.theta_tilde;
  a.beta1 = k.beta1;
  a.beta2 = k.beta2;
  a.gamma = k.gamma;
  a.v = values_of(k);
  return a;
}

ApplicationExponents derive_application_exponents(int d, int m, double r) {
  check_pre(d, m, r);
  try {
    return derive_application_exponents(d, m, Rational::from_double(r));
  } catch (const InvalidArgument& e) {
    if (std::string(e.what()).find("Rational") == std::string::npos) throw;
  }
  const auto k = derive<double>(d, m, r);
  verify(k, d, m);
  ApplicationExponents a;
  a.d = d;
  a.m = m;
  a.exact = false;
  a.r_value = r;
  a.v = values_of(k);
  return a;
}

std::string ApplicationExponents::to_key_value() const {
  std::ostringstream os;
  os << "d=" << d << "\n"
     << "m=" << m << "\n"
     << "r=" << fmt17(r_value) << "\n";
  const std::pair<const char*, double> rows[] = {
      {"pX", v.pX},         {"pY", v.pY},         {"pY1", v.pY1},     {"pY2", v.pY2},
      {"pZ1", v.pZ1},       {"pZ2", v.pZ2},       {"pT", v.pT},       {"alpha1", v.alpha1},
      {"alpha2", v.alpha2}, {"theta", v.theta},   {"q1", v.q1},       {"q2", v.q2},
      {"theta_tilde", v.theta_tilde}, {"beta1", v.beta1}, {"beta2", v.beta2}, {"gamma", v.gamma},
  };
  for (const auto& [k, x] : rows) os << k << "=" << fmt17(x) << "\n";
  return os.str();
}

}  // namespace papevo
