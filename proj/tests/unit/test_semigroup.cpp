#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "papevo/semigroup.hpp"

using namespace papevo;

namespace {

double rel_diff(const Field& a, const Field& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return num / den;
}

Semigroup make(Backend be, const GridSpec& g, cplx b = 1.0) {
  return Semigroup(SemigroupSpec(Coefficient::constant(b, 0.5), be, g));
}

cplx inner(const Field& a, const Field& b) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
  return s;
}

}  // namespace

TEST(Coefficient, Validation) {
  EXPECT_THROW(Coefficient::constant(0.4, 0.5), InvalidArgument);
  EXPECT_THROW(Coefficient::constant(1.0, 0.0), InvalidArgument);
  EXPECT_EQ(parse_backend("kernel"), Backend::kernel);
  EXPECT_THROW(parse_backend("spectral"), InvalidArgument);
}

TEST(Fourier, EigenmodeDecay) {
  const GridSpec g(2, 16, std::numbers::pi);
  const cplx b{1.0, 0.4};
  const auto sg = make(Backend::fourier, g, b);
  const Field u = Field::sample(g, [](std::span<const double> x) { return cplx{std::cos(2 * x[0]) * std::sin(x[1])}; });
  Field expect = u;
  expect *= std::exp(-0.3 * b * 5.0);
  EXPECT_LT(rel_diff(sg.apply(0.3, u), expect), 1e-13);
  Field gen = u;
  gen *= b * 5.0 * std::exp(-0.3 * b * 5.0);
  EXPECT_LT(rel_diff(sg.apply_generator(0.3, u), gen), 1e-12);
}

TEST(Kernel, MatchesClosedFormAwayFromTheBoundary) {
  const GridSpec g(1, 256, 10.0);
  const auto sg = make(Backend::kernel, g);
  Field delta(g);
  const std::size_t c = 128;
  delta[c] = 1.0 / g.spacing();
  const double t = 0.7;
  const Field v = sg.apply(t, delta);
  const auto y = g.position(c);
  for (std::size_t i = 100; i < 160; ++i) {
    const auto x = g.position(i);
    const cplx k = kernel_eval(sg.spec().coeff, t, std::span<const double>(x.data(), 1),
                               std::span<const double>(y.data(), 1));
    EXPECT_NEAR(v[i].real(), k.real(), 1e-12);
  }
}

TEST(Kernel, PreservesMassAndPositivity) {
  const GridSpec g(2, 32, 8.0);
  const auto sg = make(Backend::kernel, g);
  const Field u = tensor_bump(g, {0.5, -1.0, 0.0}, {1.0, 2.0, 1.0});
  const Field v = sg.apply(0.5, u);
  // Only the Gaussian tail beyond the box is lost.
  EXPECT_NEAR(v.integral().real(), u.integral().real(), 1e-8 * u.integral().real());
  for (const auto& x : v.values()) EXPECT_GE(x.real(), -1e-15);
}

TEST(Dense, MatchesMatrixExponential) {
  const GridSpec g(1, 16, 2.0);
  const Field b = Field::sample(g, [](std::span<const double> x) { return cplx{1.2 + std::cos(x[0]), 0.3}; });
  const Semigroup sg(SemigroupSpec(Coefficient::variable(b, 0.1), Backend::dense, g));
  const int n = 16;
  const double h2 = g.spacing() * g.spacing();
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    A(i, i) = 2.0 * b[i] / h2;
    A(i, (i + 1) % n) = -b[i] / h2;
    A(i, (i + n - 1) % n) = -b[i] / h2;
  }
  const Eigen::MatrixXcd E = (-0.2 * A).exp();
  const Field u = tensor_bump(g, {0.3, 0.0, 0.0}, {1.0, 1.0, 1.0});
  Eigen::VectorXcd x(n);
  for (int i = 0; i < n; ++i) x[i] = u[i];
  const Eigen::VectorXcd y = E * x;
  const Field v = sg.apply(0.2, u);
  for (int i = 0; i < n; ++i) EXPECT_NEAR(std::abs(v[i] - y[i]), 0.0, 1e-11);
}

TEST(Dense, RejectsLargeGrids) {
  const GridSpec g(3, 17, 1.0);
  EXPECT_THROW(make(Backend::dense, g), InvalidArgument);
}

class SemigroupLaw : public ::testing::TestWithParam<Backend> {};

TEST_P(SemigroupLaw, CompositionAndIdentity) {
  // The kernel backend is a lattice Gaussian truncated to the box: the law
  // holds while the spread stays well above h and well inside the box.
  const bool kernel = GetParam() == Backend::kernel;
  const GridSpec g(GetParam() == Backend::dense ? 1 : 2, kernel ? 64 : 16, kernel ? 10.0 : 4.0);
  const auto sg = make(GetParam(), g, {1.0, 0.2});
  const Field u = tensor_bump(g, {0.2, -0.1, 0.0}, {1.2, 0.9, 1.0});
  for (auto [s, t] : {std::pair{0.1, 0.2}, {0.2, 0.3}, {0.3, 0.5}}) {
    EXPECT_LT(rel_diff(sg.apply(s, sg.apply(t, u)), sg.apply(s + t, u)), 1e-10);
  }
  EXPECT_LT(rel_diff(sg.apply(0.0, u), u), 1e-13);
}

TEST_P(SemigroupLaw, AdjointIdentity) {
  const GridSpec g(1, 16, 4.0);
  const auto sg = make(GetParam(), g, {1.0, 0.3});
  const auto adj = sg.adjoint();
  const Field u = tensor_bump(g, {0.2, 0.0, 0.0}, {1.5, 1.0, 1.0});
  Field v = tensor_bump(g, {-0.6, 0.0, 0.0}, {1.0, 1.0, 1.0});
  v *= cplx{0.3, 1.0};
  const cplx lhs = inner(sg.apply(0.4, u), v);
  const cplx rhs = inner(u, adj.apply(0.4, v));
  EXPECT_LT(std::abs(lhs - rhs), 1e-12 * std::abs(lhs));
}

INSTANTIATE_TEST_SUITE_P(Backends, SemigroupLaw, ::testing::Values(Backend::fourier, Backend::kernel, Backend::dense),
                         [](const auto& info) { return to_string(info.param); });

TEST(Smoothing, FourierRatesFollowDimensionalScaling) {
  // Free-space rate (d/2)(1/p - 1/q) for t well inside (h^2, R^2).
  const GridSpec g(2, 64, 16.0);
  const auto sg = make(Backend::kernel, g);
  const auto rep = smoothing_measurement(sg, LorentzExponents::weak(1.5), LorentzExponents::weak(6.0),
                                         {0.5, 1.0, 2.0, 4.0, 8.0}, 6, 3);
  EXPECT_NEAR(rep.fitted_exponent, -(1 / 1.5 - 1 / 6.0), 0.1);
}

TEST(Smoothing, RandomBumpIsDeterministic) {
  const GridSpec g(3, 16, 4.0);
  const Field a = random_bump(g, 42, 1.0);
  const Field b = random_bump(g, 42, 1.0);
  EXPECT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  EXPECT_GT(a.max_abs(), 0.0);
  EXPECT_GT(random_bump(g, 1, 1e-6).max_abs(), 0.0);
}

TEST(Smoothing, ValidatesSamples) {
  const GridSpec g(1, 16, 4.0);
  const auto sg = make(Backend::fourier, g);
  const auto X = LorentzExponents::weak(2.0), Y = LorentzExponents::weak(4.0);
  EXPECT_THROW(smoothing_measurement(sg, X, Y, {1.0, 2.0}, 2, 0), InvalidArgument);
  EXPECT_THROW(smoothing_measurement(sg, X, Y, {2.0, 1.0, 30.0}, 2, 0), InvalidArgument);
  EXPECT_THROW(smoothing_measurement(sg, Y, X, {1.0, 10.0}, 2, 0), InvalidArgument);
}

TEST(DualIntegral, SingleModeClosedForm) {
  // psi = cos x on a periodic box: ||e^{-tA'} psi|| = e^{-t} ||psi||, integral (1 - e^{-H}) ||psi||.
  const GridSpec g(1, 32, std::numbers::pi);
  const auto sg = make(Backend::fourier, g);
  const Field psi = Field::sample(g, [](std::span<const double> x) { return cplx{std::cos(x[0])}; });
  const auto e = LorentzExponents(4.0, 1.0);
  const double H = 5.0;
  const double v = dual_time_integral(sg, psi, e, HistoryQuadrature(H, 0.97, 1e-8));
  EXPECT_NEAR(v, (1 - std::exp(-H)) * lorentz_norm(psi, e), 1e-4 * v);
}
