#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "papevo/mild.hpp"

using namespace papevo;

namespace {

const LorentzExponents kX = LorentzExponents::weak(1.5);
const LorentzExponents kY = LorentzExponents::weak(3.0);

Semigroup periodic(const GridSpec& g) {
  return Semigroup(SemigroupSpec(Coefficient::constant(1.0, 0.5), Backend::fourier, g));
}

Field cos_mode(const GridSpec& g) {
  return Field::sample(g, [](std::span<const double> x) { return cplx{std::cos(x[0])}; });
}

LinearSolveOptions y_opts() {
  LinearSolveOptions o;
  o.y_norm = kY;
  return o;
}

}  // namespace

TEST(SolveLinear, ConstantForcingOnAnEigenmode) {
  // f = phi with A phi = phi: u = (1 - e^{-H}) phi for the truncated history.
  const GridSpec g(1, 32, std::numbers::pi);
  const auto sg = periodic(g);
  const Field phi = cos_mode(g);
  const double H = 6.0;
  const TimeGrid fg(-8.0, 2.0, 40);
  const TimeGrid window(0.0, 2.0, 8);
  const auto f = Trajectory::separable(fg, phi, [](double) { return cplx{1.0}; }, kX);
  const auto rep = solve_linear(sg, f, HistoryQuadrature(H, 0.99, 1e-9), window, y_opts());
  for (std::size_t k = 0; k < window.count(); ++k) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_NEAR(rep.trajectory[k][i].real(), (1 - std::exp(-H)) * phi[i].real(), 2e-5);
    }
  }
  EXPECT_NEAR(rep.measured_Ltilde, rep.sup_Y_norm / rep.forcing_sup_X_norm, 1e-15);
  EXPECT_GE(rep.tail_estimate, 0.0);
  EXPECT_NE(rep.to_csv().find("t,Y_norm,tail_estimate\n"), std::string::npos);
}

TEST(SolveLinear, HarmonicForcingMatchesResolvent) {
  const GridSpec g(1, 64, std::numbers::pi);
  const auto sg = periodic(g);
  const Field phi = cos_mode(g);
  const double w = 2.0;
  const TimeGrid window(0.0, std::numbers::pi, 256);
  const double dt = window.dt();
  const int extra = 6400;  // history of about 78, e^{-H} negligible
  const TimeGrid fg(-extra * dt, window.t_max(), 256 + extra);
  const auto f = Trajectory::separable(fg, phi, [&](double t) { return cplx{std::cos(w * t)}; }, kX);
  const auto rep = solve_linear(sg, f, HistoryQuadrature(30.0, 0.99, 1e-7), window, y_opts());
  for (std::size_t k = 0; k < window.count(); k += 16) {
    const double t = window.time(static_cast<int>(k));
    const double amp = (std::cos(w * t) + w * std::sin(w * t)) / (1 + w * w);
    for (std::size_t i = 0; i < g.size(); i += 7) EXPECT_NEAR(rep.trajectory[k][i].real(), amp * phi[i].real(), 2e-4);
  }
}

TEST(SolveLinear, RequiresHistoryCoverage) {
  const GridSpec g(1, 16, 2.0);
  const auto sg = periodic(g);
  const TimeGrid fg(0.0, 2.0, 16);
  const auto f = Trajectory::separable(fg, cos_mode(g), [](double) { return cplx{1.0}; }, kX);
  EXPECT_THROW(solve_linear(sg, f, HistoryQuadrature(1.0), TimeGrid(0.5, 2.0, 12)), InvalidArgument);
  LinearSolveOptions zero = y_opts();
  zero.history = HistoryPolicy::zero_before_start;
  EXPECT_NO_THROW(solve_linear(sg, f, HistoryQuadrature(1.0), TimeGrid(0.5, 2.0, 12), zero));
}

TEST(SolveLinear, LinearityProperty) {
  const GridSpec g(2, 16, 4.0);
  const Semigroup sg(SemigroupSpec(Coefficient::constant({1.0, 0.5}, 0.5), Backend::kernel, g));
  const TimeGrid fg(-3.0, 3.0, 24);
  const TimeGrid window(0.0, 3.0, 12);
  const Field u = tensor_bump(g, {0.0, 0.0, 0.0}, {1.0, 1.5, 1.0});
  const Field v = tensor_bump(g, {1.0, -1.0, 0.0}, {0.8, 0.8, 1.0});
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const double om = 0.5 + seed;
    const auto f1 = Trajectory::separable(fg, u, [&](double t) { return cplx{std::cos(om * t)}; }, kX);
    const auto f2 = Trajectory::separable(fg, v, [&](double t) { return cplx{1 / (1 + om * t * t)}; }, kX);
    const auto rep = linearity_check(sg, f1, f2, {0.3 * om, -1.0}, HistoryQuadrature(3.0, 0.85, 1e-4), window,
                                     y_opts());
    EXPECT_TRUE(rep.ok) << rep.defect / rep.scale;
  }
}

TEST(Preservation, AmplificationBoundedByOperatorNormOnAMode) {
  // On a single mode the solution operator is scalar convolution with e^{-s};
  // its operator norm in the sup norm is the constant-forcing gain.
  const GridSpec g(1, 16, std::numbers::pi);
  const auto sg = periodic(g);
  const Field phi = cos_mode(g);
  const double H = 20.0;
  const TimeGrid window(0.0, 200.0, 4000);
  const double dt = window.dt();
  const int extra = static_cast<int>(std::ceil(H / dt));
  const TimeGrid fg(-extra * dt, 200.0, 4000 + extra);
  const HistoryQuadrature q(H, 0.85, 1e-6);
  const auto g_ap = Trajectory::separable(
      fg, phi, [](double t) { return cplx{0.5 * (std::sin(t) + std::sin(std::numbers::sqrt2 * t))}; }, kX);
  const auto rep = ap_preservation_check(sg, g_ap, 0.25, q, window, 100.0, y_opts());
  EXPECT_TRUE(rep.passed);
  const auto c = Trajectory::separable(fg, phi, [](double) { return cplx{1.0}; }, kX);
  const double L_op = solve_linear(sg, c, q, window, y_opts()).measured_Ltilde;
  EXPECT_GT(rep.amplification, 0.0);
  EXPECT_LE(rep.amplification, L_op * (1 + 1e-6));
  EXPECT_LE(rep.Ltilde, L_op * (1 + 1e-6));
}

TEST(Preservation, ErgodicPartStaysErgodic) {
  const GridSpec g(1, 16, std::numbers::pi);
  const auto sg = periodic(g);
  const TimeGrid fg(-90.0, 80.0, 1700);
  const auto phi = Trajectory::separable(fg, cos_mode(g), [](double t) { return cplx{1 / (1 + t * t)}; }, kX);
  const auto rep = pap0_preservation_check(sg, phi, HistoryQuadrature(10.0), {10, 20, 40, 80}, y_opts());
  EXPECT_TRUE(rep.passed);
  EXPECT_LE(rep.output.slope, -0.5);
}
