#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "papevo/semilinear.hpp"

using namespace papevo;

namespace {

struct SmallProblem {
  GridSpec grid{3, 8, std::numbers::pi};
  Semigroup sg{SemigroupSpec(Coefficient::constant(1.0, 0.5), Backend::kernel, GridSpec(3, 8, std::numbers::pi))};
  ApplicationExponents e = derive_application_exponents(3, 4, Rational(9));
  HistoryQuadrature quad{4.0, 0.85, 1e-3};
  TimeGrid window{0.0, 6.0, 12};
  TimeGrid fg{-4.0, 6.0, 20};

  Trajectory forcing(double amp) const {
    Field g0 = tensor_bump(grid, {0, 0, 0}, {1.5, 1.5, 1.5});
    g0 *= amp / lorentz_norm(g0, e.X());
    return Trajectory::separable(fg, g0, [](double t) { return cplx{std::cos(t)}; }, e.X());
  }
};

}  // namespace

TEST(Nonlinearity, PowerAndNemytskii) {
  const GridSpec g(1, 4, 1.0);
  const Field u(g, {cplx{2.0, 0.0}, cplx{-1.0, 0.0}, cplx{0.0, 3.0}, cplx{0.0, 0.0}});
  const Field p = power_nonlinearity(u, 4);
  EXPECT_EQ(p[0], cplx(16.0, 0.0));
  EXPECT_EQ(p[1], cplx(-1.0, 0.0));
  EXPECT_NEAR(std::abs(p[2] - cplx(0.0, 81.0)), 0.0, 1e-12);
  EXPECT_EQ(p[3], cplx(0.0, 0.0));
}

TEST(Picard, ContractionCertificate) {
  const SmallProblem s;
  PicardConfig cfg;
  cfg.exponents = s.e;
  cfg.forcing = s.forcing(0.5);
  const double Lt = calibrate_Ltilde(s.sg, cfg.forcing, s.quad, s.e);
  cfg.rho = std::pow(0.5 / (Lt * 4), 1.0 / 3.0);
  const auto rep = picard_solve(s.sg, cfg, s.quad, s.window, Lt);
  EXPECT_NEAR(rep.contraction_constant, 0.5, 1e-12);
  EXPECT_TRUE(rep.converged);
  for (double r : rep.ratios) {
    if (rep.increments.back() > 1e-13) EXPECT_LE(r, rep.contraction_constant + 0.05);
  }
  const double LC = rep.contraction_constant;
  EXPECT_LT(rep.residual, cfg.tol * (1 + LC) / (1 - LC));
  EXPECT_EQ(rep.solution.grid(), s.window);
  EXPECT_NE(rep.to_csv().find("iter,increment,ratio\n1,"), std::string::npos);
}

TEST(Picard, RejectsLargeBall) {
  const SmallProblem s;
  PicardConfig cfg;
  cfg.exponents = s.e;
  cfg.forcing = s.forcing(0.1);
  cfg.rho = 50.0;
  try {
    picard_solve(s.sg, cfg, s.quad, s.window, 0.2);
    FAIL() << "expected HypothesisFailure";
  } catch (const HypothesisFailure& ex) {
    EXPECT_NE(std::string(ex.what()).find("Ltilde*C < 0.9"), std::string::npos);
  }
}

TEST(Picard, RejectsLargeForcing) {
  const SmallProblem s;
  PicardConfig cfg;
  cfg.exponents = s.e;
  cfg.forcing = s.forcing(100.0);
  cfg.rho = 0.1;
  try {
    picard_solve(s.sg, cfg, s.quad, s.window, 0.2);
    FAIL() << "expected HypothesisFailure";
  } catch (const HypothesisFailure& ex) {
    EXPECT_NE(std::string(ex.what()).find("self-mapping"), std::string::npos);
  }
}

TEST(Duhamel, ZeroSourceIsFreeEvolution) {
  const SmallProblem s;
  const Field u0 = tensor_bump(s.grid, {0, 0, 0}, {1.0, 1.0, 1.0});
  const TimeGrid g(0.0, 2.0, 8);
  const auto out = duhamel_forward(s.sg, u0, Trajectory(g, s.grid, s.e.X()), s.quad, s.e.Y());
  for (std::size_t k = 0; k < g.count(); ++k) {
    const Field ref = s.sg.apply(g.time(static_cast<int>(k)), u0);
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(std::abs(out[k][i] - ref[i]), 0.0, 1e-13);
  }
}

TEST(Stability, PerturbationDecays) {
  const GridSpec g(3, 16, 6.0);
  const Semigroup sg(SemigroupSpec(Coefficient::constant(1.0, 0.5), Backend::kernel, g));
  const auto e = derive_application_exponents(3, 4, Rational(9));
  const TimeGrid tg(0.0, 10.0, 20);
  const Trajectory uhat(tg, g, e.Y());
  StabilityConfig cfg;
  cfg.T_end = 10.0;
  cfg.r = 9.0;
  cfg.fit_lo = 1.0;
  cfg.fit_hi = 10.0;
  cfg.perturbation = tensor_bump(g, {0, 0, 0}, {1.0, 1.0, 1.0});
  cfg.perturbation *= 0.05;
  const auto rep = stability_experiment(sg, uhat, cfg, e, HistoryQuadrature(4.0, 0.85, 1e-3));
  EXPECT_TRUE(rep.ok);
  EXPECT_NEAR(rep.gamma_predicted, 1.0 / 6.0, 1e-15);
  EXPECT_LT(rep.fitted_slope, -1.0 / 6.0);
  cfg.r = 4.0;
  EXPECT_THROW(stability_experiment(sg, uhat, cfg, e, HistoryQuadrature(4.0)), InvalidArgument);
}
