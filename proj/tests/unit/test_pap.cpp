#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "papevo/pap.hpp"

using namespace papevo;

namespace {

double qp(double t) { return 0.5 * (std::sin(t) + std::sin(std::numbers::sqrt2 * t)); }

}  // namespace

TEST(TimeGrid, Validation) {
  EXPECT_THROW(TimeGrid(0.0, 1.0, 4), InvalidArgument);
  EXPECT_THROW(TimeGrid(1.0, 0.0, 8), InvalidArgument);
  const TimeGrid g(-1.0, 1.0, 8);
  EXPECT_DOUBLE_EQ(g.dt(), 0.25);
  EXPECT_EQ(g.count(), 9u);
}

TEST(Defect, IdentitiesOnPeriodicSignal) {
  const TimeGrid g(0.0, 20 * std::numbers::pi, 1000);
  const auto f = Trajectory::scalar(g, [](double t) { return std::cos(t); });
  EXPECT_EQ(translation_defect_steps(f, 0), 0.0);
  EXPECT_LT(translation_defect(f, 2 * std::numbers::pi), 1e-12);
  EXPECT_NEAR(translation_defect(f, std::numbers::pi), 2.0, 1e-12);
  for (int k : {3, 17, 120}) EXPECT_EQ(translation_defect_steps(f, k), translation_defect_steps(f, -k));
}

TEST(Defect, StopsEarlyAtThreshold) {
  const TimeGrid g(0.0, 50.0, 500);
  const auto f = Trajectory::scalar(g, [](double t) { return std::sin(t); });
  const double full = translation_defect_steps(f, 31);
  const double early = translation_defect_steps(f, 31, 0.1);
  EXPECT_GE(early, 0.1);
  EXPECT_LE(early, full);
}

TEST(APTest, AcceptsQuasiPeriodicSignal) {
  const TimeGrid g(-300.0, 300.0, 6000);
  const auto f = Trajectory::scalar(g, qp);
  const auto rep = ap_test(f, 0.25, 100.0);
  ASSERT_TRUE(rep.passed());
  EXPECT_LE(*rep.inclusion_length, 100.0);
  EXPECT_TRUE(std::is_sorted(rep.almost_periods.begin(), rep.almost_periods.end()));
  for (double T : rep.almost_periods) EXPECT_LE(translation_defect(f, T), 0.25);
}

TEST(APTest, RejectsChirp) {
  const TimeGrid g(-200.0, 200.0, 8000);
  const auto f = Trajectory::scalar(g, [](double t) { return std::sin(0.05 * t * t); });
  EXPECT_FALSE(ap_test(f, 0.2, 50.0).passed());
}

TEST(MeanValue, DecayMatchesArctanOracle) {
  // (1/2L) int_{-L}^{L} dt / (1 + t^2) = atan(L) / L.
  const TimeGrid g(-200.0, 200.0, 40000);
  const auto f = Trajectory::scalar(g, [](double t) { return 1.0 / (1.0 + t * t); });
  const std::vector<double> L{10, 20, 40, 80, 160};
  const auto c = mean_value_curve(f, L);
  for (std::size_t i = 0; i < L.size(); ++i) EXPECT_NEAR(c.values[i], std::atan(L[i]) / L[i], 1e-6);
  const auto r = pap0_evaluate(c);
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.slope, -1.0, 0.05);
}

TEST(MeanValue, PeriodicSignalIsNotErgodicZero) {
  const TimeGrid g(-200.0, 200.0, 8000);
  const auto f = Trajectory::scalar(g, qp);
  EXPECT_FALSE(pap0_test(mean_value_curve(f, {10, 20, 40, 80, 160})));
}

TEST(MeanValue, NeedsEnoughWindows) {
  const TimeGrid g(-50.0, 50.0, 1000);
  const auto f = Trajectory::scalar(g, [](double) { return 0.0; });
  EXPECT_THROW(pap0_evaluate(mean_value_curve(f, {10, 20})), InvalidArgument);
}

TEST(Synthesis, SumAndTag) {
  const TimeGrid g(-10.0, 10.0, 200);
  const auto a = Trajectory::scalar(g, qp);
  const auto b = Trajectory::scalar(g, [](double t) { return 1.0 / (1.0 + t * t); });
  const auto f = pap_synthesize(a, b);
  EXPECT_EQ(f.tag(), "pap");
  EXPECT_DOUBLE_EQ(f[50][0].real(), a[50][0].real() + b[50][0].real());
}

TEST(TrajectoryIO, RoundTripIsExact) {
  const GridSpec s(2, 4, 1.0);
  const TimeGrid g(0.0, 1.0, 8);
  const Field u = tensor_bump(s, {0.1, 0.0, 0.0}, {0.9, 0.8, 1.0});
  auto f = Trajectory::separable(g, u, [](double t) { return cplx{std::cos(t), std::sin(3 * t)}; },
                                 LorentzExponents::weak(2.0));
  std::stringstream ss;
  write_trajectory(ss, f);
  const auto back = read_trajectory(ss, LorentzExponents::weak(2.0));
  ASSERT_EQ(back.size(), f.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(back[k][i], f[k][i]);
  }
  std::stringstream bad("PAPTRAJ 2 4 1 0 1 8\n1 2\n");
  EXPECT_THROW(read_trajectory(bad, LorentzExponents::weak(2.0)), InvalidArgument);
}
