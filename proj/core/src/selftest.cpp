#include <cmath>
#include <numbers>

#include "fault.hpp"
#include "papevo/experiment.hpp"
#include "papevo/interp.hpp"
#include "papevo/mild.hpp"
#include "papevo/pap.hpp"
#include "papevo/semigroup.hpp"

namespace papevo {

namespace {

double rel_diff(const Field& a, const Field& b) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return num / den;
}

Check upper(std::string name, double measured, double threshold) {
  return {std::move(name), measured, threshold, measured <= threshold};
}

double law_defect(const Semigroup& sg, const Field& u, double s, double t) {
  return rel_diff(sg.apply(s, sg.apply(t, u)), sg.apply(s + t, u));
}

class FaultGuard {
 public:
  explicit FaultGuard(SelftestFault f) {
    if (f == SelftestFault::kernel_constant) detail::set_kernel_constant_scale(1.01);
  }
  ~FaultGuard() { detail::set_kernel_constant_scale(1.0); }
  FaultGuard(const FaultGuard&) = delete;
  FaultGuard& operator=(const FaultGuard&) = delete;
};

}  // namespace

SelftestResult selftest(SelftestFault fault) {
  const FaultGuard guard(fault);
  SelftestResult res;
  auto& out = res.checks;

  {
    const GridSpec g(1, 4096, 1.0);
    const Field u = Field::sample(
        g, [](std::span<const double> x) { return cplx{std::pow(std::abs(x[0]), -0.5), 0.0}; }, SingularMask::zero);
    const double v = lorentz_norm(u, LorentzExponents::weak(2.0));
    out.push_back(upper("weak_norm_oracle", std::abs(v - std::numbers::sqrt2) / std::numbers::sqrt2, 0.15));
  }

  const GridSpec g1(1, 128, 8.0);
  const Field bump = tensor_bump(g1, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
  {
    const Semigroup k(SemigroupSpec(Coefficient::constant(1.0, 0.5), Backend::kernel, g1));
    const double m0 = bump.integral().real();
    const double m1 = k.apply(0.25, bump).integral().real();
    out.push_back(upper("kernel_mass", std::abs(m1 - m0) / m0, 1e-10));
    out.push_back(upper("kernel_semigroup_law", law_defect(k, bump, 0.1, 0.15), 1e-10));
  }
  {
    const Semigroup f(SemigroupSpec(Coefficient::constant({1.0, 0.3}, 0.5), Backend::fourier, g1));
    out.push_back(upper("fourier_semigroup_law", law_defect(f, bump, 0.2, 0.3), 1e-12));
  }
  {
    const GridSpec g(1, 32, 4.0);
    const Field b = Field::sample(g, [](std::span<const double> x) { return cplx{1.5 + std::sin(x[0]), 0.0}; });
    const Semigroup d(SemigroupSpec(Coefficient::variable(b, 0.5), Backend::dense, g));
    const Field u = tensor_bump(g, {0.0, 0.0, 0.0}, {1.5, 1.5, 1.5});
    out.push_back(upper("dense_semigroup_law", law_defect(d, u, 0.2, 0.3), 1e-9));
  }
  {
    const GridSpec g(1, 256, 10.0);
    const Field u = tensor_bump(g, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
    const Semigroup k(SemigroupSpec(Coefficient::constant(1.0, 0.5), Backend::kernel, g));
    const Semigroup f(SemigroupSpec(Coefficient::constant(1.0, 0.5), Backend::fourier, g));
    out.push_back(upper("kernel_vs_fourier", rel_diff(k.apply(0.5, u), f.apply(0.5, u)), 1e-8));
  }
  {
    const GridSpec g(1, 64, 4.0);
    const Semigroup f(SemigroupSpec(Coefficient::constant(1.0, 0.5), Backend::fourier, g));
    const Field u = tensor_bump(g, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
    const Field v = tensor_bump(g, {1.0, 0.0, 0.0}, {0.5, 1.0, 1.0});
    const TimeGrid window(0.0, 2.0, 16);
    const TimeGrid fg(-2.0, 2.0, 32);
    const auto f1 = Trajectory::separable(fg, u, [](double t) { return cplx{std::cos(t), 0.0}; },
                                          LorentzExponents::weak(2.0));
    const auto f2 = Trajectory::separable(fg, v, [](double t) { return cplx{1.0 / (1.0 + t * t), 0.0}; },
                                          LorentzExponents::weak(2.0));
    const auto lin = linearity_check(f, f1, f2, {0.7, -0.2}, HistoryQuadrature(2.0, 0.85, 1e-4), window);
    out.push_back(upper("solve_linearity", lin.defect / lin.scale, 1e-10));
  }
  {
    const int steps = 64 * 8;
    const TimeGrid tg(0.0, 8.0 * 2.0 * std::numbers::pi, steps);
    const auto f = Trajectory::scalar(tg, [](double t) { return std::sin(t); });
    out.push_back(upper("ap_defect_zero_shift", translation_defect_steps(f, 0), 0.0));
    out.push_back(upper("ap_defect_period", translation_defect_steps(f, 64), 1e-12));
    out.push_back(upper("ap_defect_symmetry",
                        std::abs(translation_defect_steps(f, 37) - translation_defect_steps(f, -37)), 0.0));
  }
  {
    const auto e = derive_application_exponents(3, 4, Rational(9));
    const bool exact = e.gamma == Rational(1, 6) && e.alpha1 == Rational(5, 4) && e.alpha2 == Rational(3, 4);
    out.push_back({"exponents_d3_m4_r9", e.v.gamma, 1.0 / 6.0, exact});
  }
  return res;
}

}  // namespace papevo
