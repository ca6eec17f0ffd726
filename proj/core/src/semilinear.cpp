#include "papevo/semilinear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "papevo/fit.hpp"
#include "papevo/format.hpp"
#include "papevo/parallel.hpp"

namespace papevo {

Field power_nonlinearity(const Field& u, int m) {
  if (m < 2) throw InvalidArgument("nemytskii: m must be at least 2");
  Field out(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = std::abs(u[i]);
    out[i] = std::pow(a, m - 1) * u[i];
  }
  return out;
}

Trajectory nemytskii(const Trajectory& u, const Trajectory& F, int m) {
  if (!(u.grid() == F.grid()) || !(u.space() == F.space())) throw InvalidArgument("nemytskii: grid mismatch");
  Trajectory out = F;
  for (std::size_t k = 0; k < u.size(); ++k) out[k] += power_nonlinearity(u[k], m);
  return out;
}

namespace {

double sup_diff(const Trajectory& a, const Trajectory& b, const LorentzExponents& e) {
  std::vector<double> norms(a.size());
  parallel_for(a.size(), [&](std::size_t k) { norms[k] = lorentz_norm(a[k] - b[k], e); });
  double s = 0.0;
  for (double v : norms) s = std::max(s, v);
  return s;
}

LinearSolveOptions picard_opts(const ApplicationExponents& e) {
  LinearSolveOptions o;
  o.y_norm = e.Y();
  o.history = HistoryPolicy::zero_before_start;
  o.compute_tail = false;
  return o;
}

}  // namespace

std::string PicardReport::to_csv() const {
  std::ostringstream os;
  os << "iter,increment,ratio\n";
  for (std::size_t k = 0; k < increments.size(); ++k) {
    const double ratio = k == 0 ? std::numeric_limits<double>::quiet_NaN() : ratios[k - 1];
    os << (k + 1) << ',' << fmt17(increments[k]) << ',' << fmt17(ratio) << '\n';
  }
  return os.str();
}

double calibrate_Ltilde(const Semigroup& sg, const Trajectory& F, const HistoryQuadrature& quad,
                        const ApplicationExponents& e) {
  Trajectory f = F;
  f.set_space_norm(e.X());
  if (f.sup_norm() == 0.0) {
    const Field g = random_bump(sg.grid(), 0, 1.0);
    f = Trajectory::separable(F.grid(), g, [](double) { return cplx{1.0, 0.0}; }, e.X());
  }
  return solve_linear(sg, f, quad, f.grid(), picard_opts(e)).measured_Ltilde;
}

PicardReport picard_solve(const Semigroup& sg, const PicardConfig& cfg, const HistoryQuadrature& quad,
                          const TimeGrid& window) {
  return picard_solve(sg, cfg, quad, window, calibrate_Ltilde(sg, cfg.forcing, quad, cfg.exponents));
}

PicardReport picard_solve(const Semigroup& sg, const PicardConfig& cfg, const HistoryQuadrature& quad,
                          const TimeGrid& window, double Ltilde) {
  if (!(cfg.rho > 0.0)) throw InvalidArgument("picard_solve: rho must be positive");
  if (cfg.max_iters < 1) throw InvalidArgument("picard_solve: max_iters must be positive");
  const ApplicationExponents& e = cfg.exponents;
  const int m = e.m;
  Trajectory F = cfg.forcing;
  F.set_space_norm(e.X());
  const TimeGrid& fg = F.grid();
  const int first = F.index_of(window.t_min());
  const int last = F.index_of(window.t_max());

  PicardReport rep{Trajectory(window, sg.grid(), e.Y()), Trajectory(fg, sg.grid(), e.Y()), {}, {}, 0.0, Ltilde,
                   0.0, 0.0, 0.0, 0.0, false, 0};
  rep.lipschitz = m * std::pow(cfg.rho, m - 1);
  rep.contraction_constant = Ltilde * rep.lipschitz;
  rep.forcing_sup_X = F.sup_norm();
  if (!(rep.contraction_constant < cfg.contraction_limit)) {
    throw HypothesisFailure("contraction precondition Ltilde*C < " + fmtg(cfg.contraction_limit, 6) +
                            " violated: Ltilde*C = " + fmtg(rep.contraction_constant, 6));
  }
  const double ball = Ltilde * (rep.forcing_sup_X + rep.lipschitz * cfg.rho);
  if (!(ball < cfg.rho)) {
    throw HypothesisFailure("self-mapping precondition Ltilde(||G(0)|| + C rho) < rho violated: " + fmtg(ball, 6) +
                            " >= " + fmtg(cfg.rho, 6));
  }

  const LinearSolveOptions opts = picard_opts(e);
  auto Phi = [&](const Trajectory& u) {
    Trajectory G = nemytskii(u, F, m);
    G.set_space_norm(e.X());
    return solve_linear(sg, G, quad, fg, opts).trajectory;
  };

  Trajectory u(fg, sg.grid(), e.Y());
  for (int k = 1; k <= cfg.max_iters; ++k) {
    Trajectory next = Phi(u);
    const double inc = sup_diff(next, u, e.Y());
    if (!std::isfinite(inc)) throw HypothesisFailure("Picard iteration produced non-finite values");
    rep.increments.push_back(inc);
    if (rep.increments.size() >= 2) {
      const double prev = rep.increments[rep.increments.size() - 2];
      rep.ratios.push_back(prev > 0.0 ? inc / prev : 0.0);
    }
    u = std::move(next);
    rep.iterations = k;
    if (inc < cfg.tol) {
      rep.converged = true;
      break;
    }
    const std::size_t s = rep.increments.size();
    if (s >= 3 && rep.increments[s - 1] >= rep.increments[s - 2] && rep.increments[s - 2] >= rep.increments[s - 3]) {
      throw HypothesisFailure("Picard increments are not decreasing (divergence)");
    }
  }
  rep.residual = sup_diff(Phi(u), u, e.Y());
  double log_sum = 0.0;
  int count = 0;
  for (double r : rep.ratios) {
    if (r > 0.0) {
      log_sum += std::log(r);
      ++count;
    }
  }
  rep.measured_ratio = count > 0 ? std::exp(log_sum / count) : 0.0;
  rep.extended = u;
  rep.solution = u.slice(first, last);
  return rep;
}

Trajectory duhamel_forward(const Semigroup& sg, const Field& u0, const Trajectory& G, const HistoryQuadrature& quad,
                           const LorentzExponents& y_norm) {
  const TimeGrid& g = G.grid();
  if (g.t_min() != 0.0) throw InvalidArgument("duhamel_forward: window must start at 0");
  if (!(G.space() == sg.grid()) || !(u0.grid() == sg.grid())) {
    throw InvalidArgument("duhamel_forward: grid mismatch");
  }
  const double dt = g.dt();
  std::vector<Modal> modal(g.count());
  parallel_for(g.count(), [&](std::size_t i) { modal[i] = sg.to_modal(G[i]); });
  const Modal c0 = sg.to_modal(u0);

  Trajectory out(g, sg.grid(), y_norm);
  out[0] = u0;
  parallel_for(g.count() - 1, [&](std::size_t k0) {
    const int k = static_cast<int>(k0) + 1;
    const double t = g.time(k);
    Modal acc(sg.modal_size(), cplx{0.0, 0.0});
    sg.accumulate(sg.multiplier(t), 1.0, c0, acc);
    for (const auto& nd : graded_nodes(quad, t)) {
      const double x = std::max(0.0, (t - nd.s) / dt);
      const int i = std::min(static_cast<int>(std::floor(x)), g.steps() - 1);
      const double a = x - i;
      sg.accumulate(sg.multiplier(nd.s), nd.w * (1.0 - a), modal[i], nd.w * a, modal[i + 1], acc);
    }
    out[k] = sg.from_modal(acc);
  });
  return out;
}

DuhamelIteration duhamel_iterate(const Semigroup& sg, const Field& u0, const TimeGrid& grid, const Nonlinearity& N,
                                 const HistoryQuadrature& quad, const LorentzExponents& y_norm, double tol,
                                 int max_iters) {
  DuhamelIteration it{duhamel_forward(sg, u0, Trajectory(grid, sg.grid(), y_norm), quad, y_norm), {}, false};
  for (int k = 0; k < max_iters; ++k) {
    Trajectory next = duhamel_forward(sg, u0, N(it.solution), quad, y_norm);
    const double inc = sup_diff(next, it.solution, y_norm);
    const double scale = next.sup_norm();
    if (!std::isfinite(inc) || !std::isfinite(scale)) {
      throw HypothesisFailure("forward Duhamel iteration produced non-finite values (perturbation too large)");
    }
    it.increments.push_back(inc);
    it.solution = std::move(next);
    if (inc <= tol * std::max(scale, std::numeric_limits<double>::min())) {
      it.converged = true;
      break;
    }
    const std::size_t s = it.increments.size();
    if (s >= 3 && it.increments[s - 1] >= it.increments[s - 2] && it.increments[s - 2] >= it.increments[s - 3]) {
      throw HypothesisFailure("forward Duhamel iteration diverges (perturbation too large)");
    }
  }
  return it;
}

std::string StabilityReport::to_csv() const {
  std::ostringstream os;
  os << "t,Q_norm,fitted_slope_so_far\n";
  for (std::size_t k = 0; k < t.size(); ++k) {
    os << fmt17(t[k]) << ',' << fmt17(q_norms[k]) << ',' << fmt17(slopes_so_far[k]) << '\n';
  }
  return os.str();
}

StabilityReport stability_experiment(const Semigroup& sg, const Trajectory& uhat, const StabilityConfig& cfg,
                                     const ApplicationExponents& e, const HistoryQuadrature& quad) {
  if (!(cfg.r > e.d * (e.m - 1) / 2.0)) throw InvalidArgument("stability: r > d(m-1)/2 violated");
  if (!(cfg.fit_hi >= 10.0 * cfg.fit_lo * (1.0 - 1e-12))) {
    throw InvalidArgument("stability: fit window must span at least one decade");
  }
  if (uhat.grid().t_min() != 0.0) throw InvalidArgument("stability: uhat must start at t = 0");
  const int last = uhat.index_of(cfg.T_end);
  const Trajectory base = last == uhat.grid().steps() ? uhat : uhat.slice(0, last);
  const int m = e.m;
  const LorentzExponents Q = LorentzExponents::weak(cfg.r);

  std::vector<Field> base_power(base.size(), Field(sg.grid()));
  for (std::size_t k = 0; k < base.size(); ++k) base_power[k] = power_nonlinearity(base[k], m);
  const Nonlinearity N = [&](const Trajectory& v) {
    Trajectory out(v.grid(), sg.grid(), e.X());
    for (std::size_t k = 0; k < v.size(); ++k) {
      out[k] = power_nonlinearity(v[k] + base[k], m);
      out[k] -= base_power[k];
    }
    return out;
  };

  const auto it = duhamel_iterate(sg, cfg.perturbation, base.grid(), N, quad, e.Y(), cfg.tol, cfg.max_iters);
  if (!it.converged) throw HypothesisFailure("stability: perturbation iteration did not converge");

  StabilityReport rep;
  rep.iterations = static_cast<int>(it.increments.size());
  rep.gamma_predicted = 1.0 / (m - 1) - e.d / (2.0 * cfg.r);
  std::vector<double> fx, fy;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < it.solution.size(); ++k) {
    const double t = base.grid().time(static_cast<int>(k));
    const double q = lorentz_norm(it.solution[k], Q);
    rep.t.push_back(t);
    rep.q_norms.push_back(q);
    if (t >= cfg.fit_lo - 1e-12 && t <= cfg.fit_hi + 1e-12 && q > 0.0) {
      fx.push_back(t);
      fy.push_back(q);
    }
    rep.slopes_so_far.push_back(fx.size() >= 2 && fx.back() > fx.front() ? fit_power_law(fx, fy).exponent : nan);
  }
  if (fx.size() >= 2) {
    const auto fit = fit_power_law(fx, fy);
    rep.fitted_slope = fit.exponent;
    rep.fitted_constant = fit.constant;
  } else {
    // Zero perturbation: v vanishes identically.
    rep.fitted_slope = -std::numeric_limits<double>::infinity();
    rep.fitted_constant = 0.0;
  }
  rep.ok = rep.fitted_slope <= -rep.gamma_predicted + kStabilitySlack;
  return rep;
}

}  // namespace papevo
