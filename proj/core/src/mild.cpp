#include "papevo/mild.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "papevo/format.hpp"
#include "papevo/parallel.hpp"

namespace papevo {

std::string LinearSolveReport::to_csv() const {
  std::ostringstream os;
  os << "t,Y_norm,tail_estimate\n";
  const TimeGrid& g = trajectory.grid();
  for (std::size_t i = 0; i < y_norms.size(); ++i) {
    os << fmt17(g.time(static_cast<int>(i))) << ',' << fmt17(y_norms[i]) << ','
       << fmt17(tails.empty() ? 0.0 : tails[i]) << '\n';
  }
  return os.str();
}

LinearSolveReport solve_linear(const Semigroup& sg, const Trajectory& f, const HistoryQuadrature& quad,
                               const TimeGrid& out, const LinearSolveOptions& opts) {
  if (!(f.space() == sg.grid())) throw InvalidArgument("solve_linear: forcing lives on a different grid");
  const TimeGrid& fg = f.grid();
  const double fdt = fg.dt();
  const double slack = 1e-9 * fdt;
  if (out.t_max() > fg.t_max() + slack) throw InvalidArgument("solve_linear: forcing ends before the output window");
  if (opts.history == HistoryPolicy::require_coverage && out.t_min() - quad.H < fg.t_min() - slack) {
    throw InvalidArgument("solve_linear: forcing does not cover [t_min - H, t_max]");
  }

  const auto nodes = graded_nodes(quad);
  std::vector<Multiplier> mults;
  mults.reserve(nodes.size());
  for (const auto& nd : nodes) mults.push_back(sg.multiplier(nd.s));

  // Forcing snapshots that can be reached, transformed once.
  const double reach_lo = out.t_min() - quad.H;
  const int i_lo = std::max(0, static_cast<int>(std::floor((reach_lo - fg.t_min()) / fdt)) - 1);
  const int i_hi = std::min(fg.steps(), static_cast<int>(std::ceil((out.t_max() - fg.t_min()) / fdt)) + 1);
  std::vector<Modal> modal(static_cast<std::size_t>(fg.count()));
  parallel_for(static_cast<std::size_t>(i_hi - i_lo + 1), [&](std::size_t k) {
    const int i = i_lo + static_cast<int>(k);
    modal[i] = sg.to_modal(f[i]);
  });

  LinearSolveReport rep{Trajectory(out, sg.grid(), opts.y_norm), {}, {}, 0.0, 0.0, 0.0, 0.0, false};
  rep.y_norms.assign(out.count(), 0.0);
  if (opts.compute_tail) rep.tails.assign(out.count(), 0.0);

  parallel_for(out.count(), [&](std::size_t k) {
    const double t = out.time(static_cast<int>(k));
    Modal acc(sg.modal_size(), cplx{0.0, 0.0});
    Modal tail;
    if (opts.compute_tail) tail.assign(sg.modal_size(), cplx{0.0, 0.0});
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const double tau = t - nodes[j].s;
      const double x = (tau - fg.t_min()) / fdt;
      if (x < 0.0) {
        if (x > -1e-9) {
          sg.accumulate(mults[j], nodes[j].w, modal[0], acc);
          continue;
        }
        if (opts.history == HistoryPolicy::zero_before_start) continue;
        throw InvalidArgument("solve_linear: forcing history exhausted");
      }
      const int i = std::min(static_cast<int>(std::floor(x)), fg.steps() - 1);
      const double a = x - i;
      const cplx wa = nodes[j].w * (1.0 - a);
      const cplx wb = nodes[j].w * a;
      sg.accumulate(mults[j], wa, modal[i], wb, modal[i + 1], acc);
      if (opts.compute_tail && nodes[j].s >= 0.5 * quad.H) {
        sg.accumulate(mults[j], wa, modal[i], wb, modal[i + 1], tail);
      }
    }
    rep.trajectory[k] = sg.from_modal(acc);
    rep.y_norms[k] = lorentz_norm(rep.trajectory[k], opts.y_norm);
    if (opts.compute_tail) rep.tails[k] = lorentz_norm(sg.from_modal(tail), opts.y_norm);
  });

  for (double y : rep.y_norms) rep.sup_Y_norm = std::max(rep.sup_Y_norm, y);
  for (double y : rep.tails) rep.tail_estimate = std::max(rep.tail_estimate, y);
  for (int i = i_lo; i <= i_hi; ++i) {
    const double ti = fg.time(i);
    if (ti < reach_lo - slack || ti > out.t_max() + slack) continue;
    rep.forcing_sup_X_norm = std::max(rep.forcing_sup_X_norm, lorentz_norm(f[i], f.space_norm()));
  }
  rep.measured_Ltilde = rep.forcing_sup_X_norm > 0.0 ? rep.sup_Y_norm / rep.forcing_sup_X_norm : 0.0;
  rep.tail_warning = rep.tail_estimate > 0.1 * rep.sup_Y_norm;
  return rep;
}

LinearityReport linearity_check(const Semigroup& sg, const Trajectory& f1, const Trajectory& f2, cplx a,
                                const HistoryQuadrature& quad, const TimeGrid& window,
                                const LinearSolveOptions& opts, double rel_tol) {
  LinearSolveOptions o = opts;
  o.compute_tail = false;
  Trajectory combo = f1;
  combo *= a;
  combo += f2;
  const auto s12 = solve_linear(sg, combo, quad, window, o);
  const auto s1 = solve_linear(sg, f1, quad, window, o);
  const auto s2 = solve_linear(sg, f2, quad, window, o);
  LinearityReport rep;
  for (std::size_t k = 0; k < s12.trajectory.size(); ++k) {
    for (std::size_t i = 0; i < sg.grid().size(); ++i) {
      const cplx lhs = s12.trajectory[k][i];
      const cplx r1 = a * s1.trajectory[k][i];
      const cplx r2 = s2.trajectory[k][i];
      rep.defect = std::max(rep.defect, std::abs(lhs - r1 - r2));
      rep.scale = std::max({rep.scale, std::abs(lhs), std::abs(r1), std::abs(r2)});
    }
  }
  rep.ok = rep.defect <= rel_tol * std::max(rep.scale, 1e-300);
  return rep;
}

namespace {

Trajectory restrict_to(const Trajectory& g, const TimeGrid& window) {
  if (std::abs(window.dt() - g.grid().dt()) > 1e-9 * g.grid().dt()) {
    throw InvalidArgument("window time step must equal the signal's time step");
  }
  return g.slice(g.index_of(window.t_min()), g.index_of(window.t_max()));
}

}  // namespace

APPreservationReport ap_preservation_check(const Semigroup& sg, const Trajectory& g, double epsilon,
                                           const HistoryQuadrature& quad, const TimeGrid& window, double l_max,
                                           const LinearSolveOptions& opts, double safety) {
  APPreservationReport rep;
  rep.solve = solve_linear(sg, g, quad, window, opts);
  rep.Ltilde = rep.solve.measured_Ltilde;
  rep.epsilon_in = epsilon;
  rep.epsilon_out = epsilon * rep.Ltilde * safety;
  const Trajectory g_win = restrict_to(g, window);
  rep.input = ap_test(g_win, epsilon, l_max);
  if (rep.epsilon_out > 0.0) {
    rep.output = ap_test(rep.solve.trajectory, rep.epsilon_out, l_max);
  } else {
    // Zero output: every shift is an exact period.
    rep.output = ap_test(rep.solve.trajectory, std::numeric_limits<double>::min(), l_max);
  }
  std::vector<int> shifts;
  const double dt = window.dt();
  for (double T : rep.input.almost_periods) {
    if (T > 0.0) shifts.push_back(static_cast<int>(std::lround(T / dt)));
  }
  constexpr std::size_t kMaxShifts = 200;
  if (shifts.size() > kMaxShifts) {
    std::vector<int> sub;
    for (std::size_t i = 0; i < kMaxShifts; ++i) sub.push_back(shifts[i * shifts.size() / kMaxShifts]);
    shifts = std::move(sub);
  }
  const double floor_in = 1e-14 * std::max(g_win.sup_norm(), 1e-300);
  for (int k : shifts) {
    const double d_in = translation_defect_steps(g_win, k);
    if (d_in <= floor_in) continue;
    rep.amplification = std::max(rep.amplification, translation_defect_steps(rep.solve.trajectory, k) / d_in);
  }
  rep.passed = rep.input.passed() && rep.output.passed();
  return rep;
}

Pap0PreservationReport pap0_preservation_check(const Semigroup& sg, const Trajectory& phi,
                                               const HistoryQuadrature& quad, const std::vector<double>& L_list,
                                               const LinearSolveOptions& opts, double tol) {
  if (L_list.empty()) throw InvalidArgument("pap0_preservation_check: empty window list");
  const double L = L_list.back();
  const double dt = phi.grid().dt();
  const int steps = static_cast<int>(std::lround(2.0 * L / dt));
  const TimeGrid window(-L, L, steps);
  Pap0PreservationReport rep;
  rep.solve = solve_linear(sg, phi, quad, window, opts);
  rep.input_curve = mean_value_curve(phi, L_list);
  rep.output_curve = mean_value_curve(window, rep.solve.y_norms, L_list);
  rep.input = pap0_evaluate(rep.input_curve, tol);
  rep.output = pap0_evaluate(rep.output_curve, tol);
  rep.passed = rep.output.passed;
  return rep;
}

}  // namespace papevo
