#pragma once

#include <string>
#include <vector>

#include "papevo/pap.hpp"
#include "papevo/quadrature.hpp"
#include "papevo/semigroup.hpp"

namespace papevo {

/// How the forcing is treated before its first snapshot.
enum class HistoryPolicy {
  require_coverage,   ///< forcing must cover [t_min - H, t_max]
  zero_before_start,  ///< forcing is 0 before its first snapshot
};

struct LinearSolveOptions {
  LorentzExponents y_norm = LorentzExponents::weak(2.0);
  HistoryPolicy history = HistoryPolicy::require_coverage;
  bool compute_tail = true;
};

struct LinearSolveReport {
  Trajectory trajectory;
  std::vector<double> y_norms;
  std::vector<double> tails;
  double sup_Y_norm = 0.0;
  double forcing_sup_X_norm = 0.0;
  double measured_Ltilde = 0.0;  ///< sup_Y_norm / forcing_sup_X_norm (0 for zero forcing)
  double tail_estimate = 0.0;    ///< sup_t ||contribution of s in [H/2, H]||_Y
  bool tail_warning = false;     ///< tail_estimate > 10% of sup_Y_norm

  /// Columns t,Y_norm,tail_estimate.
  std::string to_csv() const;
};

/// u(t) = sum_j w_j e^{-s_j A} f(t - s_j) over the graded mesh on (0, H],
/// f linear in time between snapshots. X-norm = f.space_norm().
LinearSolveReport solve_linear(const Semigroup& sg, const Trajectory& f, const HistoryQuadrature& quad,
                               const TimeGrid& out_window, const LinearSolveOptions& opts = {});

struct LinearityReport {
  double defect = 0.0;  ///< max |S(a f1 + f2) - a S(f1) - S(f2)|
  double scale = 0.0;
  bool ok = false;
};

LinearityReport linearity_check(const Semigroup& sg, const Trajectory& f1, const Trajectory& f2, cplx a,
                                const HistoryQuadrature& quad, const TimeGrid& window,
                                const LinearSolveOptions& opts = {}, double rel_tol = 1e-10);

inline constexpr double kApSafety = 1.5;

struct APPreservationReport {
  double Ltilde = 0.0;
  double epsilon_in = 0.0;
  double epsilon_out = 0.0;  ///< epsilon_in * Ltilde * safety
  APReport input;
  APReport output;
  double amplification = 0.0;  ///< sup_T defect_out(T) / defect_in(T) over tested almost periods
  bool passed = false;
  LinearSolveReport solve;
};

/// window.dt must equal g's dt and lie on g's time grid.
APPreservationReport ap_preservation_check(const Semigroup& sg, const Trajectory& g, double epsilon,
                                           const HistoryQuadrature& quad, const TimeGrid& window, double l_max,
                                           const LinearSolveOptions& opts = {}, double safety = kApSafety);

struct Pap0PreservationReport {
  MeanValueCurve input_curve;
  MeanValueCurve output_curve;
  Pap0Result input;
  Pap0Result output;
  bool passed = false;
  LinearSolveReport solve;
};

/// Output window is [-L_max, L_max] on phi's time step.
Pap0PreservationReport pap0_preservation_check(const Semigroup& sg, const Trajectory& phi,
                                               const HistoryQuadrature& quad, const std::vector<double>& L_list,
                                               const LinearSolveOptions& opts = {}, double tol = kPap0Tol);

}  // namespace papevo
