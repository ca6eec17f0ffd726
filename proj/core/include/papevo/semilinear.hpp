#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "papevo/interp.hpp"
#include "papevo/mild.hpp"

namespace papevo {

/// A quantitative hypothesis of a theorem does not hold for the given input
/// (contraction precondition, divergence of an iteration).
class HypothesisFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// |u|^{m-1} u + F, pointwise per snapshot.
Trajectory nemytskii(const Trajectory& u, const Trajectory& F, int m);
/// |u|^{m-1} u for one field.
Field power_nonlinearity(const Field& u, int m);

struct PicardConfig {
  double rho = 0.0;
  int max_iters = 25;
  double tol = 1e-10;
  Trajectory forcing;  ///< F on the extended grid [t_min - H, t_max]
  ApplicationExponents exponents;
  double contraction_limit = 0.9;  ///< reject unless Ltilde * C < this
};

struct PicardReport {
  Trajectory solution;  ///< restricted to the requested window
  Trajectory extended;  ///< full fixed point on the forcing grid
  std::vector<double> increments;
  std::vector<double> ratios;
  double measured_ratio = 0.0;  ///< geometric mean of successive increment ratios
  double Ltilde = 0.0;
  double lipschitz = 0.0;            ///< C = m rho^{m-1}
  double contraction_constant = 0.0;  ///< Ltilde * C
  double forcing_sup_X = 0.0;
  double residual = 0.0;  ///< ||u - S(G(u))||_{inf,Y}
  bool converged = false;
  int iterations = 0;

  /// Columns iter,increment,ratio.
  std::string to_csv() const;
};

/// Calibration solve that measures Ltilde = sup||S(F)||_Y / sup||F||_X.
double calibrate_Ltilde(const Semigroup& sg, const Trajectory& F, const HistoryQuadrature& quad,
                        const ApplicationExponents& e);

/// Picard iteration u_{k+1} = S(G(u_k)), u_0 = 0, on the forcing grid with
/// zero history before its start. Throws HypothesisFailure if Ltilde C >=
/// contraction_limit, if Ltilde (||F|| + C rho) >= rho, or on divergence.
PicardReport picard_solve(const Semigroup& sg, const PicardConfig& cfg, const HistoryQuadrature& quad,
                          const TimeGrid& window);
/// Same with a known Ltilde (skips calibration).
PicardReport picard_solve(const Semigroup& sg, const PicardConfig& cfg, const HistoryQuadrature& quad,
                          const TimeGrid& window, double Ltilde);

/// u(t) = e^{-tA} u0 + int_0^t e^{-sA} G(t - s) ds on a window starting at 0;
/// the graded mesh is rebuilt with H = t for every output time.
Trajectory duhamel_forward(const Semigroup& sg, const Field& u0, const Trajectory& G, const HistoryQuadrature& quad,
                           const LorentzExponents& y_norm);

using Nonlinearity = std::function<Trajectory(const Trajectory&)>;

struct DuhamelIteration {
  Trajectory solution;
  std::vector<double> increments;
  bool converged = false;
};

/// Fixed point of v = e^{-tA} u0 + int_0^t e^{-(t-tau)A} N(v)(tau) dtau on grid
/// starting at 0, from v_0 = e^{-tA} u0. Throws HypothesisFailure on divergence.
DuhamelIteration duhamel_iterate(const Semigroup& sg, const Field& u0, const TimeGrid& grid,
                                 const Nonlinearity& N, const HistoryQuadrature& quad,
                                 const LorentzExponents& y_norm, double tol, int max_iters);

struct StabilityConfig {
  double T_end = 16.0;
  double r = 0.0;
  Field perturbation;  ///< u0 - uhat0
  double fit_lo = 1.0;
  double fit_hi = 16.0;
  double tol = 1e-10;
  int max_iters = 40;
};

struct StabilityReport {
  std::vector<double> t;
  std::vector<double> q_norms;
  std::vector<double> slopes_so_far;  ///< fit over [fit_lo, t] (nan before two points)
  double fitted_slope = 0.0;
  double fitted_constant = 0.0;  ///< D
  double gamma_predicted = 0.0;
  bool ok = false;
  int iterations = 0;

  /// Columns t,Q_norm,fitted_slope_so_far.
  std::string to_csv() const;
};

inline constexpr double kStabilitySlack = 0.1;

/// v = u - uhat from the perturbation equation; Q = L^{r, inf}.
/// uhat must live on a grid starting at 0 that reaches T_end.
StabilityReport stability_experiment(const Semigroup& sg, const Trajectory& uhat, const StabilityConfig& cfg,
                                     const ApplicationExponents& e, const HistoryQuadrature& quad);

}  // namespace papevo
