#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "papevo/field.hpp"

namespace papevo {

/// Uniform time grid t_i = t_min + i*dt, i = 0..steps.
class TimeGrid {
 public:
  TimeGrid(double t_min, double t_max, int steps);

  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  int steps() const { return steps_; }
  double dt() const { return (t_max_ - t_min_) / steps_; }
  double time(int i) const { return t_min_ + i * dt(); }
  std::size_t count() const { return static_cast<std::size_t>(steps_) + 1; }

  bool operator==(const TimeGrid&) const = default;

 private:
  double t_min_;
  double t_max_;
  int steps_;
};

/// Time-indexed snapshots on a TimeGrid; space_norm says which X-norm is meant.
class Trajectory {
 public:
  /// Zero scalar signal on [0, 1] (placeholder for value types).
  Trajectory();
  Trajectory(TimeGrid grid, GridSpec space, LorentzExponents space_norm);
  Trajectory(TimeGrid grid, std::vector<Field> snapshots, LorentzExponents space_norm);

  /// Scalar signal carried on the one-point grid, normed by |.|.
  static Trajectory scalar(TimeGrid grid, const std::function<double(double)>& fn);
  /// f(t, x) = a(t) g(x).
  static Trajectory separable(TimeGrid grid, const Field& g, const std::function<cplx(double)>& a,
                              LorentzExponents space_norm);

  const TimeGrid& grid() const { return grid_; }
  const GridSpec& space() const { return space_; }
  const LorentzExponents& space_norm() const { return space_norm_; }
  void set_space_norm(LorentzExponents e) { space_norm_ = e; }
  const std::string& tag() const { return tag_; }
  void set_tag(std::string tag) { tag_ = std::move(tag); }

  std::size_t size() const { return snapshots_.size(); }
  const Field& operator[](std::size_t i) const { return snapshots_[i]; }
  Field& operator[](std::size_t i) { return snapshots_[i]; }
  const std::vector<Field>& snapshots() const { return snapshots_; }

  /// Per-snapshot space_norm values.
  std::vector<double> norms() const;
  double sup_norm() const;

  /// Snapshots first..last (inclusive) as a new trajectory.
  Trajectory slice(int first, int last) const;
  /// Index of a time on the grid; throws if t is not a grid point within 1e-9 dt.
  int index_of(double t) const;

  Trajectory& operator+=(const Trajectory& other);
  Trajectory& operator-=(const Trajectory& other);
  Trajectory& operator*=(cplx a);

 private:
  void require_compatible(const Trajectory& other) const;

  TimeGrid grid_;
  GridSpec space_;
  LorentzExponents space_norm_;
  std::vector<Field> snapshots_;
  std::string tag_;
};

/// Result of an epsilon-translation-number scan.
struct APReport {
  double epsilon = 0.0;
  double scan_range = 0.0;                   ///< shifts T scanned in [-scan_range, scan_range]
  std::optional<double> inclusion_length;    ///< empty = fail
  std::vector<double> almost_periods;        ///< sorted
  double max_gap = 0.0;
  bool passed() const { return inclusion_length.has_value(); }
};

struct MeanValueCurve {
  std::vector<double> window_lengths;
  std::vector<double> values;
};

/// sup over the overlap of ||f(t+T) - f(t)||_X; T is snapped to the grid.
double translation_defect(const Trajectory& f, double T);
/// Same with the shift given in grid steps; stops early once the running
/// sup reaches stop_at.
double translation_defect_steps(const Trajectory& f, int k,
                                double stop_at = std::numeric_limits<double>::infinity());

/// Scans T = k dt for |k| <= max_shift_steps (default: steps/2).
APReport ap_test(const Trajectory& f, double epsilon, double l_max, int max_shift_steps = -1);

/// M(L) = (1/2L) int_{-L}^{L} ||f(t)||_X dt (trapezoid, partial cells linear).
MeanValueCurve mean_value_curve(const Trajectory& f, const std::vector<double>& L_list);
MeanValueCurve mean_value_curve(const TimeGrid& grid, const std::vector<double>& norms,
                                const std::vector<double>& L_list);

inline constexpr double kPap0Tol = 1e-3;
inline constexpr double kPap0Slope = -0.5;

struct Pap0Result {
  bool passed = false;
  double slope = 0.0;
  double tail = 0.0;
};

/// Fitted log-log slope <= -0.5 or M(L_max) < tol.
Pap0Result pap0_evaluate(const MeanValueCurve& curve, double tol = kPap0Tol);
bool pap0_test(const MeanValueCurve& curve, double tol = kPap0Tol);

/// g + phi, tagged "pap".
Trajectory pap_synthesize(const Trajectory& ap_part, const Trajectory& ergodic_part);

/// PAPTRAJ text format.
void write_trajectory(std::ostream& os, const Trajectory& f);
Trajectory read_trajectory(std::istream& is, LorentzExponents space_norm);

}  // namespace papevo
