#include "papevo/pap.hpp"

#include <algorithm>
#include <cmath>

#include "papevo/fit.hpp"

namespace papevo {

TimeGrid::TimeGrid(double t_min, double t_max, int steps) : t_min_(t_min), t_max_(t_max), steps_(steps) {
  if (!(t_min < t_max) || !std::isfinite(t_min) || !std::isfinite(t_max)) {
    throw InvalidArgument("TimeGrid: need t_min < t_max");
  }
  if (steps < 8) throw InvalidArgument("TimeGrid: need at least 8 steps");
}

Trajectory::Trajectory() : Trajectory(TimeGrid(0.0, 1.0, 8), GridSpec::scalar(), LorentzExponents::weak(2.0)) {}

Trajectory::Trajectory(TimeGrid grid, GridSpec space, LorentzExponents space_norm)
    : grid_(grid), space_(space), space_norm_(space_norm), snapshots_(grid.count(), Field(space)) {}

Trajectory::Trajectory(TimeGrid grid, std::vector<Field> snapshots, LorentzExponents space_norm)
    : grid_(grid),
      space_(snapshots.empty() ? GridSpec::scalar() : snapshots.front().grid()),
      space_norm_(space_norm),
      snapshots_(std::move(snapshots)) {
  if (snapshots_.size() != grid_.count()) {
    throw InvalidArgument("Trajectory: snapshot count must equal steps + 1");
  }
  for (const auto& s : snapshots_) {
    if (!(s.grid() == space_)) throw InvalidArgument("Trajectory: snapshots must share one grid");
  }
}

Trajectory Trajectory::scalar(TimeGrid grid, const std::function<double(double)>& fn) {
  Trajectory f(grid, GridSpec::scalar(), LorentzExponents::weak(2.0));
  for (std::size_t i = 0; i < f.size(); ++i) f[i][0] = fn(grid.time(static_cast<int>(i)));
  return f;
}

Trajectory Trajectory::separable(TimeGrid grid, const Field& g, const std::function<cplx(double)>& a,
                                 LorentzExponents space_norm) {
  Trajectory f(grid, g.grid(), space_norm);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = g;
    f[i] *= a(grid.time(static_cast<int>(i)));
  }
  return f;
}

std::vector<double> Trajectory::norms() const {
  std::vector<double> out(snapshots_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = lorentz_norm(snapshots_[i], space_norm_);
  return out;
}

double Trajectory::sup_norm() const {
  double m = 0.0;
  for (const auto& s : snapshots_) m = std::max(m, lorentz_norm(s, space_norm_));
  return m;
}

Trajectory Trajectory::slice(int first, int last) const {
  if (first < 0 || last > grid_.steps() || last - first < 8) {
    throw InvalidArgument("Trajectory::slice: range must hold at least 8 steps inside the grid");
  }
  TimeGrid g(grid_.time(first), grid_.time(last), last - first);
  std::vector<Field> snaps(snapshots_.begin() + first, snapshots_.begin() + last + 1);
  Trajectory out(g, std::move(snaps), space_norm_);
  out.tag_ = tag_;
  return out;
}

int Trajectory::index_of(double t) const {
  const double x = (t - grid_.t_min()) / grid_.dt();
  const double k = std::round(x);
  if (std::abs(x - k) > 1e-9 * std::max(1.0, std::abs(k)) || k < 0 || k > grid_.steps()) {
    throw InvalidArgument("Trajectory::index_of: time is not a grid point");
  }
  return static_cast<int>(k);
}

void Trajectory::require_compatible(const Trajectory& other) const {
  if (!(grid_ == other.grid_) || !(space_ == other.space_)) {
    throw InvalidArgument("Trajectory: time or space grid mismatch");
  }
}

Trajectory& Trajectory::operator+=(const Trajectory& other) {
  require_compatible(other);
  for (std::size_t i = 0; i < snapshots_.size(); ++i) snapshots_[i] += other.snapshots_[i];
  return *this;
}

Trajectory& Trajectory::operator-=(const Trajectory& other) {
  require_compatible(other);
  for (std::size_t i = 0; i < snapshots_.size(); ++i) snapshots_[i] -= other.snapshots_[i];
  return *this;
}

Trajectory& Trajectory::operator*=(cplx a) {
  for (auto& s : snapshots_) s *= a;
  return *this;
}

namespace {

double diff_norm(const Field& a, const Field& b, const LorentzExponents& e, std::vector<cplx>& scratch) {
  const std::size_t n = a.size();
  scratch.resize(n);
  for (std::size_t i = 0; i < n; ++i) scratch[i] = a[i] - b[i];
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = std::abs(scratch[i]);
  std::sort(s.begin(), s.end(), std::greater<>());
  return lorentz_norm_sorted(s, a.grid().cell_volume(), e);
}

// Coarse-to-fine visiting order so that large defects are usually met early.
std::vector<int> scan_order(int count) {
  std::vector<int> order;
  order.reserve(count);
  std::vector<char> seen(count, 0);
  for (int stride = 1 << 10; stride >= 1; stride >>= 2) {
    for (int i = 0; i < count; i += stride) {
      if (!seen[i]) {
        seen[i] = 1;
        order.push_back(i);
      }
    }
  }
  return order;
}

}  // namespace

double translation_defect_steps(const Trajectory& f, int k, double stop_at) {
  const int steps = f.grid().steps();
  if (std::abs(k) > steps) throw InvalidArgument("translation_defect: shift leaves no overlap");
  if (k == 0) return 0.0;
  const int shift = std::abs(k);
  const int count = steps + 1 - shift;
  std::vector<cplx> scratch;
  double sup = 0.0;
  for (int j : scan_order(count)) {
    // ||f(t+T) - f(t)|| is symmetric in the sign of T over the overlap.
    sup = std::max(sup, diff_norm(f[j + shift], f[j], f.space_norm(), scratch));
    if (sup >= stop_at) break;
  }
  return sup;
}

double translation_defect(const Trajectory& f, double T) {
  const double k = std::round(T / f.grid().dt());
  if (std::abs(k) > f.grid().steps()) throw InvalidArgument("translation_defect: shift leaves no overlap");
  return translation_defect_steps(f, static_cast<int>(k));
}

APReport ap_test(const Trajectory& f, double epsilon, double l_max, int max_shift_steps) {
  if (!(epsilon > 0.0)) throw InvalidArgument("ap_test: epsilon must be positive");
  const int steps = f.grid().steps();
  const int K = max_shift_steps < 0 ? steps / 2 : max_shift_steps;
  if (K > steps) throw InvalidArgument("ap_test: scan range exceeds trajectory support");
  const double dt = f.grid().dt();

  std::vector<char> good(static_cast<std::size_t>(K) + 1, 0);
  for (int k = 0; k <= K; ++k) good[k] = translation_defect_steps(f, k, epsilon) < epsilon;

  APReport rep;
  rep.epsilon = epsilon;
  rep.scan_range = K * dt;
  for (int k = K; k >= 1; --k) {
    if (good[k]) rep.almost_periods.push_back(-k * dt);
  }
  for (int k = 0; k <= K; ++k) {
    if (good[k]) rep.almost_periods.push_back(k * dt);
  }
  // Smallest l such that every window [a, a+l] inside the scan range meets an almost period.
  double gap = 0.0;
  double prev = -rep.scan_range;
  for (double T : rep.almost_periods) {
    gap = std::max(gap, T - prev);
    prev = T;
  }
  gap = std::max(gap, rep.scan_range - prev);
  rep.max_gap = gap;
  const double l = std::max(gap, dt);
  if (l <= l_max) rep.inclusion_length = l;
  return rep;
}

MeanValueCurve mean_value_curve(const TimeGrid& grid, const std::vector<double>& norms,
                                const std::vector<double>& L_list) {
  if (norms.size() != grid.count()) throw InvalidArgument("mean_value_curve: norm count mismatch");
  const double dt = grid.dt();
  auto value_at = [&](double t) {
    const double x = (t - grid.t_min()) / dt;
    int i = std::clamp(static_cast<int>(std::floor(x)), 0, grid.steps() - 1);
    const double a = x - i;
    return (1.0 - a) * norms[i] + a * norms[i + 1];
  };
  auto integrate = [&](double a, double b) {
    double sum = 0.0;
    const int i0 = std::clamp(static_cast<int>(std::floor((a - grid.t_min()) / dt)), 0, grid.steps() - 1);
    for (int i = i0; i < grid.steps(); ++i) {
      const double lo = std::max(a, grid.time(i));
      const double hi = std::min(b, grid.time(i + 1));
      if (hi <= lo) {
        if (grid.time(i) >= b) break;
        continue;
      }
      sum += 0.5 * (value_at(lo) + value_at(hi)) * (hi - lo);
    }
    return sum;
  };
  MeanValueCurve c;
  const double slack = 1e-9 * dt;
  for (std::size_t j = 0; j < L_list.size(); ++j) {
    const double L = L_list[j];
    if (!(L > 0.0)) throw InvalidArgument("mean_value_curve: window lengths must be positive");
    if (j > 0 && !(L > L_list[j - 1])) throw InvalidArgument("mean_value_curve: L must increase");
    if (-L < grid.t_min() - slack || L > grid.t_max() + slack) {
      throw InvalidArgument("mean_value_curve: window [-L, L] exceeds trajectory support");
    }
    const double lo = std::max(-L, grid.t_min());
    const double hi = std::min(L, grid.t_max());
    c.window_lengths.push_back(L);
    c.values.push_back(integrate(lo, hi) / (2.0 * L));
  }
  return c;
}

MeanValueCurve mean_value_curve(const Trajectory& f, const std::vector<double>& L_list) {
  return mean_value_curve(f.grid(), f.norms(), L_list);
}

Pap0Result pap0_evaluate(const MeanValueCurve& curve, double tol) {
  const auto& L = curve.window_lengths;
  const auto& M = curve.values;
  if (L.size() != M.size() || L.size() < 4) throw InvalidArgument("pap0_test: need at least 4 windows");
  if (L.back() < 8.0 * L.front()) throw InvalidArgument("pap0_test: windows must span a factor of 8");
  Pap0Result r;
  r.tail = M.back();
  bool positive = true;
  for (double m : M) positive = positive && m > 0.0;
  r.slope = positive ? fit_power_law(L, M).exponent : -std::numeric_limits<double>::infinity();
  r.passed = r.slope <= kPap0Slope || r.tail < tol;
  return r;
}

bool pap0_test(const MeanValueCurve& curve, double tol) { return pap0_evaluate(curve, tol).passed; }

Trajectory pap_synthesize(const Trajectory& ap_part, const Trajectory& ergodic_part) {
  Trajectory out = ap_part;
  out += ergodic_part;
  out.set_tag("pap");
  return out;
}

}  // namespace papevo
