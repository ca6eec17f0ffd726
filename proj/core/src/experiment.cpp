#include "papevo/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "papevo/format.hpp"
#include "papevo/interp.hpp"
#include "papevo/mild.hpp"
#include "papevo/pap.hpp"
#include "papevo/semigroup.hpp"
#include "papevo/semilinear.hpp"

namespace papevo {

bool ExperimentResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

namespace {

std::string check_lines(const std::vector<Check>& checks) {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << c.name << ' ' << fmtg(c.measured, 5) << ' ' << fmtg(c.threshold, 5) << ' ' << (c.pass ? "PASS" : "FAIL")
       << '\n';
  }
  return os.str();
}

}  // namespace

std::string ExperimentResult::summary() const {
  std::ostringstream os;
  os << "experiment " << experiment << '\n';
  for (const auto& [k, v] : notes) os << "# " << k << ' ' << fmtg(v, 10) << '\n';
  os << check_lines(checks);
  os << "result " << (passed() ? "PASS" : "FAIL") << '\n';
  return os.str();
}

bool SelftestResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string SelftestResult::summary() const {
  return check_lines(checks) + "result " + (passed() ? "PASS" : "FAIL") + "\n";
}

namespace {

// Reads keys and remembers which ones the experiment understands, so that
// everything else can be rejected before any computation starts.
class Keys {
 public:
  explicit Keys(const Config& c) : c_(c) {}

  double num(const std::string& k) { return use(k).get_double(k); }
  double num_or(const std::string& k, double fb) { return use(k).get_double_or(k, fb); }
  int integer(const std::string& k) { return use(k).get_int(k); }
  int integer_or(const std::string& k, int fb) { return use(k).get_int_or(k, fb); }
  std::string str(const std::string& k) { return use(k).get(k); }
  std::string str_or(const std::string& k, const std::string& fb) { return use(k).get_or(k, fb); }
  bool flag(const std::string& k) { return use(k).get_bool(k); }
  std::vector<double> list(const std::string& k) { return use(k).get_list(k); }
  bool has(const std::string& k) { return use(k).has(k); }
  bool is_auto(const std::string& k) { return use(k).has(k) && c_.get(k) == "auto"; }

  double positive(const std::string& k) {
    const double v = num(k);
    if (!(v > 0.0)) throw ConfigError(k + " must be positive");
    return v;
  }

  void finish() const {
    std::set<std::string> allowed = seen_;
    allowed.insert("experiment");
    allowed.insert("outdir");
    c_.reject_unknown(allowed);
  }

 private:
  const Config& use(const std::string& k) {
    seen_.insert(k);
    return c_;
  }

  const Config& c_;
  std::set<std::string> seen_;
};

Check check_le(std::string name, double measured, double threshold) {
  return {std::move(name), measured, threshold, measured <= threshold};
}

Check check_lt(std::string name, double measured, double threshold) {
  return {std::move(name), measured, threshold, measured < threshold};
}

cplx read_b(Keys& k) {
  const auto b = k.list("b");
  if (b.empty() || b.size() > 2) throw ConfigError("b must be 're' or 're,im'");
  return {b[0], b.size() == 2 ? b[1] : 0.0};
}

struct Physics {
  GridSpec grid = GridSpec::scalar();
  Backend backend = Backend::fourier;
  cplx b{1.0, 0.0};
  double delta = 0.0;
};

Physics read_physics(Keys& k) {
  Physics p;
  const int d = k.integer("d");
  const int n = k.integer("n");
  const double R = k.num("R");
  try {
    p.grid = GridSpec(d, n, R);
    p.backend = parse_backend(k.str("backend"));
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  p.b = read_b(k);
  p.delta = k.positive("delta");
  if (!(p.b.real() >= p.delta)) throw ConfigError("need Re b >= delta");
  return p;
}

Semigroup make_semigroup(const Physics& p) {
  return Semigroup(SemigroupSpec(Coefficient::constant(p.b, p.delta), p.backend, p.grid));
}

HistoryQuadrature read_quadrature(Keys& k) {
  const double H = k.positive("H");
  const double sigma = k.num_or("sigma", 0.85);
  const double t_floor = k.num_or("t_floor", 1e-6);
  try {
    return HistoryQuadrature(H, sigma, t_floor);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

ApplicationExponents read_exponents(Keys& k, int d) {
  const int m = k.integer("m");
  const double r = k.num("r");
  try {
    return derive_application_exponents(d, m, r);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

std::vector<double> geomspace(double a, double b, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = a * std::pow(b / a, count == 1 ? 0.0 : static_cast<double>(i) / (count - 1));
  }
  return out;
}

int history_steps(double H, double dt) { return static_cast<int>(std::ceil(H / dt - 1e-9)); }

TimeGrid make_window(double t_min, double t_max, double dt) {
  const int steps = static_cast<int>(std::lround((t_max - t_min) / dt));
  if (steps < 8 || std::abs(steps * dt - (t_max - t_min)) > 1e-9 * std::max(1.0, t_max - t_min)) {
    throw ConfigError("time window must be a multiple of dt with at least 8 steps");
  }
  return TimeGrid(t_min, t_max, steps);
}

// Window extended backwards by the quadrature history length.
TimeGrid extend_back(const TimeGrid& w, double H) {
  const int extra = history_steps(H, w.dt());
  return TimeGrid(w.t_min() - extra * w.dt(), w.t_max(), w.steps() + extra);
}

Field centered_bump(const GridSpec& g, double width, const LorentzExponents& norm) {
  Field u = tensor_bump(g, {0.0, 0.0, 0.0}, {width, width, width});
  const double nu = lorentz_norm(u, norm);
  if (!(nu > 0.0)) throw ConfigError("bump width is below the grid resolution");
  u *= 1.0 / nu;
  return u;
}

// sum over axes of cos(pi x_a / R), normalized in `norm`.
Field cos_sum(const GridSpec& g, const LorentzExponents& norm) {
  const double R = g.half_width();
  Field u = Field::sample(g, [&](std::span<const double> x) {
    double s = 0.0;
    for (double xa : x) s += std::cos(std::numbers::pi * xa / R);
    return cplx{s, 0.0};
  });
  u *= 1.0 / lorentz_norm(u, norm);
  return u;
}

double quasi_periodic(double t) { return 0.5 * (std::sin(t) + std::sin(std::numbers::sqrt2 * t)); }
double decay(double t) { return 1.0 / (1.0 + t * t); }

// ---------------------------------------------------------------- norms

ExperimentResult norms_experiment(Keys& k) {
  const int d = k.integer("d");
  const int n = k.integer("n");
  const double R = k.positive("R");
  const double p = k.num("p");
  const std::string q_text = k.str("q");
  const std::string field = k.str("field");
  const std::string mask_text = k.str("mask");
  const double expected = k.num("expected");
  const double rel_tol = k.positive("rel_tol");
  const double width = field == "bump" ? k.positive("width") : 0.0;
  k.finish();

  std::optional<GridSpec> grid;
  std::optional<LorentzExponents> e;
  try {
    grid.emplace(d, n, R);
    e.emplace(p, parse_number(q_text));
  } catch (const InvalidArgument& ex) {
    throw ConfigError(ex.what());
  }
  SingularMask mask;
  if (mask_text == "zero") {
    mask = SingularMask::zero;
  } else if (mask_text == "neighbor") {
    mask = SingularMask::neighbor;
  } else {
    throw ConfigError("mask must be zero or neighbor");
  }
  Field u(*grid);
  if (field == "power") {
    u = Field::sample(
        *grid,
        [&](std::span<const double> x) {
          double r2 = 0.0;
          for (double xa : x) r2 += xa * xa;
          return cplx{std::pow(std::sqrt(r2), -static_cast<double>(d) / p), 0.0};
        },
        mask);
  } else if (field == "bump") {
    u = tensor_bump(*grid, {0.0, 0.0, 0.0}, {width, width, width});
  } else {
    throw ConfigError("field must be power or bump");
  }

  ExperimentResult res;
  const double value = lorentz_norm(u, *e);
  res.notes.emplace_back("lorentz_norm", value);
  res.notes.emplace_back("layer_cake_norm", layer_cake_norm(u, *e));
  res.checks.push_back(check_le("lorentz_norm_rel_error", std::abs(value - expected) / std::abs(expected), rel_tol));

  // Level profile s mu(|u| > s)^{1/p}.
  std::ostringstream os;
  os << "level,distribution,weak_profile\n";
  const double top = u.max_abs();
  if (top > 0.0) {
    const auto sorted = decreasing_rearrangement(u);
    double low = top;
    for (double v : sorted) {
      if (v > 0.0) low = v;
    }
    for (double s : geomspace(low, top, 64)) {
      const double mu = distribution_function(u, s * (1.0 - 1e-12));
      os << fmt17(s) << ',' << fmt17(mu) << ',' << fmt17(s * std::pow(mu, 1.0 / p)) << '\n';
    }
  }
  res.csv = os.str();
  return res;
}

// ---------------------------------------------------------------- exponents

ExperimentResult exponents_experiment(Keys& k) {
  const int d = k.integer("d");
  const auto e = read_exponents(k, d);
  std::map<std::string, std::optional<double>> expect;
  for (const char* name : {"gamma", "alpha1", "alpha2", "beta1", "beta2", "theta_tilde"}) {
    const std::string key = std::string("expect_") + name;
    expect[name] = k.has(key) ? std::optional<double>(k.num(key)) : std::nullopt;
  }
  k.finish();

  const auto& v = e.v;
  const std::map<std::string, double> value{{"gamma", v.gamma},           {"alpha1", v.alpha1}, {"alpha2", v.alpha2},
                                            {"beta1", v.beta1},           {"beta2", v.beta2},
                                            {"theta_tilde", v.theta_tilde}};
  ExperimentResult res;
  constexpr double kTol = 1e-12;
  for (const char* name : {"gamma", "alpha1", "alpha2", "beta1", "beta2", "theta_tilde"}) {
    if (!expect[name]) continue;
    const double x = value.at(name);
    const double want = *expect[name];
    res.checks.push_back({name, x, want, std::abs(x - want) <= kTol * std::max(1.0, std::abs(want))});
  }
  const double pX = v.pX;
  const double d2 = d / 2.0;
  res.checks.push_back(check_le("alpha_balance_defect",
                                std::abs((1 - v.theta) * v.alpha1 + v.theta * v.alpha2 - 1.0), kTol));
  res.checks.push_back(check_le("alpha1_scaling_defect", std::abs(d2 * (1 / pX - 1 / v.pY1) - v.alpha1), kTol));
  res.checks.push_back(check_le("alpha2_scaling_defect", std::abs(d2 * (1 / pX - 1 / v.pY2) - v.alpha2), kTol));
  res.checks.push_back(check_le("beta_balance_defect",
                                std::abs((1 - v.theta_tilde) * v.beta1 + v.theta_tilde * v.beta2 - 1.0), kTol));
  res.checks.push_back(check_le("interpolated_Y_defect",
                                std::abs(interpolate_exponent(v.pY1, v.pY2, v.theta) - v.pY) / v.pY, kTol));

  std::ostringstream os;
  os << "name,value\n";
  std::istringstream kv(e.to_key_value());
  for (std::string line; std::getline(kv, line);) {
    const auto eq = line.find('=');
    os << line.substr(0, eq) << ',' << line.substr(eq + 1) << '\n';
  }
  res.csv = os.str();
  return res;
}

// ---------------------------------------------------------------- pap-test

ExperimentResult pap_test_experiment(Keys& k) {
  const std::string signal = k.str("signal");
  const double t_min = k.num("t_min");
  const double t_max = k.num("t_max");
  const int steps = k.integer("steps");
  const double epsilon = k.positive("epsilon");
  const double l_max = k.positive("l_max");
  const auto L_list = k.list("L_list");
  const double tol = k.num_or("tol", kPap0Tol);
  const bool expect_ap = k.flag("expect_ap");
  const bool expect_pap0 = k.flag("expect_pap0");
  k.finish();

  std::function<double(double)> fn;
  if (signal == "quasi-periodic") {
    fn = quasi_periodic;
  } else if (signal == "decay") {
    fn = decay;
  } else if (signal == "pap") {
    fn = [](double t) { return quasi_periodic(t) + decay(t); };
  } else if (signal == "chirp") {
    fn = [](double t) { return std::sin(0.05 * t * t); };
  } else {
    throw ConfigError("signal must be quasi-periodic, decay, pap or chirp");
  }
  std::optional<TimeGrid> grid;
  try {
    grid.emplace(t_min, t_max, steps);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (L_list.empty() || L_list.back() > std::min(-t_min, t_max)) {
    throw ConfigError("L_list must be non-empty and fit inside [t_min, t_max]");
  }

  const Trajectory f = Trajectory::scalar(*grid, fn);
  const APReport ap = ap_test(f, epsilon, l_max);
  const MeanValueCurve curve = mean_value_curve(f, L_list);
  const Pap0Result p0 = pap0_evaluate(curve, tol);

  ExperimentResult res;
  res.notes.emplace_back("almost_periods", static_cast<double>(ap.almost_periods.size()));
  res.notes.emplace_back("max_gap", ap.max_gap);
  res.notes.emplace_back("mean_value_tail", p0.tail);
  const double l = ap.inclusion_length.value_or(std::numeric_limits<double>::infinity());
  res.checks.push_back({expect_ap ? "ap_inclusion_length" : "ap_rejected_inclusion_length", l, l_max,
                        ap.passed() == expect_ap});
  res.checks.push_back({expect_pap0 ? "pap0_slope" : "pap0_rejected_slope", p0.slope, kPap0Slope,
                        p0.passed == expect_pap0});

  std::ostringstream os;
  os << "L,mean_value\n";
  for (std::size_t i = 0; i < curve.values.size(); ++i) {
    os << fmt17(curve.window_lengths[i]) << ',' << fmt17(curve.values[i]) << '\n';
  }
  res.csv = os.str();
  std::ostringstream periods;
  periods << "T\n";
  for (double T : ap.almost_periods) periods << fmt17(T) << '\n';
  res.extra.emplace_back("pap-test_periods.csv", periods.str());
  return res;
}

// ---------------------------------------------------------------- smoothing

ExperimentResult smoothing_rates(const Semigroup& sg, const ApplicationExponents& e, Keys& k) {
  const double t_min = k.positive("t_min");
  const double t_max = k.positive("t_max");
  const int t_count = k.integer("t_count");
  const int trials = k.integer_or("trials", kDefaultTrials);
  const auto seed = static_cast<std::uint64_t>(k.integer("seed"));
  const double slope_rel_tol = k.num_or("slope_rel_tol", 0.1);
  const double git_tol = k.num_or("interp_tol", kGitBoundTol);
  k.finish();
  if (t_count < 2 || !(t_max > t_min)) throw ConfigError("need t_count >= 2 and t_max > t_min");

  const auto ts = geomspace(t_min, t_max, t_count);
  std::vector<SmoothingReport> reps;
  try {
    reps = smoothing_measurement(sg, e.X(), {e.Y1(), e.Y2(), e.Y()}, ts, trials, seed);
  } catch (const InvalidArgument& ex) {
    throw ConfigError(ex.what());
  }
  const auto& y1 = reps[0];
  const auto& y2 = reps[1];
  const auto& y = reps[2];

  ExperimentResult res;
  res.notes.emplace_back("Y_exponent", y.fitted_exponent);
  res.checks.push_back(check_le("alpha1_slope_error", std::abs(y1.fitted_exponent + e.v.alpha1),
                                slope_rel_tol * e.v.alpha1));
  res.checks.push_back(check_le("alpha2_slope_error", std::abs(y2.fitted_exponent + e.v.alpha2),
                                slope_rel_tol * e.v.alpha2));
  res.notes.emplace_back("alpha1_slope", y1.fitted_exponent);
  res.notes.emplace_back("alpha2_slope", y2.fitted_exponent);
  std::ostringstream os;
  os << "t,M_Y1,M_Y2,M_Y,interp_bound\n";
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const auto g = git_bound_check(y1.norms[i], y2.norms[i], y.norms[i], e.v.theta, git_tol);
    res.checks.push_back(check_le("interp_ratio_t" + std::to_string(i), g.measured / g.bound, 1.0 + git_tol));
    os << fmt17(ts[i]) << ',' << fmt17(y1.norms[i]) << ',' << fmt17(y2.norms[i]) << ',' << fmt17(y.norms[i]) << ','
       << fmt17(g.bound) << '\n';
  }
  res.csv = os.str();
  return res;
}

ExperimentResult smoothing_dual(const Semigroup& sg, const ApplicationExponents& e, Keys& k) {
  const HistoryQuadrature quad = read_quadrature(k);
  const int psi_count = k.integer("psi_count");
  const auto widths = k.list("widths");
  const auto seed = static_cast<std::uint64_t>(k.integer("seed"));
  const double rel_tol = k.positive("rel_tol");
  k.finish();
  if (psi_count < 1) throw ConfigError("psi_count must be positive");
  if (widths.size() != 2 || !(widths[0] > 0.0) || widths[1] < widths[0]) {
    throw ConfigError("widths must be 'lo,hi' with 0 < lo <= hi");
  }

  // Integral to 2H; the H integral reuses the profile when the meshes nest.
  HistoryQuadrature big = quad;
  big.H = 2.0 * quad.H;
  const auto nodes_h = graded_nodes(quad);
  const auto nodes_2h = graded_nodes(big);
  const std::size_t skip = nodes_2h.size() - std::min(nodes_2h.size(), nodes_h.size());
  bool nested = nodes_2h.size() > nodes_h.size();
  for (std::size_t j = 0; nested && j < nodes_h.size(); ++j) {
    const auto& a = nodes_h[j];
    const auto& b = nodes_2h[skip + j];
    nested = std::abs(a.lo - b.lo) <= 1e-12 * a.hi && std::abs(a.hi - b.hi) <= 1e-12 * a.hi;
  }

  const LorentzExponents dualX = e.X().predual();
  ExperimentResult res;
  res.notes.emplace_back("nested_meshes", nested ? 1.0 : 0.0);
  std::ostringstream os, prof;
  os << "psi,I_H,I_2H,rel_change\n";
  prof << "psi,s,integrand\n";
  for (int i = 0; i < psi_count; ++i) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(i));
    std::array<double, 3> w{1.0, 1.0, 1.0};
    for (int a = 0; a < sg.grid().dim(); ++a) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      w[static_cast<std::size_t>(a)] = widths[0] + (widths[1] - widths[0]) * u;
    }
    Field psi = tensor_bump(sg.grid(), {0.0, 0.0, 0.0}, w);
    const double nz = lorentz_norm(psi, e.Z());
    if (!(nz > 0.0)) throw ConfigError("psi widths are below the grid resolution");
    psi *= 1.0 / nz;

    const DualIntegral full = dual_time_integral_profile(sg, psi, dualX, big);
    double i_h = 0.0;
    if (nested) {
      for (std::size_t j = skip; j < nodes_2h.size(); ++j) i_h += nodes_2h[j].w * full.integrand[j];
    } else {
      i_h = dual_time_integral(sg, psi, dualX, quad);
    }
    const double change = std::abs(full.value - i_h) / full.value;
    res.checks.push_back(check_lt("dual_rel_change_psi" + std::to_string(i), change, rel_tol));
    os << i << ',' << fmt17(i_h) << ',' << fmt17(full.value) << ',' << fmt17(change) << '\n';
    for (std::size_t j = 0; j < full.s.size(); ++j) {
      prof << i << ',' << fmt17(full.s[j]) << ',' << fmt17(full.integrand[j]) << '\n';
    }
  }
  res.csv = os.str();
  res.extra.emplace_back("smoothing_profile.csv", prof.str());
  return res;
}

ExperimentResult smoothing_experiment(Keys& k) {
  const Physics ph = read_physics(k);
  const auto e = read_exponents(k, ph.grid.dim());
  const std::string mode = k.str("mode");
  const Semigroup sg = make_semigroup(ph);
  if (mode == "rates") return smoothing_rates(sg, e, k);
  if (mode == "dual") return smoothing_dual(sg, e, k);
  throw ConfigError("mode must be rates or dual");
}

// ---------------------------------------------------------------- linear

struct NormPair {
  LorentzExponents X = LorentzExponents::weak(2.0);
  LorentzExponents Y = LorentzExponents::weak(2.0);
};

NormPair read_norms(Keys& k, int d) {
  if (k.has("m") || k.has("r")) {
    const auto e = read_exponents(k, d);
    return {e.X(), e.Y()};
  }
  try {
    return {LorentzExponents::weak(k.num("x_p")), LorentzExponents::weak(k.num("y_p"))};
  } catch (const InvalidArgument& ex) {
    throw ConfigError(ex.what());
  }
}

ExperimentResult linear_harmonic(const Semigroup& sg, const NormPair& np, const HistoryQuadrature& quad, Keys& k) {
  const double omega = k.positive("omega");
  const auto cos_c = k.list("cos_coeffs");
  const auto sin_c = k.list("sin_coeffs");
  const double t_max = k.positive("t_max");
  const int steps = k.integer("steps");
  const double tol = k.positive("tol");
  k.finish();
  const GridSpec& g = sg.grid();
  if (g.dim() != 1) throw ConfigError("harmonic forcing needs d = 1");
  if (sg.backend() != Backend::fourier) throw ConfigError("harmonic forcing needs the fourier backend");
  if (steps < 8) throw ConfigError("steps must be at least 8");

  const double R = g.half_width();
  const cplx b = sg.spec().coeff.value();
  // Modes j >= 1: cos(j pi x / R) and sin(j pi x / R), eigenvalue b (j pi / R)^2.
  struct Mode {
    Field phi;
    cplx lambda;
  };
  std::vector<Mode> modes;
  auto add = [&](const std::vector<double>& coeffs, bool is_cos) {
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
      if (coeffs[j] == 0.0) continue;
      const double kj = static_cast<double>(j + 1) * std::numbers::pi / R;
      Field phi = Field::sample(g, [&](std::span<const double> x) {
        return cplx{coeffs[j] * (is_cos ? std::cos(kj * x[0]) : std::sin(kj * x[0])), 0.0};
      });
      modes.push_back({std::move(phi), b * kj * kj});
    }
  };
  add(cos_c, true);
  add(sin_c, false);
  if (modes.empty()) throw ConfigError("forcing has no non-zero mode");
  Field g0(g);
  for (const auto& m : modes) g0 += m.phi;

  const TimeGrid window(0.0, t_max, steps);
  const TimeGrid fg = extend_back(window, quad.H);
  const Trajectory f = Trajectory::separable(fg, g0, [&](double t) { return cplx{std::cos(omega * t), 0.0}; }, np.X);
  LinearSolveOptions opts;
  opts.y_norm = np.Y;
  const auto rep = solve_linear(sg, f, quad, window, opts);

  const cplx I{0.0, 1.0};
  double err = 0.0;
  double scale = 0.0;
  std::ostringstream errs;
  errs << "t,abs_error\n";
  for (std::size_t kk = 0; kk < window.count(); ++kk) {
    const double t = window.time(static_cast<int>(kk));
    Field exact(g);
    for (const auto& m : modes) {
      const cplx c = 0.5 * (std::exp(I * omega * t) / (m.lambda + I * omega) +
                            std::exp(-I * omega * t) / (m.lambda - I * omega));
      exact.axpy(c, m.phi);
    }
    double e_t = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      e_t = std::max(e_t, std::abs(rep.trajectory[kk][i] - exact[i]));
      scale = std::max(scale, std::abs(exact[i]));
    }
    err = std::max(err, e_t);
    errs << fmt17(t) << ',' << fmt17(e_t) << '\n';
  }
  ExperimentResult res;
  res.notes.emplace_back("measured_Ltilde", rep.measured_Ltilde);
  res.checks.push_back(check_lt("harmonic_rel_sup_error", err / scale, tol));
  res.csv = rep.to_csv();
  res.extra.emplace_back("linear_error.csv", errs.str());
  return res;
}

ExperimentResult linear_families(const Semigroup& sg, const NormPair& np, const HistoryQuadrature& quad, Keys& k) {
  const double width = k.positive("g_width");
  const double W = k.positive("window");
  const double dt = k.positive("dt");
  const double tol = k.positive("tol");
  k.finish();

  const TimeGrid window = make_window(-W, W, dt);
  const TimeGrid fg = extend_back(window, quad.H);
  const Field g0 = centered_bump(sg.grid(), width, np.X);
  const std::vector<std::pair<std::string, std::function<double(double)>>> families{
      {"constant", [](double) { return 1.0; }},
      {"cos", [](double t) { return std::cos(t); }},
      {"quasi-periodic", quasi_periodic},
      {"decay", decay},
      {"bump",
       [](double t) {
         const double r = 0.5 * t;
         return std::abs(r) < 1.0 ? (1.0 - r * r) * (1.0 - r * r) : 0.0;
       }},
  };

  // Quadrature sum sum_j w_j ||e^{-s_j A} g0||_Y bounds ||S(a g0)||_Y for |a| <= 1.
  const auto nodes = graded_nodes(quad);
  double quad_sum = 0.0;
  for (const auto& nd : nodes) quad_sum += nd.w * lorentz_norm(sg.apply(nd.s, g0), np.Y);

  LinearSolveOptions opts;
  opts.y_norm = np.Y;
  ExperimentResult res;
  std::ostringstream os;
  os << "family,measured_Ltilde,sup_Y_norm,forcing_sup_X_norm,tail_estimate\n";
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& [name, a] : families) {
    double peak = 0.0;
    for (std::size_t i = 0; i < fg.count(); ++i) peak = std::max(peak, std::abs(a(fg.time(static_cast<int>(i)))));
    const Trajectory f =
        Trajectory::separable(fg, g0, [&, &a = a](double t) { return cplx{a(t) / peak, 0.0}; }, np.X);
    const auto rep = solve_linear(sg, f, quad, window, opts);
    lo = std::min(lo, rep.measured_Ltilde);
    hi = std::max(hi, rep.measured_Ltilde);
    res.notes.emplace_back("Ltilde_" + name, rep.measured_Ltilde);
    os << name << ',' << fmt17(rep.measured_Ltilde) << ',' << fmt17(rep.sup_Y_norm) << ','
       << fmt17(rep.forcing_sup_X_norm) << ',' << fmt17(rep.tail_estimate) << '\n';
  }
  res.notes.emplace_back("quadrature_sum", quad_sum);
  res.checks.push_back(check_lt("Ltilde_variation", hi / lo - 1.0, tol));
  res.checks.push_back(check_le("Ltilde_over_quadrature_sum", hi / quad_sum, 1.0 + 1e-9));
  res.csv = os.str();
  return res;
}

ExperimentResult linear_pap(const Semigroup& sg, const NormPair& np, const HistoryQuadrature& quad, Keys& k) {
  const std::string profile = k.str("profile");
  const double width = profile == "bump" ? k.positive("g_width") : 0.0;
  const double epsilon = k.positive("epsilon");
  const double l_max = k.positive("l_max");
  const double ap_t_max = k.positive("ap_t_max");
  const double ap_dt = k.positive("ap_dt");
  const auto L_list = k.list("L_list");
  const double erg_dt = k.positive("erg_dt");
  k.finish();
  if (L_list.empty()) throw ConfigError("L_list must be non-empty");

  Field g0(sg.grid());
  if (profile == "cos-sum") {
    g0 = cos_sum(sg.grid(), np.X);
  } else if (profile == "bump") {
    g0 = centered_bump(sg.grid(), width, np.X);
  } else {
    throw ConfigError("profile must be cos-sum or bump");
  }
  LinearSolveOptions opts;
  opts.y_norm = np.Y;

  // Almost periodic part.
  const TimeGrid ap_window = make_window(0.0, ap_t_max, ap_dt);
  const TimeGrid ap_grid = extend_back(ap_window, quad.H);
  const Trajectory g_ap =
      Trajectory::separable(ap_grid, g0, [](double t) { return cplx{quasi_periodic(t), 0.0}; }, np.X);
  const auto ap = ap_preservation_check(sg, g_ap, epsilon, quad, ap_window, l_max, opts);

  // Ergodic part.
  const double L = L_list.back();
  const TimeGrid erg_grid = extend_back(make_window(-L, L, erg_dt), quad.H);
  const Trajectory phi = Trajectory::separable(erg_grid, g0, [](double t) { return cplx{decay(t), 0.0}; }, np.X);
  const auto erg = pap0_preservation_check(sg, phi, quad, L_list, opts);

  // Superposition on a short window.
  const TimeGrid sup_window = make_window(0.0, 64.0 * ap_dt, ap_dt);
  const TimeGrid sup_grid = extend_back(sup_window, quad.H);
  const Trajectory a_part =
      Trajectory::separable(sup_grid, g0, [](double t) { return cplx{quasi_periodic(t), 0.0}; }, np.X);
  const Trajectory e_part = Trajectory::separable(sup_grid, g0, [](double t) { return cplx{decay(t), 0.0}; }, np.X);
  const auto lin = linearity_check(sg, a_part, e_part, 1.0, quad, sup_window, opts);

  ExperimentResult res;
  const double inf = std::numeric_limits<double>::infinity();
  res.notes.emplace_back("measured_Ltilde", ap.Ltilde);
  res.notes.emplace_back("epsilon_out", ap.epsilon_out);
  res.notes.emplace_back("ergodic_input_slope", erg.input.slope);
  res.checks.push_back(check_le("input_ap_inclusion_length", ap.input.inclusion_length.value_or(inf), l_max));
  res.checks.push_back(check_le("output_ap_inclusion_length", ap.output.inclusion_length.value_or(inf), l_max));
  res.notes.emplace_back("amplification_ratio", ap.amplification);
  res.notes.emplace_back("amplification_over_Ltilde", ap.amplification / ap.Ltilde);
  res.checks.push_back(check_le("ergodic_output_slope", erg.output.slope, kPap0Slope));
  res.checks.push_back(check_le("superposition_defect", lin.defect / std::max(lin.scale, 1e-300), 1e-10));
  res.csv = ap.solve.to_csv();
  std::ostringstream os;
  os << "L,M_in,M_out\n";
  for (std::size_t i = 0; i < L_list.size(); ++i) {
    os << fmt17(L_list[i]) << ',' << fmt17(erg.input_curve.values[i]) << ',' << fmt17(erg.output_curve.values[i])
       << '\n';
  }
  res.extra.emplace_back("linear_ergodic.csv", os.str());
  return res;
}

ExperimentResult linear_experiment(Keys& k) {
  const Physics ph = read_physics(k);
  const NormPair np = read_norms(k, ph.grid.dim());
  const HistoryQuadrature quad = read_quadrature(k);
  const std::string forcing = k.str("forcing");
  const Semigroup sg = make_semigroup(ph);
  if (forcing == "harmonic") return linear_harmonic(sg, np, quad, k);
  if (forcing == "families") return linear_families(sg, np, quad, k);
  if (forcing == "pap") return linear_pap(sg, np, quad, k);
  throw ConfigError("forcing must be harmonic, families or pap");
}

// ---------------------------------------------------------------- picard / stability

struct PicardSetup {
  Physics ph;
  ApplicationExponents e;
  HistoryQuadrature quad;
  TimeGrid window{0.0, 1.0, 8};
  std::optional<double> rho;
  double target_contraction = 0.0;
  std::optional<double> amplitude;
  double forcing_fraction = 0.0;
  double g_width = 0.0;
  int max_iters = 25;
  double tol = 1e-10;
};

PicardSetup read_picard(Keys& k) {
  PicardSetup s;
  s.ph = read_physics(k);
  s.e = read_exponents(k, s.ph.grid.dim());
  s.quad = read_quadrature(k);
  s.window = make_window(k.num("t_min"), k.num("t_max"), k.positive("dt"));
  if (k.is_auto("rho")) {
    s.target_contraction = k.positive("target_contraction");
    if (!(s.target_contraction < 1.0)) throw ConfigError("target_contraction must be < 1");
  } else {
    s.rho = k.positive("rho");
  }
  if (k.is_auto("forcing_amplitude")) {
    s.forcing_fraction = k.positive("forcing_fraction");
  } else {
    s.amplitude = k.num("forcing_amplitude");
    if (*s.amplitude < 0.0) throw ConfigError("forcing_amplitude must be non-negative");
  }
  s.g_width = k.positive("g_width");
  s.max_iters = k.integer_or("max_iters", 25);
  s.tol = k.num_or("tol", 1e-10);
  return s;
}

struct PicardRun {
  PicardReport report;
  double amplitude = 0.0;
  double rho = 0.0;
};

PicardRun run_picard(const Semigroup& sg, const PicardSetup& s) {
  const TimeGrid fg = extend_back(s.window, s.quad.H);
  const Field g0 = centered_bump(sg.grid(), s.g_width, s.e.X());
  Trajectory shape =
      Trajectory::separable(fg, g0, [](double t) { return cplx{quasi_periodic(t) + decay(t), 0.0}; }, s.e.X());
  shape *= 1.0 / shape.sup_norm();
  const double Lt = calibrate_Ltilde(sg, shape, s.quad, s.e);
  const int m = s.e.m;
  PicardRun out;
  out.rho = s.rho ? *s.rho : std::pow(s.target_contraction / (Lt * m), 1.0 / (m - 1));
  const double C = m * std::pow(out.rho, m - 1);
  out.amplitude = s.amplitude ? *s.amplitude : s.forcing_fraction * out.rho * std::max(0.0, 1.0 - Lt * C) / Lt;
  PicardConfig cfg;
  cfg.rho = out.rho;
  cfg.max_iters = s.max_iters;
  cfg.tol = s.tol;
  cfg.exponents = s.e;
  cfg.forcing = shape;
  cfg.forcing *= out.amplitude;
  out.report = picard_solve(sg, cfg, s.quad, s.window, Lt);
  return out;
}

ExperimentResult picard_experiment(Keys& k) {
  const PicardSetup s = read_picard(k);
  const double residual_tol = k.num_or("residual_tol", 1e-6);
  const double ratio_slack = k.num_or("ratio_slack", 0.05);
  k.finish();

  const Semigroup sg = make_semigroup(s.ph);
  const PicardRun run = run_picard(sg, s);
  const PicardReport& rep = run.report;
  ExperimentResult res;
  res.notes.emplace_back("Ltilde", rep.Ltilde);
  res.notes.emplace_back("rho", run.rho);
  res.notes.emplace_back("forcing_amplitude", run.amplitude);
  res.notes.emplace_back("contraction_constant", rep.contraction_constant);
  res.notes.emplace_back("measured_ratio", rep.measured_ratio);
  double max_ratio = 0.0;
  for (double r : rep.ratios) max_ratio = std::max(max_ratio, r);
  res.checks.push_back(check_le("max_increment_ratio", max_ratio, rep.contraction_constant + ratio_slack));
  res.checks.push_back(check_lt("residual", rep.residual, residual_tol));
  res.checks.push_back({"iterations", static_cast<double>(rep.iterations), static_cast<double>(s.max_iters),
                        rep.converged && rep.iterations <= s.max_iters});
  res.csv = rep.to_csv();
  return res;
}

ExperimentResult stability_experiment_run(Keys& k) {
  PicardSetup s = read_picard(k);
  StabilityConfig sc;
  sc.r = s.e.r_value;
  sc.T_end = s.window.t_max();
  sc.fit_lo = k.positive("fit_lo");
  sc.fit_hi = k.positive("fit_hi");
  sc.tol = k.num_or("stability_tol", 1e-10);
  sc.max_iters = k.integer_or("stability_max_iters", 40);
  const double pert_amp = k.num("perturbation_amplitude");
  const double pert_width = k.positive("perturbation_width");
  k.finish();
  if (s.window.t_min() != 0.0) throw ConfigError("stability needs t_min = 0");
  if (sc.fit_hi > sc.T_end) throw ConfigError("fit_hi must not exceed t_max");

  const Semigroup sg = make_semigroup(s.ph);
  const PicardRun run = run_picard(sg, s);
  sc.perturbation = centered_bump(sg.grid(), pert_width, s.e.Y());
  sc.perturbation *= pert_amp;
  StabilityReport rep;
  try {
    rep = stability_experiment(sg, run.report.solution, sc, s.e, s.quad);
  } catch (const InvalidArgument& ex) {
    throw ConfigError(ex.what());
  }
  ExperimentResult res;
  res.notes.emplace_back("Ltilde", run.report.Ltilde);
  res.notes.emplace_back("rho", run.rho);
  res.notes.emplace_back("gamma", rep.gamma_predicted);
  res.notes.emplace_back("fitted_constant", rep.fitted_constant);
  res.notes.emplace_back("iterations", rep.iterations);
  res.checks.push_back(check_le("decay_slope", rep.fitted_slope, -rep.gamma_predicted + kStabilitySlack));
  res.csv = rep.to_csv();
  return res;
}

}  // namespace

ExperimentResult run_experiment(const Config& cfg) {
  Keys k(cfg);
  const std::string name = k.str("experiment");
  ExperimentResult res;
  if (name == "norms") {
    res = norms_experiment(k);
  } else if (name == "exponents") {
    res = exponents_experiment(k);
  } else if (name == "pap-test") {
    res = pap_test_experiment(k);
  } else if (name == "smoothing") {
    res = smoothing_experiment(k);
  } else if (name == "linear") {
    res = linear_experiment(k);
  } else if (name == "picard") {
    res = picard_experiment(k);
  } else if (name == "stability") {
    res = stability_experiment_run(k);
  } else {
    throw ConfigError("unknown experiment '" + name + "'");
  }
  res.experiment = name;
  return res;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

int run(const std::string& config_path, std::ostream& diag, const std::optional<std::string>& outdir_override) {
  Config cfg;
  std::filesystem::path outdir;
  std::string name;
  try {
    cfg = Config::load(config_path);
    outdir = outdir_override ? *outdir_override : cfg.get_or("outdir", "out");
    name = cfg.get("experiment");
  } catch (const ConfigError& e) {
    diag << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    const ExperimentResult res = run_experiment(cfg);
    std::filesystem::create_directories(outdir);
    write_file(outdir / (name + ".csv"), res.csv);
    for (const auto& [file, text] : res.extra) write_file(outdir / file, text);
    const std::string summary = res.summary();
    write_file(outdir / "summary.txt", summary);
    diag << summary;
    return res.passed() ? kExitOk : kExitFail;
  } catch (const ConfigError& e) {
    diag << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const HypothesisFailure& e) {
    diag << "hypothesis failure: " << e.what() << '\n';
    try {
      std::filesystem::create_directories(outdir);
      write_file(outdir / "summary.txt", "experiment " + name + "\nhypothesis_failure " + e.what() + "\nresult FAIL\n");
    } catch (const std::exception& w) {
      diag << "error: " << w.what() << '\n';
    }
    return kExitHypothesis;
  } catch (const std::exception& e) {
    diag << "error: " << e.what() << '\n';
    return kExitFail;
  }
}

}  // namespace papevo
