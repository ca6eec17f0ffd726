#include <algorithm>
#include <cmath>
#include <random>

#include "papevo/fit.hpp"
#include "papevo/parallel.hpp"
#include "papevo/semigroup.hpp"

namespace papevo {

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Field random_bump(const GridSpec& grid, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  const double h = grid.spacing();
  std::array<double, 3> center{0.0, 0.0, 0.0};
  std::array<double, 3> width{1.0, 1.0, 1.0};
  for (int a = 0; a < grid.dim(); ++a) {
    center[a] = (uniform01(rng) - 0.5) * h;
    width[a] = scale * (0.5 + 1.5 * uniform01(rng));
  }
  Field u = tensor_bump(grid, center, width);
  if (u.max_abs() == 0.0) {
    // Narrower than the grid: keep a single point mass at the node nearest the center.
    std::array<int, 3> idx{0, 0, 0};
    for (int a = 0; a < grid.dim(); ++a) {
      idx[a] = std::clamp(static_cast<int>(std::lround((center[a] + grid.half_width()) / h)), 0,
                          grid.points_per_axis() - 1);
    }
    u[grid.flatten(idx)] = 1.0;
  }
  return u;
}

std::vector<SmoothingReport> smoothing_measurement(const Semigroup& sg, const LorentzExponents& pIn,
                                                   const std::vector<LorentzExponents>& pOut,
                                                   const std::vector<double>& t_samples, int trials,
                                                   std::uint64_t seed) {
  if (t_samples.size() < 2) throw InvalidArgument("smoothing_measurement: need at least two t samples");
  for (std::size_t i = 0; i < t_samples.size(); ++i) {
    if (!(t_samples[i] > 0.0)) throw InvalidArgument("smoothing_measurement: t samples must be positive");
    if (i > 0 && !(t_samples[i] > t_samples[i - 1])) {
      throw InvalidArgument("smoothing_measurement: t samples must be strictly increasing");
    }
  }
  if (t_samples.back() < 10.0 * t_samples.front() * (1.0 - 1e-12)) {
    throw InvalidArgument("smoothing_measurement: t samples must span at least one decade");
  }
  for (const auto& e : pOut) {
    if (pIn.p() > e.p()) throw InvalidArgument("smoothing_measurement: need pIn.p <= pOut.p");
  }
  if (trials < 1) throw InvalidArgument("smoothing_measurement: trials must be positive");

  const std::size_t nt = t_samples.size();
  const std::size_t no = pOut.size();
  const double b_abs = sg.spec().coeff.max_abs();
  // ratios[trial][t][out]
  std::vector<std::vector<double>> ratios(static_cast<std::size_t>(trials), std::vector<double>(nt * no, 0.0));
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t k) {
    for (std::size_t it = 0; it < nt; ++it) {
      const double t = t_samples[it];
      const Field u = random_bump(sg.grid(), seed + k, std::sqrt(t * b_abs));
      const double nu = lorentz_norm(u, pIn);
      const Field v = sg.apply(t, u);
      const auto sorted = decreasing_rearrangement(v);
      for (std::size_t o = 0; o < no; ++o) {
        ratios[k][it * no + o] = lorentz_norm_sorted(sorted, v.grid().cell_volume(), pOut[o]) / nu;
      }
    }
  });

  std::vector<SmoothingReport> reports(no);
  for (std::size_t o = 0; o < no; ++o) {
    SmoothingReport& r = reports[o];
    r.p = pIn.p();
    r.q = pOut[o].p();
    r.t_samples = t_samples;
    r.norms.assign(nt, 0.0);
    for (std::size_t it = 0; it < nt; ++it) {
      for (int k = 0; k < trials; ++k) r.norms[it] = std::max(r.norms[it], ratios[k][it * no + o]);
    }
    const auto fit = fit_power_law(r.t_samples, r.norms);
    r.fitted_exponent = fit.exponent;
    r.fitted_constant = fit.constant;
  }
  return reports;
}

SmoothingReport smoothing_measurement(const Semigroup& sg, const LorentzExponents& pIn,
                                      const LorentzExponents& pOut, const std::vector<double>& t_samples,
                                      int trials, std::uint64_t seed) {
  return smoothing_measurement(sg, pIn, std::vector<LorentzExponents>{pOut}, t_samples, trials, seed).front();
}

DualIntegral dual_time_integral_profile(const Semigroup& sg, const Field& psi, const LorentzExponents& dualX,
                                        const HistoryQuadrature& quad) {
  const Semigroup adj = sg.adjoint();
  const auto nodes = graded_nodes(quad);
  const Modal c = adj.to_modal(psi);
  DualIntegral out;
  out.s.resize(nodes.size());
  out.integrand.resize(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t j) {
    Modal acc(c.size(), cplx{0.0, 0.0});
    adj.accumulate(adj.multiplier(nodes[j].s), 1.0, c, acc);
    out.s[j] = nodes[j].s;
    out.integrand[j] = lorentz_norm(adj.from_modal(acc), dualX);
  });
  for (std::size_t j = 0; j < nodes.size(); ++j) out.value += nodes[j].w * out.integrand[j];
  return out;
}

double dual_time_integral(const Semigroup& sg, const Field& psi, const LorentzExponents& dualX,
                          const HistoryQuadrature& quad) {
  return dual_time_integral_profile(sg, psi, dualX, quad).value;
}

}  // namespace papevo
