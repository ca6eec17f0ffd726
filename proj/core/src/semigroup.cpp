#include "papevo/semigroup.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <atomic>
#include <cmath>
#include <numbers>

#include "fault.hpp"
#include "fft.hpp"

namespace papevo {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

Coefficient Coefficient::constant(cplx b, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("Coefficient: delta must be positive");
  if (!std::isfinite(b.real()) || !std::isfinite(b.imag())) throw InvalidArgument("Coefficient: b must be finite");
  if (b.real() < delta) throw InvalidArgument("Coefficient: Re b >= delta violated");
  return Coefficient(b, std::nullopt, delta);
}

Coefficient Coefficient::variable(Field b, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("Coefficient: delta must be positive");
  for (const auto& v : b.values()) {
    if (v.real() < delta) throw InvalidArgument("Coefficient: Re b >= delta violated");
  }
  return Coefficient(cplx{}, std::move(b), delta);
}

cplx Coefficient::value() const {
  if (!is_constant()) throw InvalidArgument("Coefficient: not a constant coefficient");
  return b_;
}

const Field& Coefficient::field() const {
  if (is_constant()) throw InvalidArgument("Coefficient: not a variable coefficient");
  return *field_;
}

double Coefficient::max_abs() const { return is_constant() ? std::abs(b_) : field_->max_abs(); }

Coefficient Coefficient::conjugate() const {
  if (is_constant()) return Coefficient(std::conj(b_), std::nullopt, delta_);
  Field f = *field_;
  for (auto& v : f.values()) v = std::conj(v);
  return Coefficient(cplx{}, std::move(f), delta_);
}

Backend parse_backend(const std::string& name) {
  if (name == "fourier") return Backend::fourier;
  if (name == "kernel") return Backend::kernel;
  if (name == "dense") return Backend::dense;
  throw InvalidArgument("unknown backend '" + name + "'");
}

std::string to_string(Backend b) {
  switch (b) {
    case Backend::fourier: return "fourier";
    case Backend::kernel: return "kernel";
    case Backend::dense: return "dense";
  }
  return "?";
}

SemigroupSpec::SemigroupSpec(Coefficient coeff_, Backend backend_, GridSpec grid_)
    : coeff(std::move(coeff_)), backend(backend_), grid(grid_) {
  if (grid.is_scalar()) throw InvalidArgument("SemigroupSpec: needs a spatial grid");
  if (backend != Backend::dense && !coeff.is_constant()) {
    throw InvalidArgument("SemigroupSpec: " + to_string(backend) + " backend requires a constant coefficient");
  }
  if (backend == Backend::dense && grid.size() > kDenseMaxSize) {
    throw InvalidArgument("SemigroupSpec: dense backend requires n^d <= 4096");
  }
  if (!coeff.is_constant() && !(coeff.field().grid() == grid)) {
    throw InvalidArgument("SemigroupSpec: coefficient field lives on a different grid");
  }
}

struct Semigroup::DenseData {
  Eigen::VectorXcd lambda;
  Eigen::MatrixXcd V;
  Eigen::MatrixXcd Vinv;
};

namespace {

std::shared_ptr<const Semigroup::DenseData> build_dense(const SemigroupSpec& spec) {
  const GridSpec& g = spec.grid;
  const auto N = static_cast<Eigen::Index>(g.size());
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  const int n = g.points_per_axis();
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const cplx b = spec.coeff.is_constant() ? spec.coeff.value() : spec.coeff.field()[i];
    const auto idx = g.unflatten(static_cast<std::size_t>(i));
    A(i, i) += 2.0 * g.dim() * b * inv_h2;
    for (int a = 0; a < g.dim(); ++a) {
      for (int s : {1, -1}) {
        auto j = idx;
        j[a] = (j[a] + s + n) % n;
        A(i, static_cast<Eigen::Index>(g.flatten(j))) -= b * inv_h2;
      }
    }
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, true);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense backend: eigendecomposition failed");
  auto data = std::make_shared<Semigroup::DenseData>();
  data->lambda = es.eigenvalues();
  data->V = es.eigenvectors();
  data->Vinv = data->V.partialPivLu().inverse();
  return data;
}

// Lattice sum of the sampled 1D Gaussian h (4 pi c)^{-1/2} exp(-x^2/(4c)).
cplx lattice_mass(cplx c, double h) {
  const double ratio = c.real() / (h * h);
  cplx sum = 0.0;
  if (ratio > 0.1) {
    // Poisson summation: sum_m exp(-4 pi^2 m^2 c / h^2).
    sum = 1.0;
    for (int m = 1; m < 100000; ++m) {
      const cplx term = std::exp(-4.0 * kPi * kPi * double(m) * double(m) * c / (h * h));
      sum += 2.0 * term;
      if (std::abs(term) < 1e-18) break;
    }
    return sum;
  }
  const cplx pref = h / std::sqrt(4.0 * kPi * c);
  sum = pref;
  for (int j = 1; j < 1000000; ++j) {
    const double x = j * h;
    const cplx term = pref * std::exp(-x * x / (4.0 * c));
    sum += 2.0 * term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

Semigroup::Semigroup(SemigroupSpec spec) : spec_(std::move(spec)) {
  if (spec_.backend == Backend::dense) dense_ = build_dense(spec_);
}

Semigroup::Semigroup(SemigroupSpec spec, std::shared_ptr<const DenseData> dense)
    : spec_(std::move(spec)), dense_(std::move(dense)) {}

Semigroup Semigroup::adjoint() const {
  SemigroupSpec adj(spec_.coeff.conjugate(), spec_.backend, spec_.grid);
  if (spec_.backend != Backend::dense) return Semigroup(adj, nullptr);
  // A^H = Vinv^H diag(conj lambda) V^H.
  auto data = std::make_shared<DenseData>();
  data->lambda = dense_->lambda.conjugate();
  data->V = dense_->Vinv.adjoint();
  data->Vinv = dense_->V.adjoint();
  return Semigroup(adj, data);
}

std::vector<int> Semigroup::modal_dims() const {
  const int n = spec_.grid.points_per_axis();
  const int len = spec_.backend == Backend::kernel ? 2 * n : n;
  return std::vector<int>(static_cast<std::size_t>(spec_.grid.dim()), len);
}

std::size_t Semigroup::modal_size() const {
  if (spec_.backend == Backend::dense) return spec_.grid.size();
  std::size_t s = 1;
  for (int d : modal_dims()) s *= static_cast<std::size_t>(d);
  return s;
}

Modal Semigroup::to_modal(const Field& u) const {
  if (!(u.grid() == spec_.grid)) throw InvalidArgument("Semigroup: field lives on a different grid");
  const GridSpec& g = spec_.grid;
  switch (spec_.backend) {
    case Backend::fourier: {
      Modal c(u.values().begin(), u.values().end());
      detail::fft_inplace(c, modal_dims(), true);
      return c;
    }
    case Backend::kernel: {
      Modal c(modal_size(), cplx{0.0, 0.0});
      const int n = g.points_per_axis();
      const std::size_t m = 2 * static_cast<std::size_t>(n);
      for (std::size_t i = 0; i < u.size(); ++i) {
        const auto idx = g.unflatten(i);
        std::size_t flat = 0;
        for (int a = 0; a < g.dim(); ++a) flat = flat * m + static_cast<std::size_t>(idx[a]);
        c[flat] = u[i];
      }
      detail::fft_inplace(c, modal_dims(), true);
      return c;
    }
    case Backend::dense: {
      Modal c(u.size());
      Eigen::Map<const Eigen::VectorXcd> in(u.values().data(), static_cast<Eigen::Index>(u.size()));
      Eigen::Map<Eigen::VectorXcd> out(c.data(), static_cast<Eigen::Index>(c.size()));
      out.noalias() = dense_->Vinv * in;
      return c;
    }
  }
  return {};
}

Field Semigroup::from_modal(const Modal& c) const {
  if (c.size() != modal_size()) throw InvalidArgument("Semigroup: modal vector has the wrong size");
  const GridSpec& g = spec_.grid;
  std::vector<cplx> values(g.size());
  switch (spec_.backend) {
    case Backend::fourier: {
      Modal tmp = c;
      detail::fft_inplace(tmp, modal_dims(), false);
      const double scale = 1.0 / static_cast<double>(tmp.size());
      for (std::size_t i = 0; i < values.size(); ++i) values[i] = tmp[i] * scale;
      break;
    }
    case Backend::kernel: {
      Modal tmp = c;
      detail::fft_inplace(tmp, modal_dims(), false);
      const double scale = 1.0 / static_cast<double>(tmp.size());
      const std::size_t m = 2 * static_cast<std::size_t>(g.points_per_axis());
      for (std::size_t i = 0; i < values.size(); ++i) {
        const auto idx = g.unflatten(i);
        std::size_t flat = 0;
        for (int a = 0; a < g.dim(); ++a) flat = flat * m + static_cast<std::size_t>(idx[a]);
        values[i] = tmp[flat] * scale;
      }
      break;
    }
    case Backend::dense: {
      Eigen::Map<const Eigen::VectorXcd> in(c.data(), static_cast<Eigen::Index>(c.size()));
      Eigen::Map<Eigen::VectorXcd> out(values.data(), static_cast<Eigen::Index>(values.size()));
      out.noalias() = dense_->V * in;
      break;
    }
  }
  return Field(g, std::move(values));
}

namespace detail {

namespace {
std::atomic<double> g_kernel_scale{1.0};
}  // namespace

double kernel_constant_scale() { return g_kernel_scale.load(std::memory_order_relaxed); }
void set_kernel_constant_scale(double s) { g_kernel_scale.store(s, std::memory_order_relaxed); }

}  // namespace detail

std::vector<cplx> Semigroup::kernel_taps(double t) const {
  const GridSpec& g = spec_.grid;
  const int n = g.points_per_axis();
  const double h = g.spacing();
  std::vector<cplx> taps(2 * static_cast<std::size_t>(n), cplx{0.0, 0.0});
  if (t == 0.0) {
    taps[0] = 1.0;
    return taps;
  }
  const cplx c = spec_.coeff.value() * t;
  const cplx pref = detail::kernel_constant_scale() * h / std::sqrt(4.0 * kPi * c) / lattice_mass(c, h);
  for (int j = 0; j < 2 * n; ++j) {
    if (j == n) continue;  // offset +-n never couples two points of the box
    const double x = (j < n ? j : j - 2 * n) * h;
    taps[j] = pref * std::exp(-x * x / (4.0 * c));
  }
  return taps;
}

Multiplier Semigroup::multiplier(double t) const {
  if (t < 0.0) throw InvalidArgument("Semigroup: t must be non-negative");
  Multiplier m;
  const GridSpec& g = spec_.grid;
  const int n = g.points_per_axis();
  switch (spec_.backend) {
    case Backend::fourier: {
      const cplx b = spec_.coeff.value();
      const double k0 = 2.0 * kPi / (2.0 * g.half_width());
      std::vector<cplx> axis(n);
      for (int j = 0; j < n; ++j) {
        const double k = k0 * (j <= n / 2 ? j : j - n);
        axis[j] = std::exp(-t * b * k * k);
      }
      m.axes.assign(static_cast<std::size_t>(g.dim()), axis);
      break;
    }
    case Backend::kernel: {
      Modal taps;
      const auto raw = kernel_taps(t);
      taps.assign(raw.begin(), raw.end());
      detail::fft_inplace(taps, {2 * n}, true);
      m.axes.assign(static_cast<std::size_t>(g.dim()), std::vector<cplx>(taps.begin(), taps.end()));
      break;
    }
    case Backend::dense: {
      m.diag.resize(dense_->lambda.size());
      for (Eigen::Index i = 0; i < dense_->lambda.size(); ++i) m.diag[i] = std::exp(-t * dense_->lambda[i]);
      break;
    }
  }
  return m;
}

namespace {

template <class Combine>
void tensor_loop(const Multiplier& mult, std::size_t size, Combine&& combine) {
  if (!mult.separable()) {
    for (std::size_t i = 0; i < size; ++i) combine(i, mult.diag[i]);
    return;
  }
  static const std::vector<cplx> unit{cplx{1.0, 0.0}};
  const auto& a0 = mult.axes[0];
  const auto& a1 = mult.axes.size() > 1 ? mult.axes[1] : unit;
  const auto& a2 = mult.axes.size() > 2 ? mult.axes[2] : unit;
  std::size_t i = 0;
  for (const cplx m0 : a0) {
    for (const cplx m1 : a1) {
      const cplx m01 = m0 * m1;
      for (const cplx m2 : a2) combine(i++, m01 * m2);
    }
  }
}

}  // namespace

void Semigroup::accumulate(const Multiplier& mult, cplx weight, const Modal& in, Modal& acc) const {
  if (in.size() != modal_size() || acc.size() != modal_size()) {
    throw InvalidArgument("Semigroup::accumulate: modal size mismatch");
  }
  tensor_loop(mult, in.size(), [&](std::size_t i, cplx m) { acc[i] += weight * m * in[i]; });
}

void Semigroup::accumulate(const Multiplier& mult, cplx wa, const Modal& a, cplx wb, const Modal& b,
                           Modal& acc) const {
  if (a.size() != modal_size() || b.size() != modal_size() || acc.size() != modal_size()) {
    throw InvalidArgument("Semigroup::accumulate: modal size mismatch");
  }
  tensor_loop(mult, a.size(), [&](std::size_t i, cplx m) { acc[i] += m * (wa * a[i] + wb * b[i]); });
}

Field Semigroup::apply(double t, const Field& u) const {
  if (t < 0.0) throw InvalidArgument("Semigroup::apply: t must be non-negative");
  if (!(u.grid() == spec_.grid)) throw InvalidArgument("Semigroup: field lives on a different grid");
  if (t == 0.0) return u;
  const Modal c = to_modal(u);
  Modal acc(c.size(), cplx{0.0, 0.0});
  accumulate(multiplier(t), 1.0, c, acc);
  return from_modal(acc);
}

Field Semigroup::apply_generator(double t, const Field& u) const {
  const GridSpec& g = spec_.grid;
  Multiplier full;
  switch (spec_.backend) {
    case Backend::fourier: {
      const cplx b = spec_.coeff.value();
      const int n = g.points_per_axis();
      const double k0 = 2.0 * kPi / (2.0 * g.half_width());
      full.diag.resize(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) {
        const auto idx = g.unflatten(i);
        double k2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
          const double k = k0 * (idx[a] <= n / 2 ? idx[a] : idx[a] - n);
          k2 += k * k;
        }
        full.diag[i] = b * k2 * std::exp(-t * b * k2);
      }
      break;
    }
    case Backend::dense: {
      full.diag.resize(dense_->lambda.size());
      for (Eigen::Index i = 0; i < dense_->lambda.size(); ++i) {
        full.diag[i] = dense_->lambda[i] * std::exp(-t * dense_->lambda[i]);
      }
      break;
    }
    case Backend::kernel:
      throw InvalidArgument("apply_generator: not available on the kernel backend");
  }
  const Modal c = to_modal(u);
  Modal acc(c.size(), cplx{0.0, 0.0});
  accumulate(full, 1.0, c, acc);
  return from_modal(acc);
}

cplx kernel_eval(const Coefficient& coeff, double t, std::span<const double> x, std::span<const double> y) {
  if (!coeff.is_constant()) throw InvalidArgument("kernel_eval: variable coefficient has no closed kernel");
  if (!(t > 0.0)) throw InvalidArgument("kernel_eval: t must be positive");
  if (x.size() != y.size() || x.empty()) throw InvalidArgument("kernel_eval: point dimension mismatch");
  const cplx bt = coeff.value() * t;
  double r2 = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) r2 += (x[a] - y[a]) * (x[a] - y[a]);
  const double d = static_cast<double>(x.size());
  return std::pow(4.0 * kPi * bt, -d / 2.0) * std::exp(-r2 / (4.0 * bt));
}

}  // namespace papevo
