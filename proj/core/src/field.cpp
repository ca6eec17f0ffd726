#include "papevo/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace papevo {

GridSpec::GridSpec(int dim, int points_per_axis, double half_width)
    : dim_(dim), n_(points_per_axis), half_width_(half_width) {
  if (dim < 1 || dim > 3) {
    throw InvalidArgument("GridSpec: dimension must be 1, 2 or 3");
  }
  if (points_per_axis < 4) {
    throw InvalidArgument("GridSpec: need at least 4 points per axis");
  }
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw InvalidArgument("GridSpec: box half width must be positive");
  }
}

GridSpec GridSpec::scalar() { return GridSpec(1, 1, 0.5, true); }

double GridSpec::cell_volume() const { return std::pow(spacing(), dim_); }

double GridSpec::total_measure() const { return std::pow(2.0 * half_width_, dim_); }

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (int a = 0; a < dim_; ++a) s *= static_cast<std::size_t>(n_);
  return s;
}

std::array<int, 3> GridSpec::unflatten(std::size_t index) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = dim_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(index % n_);
    index /= n_;
  }
  return idx;
}

std::size_t GridSpec::flatten(std::array<int, 3> idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim_; ++a) flat = flat * n_ + static_cast<std::size_t>(idx[a]);
  return flat;
}

std::array<double, 3> GridSpec::position(std::size_t index) const {
  const auto idx = unflatten(index);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) x[a] = is_scalar() ? 0.0 : coordinate(idx[a]);
  return x;
}

Field::Field(GridSpec grid) : grid_(grid), values_(grid.size(), cplx{0.0, 0.0}) {}

Field::Field(GridSpec grid, std::vector<cplx> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InvalidArgument("Field: value count does not match grid size");
  }
  for (const auto& v : values_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw InvalidArgument("Field: non-finite value");
    }
  }
}

namespace {

bool finite(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

}  // namespace

Field Field::sample(const GridSpec& grid, const Sampler& fn, SingularMask mask) {
  const std::size_t count = grid.size();
  std::vector<cplx> raw(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto x = grid.position(i);
    raw[i] = fn(std::span<const double>(x.data(), static_cast<std::size_t>(grid.dim())));
  }
  std::vector<cplx> values = raw;
  const int n = grid.points_per_axis();
  for (std::size_t i = 0; i < count; ++i) {
    if (finite(raw[i])) continue;
    if (mask == SingularMask::zero) {
      values[i] = 0.0;
      continue;
    }
    // Nearest finite neighbor along the axes, searching outward.
    bool found = false;
    const auto idx = grid.unflatten(i);
    for (int dist = 1; dist < n && !found; ++dist) {
      for (int a = 0; a < grid.dim() && !found; ++a) {
        for (int sign : {+1, -1}) {
          auto j = idx;
          j[a] += sign * dist;
          if (j[a] < 0 || j[a] >= n) continue;
          const cplx cand = raw[grid.flatten(j)];
          if (finite(cand)) {
            values[i] = cand;
            found = true;
            break;
          }
        }
      }
    }
    if (!found) values[i] = 0.0;
  }
  return Field(grid, std::move(values));
}

double Field::max_abs() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

cplx Field::integral() const {
  cplx s{0.0, 0.0};
  for (const auto& v : values_) s += v;
  return s * grid_.cell_volume();
}

void Field::require_same_grid(const Field& other) const {
  if (!(grid_ == other.grid_)) throw InvalidArgument("Field: grid mismatch");
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(cplx a) {
  for (auto& v : values_) v *= a;
  return *this;
}

Field& Field::axpy(cplx a, const Field& other) {
  require_same_grid(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * other.values_[i];
  return *this;
}

LorentzExponents::LorentzExponents(double p, double q) : p_(p), q_(q) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw InvalidArgument("LorentzExponents: need 1 < p < inf");
  }
  if (!(q >= 1.0)) throw InvalidArgument("LorentzExponents: need 1 <= q <= inf");
}

LorentzExponents LorentzExponents::predual() const { return {p_ / (p_ - 1.0), 1.0}; }

std::string LorentzExponents::to_string() const {
  std::ostringstream os;
  os << "L^{" << p_ << "," << (is_weak() ? std::string("inf") : std::to_string(q_)) << "}";
  return os.str();
}

double distribution_function(const Field& u, double s) {
  if (s < 0.0) throw InvalidArgument("distribution_function: level must be non-negative");
  std::size_t count = 0;
  for (const auto& v : u.values()) {
    if (std::abs(v) > s) ++count;
  }
  return static_cast<double>(count) * u.grid().cell_volume();
}

std::vector<double> decreasing_rearrangement(const Field& u) {
  std::vector<double> a(u.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(u[i]);
  std::sort(a.begin(), a.end(), std::greater<>());
  return a;
}

double lorentz_norm_sorted(std::span<const double> sorted, double cell_volume,
                           const LorentzExponents& e) {
  const double p = e.p();
  if (e.is_weak()) {
    double best = 0.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      if (sorted[k] == 0.0) break;
      const double t = static_cast<double>(k + 1) * cell_volume;
      best = std::max(best, sorted[k] * std::pow(t, 1.0 / p));
    }
    return best;
  }
  const double q = e.q();
  const double r = q / p;
  double sum = 0.0;
  double prev = 0.0;  // ((k-1) v)^{q/p}
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (sorted[k] == 0.0) break;
    const double next = std::pow(static_cast<double>(k + 1) * cell_volume, r);
    sum += std::pow(sorted[k], q) * (next - prev);
    prev = next;
  }
  return std::pow((p / q) * sum, 1.0 / q);
}

double lorentz_norm(const Field& u, const LorentzExponents& e) {
  const auto sorted = decreasing_rearrangement(u);
  return lorentz_norm_sorted(sorted, u.grid().cell_volume(), e);
}

double layer_cake_norm(const Field& u, const LorentzExponents& e) {
  const auto a = decreasing_rearrangement(u);
  const double v = u.grid().cell_volume();
  const double p = e.p();
  // mu(|u| > s) = k v for s in [a_{k+1}, a_k) when a_k > a_{k+1}.
  if (e.is_weak()) {
    double best = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double next = k + 1 < a.size() ? a[k + 1] : 0.0;
      if (a[k] > next) {
        best = std::max(best, a[k] * std::pow(static_cast<double>(k + 1) * v, 1.0 / p));
      }
    }
    return best;
  }
  const double q = e.q();
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double next = k + 1 < a.size() ? a[k + 1] : 0.0;
    if (a[k] > next) {
      sum += std::pow(static_cast<double>(k + 1) * v, q / p) *
             (std::pow(a[k], q) - std::pow(next, q)) / q;
    }
  }
  return std::pow(sum, 1.0 / q);
}

Field tensor_bump(const GridSpec& grid, std::array<double, 3> center, std::array<double, 3> width) {
  for (int a = 0; a < grid.dim(); ++a) {
    if (!(width[a] > 0.0)) throw InvalidArgument("tensor_bump: widths must be positive");
  }
  return Field::sample(grid, [&](std::span<const double> x) {
    double v = 1.0;
    for (std::size_t a = 0; a < x.size(); ++a) {
      const double r = (x[a] - center[a]) / width[a];
      if (std::abs(r) >= 1.0) return cplx{0.0, 0.0};
      v *= (1.0 - r * r) * (1.0 - r * r);
    }
    return cplx{v, 0.0};
  });
}

WeakHolderReport weak_holder_check(const Field& u, const Field& v, double p1, double p2) {
  if (!(p1 > 1.0) || !(p2 > 1.0)) {
    throw InvalidArgument("weak_holder_check: p1 and p2 must exceed 1");
  }
  const double p = 1.0 / (1.0 / p1 + 1.0 / p2);
  if (!(p > 1.0)) {
    throw InvalidArgument("weak_holder_check: 1/p1 + 1/p2 must be < 1 (p = 1 is excluded)");
  }
  if (!(u.grid() == v.grid())) throw InvalidArgument("weak_holder_check: grid mismatch");
  Field uv(u.grid());
  for (std::size_t i = 0; i < uv.size(); ++i) uv[i] = u[i] * v[i];

  WeakHolderReport rep;
  rep.p = p;
  rep.constant = p / (p - 1.0) * std::pow(2.0, 1.0 / p);
  rep.lhs = lorentz_norm(uv, LorentzExponents::weak(p));
  const double nu = lorentz_norm(u, LorentzExponents::weak(p1));
  const double nv = lorentz_norm(v, LorentzExponents::weak(p2));
  rep.rhs = rep.constant * nu * nv;
  rep.ratio = nu * nv > 0.0 ? rep.lhs / (nu * nv) : 0.0;
  rep.ok = rep.lhs <= rep.rhs;
  return rep;
}

}  // namespace papevo
