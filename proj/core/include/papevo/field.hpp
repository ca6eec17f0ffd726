#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace papevo {

using cplx = std::complex<double>;

/// Thrown when an operation is called outside its documented domain.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Uniform node grid on the box [-R, R)^d with n points per axis.
///
/// Node i sits at -R + i*h, h = 2R/n, so for even n the origin is a node.
/// Values are stored lexicographically with axis 0 varying slowest.
class GridSpec {
 public:
  GridSpec(int dim, int points_per_axis, double half_width);

  /// One-point grid of unit cell volume, used to carry scalar signals.
  static GridSpec scalar();

  int dim() const { return dim_; }
  int points_per_axis() const { return n_; }
  double half_width() const { return half_width_; }
  double spacing() const { return 2.0 * half_width_ / n_; }
  double cell_volume() const;
  double total_measure() const;
  std::size_t size() const;
  bool is_scalar() const { return n_ == 1; }

  double coordinate(int i) const { return -half_width_ + i * spacing(); }
  std::array<int, 3> unflatten(std::size_t index) const;
  std::size_t flatten(std::array<int, 3> idx) const;
  /// Physical position of a flat index (unused axes are 0).
  std::array<double, 3> position(std::size_t index) const;

  bool operator==(const GridSpec& other) const = default;

 private:
  GridSpec(int dim, int n, double half_width, bool /*unchecked*/)
      : dim_(dim), n_(n), half_width_(half_width) {}

  int dim_;
  int n_;
  double half_width_;
};

/// What to do with non-finite samples of an analytic test function.
enum class SingularMask {
  neighbor,  ///< copy the nearest finite axis neighbor
  zero,      ///< drop the sample (value 0)
};

/// Complex samples of a function on a GridSpec.
class Field {
 public:
  /// Zero on the scalar grid.
  Field() : Field(GridSpec::scalar()) {}
  explicit Field(GridSpec grid);
  Field(GridSpec grid, std::vector<cplx> values);

  using Sampler = std::function<cplx(std::span<const double>)>;
  static Field sample(const GridSpec& grid, const Sampler& fn,
                      SingularMask mask = SingularMask::neighbor);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }
  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }

  double max_abs() const;
  /// sum(values) * h^d
  cplx integral() const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(cplx a);
  /// this += a * other
  Field& axpy(cplx a, const Field& other);

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(cplx a, Field b) { return b *= a; }

 private:
  void require_same_grid(const Field& other) const;

  GridSpec grid_;
  std::vector<cplx> values_;
};

/// Lorentz exponent pair (p, q); q may be infinite (weak-L^p).
class LorentzExponents {
 public:
  static constexpr double infinity = std::numeric_limits<double>::infinity();

  LorentzExponents(double p, double q);
  static LorentzExponents weak(double p) { return {p, infinity}; }

  double p() const { return p_; }
  double q() const { return q_; }
  bool is_weak() const { return q_ == infinity; }
  /// Dual couple (p', 1) of a weak space (p, inf).
  LorentzExponents predual() const;
  std::string to_string() const;

  bool operator==(const LorentzExponents&) const = default;

 private:
  double p_;
  double q_;
};

/// h^d times the number of grid points with |u| > s.
double distribution_function(const Field& u, double s);

/// |values| sorted in non-increasing order.
std::vector<double> decreasing_rearrangement(const Field& u);

/// Discrete Lorentz quasi-norm of u.
///
/// The rearrangement u* is piecewise constant on cells of width h^d.
/// q = inf gives sup_k u*_k (k h^d)^{1/p}; finite q integrates
/// (t^{1/p} u*(t))^q dt/t exactly over each cell.
double lorentz_norm(const Field& u, const LorentzExponents& e);

/// Same as lorentz_norm for an already sorted (non-increasing) profile.
double lorentz_norm_sorted(std::span<const double> sorted, double cell_volume,
                           const LorentzExponents& e);

/// Distribution-function ("layer cake") form of the Lorentz quasi-norm:
/// (int_0^inf (s mu(|u|>s)^{1/p})^q ds/s)^{1/q}. For finite q it equals
/// lorentz_norm / p^{1/q}; for q = inf the two coincide.
double layer_cake_norm(const Field& u, const LorentzExponents& e);

/// prod_a (1 - r_a^2)^2 on |r_a| < 1, r_a = (x_a - center_a) / width_a.
Field tensor_bump(const GridSpec& grid, std::array<double, 3> center, std::array<double, 3> width);

struct WeakHolderReport {
  double p = 0.0;         ///< 1/p = 1/p1 + 1/p2
  double lhs = 0.0;       ///< ||uv||_{p,inf}
  double rhs = 0.0;       ///< C_H ||u||_{p1,inf} ||v||_{p2,inf}
  double constant = 0.0;  ///< C_H = p/(p-1) * 2^{1/p}
  double ratio = 0.0;     ///< lhs / (||u|| ||v||), the measured constant
  bool ok = false;
};

WeakHolderReport weak_holder_check(const Field& u, const Field& v, double p1, double p2);

}  // namespace papevo
