#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "papevo/aligned.hpp"
#include "papevo/field.hpp"
#include "papevo/quadrature.hpp"

namespace papevo {

/// Diffusion coefficient b with Re b >= delta > 0.
class Coefficient {
 public:
  static Coefficient constant(cplx b, double delta);
  static Coefficient variable(Field b, double delta);

  bool is_constant() const { return !field_.has_value(); }
  cplx value() const;  ///< constant case only
  const Field& field() const;
  double delta() const { return delta_; }
  double max_abs() const;
  Coefficient conjugate() const;

 private:
  Coefficient(cplx b, std::optional<Field> field, double delta) : b_(b), field_(std::move(field)), delta_(delta) {}

  cplx b_;
  std::optional<Field> field_;
  double delta_;
};

enum class Backend { fourier, kernel, dense };

Backend parse_backend(const std::string& name);
std::string to_string(Backend b);

inline constexpr std::size_t kDenseMaxSize = 4096;

struct SemigroupSpec {
  SemigroupSpec(Coefficient coeff, Backend backend, GridSpec grid);

  Coefficient coeff;
  Backend backend;
  GridSpec grid;
};

/// Diagonal operator in a backend's modal coordinates: either a tensor
/// product of per-axis factors or a full diagonal.
struct Multiplier {
  std::vector<std::vector<cplx>> axes;
  std::vector<cplx> diag;
  bool separable() const { return diag.empty(); }
};

using Modal = CVec;

/// e^{-tA}, A = -b Laplacian, realized by one of three backends.
///
/// fourier: periodic box, exp(-t b |k|^2) on the DFT coefficients.
/// kernel:  free-space Gaussian convolution, zero padded to 2n per axis.
/// dense:   eigendecomposition of -diag(b) L_h, L_h the periodic
///          second-order Laplacian (variable b allowed).
class Semigroup {
 public:
  explicit Semigroup(SemigroupSpec spec);

  const SemigroupSpec& spec() const { return spec_; }
  const GridSpec& grid() const { return spec_.grid; }
  Backend backend() const { return spec_.backend; }

  /// e^{-tA'} with A' the adjoint (b conjugated; dense matrix transposed).
  Semigroup adjoint() const;

  Field apply(double t, const Field& u) const;
  /// A e^{-tA} u (fourier and dense backends).
  Field apply_generator(double t, const Field& u) const;

  std::size_t modal_size() const;
  Modal to_modal(const Field& u) const;
  Field from_modal(const Modal& c) const;
  Multiplier multiplier(double t) const;
  /// acc += weight * mult * in
  void accumulate(const Multiplier& mult, cplx weight, const Modal& in, Modal& acc) const;
  /// acc += mult * (wa * a + wb * b)
  void accumulate(const Multiplier& mult, cplx wa, const Modal& a, cplx wb, const Modal& b,
                  Modal& acc) const;

  /// Normalized 1D kernel taps for the kernel backend (length 2n, wrapped offsets).
  std::vector<cplx> kernel_taps(double t) const;

  struct DenseData;

 private:
  Semigroup(SemigroupSpec spec, std::shared_ptr<const DenseData> dense);
  std::vector<int> modal_dims() const;

  SemigroupSpec spec_;
  std::shared_ptr<const DenseData> dense_;
};

/// (4 pi b t)^{-d/2} exp(-|x-y|^2 / (4 b t)), principal branch.
cplx kernel_eval(const Coefficient& coeff, double t, std::span<const double> x, std::span<const double> y);

struct SmoothingReport {
  double p = 0.0;
  double q = 0.0;
  std::vector<double> t_samples;
  std::vector<double> norms;
  double fitted_exponent = 0.0;
  double fitted_constant = 0.0;
};

inline constexpr int kDefaultTrials = 16;

/// Random tensor-product bump (1 - r^2)^2 inputs used by smoothing_measurement:
/// per-axis half widths sqrt(t |b|) * U[0.5, 2], centers U[-h/2, h/2].
Field random_bump(const GridSpec& grid, std::uint64_t seed, double scale);

/// Empirical operator norms of e^{-tA}: L^{pIn} -> L^{pOut} for each output space.
std::vector<SmoothingReport> smoothing_measurement(const Semigroup& sg, const LorentzExponents& pIn,
                                                   const std::vector<LorentzExponents>& pOut,
                                                   const std::vector<double>& t_samples, int trials,
                                                   std::uint64_t seed);
SmoothingReport smoothing_measurement(const Semigroup& sg, const LorentzExponents& pIn,
                                      const LorentzExponents& pOut, const std::vector<double>& t_samples,
                                      int trials, std::uint64_t seed);

struct DualIntegral {
  double value = 0.0;
  std::vector<double> s;          ///< cell midpoints
  std::vector<double> integrand;  ///< ||e^{-sA'} psi||_{X'}
};

/// int_0^H ||e^{-tA'} psi||_{X'} dt on the graded midpoint mesh, where
/// X' = dualX (typically the (p', 1) predual of a weak space).
DualIntegral dual_time_integral_profile(const Semigroup& sg, const Field& psi, const LorentzExponents& dualX,
                                        const HistoryQuadrature& quad);
double dual_time_integral(const Semigroup& sg, const Field& psi, const LorentzExponents& dualX,
                          const HistoryQuadrature& quad);

}  // namespace papevo
