#pragma once

// Single-mode states in a truncated Fock basis.
//
// Quadratures: canonical x = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2))
// with vacuum variance 1/2. The "paper" convention X = a + a^dag has vacuum
// variance 1; values convert by sqrt(2), variances by 2.
//
// Squeezing orientation: S(r) = exp((r/2)(a^dag^2 - a^2)). For r > 0 it
// stretches x and compresses p, so a real displacement gives a
// phase-squeezed state.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "kerrq/error.hpp"

namespace kerrq {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Default threshold above which a truncation deficit counts as a warning.
inline constexpr double kTruncationWarning = 1e-6;

enum class Convention { kCanonical, kPaper };

struct QuadratureConvention {
  Convention tag = Convention::kCanonical;

  static QuadratureConvention canonical() { return {Convention::kCanonical}; }
  static QuadratureConvention paper() { return {Convention::kPaper}; }

  double vacuum_variance() const { return tag == Convention::kPaper ? 1.0 : 0.5; }
  /// Multiplier taking a canonical quadrature value into this convention.
  double value_scale() const { return tag == Convention::kPaper ? 1.4142135623730951 : 1.0; }
  double variance_scale() const { return tag == Convention::kPaper ? 2.0 : 1.0; }
  const char* name() const { return tag == Convention::kPaper ? "paper" : "canonical"; }
};

/// Pure state. Amplitudes are never renormalized behind the caller's back;
/// the missing probability mass is kept as the truncation deficit.
class FockVector {
 public:
  explicit FockVector(CVector amps);
  FockVector(CVector amps, double truncation_deficit);

  int dim() const { return static_cast<int>(amps_.size()); }
  const CVector& amps() const { return amps_; }
  Complex operator[](int n) const { return amps_[n]; }

  double norm_squared() const { return amps_.squaredNorm(); }
  double truncation_deficit() const { return deficit_; }
  bool truncated(double tol = kTruncationWarning) const { return deficit_ > tol; }

  FockVector normalized() const;

 private:
  CVector amps_;
  double deficit_ = 0.0;
};

class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix elems);
  DensityMatrix(CMatrix elems, double truncation_deficit);

  static DensityMatrix from_pure(const FockVector& psi);

  int dim() const { return static_cast<int>(elems_.rows()); }
  const CMatrix& elems() const { return elems_; }
  Complex operator()(int m, int n) const { return elems_(m, n); }

  double trace() const { return elems_.diagonal().real().sum(); }
  double purity() const;
  double truncation_deficit() const { return deficit_; }
  bool truncated(double tol = kTruncationWarning) const { return deficit_ > tol; }

  DensityMatrix normalized() const;

  /// Throws kNumericalFailure when Hermiticity, trace or positivity bounds
  /// are violated.
  void validate() const;

 private:
  CMatrix elems_;
  double deficit_ = 0.0;
};

// -- constructors -----------------------------------------------------------

FockVector coherent_state(Complex alpha, int dim);

/// S(r e^{i theta})-type squeezed vacuum; theta = 0 matches S(r)|0>.
/// Even amplitudes (e^{i theta} tanh r)^k sqrt((2k)!)/(2^k k!)/sqrt(cosh r).
FockVector squeezed_vacuum_state(double r, double theta, int dim);
inline FockVector squeezed_vacuum_state(double r, int dim) {
  return squeezed_vacuum_state(r, 0.0, dim);
}

/// |beta, r> := S(r) D(alpha) |0> with alpha chosen so that <a> = beta.
FockVector squeezed_coherent_state(Complex beta, double r, int dim);

/// Displacement of S(r) D(alpha)|0>: beta = alpha cosh r + conj(alpha) sinh r.
Complex squeezed_displacement(Complex alpha, double r);
/// Inverse of squeezed_displacement.
Complex squeezing_frame_amplitude(Complex beta, double r);

DensityMatrix thermal_state(double n_th, int dim);
DensityMatrix squeezed_thermal_state(double n_th, double r, int dim);

/// exp((r/2)(a^dag^2 - a^2)) on the truncated space. Real orthogonal.
Eigen::MatrixXd build_squeeze_matrix(double r, int dim);

/// exp(-i angle n): rotates phase space so that alpha -> alpha e^{-i angle}.
FockVector phase_rotate(const FockVector& psi, double angle);
DensityMatrix phase_rotate(const DensityMatrix& rho, double angle);

// -- observables ------------------------------------------------------------

struct Moments {
  double mean_n = 0.0;
  double mean_x = 0.0;
  double mean_p = 0.0;
  double var_x = 0.0;
  double var_p = 0.0;
  double cov_xp = 0.0;   // symmetrized
  double var_min = 0.0;  // principal variances of the (x, p) covariance
  double var_max = 0.0;
  double purity = 1.0;
};

Moments moments(const FockVector& psi,
                QuadratureConvention conv = QuadratureConvention::canonical());
Moments moments(const DensityMatrix& rho,
                QuadratureConvention conv = QuadratureConvention::canonical());

std::vector<double> photon_distribution(const FockVector& psi);
std::vector<double> photon_distribution(const DensityMatrix& rho);

double fidelity(const FockVector& a, const FockVector& b);
double fidelity(const DensityMatrix& rho, const FockVector& psi);
/// (1/2) || a - b ||_1 via Hermitian eigenvalues.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace kerrq
