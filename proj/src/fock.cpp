#include "kerrq/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

namespace kerrq {

namespace {

void check_dim(int dim) {
  require(dim >= 1, ErrorCode::kInvalidArgument, "Fock dimension must be >= 1");
}

double deficit_of(double norm2) { return std::max(0.0, 1.0 - norm2); }

}  // namespace

// -- FockVector ---------------------------------------------------------------

FockVector::FockVector(CVector amps) : amps_(std::move(amps)) {
  check_dim(dim());
  deficit_ = deficit_of(amps_.squaredNorm());
}

FockVector::FockVector(CVector amps, double truncation_deficit)
    : amps_(std::move(amps)), deficit_(truncation_deficit) {
  check_dim(dim());
}

FockVector FockVector::normalized() const {
  const double n = std::sqrt(norm_squared());
  require(n > 0.0, ErrorCode::kNumericalFailure, "cannot normalize a zero vector");
  return FockVector(amps_ / n, 0.0);
}

// -- DensityMatrix ------------------------------------------------------------

DensityMatrix::DensityMatrix(CMatrix elems) : elems_(std::move(elems)) {
  require(elems_.rows() == elems_.cols(), ErrorCode::kInvalidArgument,
          "density matrix must be square");
  check_dim(dim());
  deficit_ = deficit_of(trace());
}

DensityMatrix::DensityMatrix(CMatrix elems, double truncation_deficit)
    : elems_(std::move(elems)), deficit_(truncation_deficit) {
  require(elems_.rows() == elems_.cols(), ErrorCode::kInvalidArgument,
          "density matrix must be square");
  check_dim(dim());
}

DensityMatrix DensityMatrix::from_pure(const FockVector& psi) {
  return DensityMatrix(psi.amps() * psi.amps().adjoint(), psi.truncation_deficit());
}

double DensityMatrix::purity() const {
  // Tr(rho^2) = sum |rho_mn|^2 for Hermitian rho.
  return elems_.squaredNorm();
}

DensityMatrix DensityMatrix::normalized() const {
  const double t = trace();
  require(t > 0.0, ErrorCode::kNumericalFailure, "cannot normalize a zero-trace matrix");
  return DensityMatrix(elems_ / t, 0.0);
}

void DensityMatrix::validate() const {
  const double scale = std::max(1e-300, elems_.cwiseAbs().maxCoeff());
  for (int m = 0; m < dim(); ++m)
    for (int n = m; n < dim(); ++n)
      require(std::abs(elems_(m, n) - std::conj(elems_(n, m))) <= 1e-12 * scale,
              ErrorCode::kNumericalFailure, "density matrix is not Hermitian");
  const double t = trace();
  require(t <= 1.0 + 1e-10 && t >= 1.0 - std::max(deficit_, 1e-10) - 1e-10,
          ErrorCode::kNumericalFailure, "density matrix trace out of range");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(elems_, Eigen::EigenvaluesOnly);
  require(es.eigenvalues().minCoeff() >= -1e-10, ErrorCode::kNumericalFailure,
          "density matrix has a negative eigenvalue");
}

// -- constructors -------------------------------------------------------------

FockVector coherent_state(Complex alpha, int dim) {
  check_dim(dim);
  CVector amps = CVector::Zero(dim);
  const double mod = std::abs(alpha);
  if (mod == 0.0) {
    amps[0] = 1.0;
    return FockVector(std::move(amps));
  }
  const double log_mod = std::log(mod);
  const double arg = std::arg(alpha);
  const double log_vac = -0.5 * mod * mod;
  for (int n = 0; n < dim; ++n) {
    const double log_mag = log_vac + n * log_mod - 0.5 * std::lgamma(n + 1.0);
    amps[n] = std::polar(std::exp(log_mag), n * arg);
  }
  return FockVector(std::move(amps));
}

FockVector squeezed_vacuum_state(double r, double theta, int dim) {
  check_dim(dim);
  CVector amps = CVector::Zero(dim);
  if (r == 0.0) {
    amps[0] = 1.0;
    return FockVector(std::move(amps));
  }
  const double sign = r < 0.0 ? -1.0 : 1.0;
  const double t = std::tanh(std::abs(r));
  const double log_t = std::log(t);
  const double log_pre = -0.5 * std::log(std::cosh(r));
  for (int k = 0; 2 * k < dim; ++k) {
    const double log_mag = log_pre + k * log_t + 0.5 * std::lgamma(2.0 * k + 1.0) -
                           k * std::numbers::ln2 - std::lgamma(k + 1.0);
    double mag = std::exp(log_mag);
    if (sign < 0.0 && (k % 2 == 1)) mag = -mag;
    amps[2 * k] = std::polar(mag, k * theta);
  }
  return FockVector(std::move(amps));
}

Complex squeezed_displacement(Complex alpha, double r) {
  return alpha * std::cosh(r) + std::conj(alpha) * std::sinh(r);
}

Complex squeezing_frame_amplitude(Complex beta, double r) {
  return beta * std::cosh(r) - std::conj(beta) * std::sinh(r);
}

FockVector squeezed_coherent_state(Complex beta, double r, int dim) {
  check_dim(dim);
  // The state is the eigenvector of b = a cosh r - a^dag sinh r with
  // eigenvalue alpha; its Fock components follow a three-term recurrence
  // seeded by the closed-form vacuum overlap. Magnitudes are carried with a
  // running log scale so that bright states do not overflow.
  const Complex alpha = squeezing_frame_amplitude(beta, r);
  const double ch = std::cosh(r);
  const double sh = std::sinh(r);
  const double th = std::tanh(r);

  const Complex log_c0 = -0.5 * std::log(ch) - 0.5 * std::norm(beta) +
                         0.5 * std::conj(beta) * std::conj(beta) * th;
  const Complex phase0 = std::polar(1.0, log_c0.imag());

  CVector amps = CVector::Zero(dim);
  double log_scale = log_c0.real();
  Complex prev = 0.0;
  Complex cur = phase0;
  amps[0] = cur * std::exp(log_scale);
  for (int n = 0; n + 1 < dim; ++n) {
    const Complex next =
        (alpha * cur + sh * std::sqrt(static_cast<double>(n)) * prev) /
        (ch * std::sqrt(n + 1.0));
    prev = cur;
    cur = next;
    const double mag = std::abs(cur);
    if (mag > 1e100 || (mag < 1e-100 && mag > 0.0)) {
      prev /= mag;
      cur /= mag;
      log_scale += std::log(mag);
    }
    amps[n + 1] = cur * std::exp(log_scale);
  }
  return FockVector(std::move(amps));
}

DensityMatrix thermal_state(double n_th, int dim) {
  check_dim(dim);
  require(n_th >= 0.0 && std::isfinite(n_th), ErrorCode::kInvalidArgument,
          "thermal photon number must be finite and >= 0");
  CMatrix rho = CMatrix::Zero(dim, dim);
  if (n_th == 0.0) {
    rho(0, 0) = 1.0;
    return DensityMatrix(std::move(rho));
  }
  const double log_ratio = std::log(n_th / (1.0 + n_th));
  const double log_norm = -std::log1p(n_th);
  for (int n = 0; n < dim; ++n) rho(n, n) = std::exp(log_norm + n * log_ratio);
  return DensityMatrix(std::move(rho));
}

Eigen::MatrixXd build_squeeze_matrix(double r, int dim) {
  require(dim >= 2, ErrorCode::kInvalidArgument, "squeeze matrix needs dim >= 2");
  require(std::isfinite(r), ErrorCode::kInvalidArgument, "squeezing must be finite");
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 0; n + 2 < dim; ++n) {
    const double v = 0.5 * r * std::sqrt((n + 1.0) * (n + 2.0));
    gen(n + 2, n) = v;
    gen(n, n + 2) = -v;
  }
  Eigen::MatrixXd u = gen.exp();
  require(u.allFinite(), ErrorCode::kNumericalFailure,
          "squeeze matrix exponential did not converge");
  // The top rows are corrupted by truncation; only the inner block is checked.
  const int inner = std::max(1, dim / 2);
  const Eigen::MatrixXd gram = u.leftCols(inner).transpose() * u.leftCols(inner);
  const double resid =
      (gram - Eigen::MatrixXd::Identity(inner, inner)).cwiseAbs().maxCoeff();
  require(resid < 1e-8, ErrorCode::kNumericalFailure,
          "squeeze matrix failed the unitarity check");
  return u;
}

DensityMatrix squeezed_thermal_state(double n_th, double r, int dim) {
  check_dim(dim);
  const DensityMatrix thermal_full = thermal_state(n_th, dim);
  if (r == 0.0) return thermal_full;
  // Work in an enlarged space so that the corrupted edge of the truncated
  // exponential never reaches the returned block.
  const int work = dim + std::max(40, dim / 2);
  const DensityMatrix thermal = thermal_state(n_th, work);
  const Eigen::MatrixXd u = build_squeeze_matrix(r, work);
  const Eigen::VectorXd p = thermal.elems().diagonal().real();
  const Eigen::MatrixXd up = u * p.asDiagonal();
  const Eigen::MatrixXd rho = up * u.transpose();
  CMatrix out = rho.topLeftCorner(dim, dim).cast<Complex>();
  return DensityMatrix(std::move(out));
}

FockVector phase_rotate(const FockVector& psi, double angle) {
  CVector amps = psi.amps();
  for (int n = 0; n < psi.dim(); ++n) amps[n] *= std::polar(1.0, -angle * n);
  return FockVector(std::move(amps), psi.truncation_deficit());
}

DensityMatrix phase_rotate(const DensityMatrix& rho, double angle) {
  CMatrix e = rho.elems();
  for (int m = 0; m < rho.dim(); ++m)
    for (int n = 0; n < rho.dim(); ++n) e(m, n) *= std::polar(1.0, -angle * (m - n));
  return DensityMatrix(std::move(e), rho.truncation_deficit());
}

// -- observables --------------------------------------------------------------

namespace {

struct LadderSums {
  double trace = 0.0;
  double n = 0.0;
  Complex a = 0.0;   // <a>
  Complex a2 = 0.0;  // <a^2>
  double purity = 1.0;
};

Moments finish(const LadderSums& s, QuadratureConvention conv) {
  Moments m;
  m.mean_n = s.n;
  const double mx = std::sqrt(2.0) * s.a.real();
  const double mp = std::sqrt(2.0) * s.a.imag();
  // <x^2> = Re<a^2> + <n> + 1/2, <p^2> = -Re<a^2> + <n> + 1/2,
  // <(xp+px)/2> = Im<a^2>.
  const double x2 = s.a2.real() + s.n + 0.5 * s.trace;
  const double p2 = -s.a2.real() + s.n + 0.5 * s.trace;
  const double vx = x2 - mx * mx;
  const double vp = p2 - mp * mp;
  const double cxp = s.a2.imag() - mx * mp;
  const double half_sum = 0.5 * (vx + vp);
  const double half_diff = std::sqrt(0.25 * (vx - vp) * (vx - vp) + cxp * cxp);

  const double vs = conv.value_scale();
  const double ws = conv.variance_scale();
  m.mean_x = mx * vs;
  m.mean_p = mp * vs;
  m.var_x = vx * ws;
  m.var_p = vp * ws;
  m.cov_xp = cxp * ws;
  m.var_min = (half_sum - half_diff) * ws;
  m.var_max = (half_sum + half_diff) * ws;
  m.purity = s.purity;
  return m;
}

}  // namespace

Moments moments(const FockVector& psi, QuadratureConvention conv) {
  const CVector& c = psi.amps();
  LadderSums s;
  for (int n = 0; n < psi.dim(); ++n) {
    const double pn = std::norm(c[n]);
    s.trace += pn;
    s.n += n * pn;
    if (n >= 1) s.a += std::sqrt(static_cast<double>(n)) * std::conj(c[n - 1]) * c[n];
    if (n >= 2)
      s.a2 += std::sqrt(static_cast<double>(n) * (n - 1.0)) * std::conj(c[n - 2]) * c[n];
  }
  s.purity = s.trace * s.trace;
  return finish(s, conv);
}

Moments moments(const DensityMatrix& rho, QuadratureConvention conv) {
  const CMatrix& e = rho.elems();
  LadderSums s;
  for (int n = 0; n < rho.dim(); ++n) {
    s.trace += e(n, n).real();
    s.n += n * e(n, n).real();
    // Tr(rho a) = sum_n sqrt(n) rho_{n, n-1}
    if (n >= 1) s.a += std::sqrt(static_cast<double>(n)) * e(n, n - 1);
    if (n >= 2) s.a2 += std::sqrt(static_cast<double>(n) * (n - 1.0)) * e(n, n - 2);
  }
  s.purity = rho.purity();
  return finish(s, conv);
}

std::vector<double> photon_distribution(const FockVector& psi) {
  std::vector<double> p(psi.dim());
  for (int n = 0; n < psi.dim(); ++n) p[n] = std::norm(psi[n]);
  return p;
}

std::vector<double> photon_distribution(const DensityMatrix& rho) {
  std::vector<double> p(rho.dim());
  for (int n = 0; n < rho.dim(); ++n) p[n] = rho(n, n).real();
  return p;
}

double fidelity(const FockVector& a, const FockVector& b) {
  require(a.dim() == b.dim(), ErrorCode::kInvalidArgument, "dimension mismatch");
  return std::norm(a.amps().dot(b.amps()));
}

double fidelity(const DensityMatrix& rho, const FockVector& psi) {
  require(rho.dim() == psi.dim(), ErrorCode::kInvalidArgument, "dimension mismatch");
  return (psi.amps().adjoint() * rho.elems() * psi.amps())(0, 0).real();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  require(a.dim() == b.dim(), ErrorCode::kInvalidArgument, "dimension mismatch");
  const CMatrix diff = a.elems() - b.elems();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace kerrq
