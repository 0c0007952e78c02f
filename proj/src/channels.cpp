#include "kerrq/channels.hpp"

#include <cmath>
#include <limits>

namespace kerrq {

LossChannel::LossChannel(double reflectance) : r_(reflectance) {
  require(reflectance >= 0.0 && reflectance <= 1.0, ErrorCode::kInvalidArgument,
          "loss reflectance must lie in [0, 1]");
}

FockVector kerr_apply(const FockVector& psi, KerrStrength k) {
  CVector amps = psi.amps();
  for (int n = 0; n < psi.dim(); ++n) {
    const double nn = static_cast<double>(n) * (n - 1);
    amps[n] *= std::polar(1.0, -k.chi_t * nn);
  }
  return FockVector(std::move(amps), psi.truncation_deficit());
}

DensityMatrix kerr_apply(const DensityMatrix& rho, KerrStrength k) {
  const int d = rho.dim();
  Eigen::VectorXcd ph(d);
  for (int n = 0; n < d; ++n) ph[n] = std::polar(1.0, -k.chi_t * n * (n - 1.0));
  CMatrix e = ph.asDiagonal() * rho.elems() * ph.conjugate().asDiagonal();
  return DensityMatrix(std::move(e), rho.truncation_deficit());
}

DensityMatrix loss_apply(const DensityMatrix& rho, const LossChannel& ch) {
  const int d = rho.dim();
  const double refl = ch.reflectance();
  const double trans = ch.transmittance();
  if (refl == 0.0) return rho;

  // amp(n, k) = sqrt(C(n,k) T^(n-k) R^k): the K_k matrix element <n-k|K_k|n>.
  const double log_t = trans > 0.0 ? std::log(trans) : -std::numeric_limits<double>::infinity();
  const double log_r = std::log(refl);
  Eigen::MatrixXd amp = Eigen::MatrixXd::Zero(d, d);  // (n, k)
  for (int n = 0; n < d; ++n) {
    const double lg_n = std::lgamma(n + 1.0);
    for (int k = 0; k <= n; ++k) {
      double lw = lg_n - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * log_r;
      if (n - k > 0) lw += (n - k) * log_t;
      amp(n, k) = std::exp(0.5 * lw);
    }
  }
  // Largest k whose Kraus weight exceeds the cutoff on some level.
  int k_max = 0;
  for (int k = 0; k < d; ++k) {
    if (amp.col(k).cwiseAbs2().maxCoeff() >= 1e-12) k_max = k;
  }

  const CMatrix& in = rho.elems();
  CMatrix out = CMatrix::Zero(d, d);
  for (int k = 0; k <= k_max; ++k) {
    const int span = d - k;
    const Eigen::VectorXd w = amp.col(k).segment(k, span);
    out.topLeftCorner(span, span).noalias() +=
        (w.asDiagonal() * in.bottomRightCorner(span, span) * w.asDiagonal());
  }
  return DensityMatrix(std::move(out), rho.truncation_deficit());
}

DensityMatrix loss_apply(const FockVector& psi, const LossChannel& ch) {
  return loss_apply(DensityMatrix::from_pure(psi), ch);
}

namespace {

void check_medium(const KerrMediumParams& p) {
  require(p.omega0 > 0.0 && p.n0 > 0.0 && p.v_eff > 0.0, ErrorCode::kInvalidArgument,
          "omega0, n0 and V_eff must be strictly positive");
  require(p.n2 >= 0.0, ErrorCode::kInvalidArgument, "n2 must be nonnegative");
}

}  // namespace

double kerr_constant(const KerrMediumParams& p) {
  check_medium(p);
  using namespace constants;
  return kHbar * p.omega0 * p.omega0 * kSpeedOfLight * p.n2 / (p.n0 * p.n0 * p.v_eff);
}

double classical_kerr_phase(const KerrMediumParams& p) {
  require(p.omega0 > 0.0, ErrorCode::kInvalidArgument, "omega0 must be positive");
  require(p.n2 >= 0.0 && p.length >= 0.0 && p.intensity >= 0.0,
          ErrorCode::kInvalidArgument, "n2, length and intensity must be nonnegative");
  return p.n2 * p.intensity * p.length * p.omega0 / constants::kSpeedOfLight;
}

double kerr_phase_at_mean(double chi_t, double n_mean) { return 2.0 * chi_t * n_mean; }

double chi_t_for_phase(double phi_kerr, double n_mean) {
  require(n_mean > 0.0, ErrorCode::kInvalidArgument, "mean photon number must be positive");
  return phi_kerr / (2.0 * n_mean);
}

}  // namespace kerrq
