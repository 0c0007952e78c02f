#pragma once

#include "kerrq/fock.hpp"

namespace kerrq {

/// Dimensionless chi*t of the self-Kerr unitary exp(-i chi t a^dag^2 a^2).
struct KerrStrength {
  double chi_t = 0.0;
};

/// Physical medium description, SI units throughout.
struct KerrMediumParams {
  double omega0 = 0.0;  // angular frequency [rad/s]
  double n0 = 0.0;      // linear refractive index
  double n2 = 0.0;      // nonlinear index [m^2/W]
  double v_eff = 0.0;   // effective mode volume [m^3]
  double length = 0.0;  // propagation length [m]
  double intensity = 0.0;  // peak intensity [W/m^2]
};

/// Beamsplitter loss: a fraction R of the light is reflected away and
/// replaced by vacuum.
class LossChannel {
 public:
  explicit LossChannel(double reflectance);
  double reflectance() const { return r_; }
  double transmittance() const { return 1.0 - r_; }

 private:
  double r_;
};

FockVector kerr_apply(const FockVector& psi, KerrStrength k);
DensityMatrix kerr_apply(const DensityMatrix& rho, KerrStrength k);

/// Amplitude-damping Kraus sum. Kraus terms whose weight on every level is
/// below 1e-12 are dropped.
DensityMatrix loss_apply(const DensityMatrix& rho, const LossChannel& ch);
DensityMatrix loss_apply(const FockVector& psi, const LossChannel& ch);

/// chi = hbar omega0^2 c n2 / (n0^2 V_eff)  [rad/s]
double kerr_constant(const KerrMediumParams& p);
/// Classical self-phase: n2 I L omega0 / c  [rad]
double classical_kerr_phase(const KerrMediumParams& p);
/// Kerr phase at the mean photon number, 2 chi t n_mean.
double kerr_phase_at_mean(double chi_t, double n_mean);
/// chi*t that produces the given Kerr phase at n_mean photons.
double chi_t_for_phase(double phi_kerr, double n_mean);

/// Angle to pass to phase_rotate so that a Kerr-evolved state returns to
/// its original mean phase (co-rotating frame). Linearizes n(n-1) about
/// n_mean.
inline double corotating_angle(double chi_t, double n_mean) {
  return -chi_t * (2.0 * n_mean - 1.0);
}

namespace constants {
inline constexpr double kHbar = 1.054571817e-34;         // J s
inline constexpr double kSpeedOfLight = 299792458.0;     // m/s
}  // namespace constants

}  // namespace kerrq
