#pragma once

// Bright squeezed vacuum after beamsplitter loss. A squeezed vacuum with
// initial squeezing r0 (N = sinh^2 r0 photons) that loses a fraction R
// becomes a squeezed thermal state S(r) rho_th(n_th) S(r)^dag, equivalently a
// Gaussian mixture of squeezed coherent states |beta, r>.

#include <cstdint>
#include <vector>

#include "kerrq/fock.hpp"

namespace kerrq {

struct LossyBsvParams {
  double r0 = 0.0;
  double n_photons = 0.0;  // N = sinh^2 r0
  double loss = 0.0;       // R
  double r = 0.0;
  double n_th = 0.0;
  double purity = 1.0;
  // Quadrature variances after loss, vacuum = 1.
  double var_max = 1.0;
  double var_min = 1.0;
  // Large-N forms r ~ r0/2 - ln(R/T)/4, n_th ~ sqrt(R T N) and their
  // relative deviation from the exact values (NaN when undefined).
  double r_approx = 0.0;
  double n_th_approx = 0.0;
  double r_approx_rel_dev = 0.0;
  double n_th_approx_rel_dev = 0.0;
  /// R = 0 (lossless) or R = 1 (vacuum): exact limits, approximations unused.
  bool degenerate = false;

  /// Parameters of a given squeezed thermal state without loss history;
  /// r0, N and R are set to NaN.
  static LossyBsvParams squeezed_thermal(double n_th, double r);
};

LossyBsvParams lossy_bsv_params(double r0, double loss);
LossyBsvParams lossy_bsv_params_from_photons(double n_photons, double loss);

struct MixtureSample {
  Complex beta;
  double r = 0.0;
};

/// Re beta ~ N(0, n_th e^{2r}/2), Im beta ~ N(0, n_th e^{-2r}/2).
std::vector<MixtureSample> sample_displacements(const LossyBsvParams& params, int count,
                                                std::uint64_t seed);

/// Average of |beta, r><beta, r| over sample_displacements(params, count, seed).
DensityMatrix reconstruct_mixture(const LossyBsvParams& params, int dim, int count,
                                  std::uint64_t seed);

}  // namespace kerrq
