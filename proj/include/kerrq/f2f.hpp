#pragma once

// Synthetic single-shot f-2f interferometry and the shot-ensemble
// statistics built on it.

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "kerrq/fock.hpp"

namespace kerrq {

/// Interferometer calibration shared by synthesis and extraction. Both
/// pulses have the Gaussian field envelope exp(-(w - w_c)^2 / (2 sigma^2)).
struct F2fSetup {
  double center_wavelength = 800e-9;  // [m]
  double sigma_omega = 2.9e13;        // envelope width [rad/s]
  double ref_amp = 1.0;
  double kappa = 1.0;                 // alpha_2w = kappa alpha_w^2
  double snr_threshold = 10.0;

  double center_omega() const;
  void validate() const;
};

struct FringeEstimate {
  double amp_2w = 0.0;
  double phi_2w = 0.0;  // sideband phase at the band center
  double snr = 0.0;
  bool low_confidence = false;
};

struct ShotRecord {
  std::vector<double> wavelengths;  // [m]
  std::vector<double> intensity;
  std::optional<Complex> true_alpha;
  std::optional<FringeEstimate> extracted;
};

/// Wavelengths of n points equally spaced in angular frequency over
/// w_c +/- span_sigmas * sigma_omega, in increasing wavelength order.
std::vector<double> frequency_uniform_grid(const F2fSetup& setup, int n_points,
                                           double span_sigmas = 6.0);

/// Throws kInvalidArgument unless a fringe spans >= 8 samples and the grid
/// holds >= 6 fringes.
void check_fringe_sampling(const std::vector<double>& wavelengths, double delay);

/// I(w) = |E_ref(w) + E_2w(w) e^{i (w - w_c) tau}|^2 plus Gaussian noise,
/// clipped at zero.
ShotRecord synth_shot(Complex alpha_w, double delay, const std::vector<double>& wavelengths,
                      double noise_rms, std::uint64_t seed, const F2fSetup& setup);

/// Fourier sideband analysis at the given delay; nonuniform frequency grids
/// are first resampled with a natural cubic spline.
FringeEstimate extract_fringe(const ShotRecord& shot, double delay, const F2fSetup& setup);

struct ShgInversion {
  double amp_w = 0.0;
  double phi_w = 0.0;      // phi_2w / 2
  double phi_w_alt = 0.0;  // the other branch, phi_w + pi wrapped to (-pi, pi]
  bool phase_defined = false;
};

ShgInversion invert_shg(double amp_2w, double phi_2w);

struct CovarianceMap {
  std::vector<double> wavelengths;
  Eigen::MatrixXd cov;
};

CovarianceMap covariance_map(const std::vector<ShotRecord>& shots);

struct ModeSpectrum {
  Eigen::VectorXd weights;  // nonincreasing, clipped at zero
  Eigen::MatrixXd shapes;   // column k belongs to weights[k]
};

ModeSpectrum mode_decomposition(const CovarianceMap& cov);

/// Unit-norm Gaussian spectral profile sampled on the grid.
Eigen::VectorXd gaussian_profile(const std::vector<double>& wavelengths, double center,
                                 double width);

/// Shots I = sum_m E_m shape_m with independent single-mode BSV energies
/// E_m = mean_m z^2 (z standard normal), plus optional additive noise.
std::vector<ShotRecord> synth_mode_ensemble(const std::vector<double>& wavelengths,
                                            const std::vector<Eigen::VectorXd>& shapes,
                                            const std::vector<double>& mean_energy,
                                            int n_shots, double noise_rms, std::uint64_t seed);

/// count draws of mean z^2: the shape-1/2 Gamma law with scale 2 mean.
std::vector<double> bsv_energy_samples(double mean, int count, std::uint64_t seed);

/// Background-subtracted trapezoid integral of the spectrum over wavelength.
double shot_energy(const ShotRecord& shot, double baseline = 0.0);

struct PhotonStatistics {
  std::vector<double> bin_edges;
  std::vector<double> density;  // normalized histogram
  double mean = 0.0;            // fitted <N>
  double variance = 0.0;        // unbiased sample variance
  double variance_ratio = 0.0;  // variance / (2 mean^2), 1 for the Gamma law
  double ks_statistic = 0.0;    // against the fitted shape-1/2 Gamma law
};

PhotonStatistics photon_statistics(const std::vector<double>& energies, int n_bins = 50);

/// CDF of the shape-1/2 Gamma law with mean m: erf(sqrt(x / (2 m))).
double gamma_half_cdf(double x, double mean);

}  // namespace kerrq
