#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "kerrq/fock.hpp"

namespace kerrq {

/// Rectangular node grid in canonical (x, p). Node i sits at
/// x_min + i*dx with dx = (x_max - x_min)/(nx - 1). The convention tag is
/// export metadata; all evaluation happens in canonical units.
struct PhaseGrid {
  double x_min = -5.0, x_max = 5.0;
  double p_min = -5.0, p_max = 5.0;
  int nx = 101, np = 101;
  QuadratureConvention convention{};

  double dx() const { return (x_max - x_min) / (nx - 1); }
  double dp() const { return (p_max - p_min) / (np - 1); }
  double x(int i) const { return x_min + i * dx(); }
  double p(int j) const { return p_min + j * dp(); }
  double cell_area() const { return dx() * dp(); }

  void validate() const;
  /// Same bounds, resolution multiplied by factor (node count (n-1)*f + 1).
  PhaseGrid refined(int factor) const;
};

enum class FieldKind { kWigner, kHusimi };

struct PhaseSpaceField {
  PhaseGrid grid;
  Eigen::MatrixXd values;  // (nx, np)
  FieldKind kind = FieldKind::kWigner;

  double riemann_sum() const { return values.sum() * grid.cell_area(); }
  double normalization_residual() const { return std::abs(riemann_sum() - 1.0); }
};

enum class WignerMethod {
  kAuto,
  /// Sum over density-matrix diagonals with scaled Laguerre recurrences.
  kLaguerre,
  /// Quadrature of psi*(x+y) psi(x-y) e^{2ipy} over position wavefunctions
  /// (mixed states go through their eigendecomposition).
  kWavefunction,
};

struct WignerOptions {
  WignerMethod method = WignerMethod::kAuto;
  /// Throw kCoverage when the normalization residual exceeds this.
  double coverage_tolerance = 1e-2;
};

PhaseSpaceField wigner(const FockVector& psi, const PhaseGrid& grid,
                       const WignerOptions& opts = {});
PhaseSpaceField wigner(const DensityMatrix& rho, const PhaseGrid& grid,
                       const WignerOptions& opts = {});

/// Husimi function sampled as a density in (x, p), so that it integrates
/// to one over dx dp and equals the Wigner function smoothed with the
/// vacuum kernel. With alpha = (x + i p)/sqrt(2) the node value is
/// husimi_q(state, alpha) / 2.
PhaseSpaceField husimi(const FockVector& psi, const PhaseGrid& grid,
                       double coverage_tolerance = 1e-2);
PhaseSpaceField husimi(const DensityMatrix& rho, const PhaseGrid& grid,
                       double coverage_tolerance = 1e-2);

/// Q(alpha) = <alpha|rho|alpha>/pi, a density over d^2 alpha.
double husimi_q(const FockVector& psi, Complex alpha);
double husimi_q(const DensityMatrix& rho, Complex alpha);

/// -sum over cells with W < 0 of W dx dp.
double negativity_volume(const PhaseSpaceField& field);

/// Separable isotropic Gaussian convolution; sigma in canonical
/// phase-space units. Smoothing a Wigner function with sigma = 1/sqrt(2)
/// gives the Husimi function.
PhaseSpaceField gaussian_smooth(const PhaseSpaceField& field, double sigma);

/// Wigner function after beamsplitter loss R, from the lossless one:
/// W_out(sqrt(T) y) = [W_in * G_s](y) / T with s^2 = R/(2T). The result is
/// sampled on the input grid contracted by sqrt(T); smoothing truncates at
/// the grid edge, so the input grid must carry the padding.
PhaseSpaceField wigner_loss_map(const PhaseSpaceField& w_in, double reflectance);

inline constexpr double kVacuumSmoothingSigma = 0.70710678118654752;

struct GridSuggestOptions {
  double padding = 5.0;
  int max_points_per_axis = 2049;
  int min_points_per_axis = 33;
};

/// Box covering mean +/- padding*sigma on each quadrature, stretched to
/// include the origin, with cells smaller than a quarter of pi/(2 x_max).
PhaseGrid grid_suggest(const Moments& canonical_moments, const GridSuggestOptions& opts = {});
PhaseGrid grid_suggest(const FockVector& psi, double padding = 5.0);
PhaseGrid grid_suggest(const DensityMatrix& rho, double padding = 5.0);

}  // namespace kerrq
