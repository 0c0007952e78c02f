#pragma once

// Coarse-grained Kerr dynamics: every phase-space point rotates by an angle
// proportional to its squared distance from the origin.

#include <cstdint>
#include <limits>
#include <vector>

#include "kerrq/fock.hpp"
#include "kerrq/phase_space.hpp"

namespace kerrq {

struct ClassicalEnsemble {
  std::vector<Complex> samples;  // alpha = (x + i p)/sqrt(2), canonical
  double var_x = 0.0;
  double var_p = 0.0;
  std::uint64_t seed = 0;
  double chi_t = 0.0;  // accumulated shear
};

ClassicalEnsemble sample_macroscopic_bsv(double var_x, double var_p, int count,
                                         std::uint64_t seed);

/// alpha -> alpha exp(-2i chi_t |alpha|^2).
ClassicalEnsemble shear_map(const ClassicalEnsemble& ensemble, double chi_t);

/// Phenomenological cutoff: drops samples with |alpha| above cap times the
/// mean amplitude. Not a physical model of the competing processes that
/// bound the measured distributions.
ClassicalEnsemble apply_amplitude_cap(const ClassicalEnsemble& ensemble, double cap);

struct PolarHistogram {
  std::vector<double> r_edges;    // in units of mean_amplitude
  std::vector<double> phi_edges;  // over [-pi, pi]
  std::vector<long long> counts;  // row-major (n_r, n_phi)
  double mean_amplitude = 0.0;
  int n_r = 0, n_phi = 0;

  long long count(int i, int j) const { return counts[static_cast<size_t>(i) * n_phi + j]; }
};

/// Radial axis |alpha|/<|alpha|> on [0, r_max]; points beyond r_max land in
/// the last radial bin so that counts always sum to the ensemble size.
PolarHistogram polar_histogram(const ClassicalEnsemble& ensemble, int n_r, int n_phi,
                               double r_max = 3.0);

struct RidgeBin {
  double r_lo = 0.0, r_hi = 0.0;  // in units of the mean amplitude
  double weight = 0.0;            // sample count, or probability mass for fields
  double mean_abs2 = 0.0;         // <|alpha|^2> inside the bin
  double mean_phase = 0.0;        // folded to (-pi/2, pi/2]
};

/// Per-amplitude-bin mean phase with the alpha -> -alpha ambiguity folded
/// out (circular mean of 2 arg alpha, halved). Points at or beyond r_max
/// are left out.
std::vector<RidgeBin> ridge_profile(const ClassicalEnsemble& ensemble, int n_r,
                                    double r_max = 3.0);
/// Same for a sampled Husimi field; mean_amplitude of the field is used for
/// the radial normalization unless a positive value is supplied.
std::vector<RidgeBin> ridge_profile(const PhaseSpaceField& husimi_field, int n_r,
                                    double r_max = 3.0, double mean_amplitude = 0.0);

/// Shear phase accumulated at squared amplitude abs2: -2 chi_t abs2.
inline double shear_phase(double chi_t, double abs2) { return -2.0 * chi_t * abs2; }

/// Wraps an angle into (-pi/2, pi/2].
double fold_half_plane(double phi);

}  // namespace kerrq
