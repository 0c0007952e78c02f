#include "kerrq/classical_shear.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kerrq/random.hpp"

namespace kerrq {

namespace {

constexpr double kPi = std::numbers::pi;

double mean_abs(const std::vector<Complex>& s) {
  double acc = 0.0;
  for (const Complex& a : s) acc += std::abs(a);
  return acc / static_cast<double>(s.size());
}

int radial_bin(double rho, int n_r, double r_max) {
  const int i = static_cast<int>(rho / r_max * n_r);
  return std::clamp(i, 0, n_r - 1);
}

struct RidgeAcc {
  double w = 0.0, abs2 = 0.0;
  Complex dir{0.0, 0.0};
};

std::vector<RidgeBin> finish(const std::vector<RidgeAcc>& acc, double r_max) {
  const int n_r = static_cast<int>(acc.size());
  std::vector<RidgeBin> out(n_r);
  for (int i = 0; i < n_r; ++i) {
    out[i].r_lo = r_max * i / n_r;
    out[i].r_hi = r_max * (i + 1) / n_r;
    out[i].weight = acc[i].w;
    if (acc[i].w > 0.0) {
      out[i].mean_abs2 = acc[i].abs2 / acc[i].w;
      out[i].mean_phase = fold_half_plane(0.5 * std::arg(acc[i].dir));
    }
  }
  return out;
}

}  // namespace

double fold_half_plane(double phi) {
  double f = std::remainder(phi, kPi);  // [-pi/2, pi/2]
  if (f <= -0.5 * kPi) f += kPi;
  return f;
}

ClassicalEnsemble sample_macroscopic_bsv(double var_x, double var_p, int count,
                                         std::uint64_t seed) {
  require(var_x > 0.0 && var_p > 0.0, ErrorCode::kInvalidArgument,
          "quadrature variances must be positive");
  require(var_x >= var_p, ErrorCode::kInvalidArgument, "expected var_x >= var_p");
  require(count >= 1, ErrorCode::kInvalidArgument, "count must be at least 1");
  ClassicalEnsemble e;
  e.var_x = var_x;
  e.var_p = var_p;
  e.seed = seed;
  e.samples.resize(count);
  const double sx = std::sqrt(var_x), sp = std::sqrt(var_p);
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  const int chunks = (count + kSampleChunk - 1) / kSampleChunk;
#pragma omp parallel for schedule(static)
  for (int c = 0; c < chunks; ++c) {
    Rng rng(seed, static_cast<std::uint64_t>(c));
    const int end = std::min(count, (c + 1) * kSampleChunk);
    for (int i = c * kSampleChunk; i < end; ++i) {
      const double x = sx * rng.normal();
      const double p = sp * rng.normal();
      e.samples[i] = Complex(x * inv_sqrt2, p * inv_sqrt2);
    }
  }
  return e;
}

ClassicalEnsemble shear_map(const ClassicalEnsemble& ensemble, double chi_t) {
  ClassicalEnsemble out = ensemble;
  out.chi_t += chi_t;
  if (chi_t == 0.0) return out;
  const int n = static_cast<int>(out.samples.size());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const Complex a = out.samples[i];
    out.samples[i] = a * std::polar(1.0, shear_phase(chi_t, std::norm(a)));
  }
  return out;
}

ClassicalEnsemble apply_amplitude_cap(const ClassicalEnsemble& ensemble, double cap) {
  require(cap > 0.0, ErrorCode::kInvalidArgument, "amplitude cap must be positive");
  require(!ensemble.samples.empty(), ErrorCode::kInvalidArgument, "empty ensemble");
  const double limit = cap * mean_abs(ensemble.samples);
  ClassicalEnsemble out = ensemble;
  out.samples.clear();
  for (const Complex& a : ensemble.samples) {
    if (std::abs(a) <= limit) out.samples.push_back(a);
  }
  return out;
}

PolarHistogram polar_histogram(const ClassicalEnsemble& ensemble, int n_r, int n_phi,
                               double r_max) {
  require(n_r >= 4 && n_phi >= 4, ErrorCode::kInvalidArgument,
          "histogram needs at least 4 bins per axis");
  require(r_max > 0.0, ErrorCode::kInvalidArgument, "r_max must be positive");
  require(!ensemble.samples.empty(), ErrorCode::kInvalidArgument, "empty ensemble");
  PolarHistogram h;
  h.n_r = n_r;
  h.n_phi = n_phi;
  h.mean_amplitude = mean_abs(ensemble.samples);
  for (int i = 0; i <= n_r; ++i) h.r_edges.push_back(r_max * i / n_r);
  for (int j = 0; j <= n_phi; ++j) h.phi_edges.push_back(-kPi + 2.0 * kPi * j / n_phi);
  h.counts.assign(static_cast<size_t>(n_r) * n_phi, 0);
  const double norm = h.mean_amplitude > 0.0 ? 1.0 / h.mean_amplitude : 0.0;
  for (const Complex& a : ensemble.samples) {
    const int i = radial_bin(std::abs(a) * norm, n_r, r_max);
    const int j = std::clamp(static_cast<int>((std::arg(a) + kPi) / (2.0 * kPi) * n_phi), 0,
                             n_phi - 1);
    ++h.counts[static_cast<size_t>(i) * n_phi + j];
  }
  return h;
}

std::vector<RidgeBin> ridge_profile(const ClassicalEnsemble& ensemble, int n_r, double r_max) {
  require(n_r >= 1 && r_max > 0.0, ErrorCode::kInvalidArgument, "invalid radial binning");
  require(!ensemble.samples.empty(), ErrorCode::kInvalidArgument, "empty ensemble");
  const double mean = mean_abs(ensemble.samples);
  const double norm = mean > 0.0 ? 1.0 / mean : 0.0;
  std::vector<RidgeAcc> acc(n_r);
  for (const Complex& a : ensemble.samples) {
    const double a2 = std::norm(a);
    const double rho = std::sqrt(a2) * norm;
    if (a2 == 0.0 || rho >= r_max) continue;
    auto& b = acc[radial_bin(rho, n_r, r_max)];
    b.w += 1.0;
    b.abs2 += a2;
    b.dir += a * a / a2;
  }
  return finish(acc, r_max);
}

std::vector<RidgeBin> ridge_profile(const PhaseSpaceField& field, int n_r, double r_max,
                                    double mean_amplitude) {
  require(n_r >= 1 && r_max > 0.0, ErrorCode::kInvalidArgument, "invalid radial binning");
  require(field.kind == FieldKind::kHusimi, ErrorCode::kInvalidArgument,
          "ridge profile of a field needs a Husimi field");
  const PhaseGrid& g = field.grid;
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  if (mean_amplitude <= 0.0) {
    double m = 0.0, w = 0.0;
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.np; ++j) {
        const double q = std::max(field.values(i, j), 0.0);
        m += q * std::abs(Complex(g.x(i), g.p(j))) * inv_sqrt2;
        w += q;
      }
    require(w > 0.0, ErrorCode::kInvalidArgument, "field has no positive mass");
    mean_amplitude = m / w;
  }
  std::vector<RidgeAcc> acc(n_r);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.np; ++j) {
      const Complex a = Complex(g.x(i), g.p(j)) * inv_sqrt2;
      const double a2 = std::norm(a);
      const double q = std::max(field.values(i, j), 0.0) * g.cell_area();
      const double rho = std::sqrt(a2) / mean_amplitude;
      if (a2 == 0.0 || q == 0.0 || rho >= r_max) continue;
      auto& b = acc[radial_bin(rho, n_r, r_max)];
      b.w += q;
      b.abs2 += q * a2;
      b.dir += q * a * a / a2;
    }
  return finish(acc, r_max);
}

}  // namespace kerrq
