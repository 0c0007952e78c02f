#include "kerrq/bsv_model.hpp"

#include <cmath>
#include <limits>

#include "kerrq/random.hpp"

namespace kerrq {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// x = var_max var_min - 1 = 4 R T N, passed in to avoid cancellation.
void fill_from_variances(LossyBsvParams& p, double x) {
  p.r = 0.25 * std::log(p.var_max / p.var_min);
  // 1 + 2 n_th = sqrt(var_max var_min)
  const double root = std::sqrt(1.0 + x);
  p.n_th = x / (2.0 * (root + 1.0));
  p.purity = 1.0 / root;
}

}  // namespace

LossyBsvParams LossyBsvParams::squeezed_thermal(double n_th, double r) {
  require(n_th >= 0.0 && std::isfinite(n_th), ErrorCode::kInvalidArgument,
          "n_th must be finite and nonnegative");
  require(std::isfinite(r), ErrorCode::kInvalidArgument, "r must be finite");
  LossyBsvParams p;
  p.r0 = p.n_photons = p.loss = kNaN;
  p.r = r;
  p.n_th = n_th;
  p.purity = 1.0 / (1.0 + 2.0 * n_th);
  p.var_max = (1.0 + 2.0 * n_th) * std::exp(2.0 * std::abs(r));
  p.var_min = (1.0 + 2.0 * n_th) * std::exp(-2.0 * std::abs(r));
  p.r_approx = p.n_th_approx = p.r_approx_rel_dev = p.n_th_approx_rel_dev = kNaN;
  return p;
}

LossyBsvParams lossy_bsv_params(double r0, double loss) {
  require(r0 >= 0.0 && std::isfinite(r0), ErrorCode::kInvalidArgument,
          "r0 must be finite and nonnegative");
  require(loss >= 0.0 && loss <= 1.0, ErrorCode::kInvalidArgument, "loss must lie in [0, 1]");
  LossyBsvParams p;
  p.r0 = r0;
  const double sh = std::sinh(r0);
  p.n_photons = sh * sh;
  p.loss = loss;
  const double t = 1.0 - loss;
  p.var_max = t * std::exp(2.0 * r0) + loss;
  p.var_min = t * std::exp(-2.0 * r0) + loss;

  if (loss == 0.0 || loss == 1.0) {
    p.degenerate = true;
    p.r = loss == 0.0 ? r0 : 0.0;
    p.n_th = 0.0;
    p.purity = 1.0;
    p.r_approx = p.n_th_approx = p.r_approx_rel_dev = p.n_th_approx_rel_dev = kNaN;
    return p;
  }
  fill_from_variances(p, 4.0 * loss * t * p.n_photons);

  p.r_approx = 0.5 * r0 - 0.25 * std::log(loss / t);
  p.n_th_approx = std::sqrt(loss * t * p.n_photons);
  p.r_approx_rel_dev = p.r != 0.0 ? std::abs(p.r_approx - p.r) / std::abs(p.r) : kNaN;
  p.n_th_approx_rel_dev = p.n_th > 0.0 ? std::abs(p.n_th_approx - p.n_th) / p.n_th : kNaN;
  return p;
}

LossyBsvParams lossy_bsv_params_from_photons(double n_photons, double loss) {
  require(n_photons >= 0.0 && std::isfinite(n_photons), ErrorCode::kInvalidArgument,
          "photon number must be finite and nonnegative");
  return lossy_bsv_params(std::asinh(std::sqrt(n_photons)), loss);
}

std::vector<MixtureSample> sample_displacements(const LossyBsvParams& params, int count,
                                                std::uint64_t seed) {
  require(count >= 1, ErrorCode::kInvalidArgument, "count must be at least 1");
  require(params.n_th >= 0.0, ErrorCode::kInvalidArgument, "n_th must be nonnegative");
  std::vector<MixtureSample> out(count, MixtureSample{Complex(0.0, 0.0), params.r});
  if (params.n_th == 0.0) return out;

  const double sd_re = std::sqrt(0.5 * params.n_th) * std::exp(params.r);
  const double sd_im = std::sqrt(0.5 * params.n_th) * std::exp(-params.r);
  const int chunks = (count + kSampleChunk - 1) / kSampleChunk;
#pragma omp parallel for schedule(static)
  for (int c = 0; c < chunks; ++c) {
    Rng rng(seed, static_cast<std::uint64_t>(c));
    const int end = std::min(count, (c + 1) * kSampleChunk);
    for (int i = c * kSampleChunk; i < end; ++i) {
      const double re = sd_re * rng.normal();
      const double im = sd_im * rng.normal();
      out[i].beta = Complex(re, im);
    }
  }
  return out;
}

DensityMatrix reconstruct_mixture(const LossyBsvParams& params, int dim, int count,
                                  std::uint64_t seed) {
  require(dim >= 1, ErrorCode::kInvalidArgument, "dim must be at least 1");
  const double mean_n = params.n_th * std::cosh(2.0 * params.r) +
                        std::sinh(params.r) * std::sinh(params.r);
  require(mean_n < 0.25 * dim, ErrorCode::kTruncation,
          "dim too small for the mixture: need mean photon number below dim/4");
  const auto samples = sample_displacements(params, count, seed);

  // Per-chunk partial sums reduced in chunk order keep the result
  // independent of the thread count.
  const int chunks = (count + kSampleChunk - 1) / kSampleChunk;
  std::vector<CMatrix> partial(chunks);
  std::vector<double> deficit(chunks, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < chunks; ++c) {
    CMatrix acc = CMatrix::Zero(dim, dim);
    const int end = std::min(count, (c + 1) * kSampleChunk);
    const int n = end - c * kSampleChunk;
    CMatrix block(dim, n);
    for (int i = c * kSampleChunk; i < end; ++i) {
      const FockVector psi = squeezed_coherent_state(samples[i].beta, samples[i].r, dim);
      block.col(i - c * kSampleChunk) = psi.amps();
      deficit[c] += psi.truncation_deficit();
    }
    acc.noalias() = block * block.adjoint();
    partial[c] = std::move(acc);
  }
  CMatrix sum = CMatrix::Zero(dim, dim);
  double def = 0.0;
  for (int c = 0; c < chunks; ++c) {
    sum += partial[c];
    def += deficit[c];
  }
  sum /= static_cast<double>(count);
  def /= count;
  require(def < 1e-3, ErrorCode::kTruncation,
          "dim too small for the mixture: mean truncation deficit exceeds 1e-3");
  return DensityMatrix(std::move(sum), def);
}

}  // namespace kerrq
