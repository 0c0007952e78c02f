#include "kerrq/f2f.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <limits>
#include <numeric>
#include <tuple>

#include <fftw3.h>

#include "kerrq/channels.hpp"
#include "kerrq/random.hpp"

namespace kerrq {

namespace {

constexpr double kPi = std::numbers::pi;

double to_omega(double wavelength) {
  return 2.0 * kPi * constants::kSpeedOfLight / wavelength;
}

// FFTW planning is not thread-safe.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

void fft_forward(std::vector<Complex>& data) {
  const int n = static_cast<int>(data.size());
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    plan = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(fftw_mutex());
  fftw_destroy_plan(plan);
}

void fft_backward(std::vector<Complex>& data) {
  const int n = static_cast<int>(data.size());
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    plan = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(plan);
  }
  for (Complex& c : data) c /= static_cast<double>(n);
}

// Natural cubic spline through (x, y), x strictly increasing.
class CubicSpline {
 public:
  CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const size_t n = x_.size();
    m_.assign(n, 0.0);
    if (n < 3) return;
    std::vector<double> a(n, 0.0), b(n, 1.0), c(n, 0.0), d(n, 0.0);
    for (size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
      a[i] = h0 / 6.0;
      b[i] = (h0 + h1) / 3.0;
      c[i] = h1 / 6.0;
      d[i] = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
    }
    for (size_t i = 1; i < n; ++i) {
      const double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      d[i] -= w * d[i - 1];
    }
    m_[n - 1] = d[n - 1] / b[n - 1];
    for (size_t i = n - 1; i-- > 0;) m_[i] = (d[i] - c[i] * m_[i + 1]) / b[i];
  }

  double operator()(double t) const {
    const size_t n = x_.size();
    size_t i = std::upper_bound(x_.begin(), x_.end(), t) - x_.begin();
    i = std::clamp<size_t>(i, 1, n - 1);
    const double h = x_[i] - x_[i - 1];
    const double u = (x_[i] - t) / h, v = (t - x_[i - 1]) / h;
    return u * y_[i - 1] + v * y_[i] +
           ((u * u * u - u) * m_[i - 1] + (v * v * v - v) * m_[i]) * h * h / 6.0;
  }

 private:
  std::vector<double> x_, y_, m_;
};

double envelope(const F2fSetup& s, double omega) {
  const double d = (omega - s.center_omega()) / s.sigma_omega;
  return std::exp(-0.5 * d * d);
}

}  // namespace

double F2fSetup::center_omega() const { return to_omega(center_wavelength); }

void F2fSetup::validate() const {
  require(center_wavelength > 0.0 && sigma_omega > 0.0, ErrorCode::kInvalidArgument,
          "center wavelength and envelope width must be positive");
  require(sigma_omega < 0.2 * center_omega(), ErrorCode::kInvalidArgument,
          "envelope width must be well below the carrier frequency");
  require(ref_amp > 0.0 && kappa > 0.0, ErrorCode::kInvalidArgument,
          "reference amplitude and kappa must be positive");
  require(snr_threshold >= 0.0, ErrorCode::kInvalidArgument, "snr threshold must be >= 0");
}

std::vector<double> frequency_uniform_grid(const F2fSetup& setup, int n_points,
                                           double span_sigmas) {
  setup.validate();
  require(n_points >= 16, ErrorCode::kInvalidArgument, "need at least 16 grid points");
  require(span_sigmas > 0.0, ErrorCode::kInvalidArgument, "span must be positive");
  const double wc = setup.center_omega();
  const double half = span_sigmas * setup.sigma_omega;
  require(half < wc, ErrorCode::kInvalidArgument, "frequency span reaches zero frequency");
  std::vector<double> wl(n_points);
  for (int j = 0; j < n_points; ++j) {
    // Highest frequency first so wavelengths increase.
    const double w = wc + half - 2.0 * half * j / (n_points - 1);
    wl[j] = to_omega(w);  // 2 pi c / w is its own inverse
  }
  return wl;
}

void check_fringe_sampling(const std::vector<double>& wavelengths, double delay) {
  require(wavelengths.size() >= 16, ErrorCode::kInvalidArgument, "need at least 16 grid points");
  require(delay > 0.0, ErrorCode::kInvalidArgument, "delay must be positive");
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double l : wavelengths) {
    require(l > 0.0, ErrorCode::kInvalidArgument, "wavelengths must be positive");
    lo = std::min(lo, to_omega(l));
    hi = std::max(hi, to_omega(l));
  }
  const double span = hi - lo;
  const double step = span / (wavelengths.size() - 1);
  const double period = 2.0 * kPi / delay;
  require(period >= 8.0 * step, ErrorCode::kInvalidArgument,
          "delay too long: a spectral fringe must span at least 8 samples");
  require(span >= 6.0 * period, ErrorCode::kInvalidArgument,
          "delay too short: the grid must hold at least 6 fringes");
}

ShotRecord synth_shot(Complex alpha_w, double delay, const std::vector<double>& wavelengths,
                      double noise_rms, std::uint64_t seed, const F2fSetup& setup) {
  setup.validate();
  check_fringe_sampling(wavelengths, delay);
  require(noise_rms >= 0.0, ErrorCode::kInvalidArgument, "noise rms must be nonnegative");
  const Complex alpha_2w = setup.kappa * alpha_w * alpha_w;
  const double wc = setup.center_omega();
  ShotRecord shot;
  shot.wavelengths = wavelengths;
  shot.true_alpha = alpha_w;
  shot.intensity.resize(wavelengths.size());
  Rng rng(seed);
  for (size_t j = 0; j < wavelengths.size(); ++j) {
    const double w = to_omega(wavelengths[j]);
    const double g = envelope(setup, w);
    const Complex field = setup.ref_amp * g + alpha_2w * g * std::polar(1.0, (w - wc) * delay);
    double v = std::norm(field);
    if (noise_rms > 0.0) v += noise_rms * rng.normal();
    shot.intensity[j] = std::max(v, 0.0);
  }
  return shot;
}

FringeEstimate extract_fringe(const ShotRecord& shot, double delay, const F2fSetup& setup) {
  setup.validate();
  require(shot.wavelengths.size() == shot.intensity.size(), ErrorCode::kInvalidArgument,
          "shot arrays differ in length");
  check_fringe_sampling(shot.wavelengths, delay);
  const int n = static_cast<int>(shot.wavelengths.size());

  // Ascending frequency.
  std::vector<std::pair<double, double>> pts(n);
  for (int j = 0; j < n; ++j) pts[j] = {to_omega(shot.wavelengths[j]), shot.intensity[j]};
  std::sort(pts.begin(), pts.end());
  std::vector<double> w(n), y(n);
  for (int j = 0; j < n; ++j) std::tie(w[j], y[j]) = pts[j];
  for (int j = 1; j < n; ++j)
    require(w[j] > w[j - 1], ErrorCode::kInvalidArgument, "duplicate wavelengths in shot");

  const double step = (w[n - 1] - w[0]) / (n - 1);
  bool uniform = true;
  for (int j = 1; j < n && uniform; ++j)
    uniform = std::abs((w[j] - w[j - 1]) - step) <= 1e-6 * step;
  if (!uniform) {
    const CubicSpline spline(w, y);
    for (int j = 0; j < n; ++j) {
      const double wj = w[0] + j * step;
      y[j] = spline(wj);
    }
    for (int j = 0; j < n; ++j) w[j] = w[0] + j * step;
  }

  std::vector<Complex> spec(n);
  for (int j = 0; j < n; ++j) spec[j] = y[j];
  fft_forward(spec);

  // Sideband of e^{i w tau} sits at bin k_tau. Tukey window: flat within
  // k_tau/4 of the sideband, cosine taper out to k_tau/2.
  const double k_tau = delay * step * n / (2.0 * kPi);
  const double half = 0.5 * k_tau, flat = 0.25 * k_tau;
  double peak = 0.0;
  std::vector<Complex> side(n, Complex(0.0, 0.0));
  for (int k = 0; k < n; ++k) {
    const double d = std::abs(k - k_tau);
    if (d >= half) continue;
    const double win = d <= flat ? 1.0 : 0.5 * (1.0 + std::cos(kPi * (d - flat) / (half - flat)));
    side[k] = spec[k] * win;
    peak = std::max(peak, std::abs(spec[k]));
  }
  // Noise floor from the bins beyond both sidebands.
  double floor_acc = 0.0;
  int floor_n = 0;
  for (int k = static_cast<int>(std::ceil(1.5 * k_tau)); k <= n - 1.5 * k_tau; ++k) {
    floor_acc += std::norm(spec[k]);
    ++floor_n;
  }
  const double floor = floor_n > 0 ? std::sqrt(floor_acc / floor_n) : 0.0;

  fft_backward(side);
  // Least squares for z in c(w) = z G(w)^2 e^{i (w - w_c) tau}.
  const double wc = setup.center_omega();
  Complex num(0.0, 0.0);
  double den = 0.0;
  for (int j = 0; j < n; ++j) {
    const double g2 = std::pow(envelope(setup, w[j]), 2);
    num += side[j] * std::polar(1.0, -(w[j] - wc) * delay) * g2;
    den += g2 * g2;
  }
  require(den > 0.0, ErrorCode::kInvalidArgument, "grid does not overlap the pulse envelope");
  const Complex z = num / (den * setup.ref_amp);

  FringeEstimate est;
  est.amp_2w = std::abs(z);
  est.phi_2w = std::arg(z);
  est.snr = peak / (floor + 1e-13 * std::abs(spec[0]));
  est.low_confidence = est.snr < setup.snr_threshold;
  return est;
}

ShgInversion invert_shg(double amp_2w, double phi_2w) {
  require(amp_2w >= 0.0 && std::isfinite(amp_2w), ErrorCode::kInvalidArgument,
          "SH amplitude must be finite and nonnegative");
  ShgInversion out;
  out.amp_w = std::sqrt(amp_2w);
  out.phase_defined = amp_2w > 0.0;
  out.phi_w = 0.5 * phi_2w;
  out.phi_w_alt = std::remainder(out.phi_w + kPi, 2.0 * kPi);
  if (out.phi_w_alt <= -kPi) out.phi_w_alt += 2.0 * kPi;
  return out;
}

CovarianceMap covariance_map(const std::vector<ShotRecord>& shots) {
  require(shots.size() >= 2, ErrorCode::kInvalidArgument, "need at least two shots");
  const auto& grid = shots.front().wavelengths;
  const int m = static_cast<int>(grid.size());
  const int n = static_cast<int>(shots.size());
  Eigen::MatrixXd data(n, m);
  for (int s = 0; s < n; ++s) {
    require(shots[s].wavelengths == grid, ErrorCode::kInvalidArgument,
            "shots are not on a common wavelength grid");
    require(static_cast<int>(shots[s].intensity.size()) == m, ErrorCode::kInvalidArgument,
            "shot arrays differ in length");
    data.row(s) = Eigen::Map<const Eigen::RowVectorXd>(shots[s].intensity.data(), m);
  }
  const Eigen::RowVectorXd mean = data.colwise().mean();
  data.rowwise() -= mean;
  CovarianceMap out;
  out.wavelengths = grid;
  out.cov = (data.transpose() * data) / static_cast<double>(n - 1);
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

ModeSpectrum mode_decomposition(const CovarianceMap& cm) {
  const Eigen::MatrixXd& c = cm.cov;
  require(c.rows() == c.cols() && c.rows() > 0, ErrorCode::kInvalidArgument,
          "covariance must be a nonempty square matrix");
  const double scale = c.cwiseAbs().maxCoeff();
  require((c - c.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * std::max(scale, 1e-300),
          ErrorCode::kInvalidArgument, "covariance is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  require(es.info() == Eigen::Success, ErrorCode::kNumericalFailure,
          "eigendecomposition failed");
  const int d = static_cast<int>(c.rows());
  ModeSpectrum out;
  out.weights.resize(d);
  out.shapes.resize(d, d);
  for (int k = 0; k < d; ++k) {
    // Eigen sorts ascending.
    out.weights[k] = std::max(es.eigenvalues()[d - 1 - k], 0.0);
    Eigen::VectorXd v = es.eigenvectors().col(d - 1 - k);
    // Fix the sign so the largest component is positive.
    Eigen::Index imax;
    v.cwiseAbs().maxCoeff(&imax);
    if (v[imax] < 0.0) v = -v;
    out.shapes.col(k) = v;
  }
  return out;
}

Eigen::VectorXd gaussian_profile(const std::vector<double>& wavelengths, double center,
                                 double width) {
  require(width > 0.0, ErrorCode::kInvalidArgument, "profile width must be positive");
  Eigen::VectorXd v(static_cast<Eigen::Index>(wavelengths.size()));
  for (size_t j = 0; j < wavelengths.size(); ++j) {
    const double d = (wavelengths[j] - center) / width;
    v[static_cast<Eigen::Index>(j)] = std::exp(-0.5 * d * d);
  }
  const double nrm = v.norm();
  require(nrm > 0.0, ErrorCode::kInvalidArgument, "profile vanishes on the grid");
  return v / nrm;
}

std::vector<ShotRecord> synth_mode_ensemble(const std::vector<double>& wavelengths,
                                            const std::vector<Eigen::VectorXd>& shapes,
                                            const std::vector<double>& mean_energy,
                                            int n_shots, double noise_rms, std::uint64_t seed) {
  require(n_shots >= 1, ErrorCode::kInvalidArgument, "need at least one shot");
  require(!shapes.empty() && shapes.size() == mean_energy.size(), ErrorCode::kInvalidArgument,
          "one mean energy per mode shape required");
  require(noise_rms >= 0.0, ErrorCode::kInvalidArgument, "noise rms must be nonnegative");
  const Eigen::Index m = static_cast<Eigen::Index>(wavelengths.size());
  for (size_t k = 0; k < shapes.size(); ++k) {
    require(shapes[k].size() == m, ErrorCode::kInvalidArgument, "mode shape length mismatch");
    require(shapes[k].minCoeff() >= 0.0, ErrorCode::kInvalidArgument,
            "mode shapes must be nonnegative spectra");
    require(mean_energy[k] >= 0.0, ErrorCode::kInvalidArgument, "mean energies must be >= 0");
  }
  std::vector<ShotRecord> shots(n_shots);
  const int chunks = (n_shots + kSampleChunk - 1) / kSampleChunk;
#pragma omp parallel for schedule(static)
  for (int c = 0; c < chunks; ++c) {
    Rng rng(seed, static_cast<std::uint64_t>(c));
    const int end = std::min(n_shots, (c + 1) * kSampleChunk);
    for (int s = c * kSampleChunk; s < end; ++s) {
      Eigen::VectorXd spec = Eigen::VectorXd::Zero(m);
      for (size_t k = 0; k < shapes.size(); ++k) {
        const double z = rng.normal();
        spec += mean_energy[k] * z * z * shapes[k];
      }
      ShotRecord& rec = shots[s];
      rec.wavelengths = wavelengths;
      rec.intensity.resize(m);
      for (Eigen::Index j = 0; j < m; ++j) {
        double v = spec[j];
        if (noise_rms > 0.0) v += noise_rms * rng.normal();
        rec.intensity[j] = std::max(v, 0.0);
      }
    }
  }
  return shots;
}

std::vector<double> bsv_energy_samples(double mean, int count, std::uint64_t seed) {
  require(mean > 0.0, ErrorCode::kInvalidArgument, "mean energy must be positive");
  require(count >= 1, ErrorCode::kInvalidArgument, "count must be at least 1");
  std::vector<double> out(count);
  const int chunks = (count + kSampleChunk - 1) / kSampleChunk;
#pragma omp parallel for schedule(static)
  for (int c = 0; c < chunks; ++c) {
    Rng rng(seed, static_cast<std::uint64_t>(c));
    const int end = std::min(count, (c + 1) * kSampleChunk);
    for (int i = c * kSampleChunk; i < end; ++i) {
      const double z = rng.normal();
      out[i] = mean * z * z;
    }
  }
  return out;
}

double shot_energy(const ShotRecord& shot, double baseline) {
  const size_t n = shot.wavelengths.size();
  require(n == shot.intensity.size() && n >= 2, ErrorCode::kInvalidArgument,
          "shot needs at least two samples of equal-length arrays");
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return shot.wavelengths[a] < shot.wavelengths[b]; });
  double e = 0.0;
  for (size_t i = 1; i < n; ++i) {
    const size_t a = order[i - 1], b = order[i];
    e += 0.5 * ((shot.intensity[a] - baseline) + (shot.intensity[b] - baseline)) *
         (shot.wavelengths[b] - shot.wavelengths[a]);
  }
  return e;
}

double gamma_half_cdf(double x, double mean) {
  if (x <= 0.0) return 0.0;
  return std::erf(std::sqrt(x / (2.0 * mean)));
}

PhotonStatistics photon_statistics(const std::vector<double>& energies, int n_bins) {
  require(!energies.empty(), ErrorCode::kInvalidArgument, "no energies given");
  require(n_bins >= 1, ErrorCode::kInvalidArgument, "need at least one histogram bin");
  for (double e : energies)
    require(e > 0.0 && std::isfinite(e), ErrorCode::kInvalidArgument,
            "energies must be positive and finite");
  const size_t n = energies.size();
  PhotonStatistics st;
  double sum = 0.0;
  for (double e : energies) sum += e;
  st.mean = sum / n;
  double ss = 0.0;
  for (double e : energies) ss += (e - st.mean) * (e - st.mean);
  st.variance = n > 1 ? ss / (n - 1) : 0.0;
  st.variance_ratio = st.variance / (2.0 * st.mean * st.mean);

  std::vector<double> sorted = energies;
  std::sort(sorted.begin(), sorted.end());
  double d = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double f = gamma_half_cdf(sorted[i], st.mean);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  st.ks_statistic = d;

  const double top = sorted.back();
  st.bin_edges.resize(n_bins + 1);
  for (int b = 0; b <= n_bins; ++b) st.bin_edges[b] = top * b / n_bins;
  std::vector<double> counts(n_bins, 0.0);
  for (double e : sorted) counts[std::min(n_bins - 1, static_cast<int>(e / top * n_bins))] += 1.0;
  const double width = top / n_bins;
  st.density.resize(n_bins);
  for (int b = 0; b < n_bins; ++b) st.density[b] = counts[b] / (n * width);
  return st;
}

}  // namespace kerrq
