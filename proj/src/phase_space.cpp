#include "kerrq/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace kerrq {

namespace {

constexpr double kPi = std::numbers::pi;

// Pure components of a state: rho = sum_c weight_c |psi_c><psi_c|.
struct Components {
  CMatrix vectors;  // (dim, count)
  Eigen::VectorXd weights;
};

Components components_of(const FockVector& psi) {
  Components c;
  c.vectors = psi.amps();
  c.weights = Eigen::VectorXd::Ones(1);
  return c;
}

Components components_of(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.elems());
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double top = std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
  std::vector<int> keep;
  for (int i = 0; i < lam.size(); ++i)
    if (std::abs(lam[i]) > 1e-14 * top) keep.push_back(i);
  Components c;
  c.vectors.resize(rho.dim(), static_cast<Eigen::Index>(keep.size()));
  c.weights.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    c.vectors.col(j) = es.eigenvectors().col(keep[j]);
    c.weights[j] = lam[keep[j]];
  }
  return c;
}

// Highest Fock level carrying non-negligible amplitude in any component.
int occupied_levels(const Components& c) {
  const int d = static_cast<int>(c.vectors.rows());
  double top = 0.0;
  Eigen::VectorXd level(d);
  for (int n = 0; n < d; ++n) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < c.vectors.cols(); ++j)
      acc += std::abs(c.weights[j]) * std::norm(c.vectors(n, j));
    level[n] = acc;
    top = std::max(top, acc);
  }
  int n_max = 0;
  for (int n = 0; n < d; ++n)
    if (level[n] > 1e-32 * top) n_max = n;
  return n_max;
}

void check_coverage(const PhaseSpaceField& f, double tol, const char* what) {
  if (!(f.normalization_residual() <= tol))
    throw Error(ErrorCode::kCoverage,
                std::string(what) + ": grid does not cover the state (normalization residual " +
                    std::to_string(f.normalization_residual()) + ")");
}

// -- Laguerre route ------------------------------------------------------------
//
// W(alpha) = (1/pi) sum_k [k==0 ? S_0 : 2 Re(S_k e^{i k theta})]
// S_k = sum_m rho_{m,m+k} (-1)^m sqrt(m!/(m+k)!) |2 alpha|^k e^{-u/2} L_m^k(u),
// u = 4|alpha|^2. The normalized Laguerre values are propagated with a
// running log scale, which keeps the e^{-u/2} prefactor and the factorial
// ratios out of floating-point range trouble at high dimension.

class LaguerreWigner {
 public:
  explicit LaguerreWigner(const CMatrix& rho) : d_(static_cast<int>(rho.rows())) {
    diag_offset_.resize(d_ + 1, 0);
    for (int k = 0; k < d_; ++k) diag_offset_[k + 1] = diag_offset_[k] + (d_ - k);
    const std::size_t total = diag_offset_[d_];
    diag_.resize(total);
    a_.resize(total);
    b_.resize(total);
    c_.resize(total);
    half_lgamma_.resize(d_);
    active_.assign(d_, false);
    const double top = std::max(rho.cwiseAbs().maxCoeff(), 1e-300);
    for (int k = 0; k < d_; ++k) {
      half_lgamma_[k] = 0.5 * std::lgamma(k + 1.0);
      for (int m = 0; m + k < d_; ++m) {
        const std::size_t idx = diag_offset_[k] + m;
        const Complex v = rho(m, m + k);
        diag_[idx] = (m % 2 == 0) ? v : -v;
        if (std::abs(v) > 1e-17 * top) active_[k] = true;
        a_[idx] = 2.0 * m + 1.0 + k;
        b_[idx] = std::sqrt(static_cast<double>(m) * (m + k));
        c_[idx] = 1.0 / std::sqrt((m + 1.0) * (m + 1.0 + k));
      }
    }
  }

  double operator()(double x, double p) const {
    const double u = 2.0 * (x * x + p * p);
    const double theta = std::atan2(p, x);
    const double half_log_u = u > 0.0 ? 0.5 * std::log(u) : 0.0;
    double total = 0.0;
    for (int k = 0; k < d_; ++k) {
      if (!active_[k]) continue;
      if (u == 0.0 && k > 0) break;
      const int len = d_ - k;
      const std::size_t off = diag_offset_[k];
      double scale = k * half_log_u - 0.5 * u - half_lgamma_[k];
      double factor = std::exp(scale);
      double h_prev = 0.0;
      double h = 1.0;
      Complex acc = diag_[off] * (h * factor);
      for (int m = 0; m + 1 < len; ++m) {
        const std::size_t idx = off + m;
        const double next = ((a_[idx] - u) * h - b_[idx] * h_prev) * c_[idx];
        h_prev = h;
        h = next;
        const double mag = std::abs(h);
        if (mag > 1e150 || (mag < 1e-150 && mag > 0.0)) {
          h /= mag;
          h_prev /= mag;
          scale += std::log(mag);
          factor = std::exp(scale);
        }
        acc += diag_[idx + 1] * (h * factor);
      }
      if (k == 0) {
        total += acc.real();
      } else {
        total += 2.0 * (acc * std::polar(1.0, k * theta)).real();
      }
    }
    return total / kPi;
  }

 private:
  int d_;
  std::vector<std::size_t> diag_offset_;
  std::vector<Complex> diag_;
  std::vector<double> a_, b_, c_;
  std::vector<double> half_lgamma_;
  std::vector<bool> active_;
};

PhaseSpaceField wigner_laguerre(const CMatrix& rho, const PhaseGrid& grid) {
  const LaguerreWigner w(rho);
  PhaseSpaceField f{grid, Eigen::MatrixXd::Zero(grid.nx, grid.np), FieldKind::kWigner};
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.np; ++j) f.values(i, j) = w(grid.x(i), grid.p(j));
  return f;
}

// -- wavefunction route --------------------------------------------------------

// Hermite functions phi_0..phi_{d-1} at x, carried with a log scale so that
// e^{-x^2/2} does not underflow for bright states.
void hermite_functions(double x, int d, double* out) {
  double scale = -0.5 * x * x - 0.25 * std::log(kPi);
  double factor = std::exp(scale);
  double prev = 0.0;
  double cur = 1.0;
  out[0] = cur * factor;
  for (int n = 0; n + 1 < d; ++n) {
    const double next =
        std::sqrt(2.0 / (n + 1.0)) * x * cur - std::sqrt(n / (n + 1.0)) * prev;
    prev = cur;
    cur = next;
    const double mag = std::abs(cur);
    if (mag > 1e150 || (mag < 1e-150 && mag > 0.0)) {
      cur /= mag;
      prev /= mag;
      scale += std::log(mag);
      factor = std::exp(scale);
    }
    out[n + 1] = cur * factor;
  }
}

PhaseSpaceField wigner_wavefunction(const Components& comps, const PhaseGrid& grid) {
  const int d = static_cast<int>(comps.vectors.rows());
  const int n_max = occupied_levels(comps);
  const double k_wave = std::sqrt(2.0 * n_max + 1.0);
  const double support = k_wave + 8.0;
  const double p_abs = std::max(std::abs(grid.p_min), std::abs(grid.p_max));

  // Fine position grid anchored on the output x nodes, step dx/M.
  const double h_max = 0.5 * kPi / (k_wave + p_abs);
  const double dx = grid.dx();
  const int sub = std::max(1, static_cast<int>(std::ceil(dx / h_max)));
  const double h = dx / sub;
  const long t_lo = static_cast<long>(std::floor((-support - grid.x_min) / h));
  const long t_hi = static_cast<long>(std::ceil((support - grid.x_min) / h));
  const long n_fine = t_hi - t_lo + 1;

  const int n_comp = static_cast<int>(comps.vectors.cols());
  CMatrix psi(n_fine, n_comp);
  {
    Eigen::MatrixXd phi(n_fine, d);
    std::vector<double> row(d);
    for (long t = 0; t < n_fine; ++t) {
      hermite_functions(grid.x_min + (t + t_lo) * h, d, row.data());
      for (int n = 0; n < d; ++n) phi(t, n) = row[n];
    }
    psi.noalias() = phi.cast<Complex>() * comps.vectors;
  }

  // Trim to where the wavefunctions actually live.
  Eigen::VectorXd dens(n_fine);
  for (long t = 0; t < n_fine; ++t) {
    double acc = 0.0;
    for (int c = 0; c < n_comp; ++c) acc += std::abs(comps.weights[c]) * std::norm(psi(t, c));
    dens[t] = acc;
  }
  const double dens_top = std::max(dens.maxCoeff(), 1e-300);
  long s_lo = 0, s_hi = n_fine - 1;
  while (s_lo < s_hi && dens[s_lo] < 1e-34 * dens_top) ++s_lo;
  while (s_hi > s_lo && dens[s_hi] < 1e-34 * dens_top) --s_hi;

  PhaseSpaceField f{grid, Eigen::MatrixXd::Zero(grid.nx, grid.np), FieldKind::kWigner};
  const int np = grid.np;
  std::vector<double> step_re(np), step_im(np);
  for (int j = 0; j < np; ++j) {
    step_re[j] = std::cos(2.0 * grid.p(j) * h);
    step_im[j] = std::sin(2.0 * grid.p(j) * h);
  }

#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < grid.nx; ++i) {
    const long t = static_cast<long>(i) * sub - t_lo;
    const long reach = std::min(t - s_lo, s_hi - t);
    if (reach < 0) continue;
    std::vector<Complex> fk(reach + 1);
    for (long k = 0; k <= reach; ++k) {
      Complex acc = 0.0;
      for (int c = 0; c < n_comp; ++c)
        acc += comps.weights[c] * std::conj(psi(t + k, c)) * psi(t - k, c);
      fk[k] = acc;
    }
    // Re sum_k f_k e^{2 i p k h}, advanced for all p nodes at once.
    std::vector<double> rot_re(np, 1.0), rot_im(np, 0.0), sum(np, 0.0);
    for (long k = 1; k <= reach; ++k) {
      const double fr = fk[k].real(), fi = fk[k].imag();
      if ((k & 255) == 0) {
        for (int j = 0; j < np; ++j) {
          const double ang = 2.0 * grid.p(j) * h * k;
          rot_re[j] = std::cos(ang);
          rot_im[j] = std::sin(ang);
        }
      } else {
        for (int j = 0; j < np; ++j) {
          const double re = rot_re[j] * step_re[j] - rot_im[j] * step_im[j];
          const double im = rot_re[j] * step_im[j] + rot_im[j] * step_re[j];
          rot_re[j] = re;
          rot_im[j] = im;
        }
      }
      for (int j = 0; j < np; ++j) sum[j] += fr * rot_re[j] - fi * rot_im[j];
    }
    for (int j = 0; j < np; ++j) f.values(i, j) = h / kPi * (fk[0].real() + 2.0 * sum[j]);
  }
  return f;
}

template <class State>
PhaseSpaceField wigner_dispatch(const State& s, const PhaseGrid& grid, const WignerOptions& o) {
  grid.validate();
  WignerMethod method = o.method;
  if (method == WignerMethod::kAuto) {
    if constexpr (std::is_same_v<State, FockVector>) {
      method = s.dim() > 48 ? WignerMethod::kWavefunction : WignerMethod::kLaguerre;
    } else {
      const double lag_cost = 0.5 * double(s.dim()) * s.dim() * grid.nx * grid.np;
      method = lag_cost < 4e9 ? WignerMethod::kLaguerre : WignerMethod::kWavefunction;
    }
  }
  PhaseSpaceField f;
  if (method == WignerMethod::kLaguerre) {
    if constexpr (std::is_same_v<State, FockVector>) {
      f = wigner_laguerre(s.amps() * s.amps().adjoint(), grid);
    } else {
      f = wigner_laguerre(s.elems(), grid);
    }
  } else {
    f = wigner_wavefunction(components_of(s), grid);
  }
  check_coverage(f, o.coverage_tolerance, "wigner");
  return f;
}

// -- Husimi --------------------------------------------------------------------

// <alpha|rho|alpha> from the pure components, with conj(<n|alpha>) =
// e^{-|alpha|^2/2} conj(alpha)^n / sqrt(n!) generated by a scaled recurrence.
double coherent_expectation(const Components& comps, Complex alpha,
                            const std::vector<double>& inv_sqrt, std::vector<Complex>& acc) {
  const int d = static_cast<int>(comps.vectors.rows());
  const int n_comp = static_cast<int>(comps.vectors.cols());
  const Complex alpha_c = std::conj(alpha);
  double scale = -0.5 * std::norm(alpha);
  double factor = std::exp(scale);
  Complex v = 1.0;
  acc.assign(n_comp, Complex(0.0));
  for (int n = 0; n < d; ++n) {
    if (n > 0) {
      v *= alpha_c * inv_sqrt[n];
      const double mag = std::abs(v);
      if (mag > 1e150 || (mag < 1e-150 && mag > 0.0)) {
        v /= mag;
        scale += std::log(mag);
        factor = std::exp(scale);
      }
    }
    const Complex w = v * factor;
    for (int c = 0; c < n_comp; ++c) acc[c] += w * comps.vectors(n, c);
  }
  double q = 0.0;
  for (int c = 0; c < n_comp; ++c) q += comps.weights[c] * std::norm(acc[c]);
  return q;
}

std::vector<double> inverse_sqrt_table(int d) {
  std::vector<double> t(d);
  for (int n = 0; n < d; ++n) t[n] = n > 0 ? 1.0 / std::sqrt(double(n)) : 1.0;
  return t;
}

PhaseSpaceField husimi_components(const Components& comps, const PhaseGrid& grid, double tol) {
  grid.validate();
  const std::vector<double> inv_sqrt = inverse_sqrt_table(static_cast<int>(comps.vectors.rows()));
  PhaseSpaceField f{grid, Eigen::MatrixXd::Zero(grid.nx, grid.np), FieldKind::kHusimi};
  // Density per unit dx dp: d^2 alpha = dx dp / 2.
  const double norm = 1.0 / (2.0 * kPi);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < grid.nx; ++i) {
    std::vector<Complex> acc;
    for (int j = 0; j < grid.np; ++j) {
      const Complex alpha = Complex(grid.x(i), grid.p(j)) / std::sqrt(2.0);
      f.values(i, j) = norm * coherent_expectation(comps, alpha, inv_sqrt, acc);
    }
  }
  check_coverage(f, tol, "husimi");
  return f;
}

// One-dimensional Gaussian kernel normalized to unit sum.
std::vector<double> kernel_1d(double sigma_cells) {
  const int half = std::max(1, static_cast<int>(std::ceil(10.0 * sigma_cells)));
  std::vector<double> k(2 * half + 1);
  double sum = 0.0;
  for (int i = -half; i <= half; ++i) {
    const double v = std::exp(-0.5 * (i / sigma_cells) * (i / sigma_cells));
    k[i + half] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

}  // namespace

void PhaseGrid::validate() const {
  require(nx >= 2 && np >= 2, ErrorCode::kInvalidArgument, "grid needs at least 2 nodes per axis");
  require(x_max > x_min && p_max > p_min, ErrorCode::kInvalidArgument,
          "grid bounds must be increasing");
}

PhaseGrid PhaseGrid::refined(int factor) const {
  PhaseGrid g = *this;
  g.nx = (nx - 1) * factor + 1;
  g.np = (np - 1) * factor + 1;
  return g;
}

PhaseSpaceField wigner(const FockVector& psi, const PhaseGrid& grid, const WignerOptions& opts) {
  return wigner_dispatch(psi, grid, opts);
}

PhaseSpaceField wigner(const DensityMatrix& rho, const PhaseGrid& grid,
                       const WignerOptions& opts) {
  return wigner_dispatch(rho, grid, opts);
}

PhaseSpaceField husimi(const FockVector& psi, const PhaseGrid& grid, double tol) {
  return husimi_components(components_of(psi), grid, tol);
}

PhaseSpaceField husimi(const DensityMatrix& rho, const PhaseGrid& grid, double tol) {
  return husimi_components(components_of(rho), grid, tol);
}

double husimi_q(const FockVector& psi, Complex alpha) {
  std::vector<Complex> acc;
  return coherent_expectation(components_of(psi), alpha, inverse_sqrt_table(psi.dim()), acc) / kPi;
}

double husimi_q(const DensityMatrix& rho, Complex alpha) {
  std::vector<Complex> acc;
  return coherent_expectation(components_of(rho), alpha, inverse_sqrt_table(rho.dim()), acc) /
         kPi;
}

double negativity_volume(const PhaseSpaceField& field) {
  require(field.kind == FieldKind::kWigner, ErrorCode::kInvalidArgument,
          "negativity volume is defined for Wigner fields only");
  require(field.normalization_residual() < 1e-3, ErrorCode::kCoverage,
          "negativity volume needs a grid with normalization residual < 1e-3");
  double neg = 0.0;
  for (Eigen::Index i = 0; i < field.values.size(); ++i) {
    const double v = field.values.data()[i];
    if (v < 0.0) neg -= v;
  }
  return neg * field.grid.cell_area();
}

PhaseSpaceField gaussian_smooth(const PhaseSpaceField& field, double sigma) {
  require(sigma >= 0.0, ErrorCode::kInvalidArgument, "smoothing sigma must be >= 0");
  if (sigma == 0.0) return field;
  const PhaseGrid& g = field.grid;
  const std::vector<double> kx = kernel_1d(sigma / g.dx());
  const std::vector<double> kp = kernel_1d(sigma / g.dp());
  const int hx = static_cast<int>(kx.size() / 2);
  const int hp = static_cast<int>(kp.size() / 2);

  Eigen::MatrixXd tmp = Eigen::MatrixXd::Zero(g.nx, g.np);
  for (int j = 0; j < g.np; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double acc = 0.0;
      const int lo = std::max(0, i - hx), hi = std::min(g.nx - 1, i + hx);
      for (int s = lo; s <= hi; ++s) acc += kx[s - i + hx] * field.values(s, j);
      tmp(i, j) = acc;
    }
  PhaseSpaceField out{g, Eigen::MatrixXd::Zero(g.nx, g.np), field.kind};
#pragma omp parallel for schedule(static)
  for (int j = 0; j < g.np; ++j) {
    const int lo = std::max(0, j - hp), hi = std::min(g.np - 1, j + hp);
    for (int s = lo; s <= hi; ++s) out.values.col(j) += kp[s - j + hp] * tmp.col(s);
  }
  return out;
}

PhaseSpaceField wigner_loss_map(const PhaseSpaceField& w_in, double reflectance) {
  require(w_in.kind == FieldKind::kWigner, ErrorCode::kInvalidArgument,
          "loss map needs a Wigner field");
  require(reflectance >= 0.0 && reflectance < 1.0, ErrorCode::kInvalidArgument,
          "loss map needs reflectance in [0, 1)");
  if (reflectance == 0.0) return w_in;
  const double t = 1.0 - reflectance;
  PhaseSpaceField out = gaussian_smooth(w_in, std::sqrt(0.5 * reflectance / t));
  out.values /= t;
  const double s = std::sqrt(t);
  out.grid.x_min *= s;
  out.grid.x_max *= s;
  out.grid.p_min *= s;
  out.grid.p_max *= s;
  return out;
}

PhaseGrid grid_suggest(const Moments& m, const GridSuggestOptions& opts) {
  require(opts.padding >= 3.0, ErrorCode::kInvalidArgument, "grid padding must be >= 3");
  const double sx = std::sqrt(std::max(m.var_x, 1e-12));
  const double sp = std::sqrt(std::max(m.var_p, 1e-12));
  PhaseGrid g;
  g.x_min = std::min(0.0, m.mean_x - opts.padding * sx);
  g.x_max = std::max(0.0, m.mean_x + opts.padding * sx);
  g.p_min = std::min(0.0, m.mean_p - opts.padding * sp);
  g.p_max = std::max(0.0, m.mean_p + opts.padding * sp);
  const double reach = std::max({std::abs(g.x_min), std::abs(g.x_max), std::abs(g.p_min),
                                 std::abs(g.p_max)});
  const double cell = 0.25 * kPi / (2.0 * reach);
  auto count = [&](double span) {
    const int n = static_cast<int>(std::ceil(span / cell)) + 1;
    return std::clamp(n, opts.min_points_per_axis, opts.max_points_per_axis);
  };
  g.nx = count(g.x_max - g.x_min);
  g.np = count(g.p_max - g.p_min);
  return g;
}

namespace {

// Enlarges the moment-based box until the Husimi function, evaluated on a
// coarse copy of the grid, holds all but 1e-5 of its mass. Q is broader
// than W, so this also bounds the Wigner tails of curved (Kerr-sheared)
// states whose extent the second moments underestimate.
template <class State>
PhaseGrid covering_grid(const State& s, double padding) {
  const Components comps = components_of(s);
  const Moments m = moments(s);
  GridSuggestOptions o;
  o.padding = padding;
  PhaseGrid g = grid_suggest(m, o);
  for (int attempt = 0; attempt < 8; ++attempt) {
    PhaseGrid coarse = g;
    coarse.nx = std::clamp(static_cast<int>((g.x_max - g.x_min) / 0.2) + 1, 16, 400);
    coarse.np = std::clamp(static_cast<int>((g.p_max - g.p_min) / 0.2) + 1, 16, 400);
    const PhaseSpaceField q = husimi_components(comps, coarse, 1.0);
    if (q.riemann_sum() >= 1.0 - 1e-5 - s.truncation_deficit()) break;
    o.padding *= 1.3;
    g = grid_suggest(m, o);
  }
  return g;
}

}  // namespace

PhaseGrid grid_suggest(const FockVector& psi, double padding) {
  return covering_grid(psi, padding);
}

PhaseGrid grid_suggest(const DensityMatrix& rho, double padding) {
  return covering_grid(rho, padding);
}

}  // namespace kerrq
