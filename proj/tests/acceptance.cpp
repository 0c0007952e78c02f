// Acceptance run: one PASS/FAIL line per criterion, with the measured
// numbers next to the thresholds.
//
//   acceptance [--only=1,5,...] [--expect-fail=3,4]
//
// Exit status is zero when the set of failing criteria equals the
// --expect-fail set (empty by default).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kerrq/bsv_model.hpp"
#include "kerrq/channels.hpp"
#include "kerrq/classical_shear.hpp"
#include "kerrq/f2f.hpp"
#include "kerrq/fock.hpp"
#include "kerrq/phase_space.hpp"
#include "kerrq/scenarios.hpp"

using namespace kerrq;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Detail {
 public:
  template <typename... Args>
  Detail& add(const char* fmt, Args... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, args...);
    if (!text_.empty()) text_ += "; ";
    text_ += buf;
    return *this;
  }
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

FockVector number_state(int n, int dim) {
  CVector a = CVector::Zero(dim);
  a[n] = 1.0;
  return FockVector(a);
}

// -- 1 ------------------------------------------------------------------------
Outcome fock_negativity() {
  const auto t0 = std::chrono::steady_clock::now();
  const FockVector one = number_state(1, 8);
  const double n = negativity_volume(wigner(one, grid_suggest(one)));
  const double secs = seconds_since(t0);
  const double exact = 2.0 * std::exp(-0.5) - 1.0;
  Detail d;
  d.add("N_neg=%.6f exact=%.6f |err|=%.2e (<1e-3)", n, exact, std::abs(n - exact));
  d.add("time %.3fs (<1s)", secs);
  return {std::abs(n - exact) < 1e-3 && secs < 1.0, d.str()};
}

// -- 2 ------------------------------------------------------------------------
Outcome kerr_cat() {
  // exp(-i pi/2 n(n-1)) = (-1)^{n(n-1)/2} puts the two components at
  // +-i alpha: ((1-i)|i alpha> + (1+i)|-i alpha>)/2.
  const int dim = 64;
  const Complex alpha = 2.0, i(0.0, 1.0);
  const FockVector cat = kerr_apply(coherent_state(alpha, dim), {kPi / 2});
  const CVector expect = 0.5 * (1.0 - i) * coherent_state(i * alpha, dim).amps() +
                         0.5 * (1.0 + i) * coherent_state(-i * alpha, dim).amps();
  const double fid = fidelity(cat, FockVector(expect));
  const double n = negativity_volume(wigner(cat, grid_suggest(cat)));
  Detail d;
  d.add("1-fidelity=%.2e (<1e-8)", 1.0 - fid);
  d.add("N_neg=%.4f (>0.1)", n);
  return {fid > 1.0 - 1e-8 && n > 0.1, d.str()};
}

// -- 3 ------------------------------------------------------------------------
Outcome negativity_scan() {
  const auto t0 = std::chrono::steady_clock::now();
  NegativityScanParams p;
  p.phi_kerr = 0.6;
  p.squeezing_db = 8.0;
  p.dim = 700;
  const std::vector<double> ns = {25, 50, 75, 100, 125, 150, 175, 200};
  std::vector<double> coh, sq;
  for (double n : ns) {
    p.family = StateFamily::kCoherent;
    coh.push_back(negativity_point(p, n).negativity);
    p.family = StateFamily::kSqueezed;
    sq.push_back(negativity_point(p, n).negativity);
  }
  const double secs = seconds_since(t0);
  const double at200 = sq.back() / coh.back();
  const double rc = exponential_fit(ns, coh).rate, rs = exponential_fit(ns, sq).rate;
  const double rate_ratio = rc / rs;
  Detail d;
  d.add("N_neg(200) squeezed/coherent=%.3g (>=100)", at200);
  d.add("fit rates coherent=%.4g squeezed=%.4g ratio=%.3f (>=10)", rc, rs, rate_ratio);
  d.add("time %.0fs (<600s)", secs);
  return {at200 >= 100.0 && rate_ratio >= 10.0 && secs < 600.0, d.str()};
}

// -- 4 ------------------------------------------------------------------------
Outcome sv_kerr() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> losses = {0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
  const SvKerrCurve dim4 = sv_kerr_curve(4.0, 0.02, losses, 400, 5.0);
  const SvKerrCurve dim20 = sv_kerr_curve(20.0, 0.004, losses, 900, 5.0);
  const double secs = seconds_since(t0);
  const auto& a = dim4.negativity;
  const auto& b = dim20.negativity;
  const bool brighter_larger = b[0] > a[0];
  // Faster decay: the brighter curve keeps a smaller fraction at the first
  // lossy point, and drops below the dimmer curve somewhere.
  const bool faster = b[1] / b[0] < a[1] / a[0];
  double crossing = -1.0;
  for (size_t k = 1; k < losses.size(); ++k) {
    if (b[k] < a[k]) {
      crossing = losses[k];
      break;
    }
  }
  // A positive value is only meaningful above the quadrature noise of the
  // Riemann sum; W at T = 1/2 is a rescaled Husimi function and cannot be
  // negative, so whatever remains at R = 0.5 is discretization error.
  const double floor = 1e-6;
  const bool survive = a.back() > floor && b.back() > floor;
  Detail d;
  d.add("(a) N_neg(0): n_s=20 %.4f vs n_s=4 %.4f", b[0], a[0]);
  d.add("(b) kept at R=0.01: %.3f vs %.3f, crossing at R=%.2f", b[1] / b[0], a[1] / a[0], crossing);
  d.add("(c) N_neg(0.5): %.2e and %.2e (> %.0e)", a.back(), b.back(), floor);
  d.add("time %.0fs (<120s)", secs);
  return {brighter_larger && faster && crossing > 0.0 && survive && secs < 120.0, d.str()};
}

// -- 5 ------------------------------------------------------------------------
Outcome loss_algebra() {
  const auto t0 = std::chrono::steady_clock::now();
  const QuadratureConvention paper = QuadratureConvention::paper();
  double law = 0.0;
  for (double r : {0.05, 0.3, 0.7}) {
    const DensityMatrix in = squeezed_thermal_state(0.3, 0.6, 120);
    const Moments a = moments(in, paper);
    const Moments b = moments(loss_apply(in, LossChannel(r)), paper);
    law = std::max(law, std::abs(b.var_min / ((1 - r) * a.var_min + r) - 1.0));
    law = std::max(law, std::abs(b.var_max / ((1 - r) * a.var_max + r) - 1.0));
  }
  // Purity formula against the Fock-space channel.
  const LossyBsvParams p = lossy_bsv_params(1.0, 0.5);
  const Moments fock = moments(loss_apply(squeezed_vacuum_state(1.0, 150), LossChannel(0.5)), paper);
  const double pur = std::abs(fock.purity / p.purity - 1.0);
  // Effective squeezing and thermal occupation from the variances.
  double exact = 0.0, approx = 0.0;
  for (double n : {1.0, 1e3, 1e6, 1e9, 1e12}) {
    for (double r : {0.01, 0.05, 0.1, 0.3}) {
      const LossyBsvParams q = lossy_bsv_params_from_photons(n, r);
      const double t = 1.0 - r;
      const double r0 = std::asinh(std::sqrt(n));
      const double vmax = t * std::exp(2 * r0) + r, vmin = t * std::exp(-2 * r0) + r;
      exact = std::max(exact, std::abs(q.r - 0.25 * std::log(vmax / vmin)) / q.r);
      exact = std::max(exact, std::abs((2 * q.n_th + 1) / std::sqrt(vmax * vmin) - 1.0));
      exact = std::max(exact, std::abs(q.purity * std::sqrt(1.0 + 4 * r * t * n) - 1.0));
      if (n >= 1e6) approx = std::max({approx, q.r_approx_rel_dev, q.n_th_approx_rel_dev});
    }
  }
  const double secs = seconds_since(t0);
  Detail d;
  d.add("variance law rel err %.1e (<1e-6)", law);
  d.add("purity vs Fock rel err %.1e (<1e-6)", pur);
  d.add("exact formulas rel err %.1e (<1e-12)", exact);
  d.add("large-N approx max rel dev %.2e (<1e-2)", approx);
  d.add("time %.2fs (<1s)", secs);
  return {law < 1e-6 && pur < 1e-6 && exact < 1e-12 && approx < 1e-2 && secs < 1.0, d.str()};
}

// -- 6 ------------------------------------------------------------------------
Outcome mixture() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = LossyBsvParams::squeezed_thermal(0.5, 0.4);
  const double td = trace_distance(reconstruct_mixture(p, 120, 20000, 2024),
                                   squeezed_thermal_state(0.5, 0.4, 120));
  const double secs = seconds_since(t0);
  Detail d;
  d.add("trace distance %.4f (<0.02)", td);
  d.add("time %.1fs (<120s)", secs);
  return {td < 0.02 && secs < 120.0, d.str()};
}

// -- 7 ------------------------------------------------------------------------
Outcome shear_signature() {
  const auto t0 = std::chrono::steady_clock::now();
  const ClassicalEnsemble e = sample_macroscopic_bsv(1e12, 0.55, 1000000, 2024);
  double mean_abs = 0.0;
  for (Complex a : e.samples) mean_abs += std::abs(a);
  mean_abs /= e.samples.size();
  // Phase at the mean amplitude 0.15 rad; the outer bins stay below pi/2.
  const double chi_t = 0.15 / (2.0 * mean_abs * mean_abs);
  const auto bins = ridge_profile(shear_map(e, chi_t), 12, 3.0);
  const double secs = seconds_since(t0);
  int used = 0;
  double worst = 0.0;
  for (const auto& b : bins) {
    if (b.weight < 500) continue;
    ++used;
    const double law = shear_phase(chi_t, b.mean_abs2);
    worst = std::max(worst, std::abs(b.mean_phase / law - 1.0));
  }
  Detail d;
  d.add("%d bins with >=500 counts, max rel dev %.2e (<0.05)", used, worst);
  d.add("time %.1fs (<30s)", secs);
  return {used >= 3 && worst < 0.05 && secs < 30.0, d.str()};
}

// -- 8 ------------------------------------------------------------------------
Outcome f2f_roundtrip() {
  const auto t0 = std::chrono::steady_clock::now();
  const F2fSetup setup;
  const auto grid = frequency_uniform_grid(setup, 512);
  const double delay = 30.0 / setup.sigma_omega;
  double amp_err = 0.0, phase_err = 0.0;
  for (double amp : {0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0}) {
    for (double phase : {-3.0, -1.2, 0.0, 0.4, 1.5, 2.9}) {
      const ShotRecord s = synth_shot(std::polar(amp, phase), delay, grid, 0.0, 1, setup);
      const FringeEstimate f = extract_fringe(s, delay, setup);
      const ShgInversion inv = invert_shg(f.amp_2w, f.phi_2w);
      amp_err = std::max(amp_err, std::abs(inv.amp_w / amp - 1.0));
      const double e1 = std::abs(std::remainder(inv.phi_w - phase, 2 * kPi));
      const double e2 = std::abs(std::remainder(inv.phi_w_alt - phase, 2 * kPi));
      phase_err = std::max(phase_err, std::min(e1, e2));
    }
  }
  const double secs = seconds_since(t0);
  Detail d;
  d.add("|alpha| in [0.1, 10]: max amp rel err %.1e (<1e-2), max phase err %.1e rad (<2e-3)",
        amp_err, phase_err);
  d.add("time %.2fs (<10s)", secs);
  return {amp_err < 1e-2 && phase_err < 2e-3 && secs < 10.0, d.str()};
}

// -- 9 ------------------------------------------------------------------------
Outcome si_statistics() {
  auto t0 = std::chrono::steady_clock::now();
  const auto wl = frequency_uniform_grid(F2fSetup{}, 512);
  const Eigen::VectorXd shape = gaussian_profile(wl, 800e-9, 5e-9);
  const auto shots = synth_mode_ensemble(wl, {shape}, {1.0}, 7000, 1e-4, 11);
  const ModeSpectrum m = mode_decomposition(covariance_map(shots));
  const double secs = seconds_since(t0);
  const double ratio = m.weights[1] / m.weights[0];

  const PhotonStatistics st = photon_statistics(bsv_energy_samples(1.0, 100000, 12));
  Detail d;
  d.add("7000x512: second/first weight %.1e (<1e-2), time %.1fs (<60s)", ratio, secs);
  d.add("1e5 draws: Var/(2<N>^2)=%.4f (within 3%%), KS=%.4f (<0.02)", st.variance_ratio,
        st.ks_statistic);
  return {ratio < 1e-2 && secs < 60.0 && std::abs(st.variance_ratio - 1.0) < 0.03 &&
              st.ks_statistic < 0.02,
          d.str()};
}

// -- 10 -----------------------------------------------------------------------
Outcome property_suite() {
  const double r4 = std::asinh(2.0);
  const FockVector kerr4 =
      phase_rotate(kerr_apply(squeezed_vacuum_state(r4, 150), {0.02}), corotating_angle(0.02, 4.0));
  const FockVector states[] = {number_state(1, 8), squeezed_vacuum_state(0.921, 200), kerr4,
                               kerr_apply(coherent_state(2.0, 64), {kPi / 2})};
  double smooth = 0.0;
  for (const auto& psi : states) {
    const PhaseGrid g = grid_suggest(psi, 8.0);
    const PhaseSpaceField w = gaussian_smooth(wigner(psi, g), kVacuumSmoothingSigma);
    smooth = std::max(smooth, (w.values - husimi(psi, g).values).cwiseAbs().maxCoeff());
  }

  double stats = 0.0;
  for (double chi_t : {0.01, 0.1, 1.0}) {
    const FockVector psi = squeezed_coherent_state(Complex(3.0, 1.0), 0.5, 150);
    const auto a = photon_distribution(psi), b = photon_distribution(kerr_apply(psi, {chi_t}));
    for (size_t n = 0; n < a.size(); ++n) stats = std::max(stats, std::abs(a[n] - b[n]));
  }

  const DensityMatrix rho = DensityMatrix::from_pure(squeezed_coherent_state(Complex(2.0, 1.0), 0.6, 100));
  const Moments two = moments(loss_apply(loss_apply(rho, LossChannel(0.2)), LossChannel(0.3)));
  const Moments one = moments(loss_apply(rho, LossChannel(1.0 - 0.8 * 0.7)));
  const double compose = std::max({std::abs(two.mean_n - one.mean_n), std::abs(two.var_x - one.var_x),
                                   std::abs(two.var_p - one.var_p), std::abs(two.mean_x - one.mean_x),
                                   std::abs(two.cov_xp - one.cov_xp)});

  const PhaseGrid g = grid_suggest(kerr4);
  const double coarse = negativity_volume(wigner(kerr4, g));
  const double fine = negativity_volume(wigner(kerr4, g.refined(2)));
  const double refine = std::abs(coarse - fine) / fine;

  Detail d;
  d.add("|Q - W*G|max %.1e (<1e-6)", smooth);
  d.add("Kerr photon stats %.1e (<1e-14)", stats);
  d.add("loss composition %.1e (<1e-8)", compose);
  d.add("refinement %.2e (<1e-2)", refine);
  return {smooth < 1e-6 && stats < 1e-14 && compose < 1e-8 && refine < 1e-2, d.str()};
}

std::set<int> parse_list(const std::string& s) {
  std::set<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.insert(std::stoi(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only, expected;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a.rfind("--only=", 0) == 0) {
      only = parse_list(a.substr(7));
    } else if (a.rfind("--expect-fail=", 0) == 0) {
      expected = parse_list(a.substr(14));
    } else {
      std::fprintf(stderr, "usage: %s [--only=LIST] [--expect-fail=LIST]\n", argv[0]);
      return 2;
    }
  }
  std::setvbuf(stdout, nullptr, _IOLBF, 0);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"Fock negativity oracle", fock_negativity},
      {"Kerr cat", kerr_cat},
      {"negativity scan: squeezed vs coherent", negativity_scan},
      {"squeezed-vacuum negativity under loss", sv_kerr},
      {"loss algebra", loss_algebra},
      {"mixture equivalence", mixture},
      {"classical shear signature", shear_signature},
      {"f-2f round trip", f2f_roundtrip},
      {"shot statistics", si_statistics},
      {"cross-check properties", property_suite},
  };

  std::set<int> failed;
  for (size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) failed.insert(id);
    std::printf("criterion %2d %s  %s: %s%s\n", id, o.pass ? "PASS" : "FAIL", criteria[k].first,
                o.detail.c_str(), !o.pass && expected.count(id) ? " [known failure]" : "");
  }

  std::set<int> expected_run;
  for (int id : expected)
    if (only.empty() || only.count(id)) expected_run.insert(id);
  std::printf("%zu criteria failed", failed.size());
  if (!expected_run.empty()) std::printf(" (%zu expected)", expected_run.size());
  std::printf("\n");
  for (int id : expected_run)
    if (!failed.count(id)) std::printf("criterion %d was expected to fail but passed\n", id);
  return failed == expected_run ? 0 : 1;
}
