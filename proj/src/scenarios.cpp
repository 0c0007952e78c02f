#include "kerrq/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "kerrq/bsv_model.hpp"
#include "kerrq/channels.hpp"
#include "kerrq/classical_shear.hpp"
#include "kerrq/f2f.hpp"
#include "kerrq/io.hpp"

namespace kerrq {

using nlohmann::json;
namespace fs = std::filesystem;

// -- ConfigReader -------------------------------------------------------------

ConfigReader::ConfigReader(const json& cfg) : cfg_(cfg) {
  require(cfg.is_object(), ErrorCode::kConfig, "config must be a JSON object");
}

const json* ConfigReader::find(const std::string& key) {
  auto it = cfg_.find(key);
  if (it == cfg_.end()) return nullptr;
  return &*it;
}

namespace {

[[noreturn]] void config_error(const std::string& key, const std::string& what) {
  throw Error(ErrorCode::kConfig, "config key '" + key + "': " + what);
}

double as_number(const std::string& key, const json& v) {
  if (!v.is_number()) config_error(key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) config_error(key, "must be finite");
  return d;
}

}  // namespace

double ConfigReader::number(const std::string& key) {
  const json* v = find(key);
  if (!v) config_error(key, "required");
  const double d = as_number(key, *v);
  resolved_[key] = *v;
  return d;
}

double ConfigReader::number(const std::string& key, double fallback) {
  if (!find(key)) {
    resolved_[key] = fallback;
    return fallback;
  }
  return number(key);
}

long long ConfigReader::integer(const std::string& key) {
  const json* v = find(key);
  if (!v) config_error(key, "required");
  if (!v->is_number_integer()) config_error(key, "expected an integer");
  resolved_[key] = *v;
  return v->get<long long>();
}

long long ConfigReader::integer(const std::string& key, long long fallback) {
  if (!find(key)) {
    resolved_[key] = fallback;
    return fallback;
  }
  return integer(key);
}

std::string ConfigReader::text(const std::string& key, const std::string& fallback) {
  const json* v = find(key);
  if (!v) {
    resolved_[key] = fallback;
    return fallback;
  }
  if (!v->is_string()) config_error(key, "expected a string");
  resolved_[key] = *v;
  return v->get<std::string>();
}

std::vector<double> ConfigReader::numbers(const std::string& key) {
  const json* v = find(key);
  if (!v) config_error(key, "required");
  if (!v->is_array() || v->empty()) config_error(key, "expected a nonempty array of numbers");
  std::vector<double> out;
  for (const json& e : *v) out.push_back(as_number(key, e));
  resolved_[key] = *v;
  return out;
}

std::vector<double> ConfigReader::numbers(const std::string& key,
                                          const std::vector<double>& fallback) {
  if (!find(key)) {
    resolved_[key] = fallback;
    return fallback;
  }
  return numbers(key);
}

bool ConfigReader::flag(const std::string& key, bool fallback) {
  const json* v = find(key);
  if (!v) {
    resolved_[key] = fallback;
    return fallback;
  }
  if (!v->is_boolean()) config_error(key, "expected true or false");
  resolved_[key] = *v;
  return v->get<bool>();
}

void ConfigReader::finish() const {
  for (auto it = cfg_.begin(); it != cfg_.end(); ++it) {
    if (!resolved_.contains(it.key())) config_error(it.key(), "unknown key");
  }
}

// -- computational cores ------------------------------------------------------

double squeezing_from_db(double db) { return db * std::log(10.0) / 20.0; }

FockVector scan_initial_state(const NegativityScanParams& p, double photons) {
  require(photons > 0.0, ErrorCode::kInvalidArgument, "photon numbers must be positive");
  if (p.family == StateFamily::kCoherent) return coherent_state(std::sqrt(photons), p.dim);
  const double r = squeezing_from_db(p.squeezing_db);
  const double sh2 = std::sinh(r) * std::sinh(r);
  const double b2 = p.match_total_photons ? photons - sh2 : photons;
  require(b2 >= 0.0, ErrorCode::kInvalidArgument,
          "photon number below the squeezing photons sinh^2 r");
  return squeezed_coherent_state(std::sqrt(b2), r, p.dim);
}

namespace {

// Fock space a scan point needs. Photon-number tails of squeezed states
// are Gaussian in the quadrature, not in n, so the cut is placed eight
// anti-squeezed standard deviations beyond the mean amplitude and the basis
// is sized so that this lies below its top tenth.
int sizing_hint(const NegativityScanParams& p, double photons) {
  double b2 = photons, sigma = std::sqrt(0.5);
  if (p.family == StateFamily::kSqueezed) {
    const double r = squeezing_from_db(p.squeezing_db);
    const double sh2 = std::sinh(r) * std::sinh(r);
    b2 = p.match_total_photons ? photons - sh2 : photons;
    sigma = std::exp(r) * std::sqrt(0.5);
  }
  const double x = std::sqrt(2.0 * std::max(b2, 0.0)) + 8.0 * sigma;
  return static_cast<int>(std::ceil((0.5 * x * x + 10.0) / 0.9));
}

}  // namespace

NegativityPoint negativity_point(const NegativityScanParams& p, double photons,
                                 bool keep_field) {
  require(p.phi_kerr >= 0.0, ErrorCode::kInvalidArgument, "phi_kerr must be nonnegative");
  NegativityPoint pt;
  pt.photons = photons;
  pt.chi_t = chi_t_for_phase(p.phi_kerr, photons);
  const FockVector psi0 = scan_initial_state(p, photons);
  pt.deficit = psi0.truncation_deficit();
  // A cut tail leaves ripples in W of the order of the cut amplitudes, which
  // can exceed the small negativities being measured even when the deficit
  // is negligible. Require the top tenth of the basis to be empty as well.
  const int top = p.dim - std::max(1, p.dim / 10);
  const double tail = psi0.amps().tail(p.dim - top).squaredNorm();
  if (pt.deficit > 1e-8 || tail > 1e-14) {
    throw Error(ErrorCode::kTruncation,
                "dim " + std::to_string(p.dim) + " too small for " + format_double(photons) +
                    " photons (truncation deficit " + format_double(pt.deficit) +
                    ", top-level population " + format_double(tail) + "); try dim >= " +
                    std::to_string(sizing_hint(p, photons)));
  }
  const KerrStrength k{pt.chi_t};
  PhaseSpaceField w;
  if (p.loss_before > 0.0) {
    DensityMatrix rho = loss_apply(psi0, LossChannel(p.loss_before));
    const double n_mean = moments(rho).mean_n;
    rho = kerr_apply(rho, k);
    if (p.corotating) rho = phase_rotate(rho, corotating_angle(pt.chi_t, n_mean));
    w = wigner(rho, grid_suggest(rho, p.padding));
  } else {
    const double n_mean = moments(psi0).mean_n;
    FockVector psi = kerr_apply(psi0, k);
    if (p.corotating) psi = phase_rotate(psi, corotating_angle(pt.chi_t, n_mean));
    w = wigner(psi, grid_suggest(psi, p.padding));
  }
  if (p.loss_after > 0.0) w = wigner_loss_map(w, p.loss_after);
  pt.residual = w.normalization_residual();
  pt.negativity = negativity_volume(w);
  pt.grid = w.grid;
  if (keep_field) pt.field = std::move(w);
  return pt;
}

ExponentialFit exponential_fit(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), ErrorCode::kInvalidArgument, "fit arrays differ in length");
  std::vector<double> xs, ls;
  for (size_t i = 0; i < x.size(); ++i) {
    if (y[i] > 0.0) {
      xs.push_back(x[i]);
      ls.push_back(std::log(y[i]));
    }
  }
  ExponentialFit fit;
  fit.points = static_cast<int>(xs.size());
  if (xs.size() < 2) return fit;
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, ml = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    ml += ls[i];
  }
  mx /= n;
  ml /= n;
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ls[i] - ml);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  require(sxx > 0.0, ErrorCode::kInvalidArgument, "fit needs at least two distinct x values");
  fit.rate = -sxy / sxx;
  fit.prefactor = std::exp(ml + fit.rate * mx);
  return fit;
}

SvKerrCurve sv_kerr_curve(double photons, double chi_t, const std::vector<double>& losses,
                          int dim, double padding) {
  require(photons > 0.0, ErrorCode::kInvalidArgument, "n_s must be positive");
  const double r = std::asinh(std::sqrt(photons));
  const FockVector psi0 = squeezed_vacuum_state(r, dim);
  require(psi0.truncation_deficit() <= 1e-8, ErrorCode::kTruncation,
          "dim " + std::to_string(dim) + " too small for n_s = " + format_double(photons) +
              " (truncation deficit " + format_double(psi0.truncation_deficit()) + ")");
  FockVector psi = kerr_apply(psi0, KerrStrength{chi_t});
  psi = phase_rotate(psi, corotating_angle(chi_t, photons));
  SvKerrCurve c;
  c.photons = photons;
  c.chi_t = chi_t;
  c.losses = losses;
  c.lossless_wigner = wigner(psi, grid_suggest(psi, padding));
  for (double loss : losses) {
    require(loss >= 0.0 && loss < 1.0, ErrorCode::kInvalidArgument, "losses must lie in [0, 1)");
    c.negativity.push_back(negativity_volume(wigner_loss_map(c.lossless_wigner, loss)));
  }
  return c;
}

// -- runners ------------------------------------------------------------------

namespace {

struct Context {
  fs::path out_dir;
  std::uint64_t seed = 0;
  json outputs = json::array();
  json summary = json::object();

  fs::path file(const std::string& name) {
    outputs.push_back(name);
    const fs::path p = out_dir / name;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p;
  }
};

std::string number_tag(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Every stride-th node of the grid, keeping the first.
PhaseSpaceField decimate(const PhaseSpaceField& f, int stride) {
  if (stride <= 1) return f;
  const PhaseGrid& g = f.grid;
  PhaseGrid d = g;
  d.nx = (g.nx - 1) / stride + 1;
  d.np = (g.np - 1) / stride + 1;
  d.x_max = g.x((d.nx - 1) * stride);
  d.p_max = g.p((d.np - 1) * stride);
  PhaseSpaceField out{d, Eigen::MatrixXd(d.nx, d.np), f.kind};
  for (int i = 0; i < d.nx; ++i)
    for (int j = 0; j < d.np; ++j) out.values(i, j) = f.values(i * stride, j * stride);
  return out;
}

QuadratureConvention parse_convention(const std::string& s) {
  if (s == "canonical") return QuadratureConvention::canonical();
  if (s == "paper") return QuadratureConvention::paper();
  throw Error(ErrorCode::kConfig, "config key 'convention': expected canonical or paper");
}

bool parse_frame(const std::string& s) {
  if (s == "corotating") return true;
  if (s == "lab") return false;
  throw Error(ErrorCode::kConfig, "config key 'frame': expected corotating or lab");
}

void check_range(bool ok, const std::string& key, const std::string& what) {
  if (!ok) config_error(key, what);
}

void run_negativity_scan(ConfigReader& cfg, Context& ctx) {
  const std::string family = cfg.text("family", "");
  check_range(family == "coherent" || family == "squeezed" || family == "both", "family",
              "expected coherent, squeezed or both");
  NegativityScanParams base;
  base.photon_numbers = cfg.numbers("photon_numbers");
  base.phi_kerr = cfg.number("phi_kerr");
  base.squeezing_db = cfg.number("squeezing_db", 8.0);
  const std::string matching = cfg.text("photon_matching", "total");
  check_range(matching == "total" || matching == "displacement", "photon_matching",
              "expected total or displacement");
  base.match_total_photons = matching == "total";
  base.loss_before = cfg.number("loss_before", 0.0);
  base.loss_after = cfg.number("loss_after", 0.0);
  base.dim = static_cast<int>(cfg.integer("dim", 700));
  base.padding = cfg.number("padding", 5.0);
  base.corotating = parse_frame(cfg.text("frame", "corotating"));
  const bool export_wigner = cfg.flag("export_wigner", false);
  const int stride = static_cast<int>(cfg.integer("export_stride", 4));
  cfg.finish();
  for (double n : base.photon_numbers) check_range(n > 0.0, "photon_numbers", "must be positive");
  check_range(base.phi_kerr >= 0.0, "phi_kerr", "must be nonnegative");
  check_range(base.loss_before >= 0.0 && base.loss_before < 1.0, "loss_before", "must lie in [0, 1)");
  check_range(base.loss_after >= 0.0 && base.loss_after < 1.0, "loss_after", "must lie in [0, 1)");
  check_range(base.dim >= 2, "dim", "must be at least 2");
  check_range(base.padding >= 3.0, "padding", "must be at least 3");
  check_range(stride >= 1, "export_stride", "must be at least 1");

  std::vector<std::pair<std::string, StateFamily>> families;
  if (family != "squeezed") families.emplace_back("coherent", StateFamily::kCoherent);
  if (family != "coherent") families.emplace_back("squeezed", StateFamily::kSqueezed);

  CsvWriter points(ctx.file("negativity.csv"),
                   {"family", "photons", "chi_t", "negativity", "residual", "truncation_deficit"});
  CsvWriter fits(ctx.file("fit.csv"), {"family", "rate", "prefactor", "points"});
  std::map<std::string, double> rates;
  for (const auto& [name, fam] : families) {
    NegativityScanParams p = base;
    p.family = fam;
    std::vector<double> ys;
    for (double n : p.photon_numbers) {
      const NegativityPoint pt = negativity_point(p, n, export_wigner);
      points.row({name, n, pt.chi_t, pt.negativity, pt.residual, pt.deficit});
      ys.push_back(pt.negativity);
      if (pt.field)
        write_field_csv(ctx.file("wigner_" + name + "_n" + number_tag(n) + ".csv"),
                        decimate(*pt.field, stride));
    }
    const ExponentialFit fit = exponential_fit(p.photon_numbers, ys);
    fits.row({name, fit.rate, fit.prefactor, static_cast<long long>(fit.points)});
    rates[name] = fit.rate;
    ctx.summary["rate_" + name] = fit.rate;
  }
  points.close();
  fits.close();
  if (rates.size() == 2 && rates["squeezed"] > 0.0)
    ctx.summary["rate_ratio"] = rates["coherent"] / rates["squeezed"];
}

void run_sv_kerr(ConfigReader& cfg, Context& ctx) {
  const std::vector<double> ns = cfg.numbers("photon_numbers");
  // A chi_t list takes precedence; otherwise phi_kerr = 2 chi_t n_s fixes it.
  const double phi = cfg.number("phi_kerr", 0.0);
  std::vector<double> chis = cfg.numbers("chi_t", {});
  const std::vector<double> losses = cfg.numbers("losses");
  const int dim = static_cast<int>(cfg.integer("dim", 900));
  const double padding = cfg.number("padding", 5.0);
  const bool export_wigner = cfg.flag("export_wigner", true);
  const int stride = static_cast<int>(cfg.integer("export_stride", 4));
  cfg.finish();
  if (chis.empty()) {
    check_range(phi > 0.0, "phi_kerr", "give chi_t or a positive phi_kerr");
    for (double n : ns) chis.push_back(chi_t_for_phase(phi, n));
  }
  check_range(chis.size() == ns.size(), "chi_t", "needs one entry per photon number");
  for (double l : losses) check_range(l >= 0.0 && l < 1.0, "losses", "must lie in [0, 1)");
  check_range(dim >= 2, "dim", "must be at least 2");
  check_range(padding >= 3.0, "padding", "must be at least 3");
  check_range(stride >= 1, "export_stride", "must be at least 1");

  CsvWriter out(ctx.file("negativity_vs_loss.csv"),
                {"n_s", "chi_t", "phi_kerr", "loss", "negativity"});
  for (size_t i = 0; i < ns.size(); ++i) {
    const SvKerrCurve c = sv_kerr_curve(ns[i], chis[i], losses, dim, padding);
    for (size_t j = 0; j < losses.size(); ++j)
      out.row({ns[i], chis[i], kerr_phase_at_mean(chis[i], ns[i]), losses[j], c.negativity[j]});
    if (export_wigner)
      write_field_csv(ctx.file("wigner_ns" + number_tag(ns[i]) + ".csv"),
                      decimate(c.lossless_wigner, stride));
  }
  out.close();
}

void run_husimi_shear(ConfigReader& cfg, Context& ctx) {
  const double var_x = cfg.number("var_x");
  const double var_p = cfg.number("var_p");
  const long long count = cfg.integer("count");
  const std::vector<double> chis = cfg.numbers("chi_t");
  const int n_r = static_cast<int>(cfg.integer("n_r", 48));
  const int n_phi = static_cast<int>(cfg.integer("n_phi", 96));
  const double r_max = cfg.number("r_max", 3.0);
  const int ridge_bins = static_cast<int>(cfg.integer("ridge_bins", 12));
  const double cap = cfg.number("amplitude_cap", 0.0);
  cfg.finish();
  check_range(count >= 1 && count <= 100000000, "count", "must lie in [1, 1e8]");
  check_range(cap >= 0.0, "amplitude_cap", "must be nonnegative (0 disables)");
  check_range(ridge_bins >= 1, "ridge_bins", "must be positive");

  const ClassicalEnsemble base =
      sample_macroscopic_bsv(var_x, var_p, static_cast<int>(count), ctx.seed);
  CsvWriter ridge(ctx.file("ridge.csv"), {"chi_t", "r_lo", "r_hi", "count", "mean_abs2",
                                          "mean_phase", "shear_law_phase"});
  for (size_t k = 0; k < chis.size(); ++k) {
    ClassicalEnsemble e = shear_map(base, chis[k]);
    if (cap > 0.0) e = apply_amplitude_cap(e, cap);
    const PolarHistogram h = polar_histogram(e, n_r, n_phi, r_max);
    CsvWriter hist(ctx.file("histogram_" + std::to_string(k) + ".csv"),
                   {"chi_t", "r_center", "phi_center", "count"});
    for (int i = 0; i < h.n_r; ++i)
      for (int j = 0; j < h.n_phi; ++j)
        hist.row({chis[k], 0.5 * (h.r_edges[i] + h.r_edges[i + 1]),
                  0.5 * (h.phi_edges[j] + h.phi_edges[j + 1]), h.count(i, j)});
    hist.close();
    for (const RidgeBin& b : ridge_profile(e, ridge_bins, r_max)) {
      ridge.row({chis[k], b.r_lo, b.r_hi, static_cast<long long>(b.weight), b.mean_abs2,
                 b.mean_phase, fold_half_plane(shear_phase(chis[k], b.mean_abs2))});
    }
    ctx.summary["mean_amplitude_" + std::to_string(k)] = h.mean_amplitude;
  }
  ridge.close();
}

void run_bsv_params(ConfigReader& cfg, Context& ctx) {
  std::vector<double> photons = cfg.numbers("photon_numbers", {});
  std::vector<double> r0s = cfg.numbers("r0", {});
  const std::vector<double> losses = cfg.numbers("losses");
  const long long sample_count = cfg.integer("sample_count", 0);
  cfg.finish();
  check_range(photons.empty() != r0s.empty(), "photon_numbers",
              "give exactly one of photon_numbers and r0");
  check_range(sample_count >= 0 && sample_count <= 10000000, "sample_count",
              "must lie in [0, 1e7]");

  CsvWriter out(ctx.file("params.csv"),
                {"N", "r0", "R", "r", "n_th", "purity", "var_max", "var_min", "r_approx",
                 "n_th_approx", "r_approx_rel_dev", "n_th_approx_rel_dev", "degenerate"});
  int index = 0;
  const std::vector<double>& sources = photons.empty() ? r0s : photons;
  for (double src : sources) {
    for (double loss : losses) {
      const LossyBsvParams p = photons.empty() ? lossy_bsv_params(src, loss)
                                               : lossy_bsv_params_from_photons(src, loss);
      out.row({p.n_photons, p.r0, p.loss, p.r, p.n_th, p.purity, p.var_max, p.var_min,
               p.r_approx, p.n_th_approx, p.r_approx_rel_dev, p.n_th_approx_rel_dev,
               static_cast<long long>(p.degenerate)});
      if (sample_count > 0) {
        CsvWriter s(ctx.file("samples_" + std::to_string(index) + ".csv"),
                    {"beta_re", "beta_im", "r"});
        for (const MixtureSample& m :
             sample_displacements(p, static_cast<int>(sample_count), ctx.seed + index))
          s.row({m.beta.real(), m.beta.imag(), m.r});
        s.close();
      }
      ++index;
    }
  }
  out.close();
}

F2fSetup read_setup(ConfigReader& cfg) {
  F2fSetup s;
  s.center_wavelength = cfg.number("center_wavelength", s.center_wavelength);
  s.sigma_omega = cfg.number("sigma_omega", s.sigma_omega);
  s.ref_amp = cfg.number("ref_amp", s.ref_amp);
  s.kappa = cfg.number("kappa", s.kappa);
  s.snr_threshold = cfg.number("snr_threshold", s.snr_threshold);
  return s;
}

void write_shot(const fs::path& path, const ShotRecord& shot) {
  CsvWriter w(path, {"wavelength", "intensity"});
  for (size_t j = 0; j < shot.wavelengths.size(); ++j)
    w.row({shot.wavelengths[j], shot.intensity[j]});
  w.close();
}

void run_f2f_roundtrip(ConfigReader& cfg, Context& ctx) {
  const F2fSetup setup = read_setup(cfg);
  const int n_points = static_cast<int>(cfg.integer("n_points", 512));
  const double span = cfg.number("span_sigmas", 6.0);
  const double delay_product = cfg.number("delay_sigma_product", 30.0);
  const std::vector<double> amps = cfg.numbers("amplitudes");
  const std::vector<double> phases = cfg.numbers("phases");
  const double noise = cfg.number("noise_rms", 0.0);
  const bool write_shots = cfg.flag("write_shots", true);
  cfg.finish();
  for (double a : amps) check_range(a >= 0.0, "amplitudes", "must be nonnegative");
  check_range(delay_product > 0.0, "delay_sigma_product", "must be positive");

  const double delay = delay_product / setup.sigma_omega;
  const std::vector<double> grid = frequency_uniform_grid(setup, n_points, span);
  ctx.summary["delay"] = delay;
  CsvWriter out(ctx.file("roundtrip.csv"),
                {"shot", "true_amp_w", "true_phi_w", "amp_2w", "phi_2w", "snr", "low_confidence",
                 "amp_w", "phi_w", "phi_w_alt", "amp_rel_error", "phase_error_mod_pi"});
  double worst_amp = 0.0, worst_phase = 0.0;
  long long index = 0;
  for (double a : amps) {
    for (double ph : phases) {
      const Complex alpha = std::polar(a, ph);
      const ShotRecord shot = synth_shot(alpha, delay, grid, noise, ctx.seed + index, setup);
      const FringeEstimate est = extract_fringe(shot, delay, setup);
      const ShgInversion inv = invert_shg(est.amp_2w, est.phi_2w);
      const double amp_err = a > 0.0 ? std::abs(inv.amp_w / a - 1.0) : inv.amp_w;
      const double ph_err = a > 0.0 ? std::abs(std::remainder(inv.phi_w - ph, std::numbers::pi))
                                    : 0.0;
      if (!est.low_confidence) {
        worst_amp = std::max(worst_amp, amp_err);
        worst_phase = std::max(worst_phase, ph_err);
      }
      out.row({index, a, ph, est.amp_2w, est.phi_2w, est.snr,
               static_cast<long long>(est.low_confidence), inv.amp_w, inv.phi_w, inv.phi_w_alt,
               amp_err, ph_err});
      if (write_shots) {
        char name[48];
        std::snprintf(name, sizeof name, "shots/shot_%04lld.csv", index);
        write_shot(ctx.file(name), shot);
      }
      ++index;
    }
  }
  out.close();
  ctx.summary["max_amp_rel_error"] = worst_amp;
  ctx.summary["max_phase_error"] = worst_phase;
}

void run_mode_analysis(ConfigReader& cfg, Context& ctx) {
  const long long n_shots = cfg.integer("n_shots");
  const int n_points = static_cast<int>(cfg.integer("n_points", 512));
  const double wl_min = cfg.number("wavelength_min");
  const double wl_max = cfg.number("wavelength_max");
  const std::vector<double> centers = cfg.numbers("mode_centers");
  const std::vector<double> widths = cfg.numbers("mode_widths");
  const std::vector<double> energies = cfg.numbers("mode_energies");
  const double noise = cfg.number("noise_rms", 0.0);
  const double baseline = cfg.number("baseline", 0.0);
  const double photons_per_energy = cfg.number("photons_per_energy", 1.0);
  const int bins = static_cast<int>(cfg.integer("histogram_bins", 50));
  const int n_export = static_cast<int>(cfg.integer("export_modes", 5));
  cfg.finish();
  check_range(n_shots >= 2 && n_shots <= 1000000, "n_shots", "must lie in [2, 1e6]");
  check_range(n_points >= 2, "n_points", "must be at least 2");
  check_range(wl_max > wl_min && wl_min > 0.0, "wavelength_max", "needs 0 < min < max");
  check_range(centers.size() == widths.size() && centers.size() == energies.size(),
              "mode_centers", "mode_centers, mode_widths and mode_energies differ in length");
  check_range(photons_per_energy > 0.0, "photons_per_energy", "must be positive");
  check_range(n_export >= 1, "export_modes", "must be positive");

  std::vector<double> grid(n_points);
  for (int j = 0; j < n_points; ++j) grid[j] = wl_min + (wl_max - wl_min) * j / (n_points - 1);
  std::vector<Eigen::VectorXd> shapes;
  for (size_t m = 0; m < centers.size(); ++m)
    shapes.push_back(gaussian_profile(grid, centers[m], widths[m]));
  const auto shots =
      synth_mode_ensemble(grid, shapes, energies, static_cast<int>(n_shots), noise, ctx.seed);

  const CovarianceMap cm = covariance_map(shots);
  write_matrix_csv(ctx.file("covariance.csv"), grid, cm.cov, "wavelength");
  const ModeSpectrum ms = mode_decomposition(cm);
  CsvWriter modes(ctx.file("modes.csv"), {"mode", "weight", "weight_over_first"});
  for (Eigen::Index k = 0; k < ms.weights.size(); ++k)
    modes.row({static_cast<long long>(k), ms.weights[k],
               ms.weights[0] > 0.0 ? ms.weights[k] / ms.weights[0] : 0.0});
  modes.close();
  const int ne = std::min<int>(n_export, static_cast<int>(ms.weights.size()));
  write_matrix_csv(ctx.file("mode_shapes.csv"), grid, ms.shapes.leftCols(ne), "wavelength");

  std::vector<double> photons;
  for (const ShotRecord& s : shots) photons.push_back(shot_energy(s, baseline) * photons_per_energy);
  const PhotonStatistics st = photon_statistics(photons, bins);
  CsvWriter hist(ctx.file("photon_statistics.csv"), {"bin_lo", "bin_hi", "density", "gamma_density"});
  for (int b = 0; b < bins; ++b) {
    const double c = 0.5 * (st.bin_edges[b] + st.bin_edges[b + 1]);
    const double g = std::exp(-c / (2.0 * st.mean)) / std::sqrt(2.0 * std::numbers::pi * c * st.mean);
    hist.row({st.bin_edges[b], st.bin_edges[b + 1], st.density[b], g});
  }
  hist.close();
  CsvWriter sum(ctx.file("summary.csv"), {"quantity", "value"});
  sum.row({std::string("mean_photons"), st.mean});
  sum.row({std::string("variance"), st.variance});
  sum.row({std::string("variance_over_2mean2"), st.variance_ratio});
  sum.row({std::string("ks_statistic"), st.ks_statistic});
  sum.row({std::string("second_over_first_weight"),
           ms.weights.size() > 1 && ms.weights[0] > 0.0 ? ms.weights[1] / ms.weights[0] : 0.0});
  sum.close();
}

void run_wigner(ConfigReader& cfg, Context& ctx) {
  const std::string state = cfg.text("state", "");
  const int dim = static_cast<int>(cfg.integer("dim"));
  const double alpha_re = cfg.number("alpha_re", 0.0);
  const double alpha_im = cfg.number("alpha_im", 0.0);
  const double r = cfg.number("r", 0.0);
  const double n_th = cfg.number("n_th", 0.0);
  const long long fock_n = cfg.integer("fock_n", 0);
  const double chi_t = cfg.number("chi_t", 0.0);
  const double loss = cfg.number("loss", 0.0);
  const std::string kind = cfg.text("kind", "wigner");
  const double padding = cfg.number("padding", 5.0);
  const QuadratureConvention conv = parse_convention(cfg.text("convention", "canonical"));
  const bool corotating = parse_frame(cfg.text("frame", "corotating"));
  cfg.finish();
  check_range(dim >= 1, "dim", "must be positive");
  check_range(kind == "wigner" || kind == "husimi", "kind", "expected wigner or husimi");
  check_range(fock_n >= 0 && fock_n < dim, "fock_n", "must lie in [0, dim)");
  check_range(loss >= 0.0 && loss <= 1.0, "loss", "must lie in [0, 1]");
  check_range(padding >= 3.0, "padding", "must be at least 3");
  const Complex alpha(alpha_re, alpha_im);

  DensityMatrix rho(CMatrix::Zero(1, 1));
  if (state == "vacuum") {
    rho = DensityMatrix::from_pure(coherent_state(0.0, dim));
  } else if (state == "fock") {
    CVector a = CVector::Zero(dim);
    a[fock_n] = 1.0;
    rho = DensityMatrix::from_pure(FockVector(a));
  } else if (state == "coherent") {
    rho = DensityMatrix::from_pure(coherent_state(alpha, dim));
  } else if (state == "squeezed_vacuum") {
    rho = DensityMatrix::from_pure(squeezed_vacuum_state(r, dim));
  } else if (state == "squeezed_coherent") {
    rho = DensityMatrix::from_pure(squeezed_coherent_state(alpha, r, dim));
  } else if (state == "thermal") {
    rho = thermal_state(n_th, dim);
  } else if (state == "squeezed_thermal") {
    rho = squeezed_thermal_state(n_th, r, dim);
  } else {
    config_error("state",
                 "expected vacuum, fock, coherent, squeezed_vacuum, squeezed_coherent, thermal "
                 "or squeezed_thermal");
  }
  const double n_mean = moments(rho).mean_n;
  if (chi_t != 0.0) {
    rho = kerr_apply(rho, KerrStrength{chi_t});
    if (corotating) rho = phase_rotate(rho, corotating_angle(chi_t, n_mean));
  }
  if (loss > 0.0) rho = loss_apply(rho, LossChannel(loss));
  PhaseGrid grid = grid_suggest(rho, padding);
  grid.convention = conv;
  const PhaseSpaceField f = kind == "wigner" ? wigner(rho, grid) : husimi(rho, grid);
  write_field_csv(ctx.file("field.csv"), f);
  const Moments m = moments(rho, conv);
  CsvWriter sum(ctx.file("summary.csv"), {"quantity", "value"});
  sum.row({std::string("normalization_residual"), f.normalization_residual()});
  if (f.kind == FieldKind::kWigner)
    sum.row({std::string("negativity_volume"), negativity_volume(f)});
  sum.row({std::string("mean_n"), m.mean_n});
  sum.row({std::string("var_x"), m.var_x});
  sum.row({std::string("var_p"), m.var_p});
  sum.row({std::string("purity"), m.purity});
  sum.row({std::string("truncation_deficit"), rho.truncation_deficit()});
  sum.close();
  ctx.summary["normalization_residual"] = f.normalization_residual();
  if (f.kind == FieldKind::kWigner) ctx.summary["negativity_volume"] = negativity_volume(f);
}

using Runner = std::function<void(ConfigReader&, Context&)>;

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table = {
      {"negativity-scan", run_negativity_scan}, {"sv-kerr", run_sv_kerr},
      {"husimi-shear", run_husimi_shear},       {"bsv-params", run_bsv_params},
      {"f2f-roundtrip", run_f2f_roundtrip},     {"mode-analysis", run_mode_analysis},
      {"wigner", run_wigner},
  };
  return table;
}

}  // namespace

std::vector<std::string> scenario_names() {
  std::vector<std::string> out;
  for (const auto& [name, _] : runners()) out.push_back(name);
  return out;
}

json run_scenario(const std::string& name, const json& config, const RunOptions& opts) {
  const auto& table = runners();
  const auto it = table.find(name);
  require(it != table.end(), ErrorCode::kConfig, "unknown scenario '" + name + "'");
#ifdef _OPENMP
  if (opts.threads > 0) omp_set_num_threads(opts.threads);
#endif
  json cfg = config;
  require(cfg.is_object(), ErrorCode::kConfig, "config must be a JSON object");
  if (opts.seed) cfg["seed"] = *opts.seed;
  std::uint64_t seed = 0;
  if (cfg.contains("seed")) {
    require(cfg["seed"].is_number_unsigned() ||
                (cfg["seed"].is_number_integer() && cfg["seed"].get<long long>() >= 0),
            ErrorCode::kConfig, "config key 'seed': expected a nonnegative integer");
    seed = cfg["seed"].get<std::uint64_t>();
    cfg.erase("seed");
  }
  std::error_code ec;
  fs::create_directories(opts.out_dir, ec);
  require(!ec && fs::is_directory(opts.out_dir), ErrorCode::kIo,
          "cannot create output directory " + opts.out_dir.string());

  ConfigReader reader(cfg);
  Context ctx;
  ctx.out_dir = opts.out_dir;
  ctx.seed = seed;
  it->second(reader, ctx);

  json manifest;
  manifest["scenario"] = name;
  manifest["version"] = kVersion;
  manifest["seed"] = seed;
  manifest["config"] = reader.resolved();
  manifest["outputs"] = ctx.outputs;
  manifest["summary"] = ctx.summary;
  write_json(opts.out_dir / "manifest.json", manifest);
  return manifest;
}

}  // namespace kerrq
