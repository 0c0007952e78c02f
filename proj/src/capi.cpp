#include "kerrq.h"

#include <new>
#include <string>
#include <variant>

#include "kerrq/bsv_model.hpp"
#include "kerrq/channels.hpp"
#include "kerrq/io.hpp"
#include "kerrq/phase_space.hpp"
#include "kerrq/scenarios.hpp"

struct kerrq_state {
  std::variant<kerrq::FockVector, kerrq::DensityMatrix> s;
};

struct kerrq_field {
  kerrq::PhaseSpaceField f;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const char* what) {
  g_last_error = what;
  return code;
}

template <class F>
int guarded(F&& body) {
  try {
    body();
    return KERRQ_OK;
  } catch (const kerrq::Error& e) {
    return fail(static_cast<int>(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(KERRQ_ERR_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return fail(KERRQ_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(KERRQ_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(KERRQ_ERR_INTERNAL, "unknown error");
  }
}

void need(const void* p, const char* what) {
  kerrq::require(p != nullptr, kerrq::ErrorCode::kInvalidArgument, std::string(what) + " is null");
}

template <class T>
int make_state(kerrq_state** out, T&& build) {
  return guarded([&] {
    need(out, "output pointer");
    *out = new kerrq_state{build()};
  });
}

int make_field(const kerrq_state* s, double padding, bool husimi, kerrq_field** out) {
  return guarded([&] {
    need(s, "state");
    need(out, "output pointer");
    kerrq::PhaseSpaceField f = std::visit(
        [&](const auto& st) {
          const kerrq::PhaseGrid g = kerrq::grid_suggest(st, padding);
          return husimi ? kerrq::husimi(st, g) : kerrq::wigner(st, g);
        },
        s->s);
    *out = new kerrq_field{std::move(f)};
  });
}

}  // namespace

extern "C" {

const char* kerrq_version(void) { return kerrq::kVersion; }
const char* kerrq_last_error(void) { return g_last_error.c_str(); }

int kerrq_state_fock(int n, int dim, kerrq_state** out) {
  return make_state(out, [&] {
    kerrq::require(dim >= 1 && n >= 0 && n < dim, kerrq::ErrorCode::kInvalidArgument,
                   "need 0 <= n < dim");
    kerrq::CVector a = kerrq::CVector::Zero(dim);
    a[n] = 1.0;
    return kerrq::FockVector(a);
  });
}

int kerrq_state_coherent(double re, double im, int dim, kerrq_state** out) {
  return make_state(out, [&] { return kerrq::coherent_state({re, im}, dim); });
}

int kerrq_state_squeezed_vacuum(double r, int dim, kerrq_state** out) {
  return make_state(out, [&] { return kerrq::squeezed_vacuum_state(r, dim); });
}

int kerrq_state_squeezed_coherent(double re, double im, double r, int dim, kerrq_state** out) {
  return make_state(out, [&] { return kerrq::squeezed_coherent_state({re, im}, r, dim); });
}

int kerrq_state_thermal(double n_th, int dim, kerrq_state** out) {
  return make_state(out, [&] { return kerrq::thermal_state(n_th, dim); });
}

int kerrq_state_squeezed_thermal(double n_th, double r, int dim, kerrq_state** out) {
  return make_state(out, [&] { return kerrq::squeezed_thermal_state(n_th, r, dim); });
}

void kerrq_state_free(kerrq_state* s) { delete s; }

int kerrq_state_kerr(kerrq_state* s, double chi_t) {
  return guarded([&] {
    need(s, "state");
    std::visit([&](auto& st) { st = kerrq::kerr_apply(st, kerrq::KerrStrength{chi_t}); }, s->s);
  });
}

int kerrq_state_loss(kerrq_state* s, double reflectance) {
  return guarded([&] {
    need(s, "state");
    const kerrq::LossChannel ch(reflectance);
    kerrq::DensityMatrix rho =
        std::visit([&](const auto& st) { return kerrq::loss_apply(st, ch); }, s->s);
    s->s = std::move(rho);
  });
}

int kerrq_state_rotate(kerrq_state* s, double angle) {
  return guarded([&] {
    need(s, "state");
    std::visit([&](auto& st) { st = kerrq::phase_rotate(st, angle); }, s->s);
  });
}

int kerrq_state_dim(const kerrq_state* s, int* dim) {
  return guarded([&] {
    need(s, "state");
    need(dim, "output pointer");
    *dim = std::visit([](const auto& st) { return st.dim(); }, s->s);
  });
}

int kerrq_state_truncation_deficit(const kerrq_state* s, double* deficit) {
  return guarded([&] {
    need(s, "state");
    need(deficit, "output pointer");
    *deficit = std::visit([](const auto& st) { return st.truncation_deficit(); }, s->s);
  });
}

int kerrq_state_moments(const kerrq_state* s, int paper_convention, double out[6]) {
  return guarded([&] {
    need(s, "state");
    need(out, "output array");
    const auto conv = paper_convention ? kerrq::QuadratureConvention::paper()
                                       : kerrq::QuadratureConvention::canonical();
    const kerrq::Moments m =
        std::visit([&](const auto& st) { return kerrq::moments(st, conv); }, s->s);
    out[0] = m.mean_n;
    out[1] = m.mean_x;
    out[2] = m.mean_p;
    out[3] = m.var_x;
    out[4] = m.var_p;
    out[5] = m.purity;
  });
}

int kerrq_field_wigner(const kerrq_state* s, double padding, kerrq_field** out) {
  return make_field(s, padding, false, out);
}

int kerrq_field_husimi(const kerrq_state* s, double padding, kerrq_field** out) {
  return make_field(s, padding, true, out);
}

void kerrq_field_free(kerrq_field* f) { delete f; }

int kerrq_field_shape(const kerrq_field* f, int* nx, int* np, double bounds[4]) {
  return guarded([&] {
    need(f, "field");
    const kerrq::PhaseGrid& g = f->f.grid;
    if (nx) *nx = g.nx;
    if (np) *np = g.np;
    if (bounds) {
      bounds[0] = g.x_min;
      bounds[1] = g.x_max;
      bounds[2] = g.p_min;
      bounds[3] = g.p_max;
    }
  });
}

int kerrq_field_values(const kerrq_field* f, double* buf, size_t len) {
  return guarded([&] {
    need(f, "field");
    need(buf, "buffer");
    const auto& v = f->f.values;
    kerrq::require(len >= static_cast<size_t>(v.size()), kerrq::ErrorCode::kInvalidArgument,
                   "buffer shorter than nx*np");
    size_t k = 0;
    for (Eigen::Index i = 0; i < v.rows(); ++i)
      for (Eigen::Index j = 0; j < v.cols(); ++j) buf[k++] = v(i, j);
  });
}

int kerrq_field_negativity(const kerrq_field* f, double* volume) {
  return guarded([&] {
    need(f, "field");
    need(volume, "output pointer");
    *volume = kerrq::negativity_volume(f->f);
  });
}

int kerrq_field_normalization_residual(const kerrq_field* f, double* residual) {
  return guarded([&] {
    need(f, "field");
    need(residual, "output pointer");
    *residual = f->f.normalization_residual();
  });
}

int kerrq_lossy_bsv(double n_photons, double reflectance, double out[5]) {
  return guarded([&] {
    need(out, "output array");
    const kerrq::LossyBsvParams p = kerrq::lossy_bsv_params_from_photons(n_photons, reflectance);
    out[0] = p.r;
    out[1] = p.n_th;
    out[2] = p.purity;
    out[3] = p.var_max;
    out[4] = p.var_min;
  });
}

int kerrq_run_scenario(const char* name, const char* config_json, const char* out_dir,
                       unsigned long long seed, int has_seed, int threads) {
  return guarded([&] {
    need(name, "scenario name");
    need(config_json, "config");
    need(out_dir, "output directory");
    nlohmann::json cfg;
    try {
      cfg = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::exception& e) {
      throw kerrq::Error(kerrq::ErrorCode::kConfig, std::string("config is not valid JSON: ") + e.what());
    }
    kerrq::RunOptions opts;
    opts.out_dir = out_dir;
    if (has_seed) opts.seed = seed;
    opts.threads = threads;
    kerrq::run_scenario(name, cfg, opts);
  });
}

int kerrq_run_scenario_file(const char* name, const char* config_path, const char* out_dir,
                            unsigned long long seed, int has_seed, int threads) {
  return guarded([&] {
    need(name, "scenario name");
    need(config_path, "config path");
    need(out_dir, "output directory");
    kerrq::RunOptions opts;
    opts.out_dir = out_dir;
    if (has_seed) opts.seed = seed;
    opts.threads = threads;
    kerrq::run_scenario(name, kerrq::read_json_file(config_path), opts);
  });
}

const char* kerrq_scenario_names(void) {
  static const std::string joined = [] {
    std::string s;
    for (const auto& n : kerrq::scenario_names()) s += (s.empty() ? "" : "\n") + n;
    return s;
  }();
  return joined.c_str();
}

}  // extern "C"
