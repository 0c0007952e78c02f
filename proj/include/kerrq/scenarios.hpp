#pragma once

// Figure-level experiments. Each runner validates a flat JSON config,
// writes CSV files into the output directory and returns the manifest.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kerrq/fock.hpp"
#include "kerrq/phase_space.hpp"

namespace kerrq {

inline constexpr const char* kVersion = "0.1.0";

/// Strict reader over a flat JSON object. Every key must be consumed before
/// finish(); leftovers are rejected as unknown. Values read (including
/// defaults) are recorded in resolved().
class ConfigReader {
 public:
  explicit ConfigReader(const nlohmann::json& cfg);

  double number(const std::string& key);
  double number(const std::string& key, double fallback);
  long long integer(const std::string& key);
  long long integer(const std::string& key, long long fallback);
  std::string text(const std::string& key, const std::string& fallback);
  std::vector<double> numbers(const std::string& key);
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback);
  bool flag(const std::string& key, bool fallback);

  void finish() const;
  const nlohmann::json& resolved() const { return resolved_; }

 private:
  const nlohmann::json* find(const std::string& key);
  nlohmann::json cfg_;
  nlohmann::json resolved_ = nlohmann::json::object();
};

// -- computational cores, shared by the runners and the tests ---------------

enum class StateFamily { kCoherent, kSqueezed };

struct NegativityScanParams {
  StateFamily family = StateFamily::kCoherent;
  std::vector<double> photon_numbers;
  double phi_kerr = 0.6;
  double squeezing_db = 8.0;
  /// true: |beta|^2 = n - sinh^2 r so the total mean photon number is n;
  /// false: |beta|^2 = n.
  bool match_total_photons = true;
  double loss_before = 0.0;
  double loss_after = 0.0;
  int dim = 700;
  double padding = 5.0;
  bool corotating = true;
};

struct NegativityPoint {
  double photons = 0.0;
  double chi_t = 0.0;
  double negativity = 0.0;
  double residual = 0.0;  // Wigner normalization residual
  double deficit = 0.0;   // truncation deficit of the initial state
  PhaseGrid grid;
  std::optional<PhaseSpaceField> field;
};

struct ExponentialFit {
  double rate = 0.0;       // N = A exp(-rate n)
  double prefactor = 0.0;  // A
  int points = 0;
};

double squeezing_from_db(double db);
/// Initial pure state of a scan point (before loss and Kerr).
FockVector scan_initial_state(const NegativityScanParams& p, double photons);
NegativityPoint negativity_point(const NegativityScanParams& p, double photons,
                                 bool keep_field = false);
/// Least squares of ln y against x over the points with y > 0.
ExponentialFit exponential_fit(const std::vector<double>& x, const std::vector<double>& y);

struct SvKerrCurve {
  double photons = 0.0;  // n_s
  double chi_t = 0.0;
  std::vector<double> losses;
  std::vector<double> negativity;
  PhaseSpaceField lossless_wigner;
};

/// Kerr-evolved squeezed vacuum followed by loss. Lossy Wigner functions
/// come from the phase-space form of the loss channel applied to the
/// lossless one.
SvKerrCurve sv_kerr_curve(double photons, double chi_t, const std::vector<double>& losses,
                          int dim, double padding);

// -- runners ----------------------------------------------------------------

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides the config's seed
  int threads = 0;                    // 0 keeps the runtime default
};

std::vector<std::string> scenario_names();
/// Throws Error; kConfig for bad configs, kIo for output failures.
nlohmann::json run_scenario(const std::string& name, const nlohmann::json& config,
                            const RunOptions& opts);

}  // namespace kerrq
