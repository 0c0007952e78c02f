#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "kerrq/io.hpp"
#include "kerrq/scenarios.hpp"

using namespace kerrq;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "kerrq_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Every regular file below dir, relative path -> bytes.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  return out;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

}  // namespace

TEST_SUITE("scenarios") {

TEST_CASE("double formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-0.0) == "0");
  CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
  CHECK(std::stod(format_double(1e-300)) == 1e-300);
  CHECK(std::stod(format_double(M_PI)) == M_PI);
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
}

TEST_CASE("csv writer") {
  const fs::path dir = scratch("csv");
  {
    CsvWriter w = CsvWriter::with_preamble(dir / "a.csv", "note", {"name", "n", "v"});
    w.row({std::string("x"), 3LL, 0.5});
    CHECK_THROWS_AS(w.row({1.0}), Error);
    w.close();
  }
  CHECK(slurp(dir / "a.csv") == "# note\nname,n,v\nx,3,0.5\n");
  CHECK(code_of([&] { CsvWriter w(dir / "missing" / "deeper" / "b.csv", {"a"}); }) ==
        ErrorCode::kIo);
}

TEST_CASE("config reader") {
  const json cfg = {{"a", 1.5}, {"n", 3}, {"s", "x"}, {"v", {1, 2}}, {"b", true}};
  ConfigReader r(cfg);
  CHECK(r.number("a") == 1.5);
  CHECK(r.integer("n") == 3);
  CHECK(r.text("s", "") == "x");
  CHECK(r.numbers("v") == std::vector<double>{1, 2});
  CHECK(r.flag("b", false));
  CHECK(r.number("missing", 2.0) == 2.0);
  CHECK_NOTHROW(r.finish());
  CHECK(r.resolved()["missing"] == 2.0);

  ConfigReader left(cfg);
  left.number("a");
  CHECK(code_of([&] { left.finish(); }) == ErrorCode::kConfig);

  ConfigReader bad(json{{"a", "text"}, {"n", 2.5}});
  CHECK(code_of([&] { bad.number("a"); }) == ErrorCode::kConfig);
  CHECK(code_of([&] { bad.integer("n"); }) == ErrorCode::kConfig);
  CHECK(code_of([&] { bad.number("absent"); }) == ErrorCode::kConfig);
}

TEST_CASE("unknown scenario and unknown keys are config errors") {
  const fs::path dir = scratch("bad");
  CHECK(code_of([&] { run_scenario("nope", json::object(), {dir}); }) == ErrorCode::kConfig);
  const json cfg = {{"photon_numbers", {100.0}}, {"losses", {0.1}}, {"lossses", {0.2}}};
  CHECK(code_of([&] { run_scenario("bsv-params", cfg, {dir}); }) == ErrorCode::kConfig);
  CHECK(code_of([&] { run_scenario("bsv-params", json::array(), {dir}); }) == ErrorCode::kConfig);
}

TEST_CASE("scenario names") {
  const auto names = scenario_names();
  for (const char* n : {"negativity-scan", "sv-kerr", "husimi-shear", "bsv-params", "f2f-roundtrip",
                        "mode-analysis", "wigner"})
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
}

TEST_CASE("every run writes a manifest") {
  const fs::path dir = scratch("manifest");
  const json cfg = {{"photon_numbers", {1e6}}, {"losses", {0.05}}, {"sample_count", 10}};
  RunOptions opts{dir, 17, 1};
  const json m = run_scenario("bsv-params", cfg, opts);
  const json on_disk = read_json_file(dir / "manifest.json");
  CHECK(on_disk == m);
  CHECK(m["scenario"] == "bsv-params");
  CHECK(m["version"] == kVersion);
  CHECK(m["seed"] == 17);
  CHECK(m["config"]["sample_count"] == 10);
  CHECK(m["config"]["photon_numbers"] == json{1e6});
  for (const auto& f : m["outputs"]) CHECK(fs::exists(dir / f.get<std::string>()));
}

TEST_CASE("identical config and seed give identical bytes") {
  const json cfg = {{"var_x", 1e6},  {"var_p", 0.5}, {"count", 20000}, {"chi_t", {0.0, 1e-7}},
                    {"n_r", 8},      {"n_phi", 16},  {"ridge_bins", 6}};
  const fs::path a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  run_scenario("husimi-shear", cfg, {a, 5, 1});
  run_scenario("husimi-shear", cfg, {b, 5, 0});
  run_scenario("husimi-shear", cfg, {c, 6, 1});
  const auto sa = snapshot(a), sb = snapshot(b), sc = snapshot(c);
  CHECK(sa == sb);
  CHECK(sa.at("histogram_1.csv") != sc.at("histogram_1.csv"));
}

TEST_CASE("seed in the config is used when no override is given") {
  const json cfg = {{"photon_numbers", {4.0}}, {"losses", {0.1}}, {"sample_count", 5}, {"seed", 9}};
  const fs::path a = scratch("seed_a"), b = scratch("seed_b");
  run_scenario("bsv-params", cfg, {a});
  json plain = cfg;
  plain.erase("seed");
  run_scenario("bsv-params", plain, {b, 9});
  CHECK(snapshot(a) == snapshot(b));
}

TEST_CASE("negativity scan refuses an undersized basis with a hint") {
  const fs::path dir = scratch("scan_dim");
  const json cfg = {{"family", "coherent"}, {"photon_numbers", {200.0}}, {"phi_kerr", 0.6}, {"dim", 150}};
  try {
    run_scenario("negativity-scan", cfg, {dir});
    FAIL("expected a truncation error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTruncation);
    CHECK(std::string(e.what()).find("dim") != std::string::npos);
  }
}

TEST_CASE("negativity scan without Kerr phase gives zero") {
  NegativityScanParams p;
  p.phi_kerr = 0.0;
  p.dim = 300;
  for (auto fam : {StateFamily::kCoherent, StateFamily::kSqueezed}) {
    p.family = fam;
    // Zero up to the ripples of the truncated tail.
    for (double n : {10.0, 30.0}) CHECK(negativity_point(p, n).negativity < 1e-8);
  }
}

TEST_CASE("scan initial states") {
  NegativityScanParams p;
  p.dim = 300;
  p.family = StateFamily::kSqueezed;
  CHECK(squeezing_from_db(8.0) == doctest::Approx(0.92103403719761834));
  CHECK(moments(scan_initial_state(p, 50.0)).mean_n == doctest::Approx(50.0).epsilon(1e-10));
  p.match_total_photons = false;
  CHECK(moments(scan_initial_state(p, 50.0)).mean_n ==
        doctest::Approx(50.0 + std::pow(std::sinh(squeezing_from_db(8.0)), 2)).epsilon(1e-10));
}

TEST_CASE("small negativity scan decays for both families") {
  NegativityScanParams p;
  p.dim = 320;
  p.phi_kerr = 0.6;
  std::vector<double> ns = {10.0, 20.0, 30.0, 40.0};
  for (auto fam : {StateFamily::kCoherent, StateFamily::kSqueezed}) {
    p.family = fam;
    std::vector<double> neg;
    for (double n : ns) {
      const NegativityPoint pt = negativity_point(p, n);
      CHECK(pt.chi_t == doctest::Approx(0.3 / n));
      CHECK(pt.residual < 1e-3);
      neg.push_back(pt.negativity);
    }
    for (size_t i = 1; i < neg.size(); ++i) CHECK(neg[i] < neg[i - 1]);
    CHECK(exponential_fit(ns, neg).rate > 0.0);
  }
}

TEST_CASE("a cut tail is refused even when the deficit is tiny") {
  NegativityScanParams p;
  p.family = StateFamily::kSqueezed;
  p.dim = 200;
  CHECK(scan_initial_state(p, 30.0).truncation_deficit() < 1e-8);
  CHECK(code_of([&] { negativity_point(p, 30.0); }) == ErrorCode::kTruncation);
}

TEST_CASE("loss before and after the Kerr step both reduce negativity") {
  NegativityScanParams p;
  p.dim = 250;
  p.family = StateFamily::kSqueezed;
  const double lossless = negativity_point(p, 20.0).negativity;
  p.loss_before = 0.05;
  const double before = negativity_point(p, 20.0).negativity;
  p.loss_before = 0.0;
  p.loss_after = 0.05;
  const double after = negativity_point(p, 20.0).negativity;
  CHECK(before < lossless);
  CHECK(after < lossless);
  CHECK(before != doctest::Approx(after));
}

TEST_CASE("exponential fit") {
  std::vector<double> x = {1, 2, 3, 4}, y;
  for (double v : x) y.push_back(2.0 * std::exp(-0.5 * v));
  const ExponentialFit f = exponential_fit(x, y);
  CHECK(f.rate == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(f.prefactor == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.points == 4);
  y[1] = 0.0;
  CHECK(exponential_fit(x, y).points == 3);
}

TEST_CASE("wigner scenario writes the field with grid metadata") {
  const fs::path dir = scratch("wigner");
  const json cfg = {{"state", "fock"}, {"fock_n", 1}, {"dim", 8}, {"convention", "paper"}};
  const json m = run_scenario("wigner", cfg, {dir});
  std::ifstream in(dir / "field.csv");
  std::string first, header;
  std::getline(in, first);
  std::getline(in, header);
  CHECK(first.rfind("# kind=wigner", 0) == 0);
  CHECK(first.find("convention=paper") != std::string::npos);
  CHECK(header == "x,p,value");
  CHECK(m["summary"]["negativity_volume"].get<double>() == doctest::Approx(0.21306).epsilon(5e-3));
}

}  // TEST_SUITE
