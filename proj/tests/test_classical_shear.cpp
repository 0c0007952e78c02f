#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kerrq/channels.hpp"
#include "kerrq/classical_shear.hpp"
#include "kerrq/phase_space.hpp"
#include "kerrq/random.hpp"

using namespace kerrq;

namespace {

constexpr double kPi = std::numbers::pi;

double sample_var(const std::vector<double>& v) {
  double m = 0.0, s = 0.0;
  for (double x : v) m += x;
  m /= v.size();
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

}  // namespace

TEST_SUITE("classical_shear") {

TEST_CASE("isotropic sampling") {
  const ClassicalEnsemble e = sample_macroscopic_bsv(0.5, 0.5, 1000000, 1);
  REQUIRE(e.samples.size() == 1000000);
  std::vector<double> x, p;
  for (Complex a : e.samples) {
    x.push_back(std::sqrt(2.0) * a.real());
    p.push_back(std::sqrt(2.0) * a.imag());
  }
  CHECK(std::abs(sample_var(x) / 0.5 - 1.0) < 0.01);
  CHECK(std::abs(sample_var(p) / 0.5 - 1.0) < 0.01);
}

TEST_CASE("anisotropic sampling and the mean energy") {
  const double vx = 400.0, vp = 0.05;
  const ClassicalEnsemble e = sample_macroscopic_bsv(vx, vp, 1000000, 2);
  double abs2 = 0.0, along = 0.0;
  for (Complex a : e.samples) {
    abs2 += std::norm(a);
    along += std::abs(a.imag()) < 0.1 * std::abs(a.real()) ? 1.0 : 0.0;
  }
  abs2 /= e.samples.size();
  CHECK(std::abs(abs2 / ((vx + vp) / 2.0) - 1.0) < 0.01);
  CHECK(along / e.samples.size() > 0.9);
}

TEST_CASE("sampling validation") {
  CHECK_THROWS_AS(sample_macroscopic_bsv(0.0, 0.0, 10, 1), Error);
  CHECK_THROWS_AS(sample_macroscopic_bsv(1.0, -1.0, 10, 1), Error);
  CHECK_THROWS_AS(sample_macroscopic_bsv(0.1, 1.0, 10, 1), Error);
  CHECK_THROWS_AS(sample_macroscopic_bsv(1.0, 0.5, 0, 1), Error);
}

TEST_CASE("shear map examples") {
  const ClassicalEnsemble e = sample_macroscopic_bsv(4.0, 0.25, 1000, 3);
  const ClassicalEnsemble same = shear_map(e, 0.0);
  for (size_t i = 0; i < e.samples.size(); ++i) CHECK(same.samples[i] == e.samples[i]);

  ClassicalEnsemble origin = e;
  origin.samples = {Complex(0.0, 0.0)};
  CHECK(shear_map(origin, 0.7).samples[0] == Complex(0.0, 0.0));

  ClassicalEnsemble one = e;
  one.samples = {Complex(std::sqrt(200.0), 0.0)};
  const Complex out = shear_map(one, 0.0015).samples[0];
  CHECK(std::arg(out) == doctest::Approx(-0.6).epsilon(1e-14));
}

TEST_CASE("shear conserves every amplitude") {
  const ClassicalEnsemble e = sample_macroscopic_bsv(100.0, 0.5, 10000, 4);
  const ClassicalEnsemble s = shear_map(e, 0.01);
  CHECK(s.chi_t == doctest::Approx(0.01));
  for (size_t i = 0; i < e.samples.size(); ++i)
    CHECK(std::abs(std::abs(s.samples[i]) - std::abs(e.samples[i])) < 1e-12 * (1.0 + std::abs(e.samples[i])));

  // Same energy histogram.
  const PolarHistogram a = polar_histogram(e, 20, 8);
  const PolarHistogram b = polar_histogram(s, 20, 8);
  for (int i = 0; i < 20; ++i) {
    long long ra = 0, rb = 0;
    for (int j = 0; j < 8; ++j) {
      ra += a.count(i, j);
      rb += b.count(i, j);
    }
    CHECK(ra == rb);
  }
}

TEST_CASE("polar histogram conserves counts") {
  const ClassicalEnsemble e = sample_macroscopic_bsv(2.0, 2.0, 50000, 5);
  const PolarHistogram h = polar_histogram(e, 10, 16, 2.0);
  long long total = 0;
  for (long long c : h.counts) total += c;
  CHECK(total == 50000);
  CHECK(h.mean_amplitude > 0.0);
  CHECK(h.r_edges.size() == 11);
  CHECK(h.phi_edges.front() == doctest::Approx(-kPi));
  CHECK(h.phi_edges.back() == doctest::Approx(kPi));
  CHECK_THROWS_AS(polar_histogram(e, 3, 16), Error);
  ClassicalEnsemble empty = e;
  empty.samples.clear();
  CHECK_THROWS_AS(polar_histogram(empty, 10, 16), Error);
}

TEST_CASE("isotropic phase marginal is flat") {
  const int count = 400000, n_phi = 16;
  const PolarHistogram h = polar_histogram(sample_macroscopic_bsv(0.5, 0.5, count, 6), 4, n_phi);
  const double expect = double(count) / n_phi;
  for (int j = 0; j < n_phi; ++j) {
    long long c = 0;
    for (int i = 0; i < 4; ++i) c += h.count(i, j);
    CHECK(std::abs(c - expect) < 4.0 * std::sqrt(expect));
  }
}

TEST_CASE("anti-squeezed phase marginal sits near 0 and pi") {
  const int n_phi = 12;
  const PolarHistogram h = polar_histogram(sample_macroscopic_bsv(100.0, 0.1, 100000, 7), 4, n_phi);
  long long axis = 0, total = 0;
  for (int j = 0; j < n_phi; ++j) {
    long long c = 0;
    for (int i = 0; i < 4; ++i) c += h.count(i, j);
    total += c;
    // Bins touching phi = 0 or phi = +-pi.
    if (j == 0 || j == n_phi - 1 || j == n_phi / 2 - 1 || j == n_phi / 2) axis += c;
  }
  CHECK(double(axis) / total > 0.95);
}

TEST_CASE("fold into the half plane") {
  CHECK(fold_half_plane(0.3) == doctest::Approx(0.3));
  CHECK(fold_half_plane(0.3 + kPi) == doctest::Approx(0.3));
  CHECK(fold_half_plane(0.3 - kPi) == doctest::Approx(0.3));
  CHECK(fold_half_plane(kPi / 2) == doctest::Approx(kPi / 2));
  CHECK(fold_half_plane(-kPi / 2) == doctest::Approx(kPi / 2));
}

TEST_CASE("ridge follows the shear law") {
  const ClassicalEnsemble e = sample_macroscopic_bsv(1e12, 0.55, 1000000, 2024);
  double mean_abs = 0.0;
  for (Complex a : e.samples) mean_abs += std::abs(a);
  mean_abs /= e.samples.size();
  const double chi_t = 0.15 / (2.0 * mean_abs * mean_abs);
  const auto bins = ridge_profile(shear_map(e, chi_t), 12, 3.0);
  int used = 0;
  for (const auto& b : bins) {
    if (b.weight < 500) continue;
    ++used;
    const double law = shear_phase(chi_t, b.mean_abs2);
    CHECK(std::abs(b.mean_phase - law) <= 0.05 * std::abs(law) + 1e-12);
  }
  CHECK(used >= 10);
}

TEST_CASE("large shear wraps the phase") {
  ClassicalEnsemble e = sample_macroscopic_bsv(1e4, 0.5, 1000, 8);
  e.samples = {Complex(100.0, 0.0)};
  const Complex out = shear_map(e, 2.0 / 1e4).samples[0];
  CHECK(std::abs(fold_half_plane(std::arg(out)) - fold_half_plane(-4.0)) < 1e-9);
  CHECK(std::abs(std::arg(out)) < kPi);
}

TEST_CASE("amplitude cap") {
  const ClassicalEnsemble e = sample_macroscopic_bsv(10.0, 0.5, 10000, 9);
  const ClassicalEnsemble c = apply_amplitude_cap(e, 1.5);
  CHECK(c.samples.size() < e.samples.size());
  double mean_abs = 0.0;
  for (Complex a : e.samples) mean_abs += std::abs(a);
  mean_abs /= e.samples.size();
  for (Complex a : c.samples) CHECK(std::abs(a) <= 1.5 * mean_abs);
  CHECK_THROWS_AS(apply_amplitude_cap(e, 0.0), Error);
}

TEST_CASE("classical ridge matches the smoothed quantum Husimi ridge") {
  // Squeezed vacuum n_s = 4, chi_t = 0.02. The Wigner flow of the Kerr
  // unitary rotates at 2 chi_t (|alpha|^2 - 1); the extra 2 chi_t rotation
  // brings it onto the classical map.
  const double chi_t = 0.02, r = std::asinh(2.0);
  const FockVector psi =
      phase_rotate(kerr_apply(squeezed_vacuum_state(r, 150), {chi_t}), 2.0 * chi_t);
  const PhaseGrid g = grid_suggest(psi, 8.0);
  const PhaseSpaceField q = husimi(psi, g);

  const int count = 1000000;
  ClassicalEnsemble e = shear_map(
      sample_macroscopic_bsv(0.5 * std::exp(2 * r), 0.5 * std::exp(-2 * r), count, 99), chi_t);
  // Vacuum smoothing: Husimi = Wigner convolved with the vacuum.
  for (int c = 0; c * kSampleChunk < count; ++c) {
    Rng rng(100, c);
    const int end = std::min(count, (c + 1) * kSampleChunk);
    for (int i = c * kSampleChunk; i < end; ++i) {
      const double dx = 0.5 * rng.normal();
      const double dp = 0.5 * rng.normal();
      e.samples[i] += Complex(dx, dp);
    }
  }
  double mean_abs = 0.0;
  for (Complex a : e.samples) mean_abs += std::abs(a);
  mean_abs /= count;

  const int n_r = 10;
  const auto classical = ridge_profile(e, n_r, 2.5);
  const auto quantum = ridge_profile(q, n_r, 2.5, mean_abs);
  double span = 0.0, worst = 0.0;
  for (int i = 0; i < n_r; ++i) {
    if (classical[i].weight < 500) continue;
    span = std::max(span, std::abs(quantum[i].mean_phase));
    worst = std::max(worst, std::abs(classical[i].mean_phase - quantum[i].mean_phase));
  }
  MESSAGE("ridge span ", span, " worst deviation ", worst);
  CHECK(span > 0.05);
  CHECK(worst <= 0.1 * span);
}

}  // TEST_SUITE
