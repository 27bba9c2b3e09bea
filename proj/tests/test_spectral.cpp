#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "snq/rng.hpp"
#include "snq/spectral.hpp"

using namespace snq;

namespace {

// Direct O(NQ) DTFT, the oracle for the FFT-based grid evaluation.
cplx dtft_direct(const std::vector<cplx>& taps, int first_index, double f) {
  cplx acc(0.0, 0.0);
  for (size_t i = 0; i < taps.size(); ++i) {
    const double n = static_cast<double>(first_index) + static_cast<double>(i);
    acc += taps[i] * std::polar(1.0, -2.0 * std::numbers::pi * f * n);
  }
  return acc;
}

std::vector<cplx> random_taps(int n, std::uint64_t seed) {
  GaussianSource src(seed);
  std::vector<cplx> t(static_cast<size_t>(n));
  for (auto& v : t) v = src.cnormal();
  return t;
}

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps) return left + right;
  return simpson_rec(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double eps) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, eps, 40);
}

}  // namespace

TEST_CASE("dtft grid matches direct evaluation", "[spectral]") {
  const auto taps = random_taps(9, 71);
  const int first = -4;
  const int Q = 64;
  const FreqGrid g = dtft_grid(taps, first, Q);
  REQUIRE(g.Q == Q);
  for (int q = 0; q < Q; ++q) {
    const cplx want = dtft_direct(taps, first, g.freq(q));
    REQUIRE(std::abs(g.values[static_cast<size_t>(q)] - want) < 1e-12 * (1.0 + std::abs(want)));
  }
}

TEST_CASE("dtft grid handles the time origin and wrapping", "[spectral]") {
  const std::vector<cplx> delta{cplx(1.0, 0.0)};
  const FreqGrid at0 = dtft_grid(delta, 0, 16);
  for (const auto& v : at0.values) REQUIRE(v == cplx(1.0, 0.0));

  // Shifting the origin by a full grid period leaves every bin unchanged.
  const auto taps = random_taps(5, 5);
  const FreqGrid a = dtft_grid(taps, 3, 32);
  const FreqGrid b = dtft_grid(taps, 3 + 32, 32);
  for (int q = 0; q < 32; ++q)
    REQUIRE(a.values[static_cast<size_t>(q)] == b.values[static_cast<size_t>(q)]);

  // freq covers [-1/2, 1/2) left-closed.
  REQUIRE(a.freq(0) == -0.5);
  REQUIRE(a.freq(16) == 0.0);
}

TEST_CASE("power spectrum satisfies Parseval on the grid", "[spectral]") {
  const auto taps = random_taps(17, 99);
  const int Q = 128;
  const FreqGrid p = power_spectrum(dtft_grid(taps, -8, Q));
  double grid_energy = 0.0;
  for (const auto& v : p.values) {
    REQUIRE(v.imag() == 0.0);
    grid_energy += v.real();
  }
  grid_energy /= Q;
  double time_energy = 0.0;
  for (const auto& t : taps) time_energy += std::norm(t);
  REQUIRE(grid_energy == Catch::Approx(time_energy).epsilon(1e-12));
}

TEST_CASE("fold spectrum sums aliased images", "[spectral]") {
  FreqGrid g;
  g.Q = 8;
  for (int q = 0; q < 8; ++q) g.values.push_back(cplx(q, 0.0));
  const FreqGrid f2 = fold_spectrum(g, 2);
  REQUIRE(f2.Q == 4);
  for (int q = 0; q < 4; ++q)
    REQUIRE(f2.values[static_cast<size_t>(q)] == cplx(q + (q + 4), 0.0));
  const FreqGrid f1 = fold_spectrum(g, 1);
  for (int q = 0; q < 8; ++q) REQUIRE(f1.values[static_cast<size_t>(q)] == g.values[static_cast<size_t>(q)]);
  REQUIRE_THROWS_AS(fold_spectrum(g, 3), std::invalid_argument);
}

TEST_CASE("log capacity integral reproduces closed forms", "[spectral]") {
  // Flat density: integral is just log2(1 + value).
  FreqGrid flat;
  flat.Q = 256;
  flat.values.assign(256, cplx(3.0, 0.0));
  REQUIRE(integrate_log_capacity(flat) == Catch::Approx(2.0).margin(1e-14));

  // Two-tap channel b = [1, 1]: |B(f)|^2 = 2 + 2 cos(2 pi f) and
  // the integral of log2(1 + |B|^2) has the closed form log2((3+sqrt5)/2).
  const std::vector<cplx> b{cplx(1.0, 0.0), cplx(1.0, 0.0)};
  const FreqGrid density = power_spectrum(dtft_grid(b, 0, 4096));
  const double got = integrate_log_capacity(density);
  const double want = std::log2((3.0 + std::sqrt(5.0)) / 2.0);
  REQUIRE(got == Catch::Approx(want).epsilon(1e-12));
}

TEST_CASE("log capacity integral matches adaptive quadrature", "[spectral]") {
  const auto taps = random_taps(4, 1234);
  const FreqGrid density = power_spectrum(dtft_grid(taps, -1, 4096));
  const double grid_val = integrate_log_capacity(density);
  const auto integrand = [&](double f) {
    return std::log2(1.0 + std::norm(dtft_direct(taps, -1, f)));
  };
  const double quad_val = adaptive_simpson(integrand, -0.5, 0.5, 1e-11);
  REQUIRE(grid_val == Catch::Approx(quad_val).margin(1e-8));
}

TEST_CASE("spectral validation rejects malformed input", "[spectral]") {
  const auto taps = random_taps(5, 3);
  REQUIRE_THROWS_AS(dtft_grid(taps, 0, 12), std::invalid_argument);   // not a power of two
  REQUIRE_THROWS_AS(dtft_grid(taps, 0, 4), std::invalid_argument);    // taps exceed grid
  REQUIRE_THROWS_AS(dtft_grid(std::vector<cplx>{}, 0, 8), std::invalid_argument);

  FreqGrid bad;
  bad.Q = 4;
  bad.values.assign(4, cplx(1.0, 0.0));
  bad.values[2] = cplx(1.0, 0.5);
  REQUIRE_THROWS_WITH(integrate_log_capacity(bad), Catch::Matchers::ContainsSubstring("index 2"));
  bad.values[2] = cplx(-1.0, 0.0);
  REQUIRE_THROWS_WITH(integrate_log_capacity(bad), Catch::Matchers::ContainsSubstring("index 2"));
}
