#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "snq/channel.hpp"
#include "snq/channel_io.hpp"
#include "snq/types.hpp"

using namespace snq;

TEST_CASE("sinc pulse samples the interpolation kernel", "[channel]") {
  const int L = 4;
  const ChannelTaps g = sinc_pulse_snq(L, 16 * L);
  REQUIRE(g.rate == RateTag::snq);
  REQUIRE(g.L == L);
  REQUIRE(g.first_index == -16 * L);
  REQUIRE(g.n_taps() == 2 * 16 * L + 1);

  const int center = 16 * L;
  REQUIRE(g.scalar(center) == cplx(1.0, 0.0));
  for (int k = 1; k <= 16; ++k) {
    REQUIRE(std::abs(g.scalar(center + k * L)) < 1e-12);
    REQUIRE(std::abs(g.scalar(center - k * L)) < 1e-12);
  }
  // Symmetric, and total energy close to L (ideal pulse has energy exactly L).
  for (int n = 0; n < g.n_taps(); ++n)
    REQUIRE(g.scalar(n) == g.scalar(g.n_taps() - 1 - n));
  REQUIRE(g.energy() == Catch::Approx(static_cast<double>(L)).epsilon(0.02));

  REQUIRE_THROWS_AS(sinc_pulse_snq(4, 8), std::invalid_argument);  // below 8L support
  REQUIRE_THROWS_AS(sinc_pulse_snq(0), std::invalid_argument);
}

TEST_CASE("upsampling lands Nyquist taps on the symbol clock", "[channel]") {
  const int L = 4;
  const int hl = 16 * L;

  // Single tap: the cascade is the pulse scaled by the tap.
  const cplx h0(0.7, -0.3);
  const ChannelTaps b1 = upsample_to_snq(ChannelTaps::siso({h0}, RateTag::nyquist, 1), L, hl);
  const ChannelTaps g = sinc_pulse_snq(L, hl);
  REQUIRE(b1.n_taps() == g.n_taps());
  REQUIRE(b1.first_index == g.first_index);
  for (int n = 0; n < g.n_taps(); ++n) REQUIRE(b1.scalar(n) == h0 * g.scalar(n));

  // Two taps: at symbol instants the cascade returns the Nyquist taps
  // because the pulse vanishes on the off-center symbol grid.
  const cplx a(1.0, 0.5), c(-0.25, 0.1);
  const ChannelTaps b2 = upsample_to_snq(ChannelTaps::siso({a, c}, RateTag::nyquist, 1), L, hl);
  REQUIRE(b2.first_index == -hl);
  REQUIRE(b2.n_taps() == L + 2 * hl + 1);
  const int origin = hl;  // storage offset of true index 0
  REQUIRE(std::abs(b2.scalar(origin) - a) < 1e-12);
  REQUIRE(std::abs(b2.scalar(origin + L) - c) < 1e-12);

  // The time origin tracks first_index through the upsampling.
  ChannelTaps shifted = ChannelTaps::siso({a, c}, RateTag::nyquist, 1, -1);
  REQUIRE(upsample_to_snq(shifted, L, hl).first_index == -L - hl);

  // Matrix taps upsample entrywise.
  ChannelTaps hm;
  hm.rate = RateTag::nyquist;
  hm.taps.assign(1, (Eigen::MatrixXcd(2, 2) << 1.0, 2.0, 3.0, 4.0).finished());
  const ChannelTaps bm = upsample_to_snq(hm, 2, 32);
  for (int n = 0; n < bm.n_taps(); ++n)
    REQUIRE((bm.taps[static_cast<size_t>(n)] - detail::sinc((n - 32) / 2.0) * hm.taps[0]).norm() < 1e-15);

  REQUIRE_THROWS_AS(upsample_to_snq(b2, L), std::invalid_argument);  // already SNQ rate
}

TEST_CASE("ideal flat taps produce an exact brickwall on the grid", "[channel]") {
  const int L = 4;
  const int Q = 1024;
  const ChannelTaps b = ideal_flat_packet_taps(L, Q);
  REQUIRE(b.n_taps() == Q);
  const FreqGrid g = dtft_grid(b.scalar_taps(), b.first_index, Q);
  int in_band = 0;
  for (int q = 0; q < Q; ++q) {
    const double f = g.freq(q);
    const bool inside = std::abs(f) < 0.5 / L - 1e-12;
    const cplx want = inside ? cplx(static_cast<double>(L), 0.0) : cplx(0.0, 0.0);
    // Band edges belong to exactly one side; count instead of asserting them.
    if (std::abs(std::abs(f) - 0.5 / L) < 1e-12) continue;
    REQUIRE(std::abs(g.values[static_cast<size_t>(q)] - want) < 1e-9);
    if (inside) ++in_band;
  }
  REQUIRE(in_band == Q / L - 1);  // one in-band slot skipped as an edge
  REQUIRE_THROWS_AS(ideal_flat_packet_taps(3, 256), std::invalid_argument);
}

TEST_CASE("grid-exact cascades window the channel spectrum", "[channel]") {
  const int L = 4;
  const int Q = 1024;
  const ChannelTaps h = random_gaussian_channel(1, 1, 3, 90);
  const ChannelTaps b = ideal_cascade_taps(h, L, Q);
  REQUIRE(b.rate == RateTag::snq);
  REQUIRE(b.n_taps() == Q);
  const FreqGrid g = dtft_grid(b.scalar_taps(), b.first_index, Q);
  for (int q = 0; q < Q; ++q) {
    const double f = g.freq(q);
    if (std::abs(std::abs(f) - 0.5 / L) < 1e-12) continue;  // edge ownership
    cplx want(0.0, 0.0);
    if (std::abs(f) < 0.5 / L) {
      // In band the cascade equals L times the channel response at L*f.
      for (int l = 0; l < h.n_taps(); ++l) {
        const double ang = -2.0 * std::numbers::pi * L * f * (h.first_index + l);
        want += h.scalar(l) * cplx(std::cos(ang), std::sin(ang));
      }
      want *= static_cast<double>(L);
    }
    REQUIRE(std::abs(g.values[static_cast<size_t>(q)] - want) < 1e-9);
  }
  // A single unit tap reduces the cascade to the ideal flat pulse.
  const ChannelTaps unit = ChannelTaps::siso({cplx(1.0, 0.0)}, RateTag::nyquist, 1);
  const ChannelTaps flat = ideal_cascade_taps(unit, L, Q);
  const ChannelTaps ref = ideal_flat_packet_taps(L, Q);
  for (int n = 0; n < Q; ++n)
    REQUIRE(std::abs(flat.scalar(n) - ref.scalar(n)) < 1e-12);
  REQUIRE_THROWS_AS(ideal_cascade_taps(b, L, Q), std::invalid_argument);  // already SNQ rate
}

TEST_CASE("flat-channel capacity is rate invariant", "[channel]") {
  for (int L : {1, 2, 4}) {
    for (double snr_db : {0.0, 10.0, 20.0}) {
      LinkParams link;
      link.P = db_to_linear(snr_db);
      link.L = L;
      ChannelTaps b = ideal_flat_packet_taps(L, 4096);
      // Unit-modulus channel gain must not change the capacity.
      for (auto& t : b.taps) t *= std::polar(1.0, 0.7);
      const double got = channel_capacity_snq(b, link);
      const double want = std::log2(1.0 + link.P) / L;
      REQUIRE(got == Catch::Approx(want).margin(1e-9));
    }
  }
}

TEST_CASE("truncated pulse approaches the ideal flat capacity", "[channel]") {
  LinkParams link;
  link.P = 10.0;
  link.L = 2;
  const ChannelTaps h = ChannelTaps::siso({cplx(1.0, 0.0)}, RateTag::nyquist, 1);
  const double want = 0.5 * std::log2(11.0);
  const double coarse = channel_capacity_snq(upsample_to_snq(h, 2, 16 * 2), link);
  const double fine = channel_capacity_snq(upsample_to_snq(h, 2, 256 * 2), link);
  REQUIRE(coarse == Catch::Approx(want).margin(5e-2));
  REQUIRE(fine == Catch::Approx(want).margin(5e-3));
  REQUIRE(std::abs(fine - want) < std::abs(coarse - want));
}

TEST_CASE("capacity matches the two-tap closed form at L = 1", "[channel]") {
  // L = 1 SNQ taps are ordinary Nyquist-rate taps; scale is P/N0.
  const ChannelTaps b = ChannelTaps::siso({cplx(1.0, 0.0), cplx(1.0, 0.0)}, RateTag::snq, 1);
  LinkParams link;  // P = N0 = 1
  const double want = std::log2((3.0 + std::sqrt(5.0)) / 2.0);
  REQUIRE(channel_capacity_snq(b, link) == Catch::Approx(want).epsilon(1e-12));
}

TEST_CASE("random channels are deterministic in the seed", "[channel]") {
  const ChannelTaps a = random_gaussian_channel(2, 3, 4, 42);
  const ChannelTaps b = random_gaussian_channel(2, 3, 4, 42);
  const ChannelTaps c = random_gaussian_channel(2, 3, 4, 43);
  REQUIRE(a.n_taps() == 4);
  REQUIRE(a.nr() == 3);
  REQUIRE(a.nt() == 2);
  bool all_equal = true;
  bool any_differ = false;
  for (int l = 0; l < 4; ++l) {
    all_equal = all_equal && (a.taps[static_cast<size_t>(l)].array() == b.taps[static_cast<size_t>(l)].array()).all();
    any_differ = any_differ || (a.taps[static_cast<size_t>(l)].array() != c.taps[static_cast<size_t>(l)].array()).any();
  }
  REQUIRE(all_equal);
  REQUIRE(any_differ);

  // Normalization: expected total energy is Nr*Nt regardless of tap count.
  double mean_energy = 0.0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t)
    mean_energy += random_gaussian_channel(2, 2, 7, derive_seed(9, static_cast<std::uint64_t>(t))).energy();
  mean_energy /= trials;
  REQUIRE(mean_energy == Catch::Approx(4.0).epsilon(0.1));
}

TEST_CASE("tap files round trip exactly", "[channel]") {
  ChannelTaps ch;
  ch.rate = RateTag::snq;
  ch.L = 2;
  ch.first_index = -3;
  ch.taps.assign(5, Eigen::MatrixXcd::Zero(2, 2));
  GaussianSource src(17);
  for (auto& t : ch.taps)
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) t(r, c) = src.cnormal();

  std::stringstream ss;
  save_taps(ch, ss);
  const ChannelTaps back = load_taps(ss);
  REQUIRE(back.rate == ch.rate);
  REQUIRE(back.L == ch.L);
  REQUIRE(back.first_index == ch.first_index);
  REQUIRE(back.n_taps() == ch.n_taps());
  for (int l = 0; l < ch.n_taps(); ++l)
    REQUIRE((back.taps[static_cast<size_t>(l)].array() == ch.taps[static_cast<size_t>(l)].array()).all());

  std::stringstream bad("taps Nt=1 Nr=1 rate=snq L=2 first=0 n=2\n0 1.0 0.0\n");
  REQUIRE_THROWS_AS(load_taps(bad), std::invalid_argument);
}
