#pragma once
// Channel construction at the super-Nyquist (SNQ) rate. A Nyquist-rate tap
// sequence h is carried onto the L-times-faster symbol clock through the
// bandlimited interpolation pulse g[n] = sinc(n/L), giving the cascade
// b[n] = sum_k h[k] g[n - kL]. Signaling conventions used throughout:
//   - symbols carry power P/L per SNQ sample (P per Nyquist interval),
//   - sampled white noise has variance L*N0 (noise bandwidth grows with the
//     rate ratio), so the reference SNR P/N0 does not depend on L.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "snq/rng.hpp"
#include "snq/spectral.hpp"
#include "snq/types.hpp"

namespace snq {

inline constexpr int kDefaultSincHalfLenPerL = 64;
inline constexpr int kDefaultGridSize = 4096;

namespace detail {

inline double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace detail

// Interpolation pulse sampled at the SNQ rate: g[n] = sinc(n/L) for
// n in [-half_len, half_len]. g[0] = 1 and g vanishes at nonzero multiples
// of L. half_len <= 0 selects the default 64*L.
inline ChannelTaps sinc_pulse_snq(int L, int half_len = 0) {
  if (L < 1) throw std::invalid_argument("sinc_pulse_snq: L must be >= 1");
  if (half_len <= 0) half_len = kDefaultSincHalfLenPerL * L;
  if (half_len < 8 * L) throw std::invalid_argument("sinc_pulse_snq: half_len must be >= 8*L");
  std::vector<cplx> g(static_cast<size_t>(2 * half_len + 1));
  for (int n = -half_len; n <= half_len; ++n)
    g[static_cast<size_t>(n + half_len)] = cplx(detail::sinc(static_cast<double>(n) / L), 0.0);
  return ChannelTaps::siso(std::move(g), RateTag::snq, L, -half_len);
}

// SNQ-rate cascade b[n] = sum_k h[k] g[n - kL]. Works entrywise for matrix
// taps. The output time origin tracks the input: tap k of h lands centered
// at SNQ index (first_index + k) * L.
inline ChannelTaps upsample_to_snq(const ChannelTaps& h, int L, int half_len = 0) {
  h.validate("upsample_to_snq");
  if (h.rate != RateTag::nyquist)
    throw std::invalid_argument("upsample_to_snq: input taps must be Nyquist rate");
  if (L < 1) throw std::invalid_argument("upsample_to_snq: L must be >= 1");
  if (half_len <= 0) half_len = kDefaultSincHalfLenPerL * L;
  if (half_len < 8 * L) throw std::invalid_argument("upsample_to_snq: half_len must be >= 8*L");

  const int pulse_len = 2 * half_len + 1;
  const int out_len = (h.n_taps() - 1) * L + pulse_len;
  ChannelTaps b;
  b.rate = RateTag::snq;
  b.L = L;
  b.first_index = h.first_index * L - half_len;
  b.taps.assign(static_cast<size_t>(out_len), Eigen::MatrixXcd::Zero(h.nr(), h.nt()));
  for (int k = 0; k < h.n_taps(); ++k) {
    for (int p = 0; p < pulse_len; ++p) {
      const double gv = detail::sinc(static_cast<double>(p - half_len) / L);
      if (gv != 0.0) b.taps[static_cast<size_t>(k * L + p)] += gv * h.taps[static_cast<size_t>(k)];
    }
  }
  return b;
}

// White-input capacity of the scalar SNQ channel in bits per SNQ symbol:
//   integral of log2(1 + (P/L) |B(f)|^2 / (L N0)) over the SNQ band,
// where B is the DTFT of the raw cascade taps. The extra 1/L converts the
// raw spectrum to the matched-filter density at the faster sampling rate;
// with it, a flat channel yields (1/L) log2(1 + P/N0) for every L.
inline double channel_capacity_snq(const ChannelTaps& b, const LinkParams& link,
                                   int Q = kDefaultGridSize) {
  b.validate("channel_capacity_snq");
  link.validate("channel_capacity_snq");
  if (b.rate != RateTag::snq)
    throw std::invalid_argument("channel_capacity_snq: taps must be SNQ rate");
  if (!b.is_siso()) throw std::invalid_argument("channel_capacity_snq: taps must be scalar (1x1)");
  if (b.L != link.L)
    throw std::invalid_argument("channel_capacity_snq: taps and link disagree on L");
  const double scale = link.P / (static_cast<double>(link.L) * link.L * link.N0);
  FreqGrid density = power_spectrum(dtft_grid(b.scalar_taps(), b.first_index, Q));
  for (auto& v : density.values) v = cplx(scale * v.real(), 0.0);
  return integrate_log_capacity(density);
}

// Random Nyquist-rate channel with i.i.d. CN(0, 1/n_taps) entries, so the
// expected energy per antenna pair is 1. Draw order is tap-major, then
// receive antenna, then transmit antenna; this pins byte-level determinism.
inline ChannelTaps random_gaussian_channel(int Nt, int Nr, int n_taps, std::uint64_t seed) {
  if (Nt < 1 || Nr < 1) throw std::invalid_argument("random_gaussian_channel: Nt, Nr must be >= 1");
  if (n_taps < 1) throw std::invalid_argument("random_gaussian_channel: n_taps must be >= 1");
  GaussianSource src(seed);
  ChannelTaps h;
  h.rate = RateTag::nyquist;
  h.L = 1;
  h.first_index = 0;
  h.taps.assign(static_cast<size_t>(n_taps), Eigen::MatrixXcd::Zero(Nr, Nt));
  const double var = 1.0 / n_taps;
  for (int l = 0; l < n_taps; ++l)
    for (int r = 0; r < Nr; ++r)
      for (int t = 0; t < Nt; ++t) h.taps[static_cast<size_t>(l)](r, t) = src.cnormal(var);
  return h;
}

// Ideal flat SNQ packet channel on the Q-point grid: a length-Q tap
// sequence whose grid DTFT is exactly L on the centered band of width 1/L
// and exactly zero elsewhere. This is the infinite-sinc limit realized
// grid-exactly, so flat-channel capacities evaluate without truncation
// error. Requires 2L | Q.
inline ChannelTaps ideal_flat_packet_taps(int L, int Q = kDefaultGridSize) {
  if (L < 1) throw std::invalid_argument("ideal_flat_packet_taps: L must be >= 1");
  if (!detail::is_pow2(Q) || Q % (2 * L) != 0)
    throw std::invalid_argument("ideal_flat_packet_taps: Q must be a power of two divisible by 2L");
  // Band occupies DFT bins k < Q/(2L) and k >= Q - Q/(2L), i.e. |f| < 1/(2L).
  std::vector<cplx> spec(static_cast<size_t>(Q), cplx(0.0, 0.0));
  const int edge = Q / (2 * L);
  for (int k = 0; k < Q; ++k)
    if (k < edge || k >= Q - edge) spec[static_cast<size_t>(k)] = cplx(static_cast<double>(L), 0.0);
  // Inverse DFT via conjugation: idft(x) = conj(fft(conj(x))) / Q.
  for (auto& v : spec) v = std::conj(v);
  detail::fft_inplace(spec);
  std::vector<cplx> taps(static_cast<size_t>(Q));
  for (int n = 0; n < Q; ++n) taps[static_cast<size_t>(n)] = std::conj(spec[static_cast<size_t>(n)]) / static_cast<double>(Q);
  return ChannelTaps::siso(std::move(taps), RateTag::snq, L, 0);
}

// Grid-exact SNQ cascade of a scalar Nyquist-rate channel with the ideal
// flat pulse: length-Q taps whose grid DTFT is exactly L * H(L f) on the
// centered band of width 1/L and exactly zero elsewhere. The periodic
// realization of the infinite-sinc cascade; unlike a truncated pulse it
// leaks nothing outside its subband, so dithered packets built from it
// occupy exactly disjoint bands on the same grid. Requires 2L | Q.
inline ChannelTaps ideal_cascade_taps(const ChannelTaps& h, int L, int Q = kDefaultGridSize) {
  h.validate("ideal_cascade_taps");
  if (h.rate != RateTag::nyquist)
    throw std::invalid_argument("ideal_cascade_taps: channel taps must be Nyquist rate");
  if (!h.is_siso()) throw std::invalid_argument("ideal_cascade_taps: taps must be scalar (1x1)");
  if (L < 1) throw std::invalid_argument("ideal_cascade_taps: L must be >= 1");
  if (!detail::is_pow2(Q) || Q % (2 * L) != 0)
    throw std::invalid_argument("ideal_cascade_taps: Q must be a power of two divisible by 2L");
  std::vector<cplx> spec(static_cast<size_t>(Q), cplx(0.0, 0.0));
  const int edge = Q / (2 * L);
  for (int k = 0; k < Q; ++k) {
    if (k >= edge && k < Q - edge) continue;  // DFT bins outside |f| < 1/(2L)
    const double nu = static_cast<double>(L) * k / Q;  // Nyquist-rate frequency
    cplx acc(0.0, 0.0);
    for (int l = 0; l < h.n_taps(); ++l) {
      const double ang = -2.0 * std::numbers::pi * nu * (h.first_index + l);
      acc += h.scalar(l) * cplx(std::cos(ang), std::sin(ang));
    }
    spec[static_cast<size_t>(k)] = static_cast<double>(L) * acc;
  }
  for (auto& v : spec) v = std::conj(v);
  detail::fft_inplace(spec);
  std::vector<cplx> taps(static_cast<size_t>(Q));
  for (int n = 0; n < Q; ++n) taps[static_cast<size_t>(n)] = std::conj(spec[static_cast<size_t>(n)]) / static_cast<double>(Q);
  return ChannelTaps::siso(std::move(taps), RateTag::snq, L, 0);
}

}  // namespace snq
