#pragma once
// Frequency-grid numerics on the normalized band [-1/2, 1/2): DTFT
// evaluation, aliasing folds, and the log-capacity integral. Grid point q
// sits at f_q = -1/2 + q/Q. Q is a power of two so the DTFT can run through
// a radix-2 FFT; evaluation is exact (up to roundoff) whenever the tap
// sequence is no longer than Q.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "snq/types.hpp"

namespace snq {

struct FreqGrid {
  int Q = 0;
  std::vector<cplx> values;

  double freq(int q) const { return -0.5 + static_cast<double>(q) / Q; }
};

namespace detail {

inline bool is_pow2(int x) { return x > 0 && (x & (x - 1)) == 0; }

// In-place radix-2 DIT FFT, X[k] = sum_n x[n] e^{-j 2 pi k n / N}.
inline void fft_inplace(std::vector<cplx>& a) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  // Twiddles indexed off a single table so stage error does not accumulate.
  std::vector<cplx> roots(n / 2);
  for (size_t k = 0; k < n / 2; ++k)
    roots[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
  for (size_t len = 2; len <= n; len <<= 1) {
    const size_t stride = n / len;
    for (size_t i = 0; i < n; i += len) {
      for (size_t k = 0; k < len / 2; ++k) {
        const cplx w = roots[k * stride];
        const cplx u = a[i + k];
        const cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

}  // namespace detail

// DTFT of taps (time origin given by first_index) sampled at the Q-point
// grid. Exactly invertible when the tap count does not exceed Q: placing
// tap n at buffer slot n mod Q leaves every DFT bin value unchanged.
inline FreqGrid dtft_grid(std::span<const cplx> taps, int first_index, int Q) {
  if (!detail::is_pow2(Q) || Q < 2)
    throw std::invalid_argument("dtft_grid: Q must be a power of two >= 2");
  if (taps.empty()) throw std::invalid_argument("dtft_grid: empty tap sequence");
  if (static_cast<int>(taps.size()) > Q)
    throw std::invalid_argument("dtft_grid: tap count exceeds grid size Q");
  std::vector<cplx> buf(static_cast<size_t>(Q), cplx(0.0, 0.0));
  for (size_t i = 0; i < taps.size(); ++i) {
    const long long n = static_cast<long long>(first_index) + static_cast<long long>(i);
    const long long slot = ((n % Q) + Q) % Q;
    buf[static_cast<size_t>(slot)] += taps[i];
  }
  detail::fft_inplace(buf);
  FreqGrid out;
  out.Q = Q;
  out.values.resize(static_cast<size_t>(Q));
  // DFT bin k corresponds to f = k/Q; grid slot q holds f_q = -1/2 + q/Q.
  for (int q = 0; q < Q; ++q) out.values[static_cast<size_t>(q)] = buf[static_cast<size_t>((q + Q / 2) % Q)];
  return out;
}

inline FreqGrid dtft_grid(const std::vector<cplx>& taps, int first_index, int Q) {
  return dtft_grid(std::span<const cplx>(taps.data(), taps.size()), first_index, Q);
}

// Squared magnitude per grid point; imaginary parts are exactly zero so the
// result is accepted by integrate_log_capacity.
inline FreqGrid power_spectrum(const FreqGrid& g) {
  FreqGrid out;
  out.Q = g.Q;
  out.values.resize(g.values.size());
  for (size_t q = 0; q < g.values.size(); ++q) out.values[q] = cplx(std::norm(g.values[q]), 0.0);
  return out;
}

// Aliasing fold onto a grid of Q/L points:
// out[q] = sum_{i=0}^{L-1} in[(q + i*Q/L) mod Q], the L images spaced 1/L.
inline FreqGrid fold_spectrum(const FreqGrid& g, int L) {
  if (L < 1) throw std::invalid_argument("fold_spectrum: L must be >= 1");
  if (g.Q < 1 || g.Q % L != 0)
    throw std::invalid_argument("fold_spectrum: L must divide the grid size Q");
  const int Qo = g.Q / L;
  FreqGrid out;
  out.Q = Qo;
  out.values.assign(static_cast<size_t>(Qo), cplx(0.0, 0.0));
  for (int q = 0; q < Qo; ++q)
    for (int i = 0; i < L; ++i)
      out.values[static_cast<size_t>(q)] += g.values[static_cast<size_t>((q + i * Qo) % g.Q)];
  return out;
}

// Riemann sum of log2(1 + density) over the grid. The density must be a
// real, nonnegative SNR-per-frequency profile.
inline double integrate_log_capacity(const FreqGrid& density) {
  if (density.Q < 1 || density.values.size() != static_cast<size_t>(density.Q))
    throw std::invalid_argument("integrate_log_capacity: malformed grid");
  double acc = 0.0;
  for (size_t q = 0; q < density.values.size(); ++q) {
    const cplx v = density.values[q];
    if (v.imag() != 0.0)
      throw std::invalid_argument("integrate_log_capacity: density has nonzero imaginary part at index " +
                                  std::to_string(q));
    if (v.real() < 0.0)
      throw std::invalid_argument("integrate_log_capacity: negative density value at index " +
                                  std::to_string(q));
    acc += std::log2(1.0 + v.real());
  }
  return acc / density.Q;
}

}  // namespace snq
