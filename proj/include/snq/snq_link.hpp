#pragma once
// Scalar rateless link: the same symbol stream is retransmitted in packets,
// each packet frequency-dithered by a distinct root of unity. After the
// receiver shifts each packet back, packet m occupies subband m of the
// super-Nyquist band, so packets add information without overlap until the
// L subbands are exhausted.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "snq/channel.hpp"
#include "snq/types.hpp"

namespace snq {

// Transmit dither for packet m: v_m[n] = e^{-j 2 pi m n / L}, unit modulus,
// period L. m = 0 is the identity dither.
inline std::vector<cplx> dither_sequence(int m, int L, int n_len) {
  if (L < 1) throw std::invalid_argument("dither_sequence: L must be >= 1");
  if (m < 0 || m >= L) throw std::invalid_argument("dither_sequence: need 0 <= m < L");
  if (n_len < 0) throw std::invalid_argument("dither_sequence: negative length");
  std::vector<cplx> v(static_cast<size_t>(n_len));
  for (int n = 0; n < n_len; ++n)
    v[static_cast<size_t>(n)] = unit_root(-static_cast<long long>(m) * n, L);
  return v;
}

// Symbol stream of packet m: s_m[n] = v_m[n] s[n]. Power preserving.
inline std::vector<cplx> modulate_packet(std::span<const cplx> s, int m, int L) {
  std::vector<cplx> v = dither_sequence(m, L, static_cast<int>(s.size()));
  for (size_t n = 0; n < s.size(); ++n) v[n] *= s[n];
  return v;
}

// Undo the dithers and sum: y_combined[n] = sum_m y_m[n] e^{+j 2 pi m n / L}.
// All sequences must share one length; set[i] is the dither index of
// received[i].
inline std::vector<cplx> shift_back_combine(const std::vector<std::vector<cplx>>& received,
                                            const std::vector<int>& set, int L) {
  if (received.size() != set.size())
    throw std::invalid_argument("shift_back_combine: one dither index per sequence required");
  if (received.empty()) throw std::invalid_argument("shift_back_combine: empty packet set");
  const size_t len = received.front().size();
  std::vector<cplx> out(len, cplx(0.0, 0.0));
  for (size_t i = 0; i < received.size(); ++i) {
    if (received[i].size() != len)
      throw std::invalid_argument("shift_back_combine: sequence length mismatch at packet " +
                                  std::to_string(i));
    const int m = set[i];
    if (m < 0) throw std::invalid_argument("shift_back_combine: negative dither index");
    for (size_t n = 0; n < len; ++n)
      out[n] += received[i][n] * unit_root(static_cast<long long>(m) * static_cast<long long>(n), L);
  }
  return out;
}

// Effective channel of packet m after shift-back: each tap at true time
// index l picks up e^{+j 2 pi m l / L}, which moves the tap spectrum to
// subband m. Capacity is unchanged (pure frequency shift).
inline ChannelTaps shifted_back_taps(const ChannelTaps& b, int m) {
  b.validate("shifted_back_taps");
  if (b.rate != RateTag::snq)
    throw std::invalid_argument("shifted_back_taps: taps must be at SNQ rate");
  if (m < 0) throw std::invalid_argument("shifted_back_taps: negative dither index");
  ChannelTaps out = b;
  for (int i = 0; i < out.n_taps(); ++i) {
    const long long l = out.first_index + i;
    out.taps[static_cast<size_t>(i)] *= unit_root(static_cast<long long>(m) * l, b.L);
  }
  return out;
}

// Channels seen by one receiver across a set of packets. per_packet_taps[i]
// is the SNQ-rate cascade during packet i, before dithering; dither_set[i]
// is that packet's dither index.
struct PacketChannelSet {
  std::vector<ChannelTaps> per_packet_taps;
  LinkParams link;
  std::vector<int> dither_set;

  int n_packets() const { return static_cast<int>(per_packet_taps.size()); }

  void validate(const char* where) const {
    link.validate(where);
    if (per_packet_taps.size() != dither_set.size())
      throw std::invalid_argument(std::string(where) + ": one dither index per packet required");
    for (size_t i = 0; i < per_packet_taps.size(); ++i) {
      per_packet_taps[i].validate(where);
      if (per_packet_taps[i].rate != RateTag::snq || per_packet_taps[i].L != link.L)
        throw std::invalid_argument(std::string(where) + ": packet taps must be SNQ rate at link L");
      if (!per_packet_taps[i].is_siso())
        throw std::invalid_argument(std::string(where) + ": scalar link requires 1x1 taps");
      if (dither_set[i] < 0 || dither_set[i] >= link.M)
        throw std::invalid_argument(std::string(where) + ": dither index out of range [0, M)");
    }
    for (size_t i = 0; i < dither_set.size(); ++i)
      for (size_t j = i + 1; j < dither_set.size(); ++j)
        if (dither_set[i] == dither_set[j])
          throw std::invalid_argument(std::string(where) + ": duplicate packet index " +
                                      std::to_string(dither_set[i]));
  }
};

// Mutual information carried by one packet, b/SNQ symbol.
inline double packet_capacity(const ChannelTaps& b_m, const LinkParams& link,
                              int grid_size = kDefaultGridSize) {
  return channel_capacity_snq(b_m, link, grid_size);
}

namespace detail {

inline void require_combinable(const PacketChannelSet& set, const char* where) {
  set.validate(where);
  if (set.n_packets() > set.link.L)
    throw std::invalid_argument(std::string(where) +
                                ": more packets than subbands (|S| > L), combining undefined");
  for (size_t i = 0; i < set.dither_set.size(); ++i)
    for (size_t j = i + 1; j < set.dither_set.size(); ++j)
      if ((set.dither_set[i] - set.dither_set[j]) % set.link.L == 0)
        throw std::invalid_argument(std::string(where) + ": duplicate dither index mod L (" +
                                    std::to_string(set.dither_set[i]) + ")");
}

}  // namespace detail

// Single effective channel of the combined shifted-back packets, taps
// aligned by true time index. With an ideal pulse the per-packet spectra
// occupy disjoint subbands, so this channel carries every packet's
// information at the original noise level.
inline ChannelTaps combined_effective_taps(const PacketChannelSet& set) {
  detail::require_combinable(set, "combined_effective_taps");
  if (set.n_packets() == 0)
    throw std::invalid_argument("combined_effective_taps: empty packet set");
  int lo = set.per_packet_taps.front().first_index;
  int hi = lo;
  for (const auto& b : set.per_packet_taps) {
    lo = std::min(lo, b.first_index);
    hi = std::max(hi, b.first_index + b.n_taps() - 1);
  }
  ChannelTaps out = ChannelTaps::siso(std::vector<cplx>(static_cast<size_t>(hi - lo + 1)),
                                      RateTag::snq, set.link.L, lo);
  for (int i = 0; i < set.n_packets(); ++i) {
    const ChannelTaps shifted = shifted_back_taps(set.per_packet_taps[static_cast<size_t>(i)],
                                                  set.dither_set[static_cast<size_t>(i)]);
    for (int l = 0; l < shifted.n_taps(); ++l)
      out.taps[static_cast<size_t>(shifted.first_index + l - lo)] += shifted.taps[static_cast<size_t>(l)];
  }
  return out;
}

// Aggregate mutual information of a packet set: the per-packet capacities
// add because distinct dithers mod L place packets in disjoint subbands.
// The same number must emerge from the combined effective channel; tests
// hold the two routes together.
inline double aggregate_capacity(const PacketChannelSet& set, int grid_size = kDefaultGridSize) {
  if (set.n_packets() == 0) {
    set.link.validate("aggregate_capacity");
    return 0.0;
  }
  detail::require_combinable(set, "aggregate_capacity");
  double total = 0.0;
  for (const auto& b : set.per_packet_taps) total += packet_capacity(b, set.link, grid_size);
  return total;
}

// Smallest prefix of the per-packet capacities whose sum strictly exceeds
// the target rate R (b/SNQ symbol); nullopt when even all packets fall
// short.
inline std::optional<int> packets_to_decode(const std::vector<double>& per_packet_caps, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("packets_to_decode: R must be > 0");
  double acc = 0.0;
  for (size_t k = 0; k < per_packet_caps.size(); ++k) {
    if (per_packet_caps[k] < 0.0)
      throw std::invalid_argument("packets_to_decode: negative capacity at index " +
                                  std::to_string(k));
    acc += per_packet_caps[k];
    if (acc > R) return static_cast<int>(k) + 1;
  }
  return std::nullopt;
}

}  // namespace snq
