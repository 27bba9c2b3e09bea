#pragma once
// MIMO extension of the rateless SNQ link. A single symbol stream is spread
// across Nt transmit antennas by a DFT beamforming vector that rotates with
// the symbol index, so the effective channel seen by the block detector is
// periodically time varying with period Nt. Each residue class of symbol
// indices mod Nt ("phase") gets its own steady-state capacity; a single
// fixed-rate base code makes Nt * min_phase the achievable throughput.

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "snq/channel.hpp"
#include "snq/dfe.hpp"
#include "snq/snq_link.hpp"
#include "snq/spectral.hpp"
#include "snq/types.hpp"

namespace snq {

// Transmit vector at symbol index n: entry i is e^{-j 2 pi i n / Nt}.
// Period Nt in n; all entries unit modulus.
inline Eigen::VectorXcd beamforming_vector(int n, int Nt) {
  if (Nt < 1) throw std::invalid_argument("beamforming_vector: Nt must be >= 1");
  Eigen::VectorXcd v(Nt);
  for (int i = 0; i < Nt; ++i)
    v(i) = unit_root(-static_cast<long long>(i) * n, Nt);
  return v;
}

// Per-phase steady-state capacities of the periodic effective channel,
// b/SNQ symbol. throughput = Nt * min_phase is what a single fixed-rate
// code achieves; sum_phase is the ceiling when each phase could be coded
// separately.
struct PhaseReport {
  std::vector<double> per_phase_capacity;
  double min_phase = 0.0;
  double sum_phase = 0.0;
  double throughput = 0.0;
};

namespace detail {

inline void validate_mimo_packets(const std::vector<ChannelTaps>& channels,
                                  const std::vector<int>& dithers, const LinkParams& link,
                                  int n_symbols, const char* where) {
  link.validate(where);
  if (channels.empty()) throw std::invalid_argument(std::string(where) + ": empty packet set");
  if (channels.size() != dithers.size())
    throw std::invalid_argument(std::string(where) + ": one dither index per packet required");
  for (const auto& ch : channels) {
    ch.validate(where);
    if (ch.rate != RateTag::snq || ch.L != link.L)
      throw std::invalid_argument(std::string(where) + ": packet taps must be SNQ rate at link L");
    if (ch.nr() != link.Nr || ch.nt() != link.Nt)
      throw std::invalid_argument(std::string(where) + ": tap dimensions must match link Nr x Nt");
  }
  for (size_t i = 0; i < dithers.size(); ++i) {
    if (dithers[i] < 0 || dithers[i] >= link.M)
      throw std::invalid_argument(std::string(where) + ": dither index out of range [0, M)");
    for (size_t j = i + 1; j < dithers.size(); ++j)
      if ((dithers[i] - dithers[j]) % link.L == 0)
        throw std::invalid_argument(std::string(where) + ": duplicate dither index mod L (" +
                                    std::to_string(dithers[i]) + ")");
  }
  if (n_symbols < 1) throw std::invalid_argument(std::string(where) + ": n_symbols must be >= 1");
}

inline PhaseReport phase_report_from_caps(const std::vector<double>& caps, int Nt, int discard,
                                          const char* where) {
  const int N = static_cast<int>(caps.size());
  if (Nt < 1) throw std::invalid_argument(std::string(where) + ": Nt must be >= 1");
  if (discard < 0) throw std::invalid_argument(std::string(where) + ": discard must be >= 0");
  if (N - 2 * discard < 4 * Nt)
    throw std::invalid_argument(std::string(where) +
                                ": need n_symbols - 2*discard >= 4*Nt steady-state symbols");
  PhaseReport rep;
  rep.per_phase_capacity.assign(static_cast<size_t>(Nt), 0.0);
  std::vector<int> count(static_cast<size_t>(Nt), 0);
  for (int n = discard; n < N - discard; ++n) {
    const int p = n % Nt;
    rep.per_phase_capacity[static_cast<size_t>(p)] += caps[static_cast<size_t>(n)];
    ++count[static_cast<size_t>(p)];
  }
  for (int p = 0; p < Nt; ++p) rep.per_phase_capacity[static_cast<size_t>(p)] /= count[static_cast<size_t>(p)];
  rep.min_phase = *std::min_element(rep.per_phase_capacity.begin(), rep.per_phase_capacity.end());
  rep.sum_phase = 0.0;
  for (double v : rep.per_phase_capacity) rep.sum_phase += v;
  rep.throughput = Nt * rep.min_phase;
  return rep;
}

}  // namespace detail

// Dense observation model of the shifted-back packet set: for every packet
// and observation time, rows map the scalar stream s[0..n_symbols) through
// column k = (packet taps at true lag) * beamforming_vector(k). Symbol power
// is P/(L*Nt) per transmit element (total P), noise L*N0 per SNQ sample.
// Oracle route; cost and memory grow as (n_symbols + taps)^2.
inline BlockLinearModel build_effective_model(const std::vector<ChannelTaps>& channels,
                                              const std::vector<int>& dithers,
                                              const LinkParams& link, int n_symbols) {
  detail::validate_mimo_packets(channels, dithers, link, n_symbols, "build_effective_model");
  const int Nt = link.Nt;
  const int Nr = link.Nr;
  int rows = 0;
  for (const auto& ch : channels) rows += Nr * (n_symbols + ch.n_taps() - 1);

  BlockLinearModel model;
  model.A = Eigen::MatrixXcd::Zero(rows, n_symbols);
  model.symbol_power = link.P / (static_cast<double>(link.L) * Nt);
  model.noise_power = static_cast<double>(link.L) * link.N0;

  std::vector<Eigen::VectorXcd> beams(static_cast<size_t>(Nt));
  for (int p = 0; p < Nt; ++p) beams[static_cast<size_t>(p)] = beamforming_vector(p, Nt);

  int row0 = 0;
  for (size_t m = 0; m < channels.size(); ++m) {
    const ChannelTaps shifted = shifted_back_taps(channels[m], dithers[m]);
    const int T = shifted.n_taps();
    for (int k = 0; k < n_symbols; ++k) {
      const Eigen::VectorXcd& v = beams[static_cast<size_t>(k % Nt)];
      for (int l = 0; l < T; ++l) {
        // Observation time n = k + first_index + l, stored at offset t = k + l.
        model.A.block(row0 + (k + l) * Nr, k, Nr, 1).noalias() +=
            shifted.taps[static_cast<size_t>(l)] * v;
      }
    }
    row0 += Nr * (n_symbols + T - 1);
  }
  return model;
}

// Gram matrix of the same stacked model computed from tap autocorrelations
// instead of the dense A: G(i,j) = v[i]^H R[i-j] v[j] with R[d] the
// dither-weighted sum over packets of sum_l K[l]^H K[l+d]. Exact for the
// full-convolution row blocks that build_effective_model produces, at
// O(n_symbols * bandwidth) fill cost.
struct EffectiveGram {
  Eigen::MatrixXcd G;
  int bandwidth = 0;
};

inline EffectiveGram effective_gram(const std::vector<ChannelTaps>& channels,
                                    const std::vector<int>& dithers, const LinkParams& link,
                                    int n_symbols) {
  detail::validate_mimo_packets(channels, dithers, link, n_symbols, "effective_gram");
  const int Nt = link.Nt;
  int bw = 0;
  for (const auto& ch : channels) bw = std::max(bw, ch.n_taps() - 1);
  bw = std::min(bw, n_symbols - 1);

  // R[d], d in [-bw, bw]; the dither of packet m contributes a pure phase
  // e^{+j 2 pi m d / L} since shift-back phases cancel inside each product.
  std::vector<Eigen::MatrixXcd> R(static_cast<size_t>(2 * bw + 1),
                                  Eigen::MatrixXcd::Zero(Nt, Nt));
  for (size_t m = 0; m < channels.size(); ++m) {
    const auto& taps = channels[m].taps;
    const int T = static_cast<int>(taps.size());
    for (int d = -bw; d <= bw; ++d) {
      Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(Nt, Nt);
      for (int l = std::max(0, -d); l < std::min(T, T - d); ++l)
        acc.noalias() += taps[static_cast<size_t>(l)].adjoint() * taps[static_cast<size_t>(l + d)];
      R[static_cast<size_t>(d + bw)] += unit_root(static_cast<long long>(dithers[m]) * d, link.L) * acc;
    }
  }

  // val[pi][pj][d] = v[pi]^H R[d] v[pj]; phases repeat with period Nt.
  std::vector<Eigen::VectorXcd> beams(static_cast<size_t>(Nt));
  for (int p = 0; p < Nt; ++p) beams[static_cast<size_t>(p)] = beamforming_vector(p, Nt);
  std::vector<std::vector<std::vector<cplx>>> val(
      static_cast<size_t>(Nt),
      std::vector<std::vector<cplx>>(static_cast<size_t>(Nt),
                                     std::vector<cplx>(static_cast<size_t>(2 * bw + 1))));
  for (int pi = 0; pi < Nt; ++pi)
    for (int pj = 0; pj < Nt; ++pj)
      for (int d = -bw; d <= bw; ++d)
        val[static_cast<size_t>(pi)][static_cast<size_t>(pj)][static_cast<size_t>(d + bw)] =
            beams[static_cast<size_t>(pi)].dot(R[static_cast<size_t>(d + bw)] *
                                               beams[static_cast<size_t>(pj)]);

  EffectiveGram out;
  out.bandwidth = bw;
  out.G = Eigen::MatrixXcd::Zero(n_symbols, n_symbols);
  for (int j = 0; j < n_symbols; ++j)
    for (int i = std::max(0, j - bw); i <= std::min(n_symbols - 1, j + bw); ++i)
      out.G(i, j) = val[static_cast<size_t>(i % Nt)][static_cast<size_t>(j % Nt)]
                       [static_cast<size_t>(i - j + bw)];
  return out;
}

// Phase extraction from an explicit block model (includes the chain-rule
// determinant cross-check inside block_dfe_profile).
inline PhaseReport phase_report(const BlockLinearModel& model, int Nt, int discard) {
  model.validate("phase_report");
  const SinrProfile prof = block_dfe_profile(model);
  return detail::phase_report_from_caps(prof.capacity, Nt, discard, "phase_report");
}

// Phase extraction straight from packet taps via the banded Gram fast path.
inline PhaseReport phase_report(const std::vector<ChannelTaps>& channels,
                                const std::vector<int>& dithers, const LinkParams& link,
                                int n_symbols, int discard) {
  const EffectiveGram eg = effective_gram(channels, dithers, link, n_symbols);
  const double c = link.P / (static_cast<double>(link.L) * link.Nt) /
                   (static_cast<double>(link.L) * link.N0);
  const std::vector<double> caps = chain_capacities_from_gram(eg.G, c, eg.bandwidth);
  return detail::phase_report_from_caps(caps, link.Nt, discard, "phase_report");
}

// White-input mutual information of a Nyquist-rate MIMO channel,
// b/Nyquist interval: (1/Q) sum_q log2 det(I + (P/(Nt N0)) H_q H_q^H).
inline double white_input_capacity_nyquist(const ChannelTaps& h, const LinkParams& link,
                                           int grid_size = kDefaultGridSize) {
  h.validate("white_input_capacity_nyquist");
  link.validate("white_input_capacity_nyquist");
  if (h.rate != RateTag::nyquist)
    throw std::invalid_argument("white_input_capacity_nyquist: taps must be Nyquist rate");
  if (h.nr() != link.Nr || h.nt() != link.Nt)
    throw std::invalid_argument("white_input_capacity_nyquist: tap dimensions must match link");
  const int Nr = h.nr();
  const int Nt = h.nt();
  const double c = link.P / (static_cast<double>(Nt) * link.N0);

  // Entrywise DTFT on the grid, then a small determinant per bin.
  std::vector<std::vector<FreqGrid>> entry(static_cast<size_t>(Nr),
                                           std::vector<FreqGrid>(static_cast<size_t>(Nt)));
  for (int r = 0; r < Nr; ++r)
    for (int t = 0; t < Nt; ++t) {
      std::vector<cplx> seq(static_cast<size_t>(h.n_taps()));
      for (int l = 0; l < h.n_taps(); ++l) seq[static_cast<size_t>(l)] = h.taps[static_cast<size_t>(l)](r, t);
      entry[static_cast<size_t>(r)][static_cast<size_t>(t)] = dtft_grid(seq, h.first_index, grid_size);
    }

  double acc = 0.0;
  Eigen::MatrixXcd Hq(Nr, Nt);
  for (int q = 0; q < grid_size; ++q) {
    for (int r = 0; r < Nr; ++r)
      for (int t = 0; t < Nt; ++t) Hq(r, t) = entry[static_cast<size_t>(r)][static_cast<size_t>(t)].values[static_cast<size_t>(q)];
    Eigen::MatrixXcd M = c * Hq * Hq.adjoint();
    M.diagonal().array() += 1.0;
    const Eigen::LLT<Eigen::MatrixXcd> llt(M);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("white_input_capacity_nyquist: non-PD bin " + std::to_string(q));
    for (int r = 0; r < Nr; ++r) acc += 2.0 * std::log2(llt.matrixL()(r, r).real());
  }
  return acc / grid_size;
}

// Precomputed per-bin eigenvalues of H_q H_q^H so the white-input capacity
// can be re-evaluated cheaply across an SNR sweep: capacity(P) =
// (1/Q) sum_{q,r} log2(1 + (P/(Nt N0)) lambda_{q,r}). Agrees with
// white_input_capacity_nyquist at every SNR.
class NyquistCapacityEvaluator {
 public:
  NyquistCapacityEvaluator(const ChannelTaps& h, int grid_size = kDefaultGridSize) {
    h.validate("NyquistCapacityEvaluator");
    if (h.rate != RateTag::nyquist)
      throw std::invalid_argument("NyquistCapacityEvaluator: taps must be Nyquist rate");
    nt_ = h.nt();
    q_ = grid_size;
    const int Nr = h.nr();
    std::vector<std::vector<FreqGrid>> entry(static_cast<size_t>(Nr),
                                             std::vector<FreqGrid>(static_cast<size_t>(nt_)));
    for (int r = 0; r < Nr; ++r)
      for (int t = 0; t < nt_; ++t) {
        std::vector<cplx> seq(static_cast<size_t>(h.n_taps()));
        for (int l = 0; l < h.n_taps(); ++l) seq[static_cast<size_t>(l)] = h.taps[static_cast<size_t>(l)](r, t);
        entry[static_cast<size_t>(r)][static_cast<size_t>(t)] = dtft_grid(seq, h.first_index, grid_size);
      }
    eigs_.reserve(static_cast<size_t>(grid_size) * Nr);
    Eigen::MatrixXcd Hq(Nr, nt_);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es;
    for (int q = 0; q < grid_size; ++q) {
      for (int r = 0; r < Nr; ++r)
        for (int t = 0; t < nt_; ++t) Hq(r, t) = entry[static_cast<size_t>(r)][static_cast<size_t>(t)].values[static_cast<size_t>(q)];
      es.compute(Hq * Hq.adjoint(), Eigen::EigenvaluesOnly);
      for (int r = 0; r < Nr; ++r) eigs_.push_back(std::max(0.0, es.eigenvalues()(r)));
    }
  }

  // b/Nyquist interval at total power P and noise density N0.
  double capacity(double P, double N0) const {
    const double c = P / (static_cast<double>(nt_) * N0);
    double acc = 0.0;
    for (double lam : eigs_) acc += std::log2(1.0 + c * lam);
    return acc / q_;
  }

 private:
  std::vector<double> eigs_;
  int nt_ = 1;
  int q_ = 1;
};

// Diagonal MIMO embedding of independent scalar sub-channels: sub-channel i
// occupies diagonal entry i of every tap, aligned by true time index.
inline ChannelTaps parallel_channel_embedding(const std::vector<ChannelTaps>& siso_channels) {
  if (siso_channels.empty())
    throw std::invalid_argument("parallel_channel_embedding: empty channel list");
  const int N = static_cast<int>(siso_channels.size());
  int lo = siso_channels.front().first_index;
  int hi = lo;
  for (const auto& ch : siso_channels) {
    ch.validate("parallel_channel_embedding");
    if (!ch.is_siso())
      throw std::invalid_argument("parallel_channel_embedding: sub-channels must be 1x1");
    if (ch.rate != siso_channels.front().rate || ch.L != siso_channels.front().L)
      throw std::invalid_argument("parallel_channel_embedding: sub-channels must share rate and L");
    lo = std::min(lo, ch.first_index);
    hi = std::max(hi, ch.first_index + ch.n_taps() - 1);
  }
  ChannelTaps out;
  out.rate = siso_channels.front().rate;
  out.L = siso_channels.front().L;
  out.first_index = lo;
  out.taps.assign(static_cast<size_t>(hi - lo + 1), Eigen::MatrixXcd::Zero(N, N));
  for (int i = 0; i < N; ++i) {
    const auto& ch = siso_channels[static_cast<size_t>(i)];
    for (int l = 0; l < ch.n_taps(); ++l)
      out.taps[static_cast<size_t>(ch.first_index + l - lo)](i, i) = ch.taps[static_cast<size_t>(l)](0, 0);
  }
  return out;
}

}  // namespace snq
