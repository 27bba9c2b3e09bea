#pragma once
// V-BLAST baseline on no-ISI MIMO channels: independent per-antenna streams
// decoded by MMSE successive interference cancellation, in a fixed or an
// exhaustively optimized order. With a common fixed code rate across
// streams the throughput is Nt times the weakest stream.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace snq {

// Per-stream capacities for one decoding order. stream_capacity[k] belongs
// to the stream decoded at step k, i.e. antenna order[k].
struct OrderingReport {
  std::vector<int> order;
  std::vector<double> stream_capacity;
  double min_stream = 0.0;
  double sum_rate = 0.0;
  double throughput = 0.0;
};

namespace detail {

inline void validate_vblast(const Eigen::MatrixXcd& H, double snr_per_stream,
                            const std::vector<int>& order, const char* where) {
  if (H.rows() < 1 || H.cols() < 1)
    throw std::invalid_argument(std::string(where) + ": H must be at least 1x1");
  if (!(snr_per_stream > 0.0))
    throw std::invalid_argument(std::string(where) + ": snr_per_stream must be > 0");
  const int Nt = static_cast<int>(H.cols());
  if (static_cast<int>(order.size()) != Nt)
    throw std::invalid_argument(std::string(where) + ": order length must equal Nt");
  std::vector<bool> seen(static_cast<size_t>(Nt), false);
  for (int s : order) {
    if (s < 0 || s >= Nt || seen[static_cast<size_t>(s)])
      throw std::invalid_argument(std::string(where) + ": order is not a permutation of streams");
    seen[static_cast<size_t>(s)] = true;
  }
}

}  // namespace detail

// MMSE-SIC stream capacities in the given decoding order. At step k the
// already-decoded streams are cancelled and the not-yet-decoded ones act as
// Gaussian noise: SINR_k = snr * h^H (I + snr * sum_undecoded h_u h_u^H)^{-1} h
// for h the column of the stream decoded at step k. The unbiased MMSE SINRs
// make the per-stream rates sum to log2 det(I + snr H H^H) for every order.
inline OrderingReport vblast_stream_capacities(const Eigen::MatrixXcd& H, double snr_per_stream,
                                               const std::vector<int>& order) {
  detail::validate_vblast(H, snr_per_stream, order, "vblast_stream_capacities");
  const int Nt = static_cast<int>(H.cols());
  const int Nr = static_cast<int>(H.rows());

  OrderingReport rep;
  rep.order = order;
  rep.stream_capacity.resize(static_cast<size_t>(Nt));
  for (int k = 0; k < Nt; ++k) {
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Identity(Nr, Nr);
    for (int u = k + 1; u < Nt; ++u) {
      const auto h_u = H.col(order[static_cast<size_t>(u)]);
      B.noalias() += snr_per_stream * h_u * h_u.adjoint();
    }
    const auto h_s = H.col(order[static_cast<size_t>(k)]);
    const double sinr =
        snr_per_stream * h_s.dot(Eigen::LLT<Eigen::MatrixXcd>(B).solve(h_s)).real();
    rep.stream_capacity[static_cast<size_t>(k)] = std::log2(1.0 + sinr);
  }
  rep.min_stream = *std::min_element(rep.stream_capacity.begin(), rep.stream_capacity.end());
  rep.sum_rate = std::accumulate(rep.stream_capacity.begin(), rep.stream_capacity.end(), 0.0);
  rep.throughput = Nt * rep.min_stream;
  return rep;
}

// Natural antenna order 0,1,...,Nt-1.
inline OrderingReport vblast_fixed_order(const Eigen::MatrixXcd& H, double snr_per_stream) {
  std::vector<int> order(static_cast<size_t>(H.cols()));
  std::iota(order.begin(), order.end(), 0);
  return vblast_stream_capacities(H, snr_per_stream, order);
}

// Exhaustive search over decoding orders for the best min-stream capacity;
// ties resolve to the lexicographically smallest permutation. Nt <= 8.
inline OrderingReport vblast_best_order(const Eigen::MatrixXcd& H, double snr_per_stream) {
  const int Nt = static_cast<int>(H.cols());
  if (Nt > 8)
    throw std::invalid_argument("vblast_best_order: exhaustive search supports Nt <= 8");
  std::vector<int> order(static_cast<size_t>(Nt));
  std::iota(order.begin(), order.end(), 0);
  OrderingReport best = vblast_stream_capacities(H, snr_per_stream, order);
  while (std::next_permutation(order.begin(), order.end())) {
    OrderingReport rep = vblast_stream_capacities(H, snr_per_stream, order);
    if (rep.min_stream > best.min_stream) best = std::move(rep);
  }
  return best;
}

}  // namespace snq
