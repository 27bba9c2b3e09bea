#pragma once
// Decision-feedback capacity analysis. Two routes to the same number:
//
//  - spectral: the unbiased MMSE-DFE SINR of a stationary scalar channel is
//    2^C - 1 where C is the log-capacity integral, so the filter is
//    information lossless;
//
//  - block: for a finite linear model y = A s + z the chain rule splits the
//    total mutual information into per-symbol terms. Term n conditions on
//    all observations plus perfectly known earlier symbols s[0..n-1], with
//    later symbols acting as Gaussian interference. Those terms fall out of
//    a Cholesky factorization of I + (P_s/N0) A^H A taken in reversed index
//    order: trailing principal minors telescope along the chain.
//
// The block route is the oracle used by the periodically time-varying MIMO
// models, where no stationary spectral shortcut exists.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "snq/spectral.hpp"
#include "snq/types.hpp"

namespace snq {

// Finite observation model y = A s + z with n_obs rows and n_symbols
// columns. Symbols are i.i.d. with power symbol_power; z is white with
// per-sample variance noise_power.
struct BlockLinearModel {
  Eigen::MatrixXcd A;
  double symbol_power = 1.0;
  double noise_power = 1.0;

  int n_obs() const { return static_cast<int>(A.rows()); }
  int n_symbols() const { return static_cast<int>(A.cols()); }

  void validate(const char* where) const {
    if (A.rows() < 1 || A.cols() < 1)
      throw std::invalid_argument(std::string(where) + ": A must be at least 1x1");
    if (!(symbol_power > 0.0))
      throw std::invalid_argument(std::string(where) + ": symbol_power must be > 0");
    if (!(noise_power > 0.0))
      throw std::invalid_argument(std::string(where) + ": noise_power must be > 0");
  }
};

// Per-symbol unbiased-DFE SINRs and capacities, capacity[n] = log2(1+sinr[n]).
struct SinrProfile {
  std::vector<double> sinr;
  std::vector<double> capacity;
};

// Unbiased MMSE-DFE SINR of a stationary channel with the given SNR
// density: 2^C - 1 for C = integrate_log_capacity(density).
inline double dfe_sinr_spectral(const FreqGrid& density) {
  return std::exp2(integrate_log_capacity(density)) - 1.0;
}

namespace detail {

// In-place lower Cholesky M = R R^H restricted to |i - j| <= bw.
// Throws if a pivot is not strictly positive.
inline void banded_llt_inplace(Eigen::MatrixXcd& M, int bw) {
  const int N = static_cast<int>(M.rows());
  for (int j = 0; j < N; ++j) {
    const double d = M(j, j).real();
    if (!(d > 0.0))
      throw std::runtime_error("chain_capacities: matrix not positive definite at pivot " +
                               std::to_string(j));
    const double dj = std::sqrt(d);
    M(j, j) = dj;
    const int we = std::min(N - 1, j + bw);
    const int len = we - j;
    if (len == 0) continue;
    M.col(j).segment(j + 1, len) /= dj;
    for (int k = j + 1; k <= we; ++k) {
      const cplx ck = std::conj(M(k, j));
      if (ck != cplx(0.0, 0.0))
        M.col(k).segment(k, we - k + 1).noalias() -= M.col(j).segment(k, we - k + 1) * ck;
    }
  }
}

// log2 det of a Hermitian positive definite matrix by LU, independent of
// the Cholesky route used for the chain terms.
inline double log2det_hermitian_lu(const Eigen::MatrixXcd& M) {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
  double acc = 0.0;
  for (int i = 0; i < M.rows(); ++i) acc += std::log2(std::abs(lu.matrixLU()(i, i)));
  return acc;
}

}  // namespace detail

// Chain-rule capacities from the Gram matrix G = A^H A and the power ratio
// c = symbol_power / noise_power. Entry n is I(s_n ; y | s_0..s_{n-1}) in
// bits. bandwidth < 0 means dense; otherwise G(i,j) = 0 for |i-j| >
// bandwidth and the factorization cost drops to O(N bw^2).
inline std::vector<double> chain_capacities_from_gram(const Eigen::MatrixXcd& G, double c,
                                                      int bandwidth = -1) {
  const int N = static_cast<int>(G.rows());
  if (N < 1 || G.cols() != N)
    throw std::invalid_argument("chain_capacities_from_gram: G must be square");
  if (!(c > 0.0)) throw std::invalid_argument("chain_capacities_from_gram: power ratio must be > 0");
  const int bw = (bandwidth < 0 || bandwidth >= N) ? N - 1 : bandwidth;

  // Build M = I + c G with both index axes reversed; the lower Cholesky of
  // the reversed matrix walks trailing submatrices of the original, which
  // is exactly the conditioning order of a feedback detector.
  Eigen::MatrixXcd MR = Eigen::MatrixXcd::Zero(N, N);
  for (int j = 0; j < N; ++j) {
    const int we = std::min(N - 1, j + bw);
    for (int i = j; i <= we; ++i) MR(i, j) = c * G(N - 1 - i, N - 1 - j);
    MR(j, j) += 1.0;
  }
  detail::banded_llt_inplace(MR, bw);
  std::vector<double> caps(static_cast<size_t>(N));
  for (int n = 0; n < N; ++n) caps[static_cast<size_t>(n)] = 2.0 * std::log2(MR(N - 1 - n, N - 1 - n).real());
  return caps;
}

// Detected bandwidth of a Hermitian matrix: max |i-j| holding a nonzero.
inline int gram_bandwidth(const Eigen::MatrixXcd& G) {
  const int N = static_cast<int>(G.rows());
  int bw = 0;
  for (int j = 0; j < N; ++j)
    for (int i = N - 1; i > j + bw; --i)
      if (G(i, j) != cplx(0.0, 0.0)) {
        bw = i - j;
        break;
      }
  return bw;
}

// Full block oracle for y = A s + z. Builds the Gram matrix, extracts the
// per-symbol chain capacities, and verifies the chain-rule identity
// sum_n capacity[n] = log2 det(I + c A^H A) against an independent LU
// determinant to 1e-9 relative.
inline SinrProfile block_dfe_profile(const BlockLinearModel& model) {
  model.validate("block_dfe_profile");
  const int N = model.n_symbols();
  const double c = model.symbol_power / model.noise_power;
  Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(N, N);
  G.selfadjointView<Eigen::Lower>().rankUpdate(model.A.adjoint());
  G = G.template selfadjointView<Eigen::Lower>();

  const int bw = gram_bandwidth(G);
  std::vector<double> caps = chain_capacities_from_gram(G, c, bw);

  double total = 0.0;
  for (double v : caps) total += v;
  Eigen::MatrixXcd M = c * G;
  M.diagonal().array() += 1.0;
  const double ld = detail::log2det_hermitian_lu(M);
  if (std::abs(total - ld) > 1e-9 * std::max(1.0, std::abs(ld)))
    throw std::logic_error("block_dfe_profile: chain-rule identity violated (sum " +
                           std::to_string(total) + " vs log2det " + std::to_string(ld) + ")");

  SinrProfile prof;
  prof.capacity = std::move(caps);
  prof.sinr.resize(prof.capacity.size());
  for (size_t n = 0; n < prof.capacity.size(); ++n) prof.sinr[n] = std::exp2(prof.capacity[n]) - 1.0;
  return prof;
}

// Mean per-symbol capacity over the steady-state interior, dropping
// `discard` symbols at each block edge.
inline double steady_state_capacity(const SinrProfile& prof, int discard) {
  const int N = static_cast<int>(prof.capacity.size());
  if (discard < 0) throw std::invalid_argument("steady_state_capacity: discard must be >= 0");
  if (N - 2 * discard < 1)
    throw std::invalid_argument("steady_state_capacity: discard leaves no interior symbols");
  double acc = 0.0;
  for (int n = discard; n < N - discard; ++n) acc += prof.capacity[static_cast<size_t>(n)];
  return acc / (N - 2 * discard);
}

}  // namespace snq
