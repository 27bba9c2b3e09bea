#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "snq/rng.hpp"
#include "snq/vblast.hpp"

using namespace snq;

namespace {

Eigen::MatrixXcd random_matrix(int rows, int cols, std::uint64_t seed) {
  GaussianSource src(seed);
  Eigen::MatrixXcd m(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) m(r, c) = src.cnormal();
  return m;
}

double log2det_white(const Eigen::MatrixXcd& H, double snr) {
  const Eigen::MatrixXcd M =
      Eigen::MatrixXcd::Identity(H.rows(), H.rows()) + snr * H * H.adjoint();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M, Eigen::EigenvaluesOnly);
  double acc = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) acc += std::log2(es.eigenvalues()(i));
  return acc;
}

}  // namespace

TEST_CASE("diagonal channels decouple the streams", "[vblast]") {
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(2, 2);
  H(0, 0) = cplx(2.0, 0.0);
  H(1, 1) = cplx(0.0, 1.0);
  const double snr = 3.0;
  const OrderingReport rep = vblast_fixed_order(H, snr);
  REQUIRE(rep.stream_capacity[0] == Catch::Approx(std::log2(1.0 + snr * 4.0)).margin(1e-12));
  REQUIRE(rep.stream_capacity[1] == Catch::Approx(std::log2(1.0 + snr * 1.0)).margin(1e-12));
  REQUIRE(rep.min_stream == Catch::Approx(std::log2(4.0)).margin(1e-12));
  REQUIRE(rep.throughput == Catch::Approx(2.0 * std::log2(4.0)).margin(1e-12));
}

TEST_CASE("the all-ones channel reproduces the closed form", "[vblast]") {
  // At snr 5 the first decoded stream fights the second as noise:
  // SINR_0 = 10/11, SINR_1 = 10, and the sum collapses to log2(21).
  const Eigen::MatrixXcd H = Eigen::MatrixXcd::Ones(2, 2);
  const OrderingReport rep = vblast_fixed_order(H, 5.0);
  REQUIRE(rep.stream_capacity[0] == Catch::Approx(std::log2(21.0 / 11.0)).margin(1e-12));
  REQUIRE(rep.stream_capacity[1] == Catch::Approx(std::log2(11.0)).margin(1e-12));
  REQUIRE(rep.sum_rate == Catch::Approx(std::log2(21.0)).margin(1e-12));
  REQUIRE(rep.throughput == Catch::Approx(2.0 * std::log2(21.0 / 11.0)).margin(1e-12));
}

TEST_CASE("stream rates sum to the white-input capacity in every order", "[vblast]") {
  for (const int nt : {2, 3}) {
    const Eigen::MatrixXcd H = random_matrix(nt, nt, 400 + static_cast<std::uint64_t>(nt));
    const double snr = 4.0;
    const double want = log2det_white(H, snr);
    std::vector<int> order(static_cast<size_t>(nt));
    std::iota(order.begin(), order.end(), 0);
    do {
      const OrderingReport rep = vblast_stream_capacities(H, snr, order);
      REQUIRE(rep.sum_rate == Catch::Approx(want).epsilon(1e-10));
    } while (std::next_permutation(order.begin(), order.end()));
  }
}

TEST_CASE("the optimized order dominates the fixed order", "[vblast]") {
  for (int i = 0; i < 20; ++i) {
    const Eigen::MatrixXcd H = random_matrix(3, 3, 420 + static_cast<std::uint64_t>(i));
    const OrderingReport fixed = vblast_fixed_order(H, 8.0);
    const OrderingReport best = vblast_best_order(H, 8.0);
    REQUIRE(best.min_stream >= fixed.min_stream);
    REQUIRE(best.throughput >= fixed.throughput);
    // Any order preserves the sum rate.
    REQUIRE(best.sum_rate == Catch::Approx(fixed.sum_rate).epsilon(1e-10));
  }
  // Symmetric channels tie everywhere; the search must return the identity.
  const OrderingReport tie = vblast_best_order(Eigen::MatrixXcd::Identity(2, 2), 1.0);
  REQUIRE(tie.order == std::vector<int>{0, 1});
}

TEST_CASE("rank-one channels stay interference limited", "[vblast]") {
  // With colinear columns the first decoded stream saturates: raising the
  // SNR from 40 dB to 60 dB may not buy even a tenth of a bit.
  Eigen::MatrixXcd H(2, 2);
  H.col(0) = Eigen::Vector2cd(cplx(1.0, 0.0), cplx(0.5, 0.5));
  H.col(1) = 2.0 * H.col(0);
  const double lo = vblast_fixed_order(H, 1e4).min_stream;
  const double hi = vblast_fixed_order(H, 1e6).min_stream;
  REQUIRE(hi - lo < 0.1);
  REQUIRE(lo < 1.0);
}

TEST_CASE("vblast rejects malformed input", "[vblast]") {
  const Eigen::MatrixXcd H = Eigen::MatrixXcd::Identity(2, 2);
  REQUIRE_THROWS_AS(vblast_stream_capacities(H, 0.0, {0, 1}), std::invalid_argument);
  REQUIRE_THROWS_AS(vblast_stream_capacities(H, 1.0, {0}), std::invalid_argument);
  REQUIRE_THROWS_AS(vblast_stream_capacities(H, 1.0, {0, 0}), std::invalid_argument);
  REQUIRE_THROWS_AS(vblast_stream_capacities(H, 1.0, {0, 2}), std::invalid_argument);
  REQUIRE_THROWS_AS(vblast_stream_capacities(Eigen::MatrixXcd(), 1.0, {}), std::invalid_argument);
  REQUIRE_THROWS_AS(vblast_best_order(random_matrix(9, 9, 1), 1.0), std::invalid_argument);
}
