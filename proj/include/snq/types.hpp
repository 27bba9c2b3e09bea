#pragma once
// Core value types shared across the library: complex scalars, channel tap
// sequences at Nyquist or super-Nyquist rate, and per-link parameters.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace snq {

using cplx = std::complex<double>;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

// e^{+j 2 pi r / denom}. Exact (no rounding residue) on the quarter grid so
// that dither and beamforming phases for small L / Nt cancel to true zeros.
inline cplx unit_root(long long r, int denom) {
  long long q = r % denom;
  if (q < 0) q += denom;
  const long long quad = 4 * q;
  if (quad % denom == 0) {
    switch (quad / denom) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  const double ang = 2.0 * M_PI * static_cast<double>(q) / denom;
  return {std::cos(ang), std::sin(ang)};
}

enum class RateTag { nyquist, snq };

inline const char* rate_tag_name(RateTag r) {
  return r == RateTag::nyquist ? "nyquist" : "snq";
}

// Time-domain tap sequence of a linear channel. Each tap is an Nr x Nt
// matrix (1 x 1 for scalar links). first_index is the time index of
// taps.front(); symmetric pulses start at negative delay.
struct ChannelTaps {
  std::vector<Eigen::MatrixXcd> taps;
  int first_index = 0;
  RateTag rate = RateTag::nyquist;
  int L = 1;  // oversignaling ratio, meaningful when rate == RateTag::snq

  int n_taps() const { return static_cast<int>(taps.size()); }
  int nr() const { return taps.empty() ? 0 : static_cast<int>(taps.front().rows()); }
  int nt() const { return taps.empty() ? 0 : static_cast<int>(taps.front().cols()); }
  bool is_siso() const { return nr() == 1 && nt() == 1; }

  cplx scalar(int i) const { return taps.at(static_cast<size_t>(i))(0, 0); }

  std::vector<cplx> scalar_taps() const {
    if (!is_siso()) throw std::invalid_argument("ChannelTaps: scalar view requires 1x1 taps");
    std::vector<cplx> out(taps.size());
    for (size_t i = 0; i < taps.size(); ++i) out[i] = taps[i](0, 0);
    return out;
  }

  // Sum of squared Frobenius norms over all taps.
  double energy() const {
    double e = 0.0;
    for (const auto& t : taps) e += t.squaredNorm();
    return e;
  }

  void validate(const char* where) const {
    if (taps.empty()) throw std::invalid_argument(std::string(where) + ": empty tap sequence");
    const auto rows = taps.front().rows();
    const auto cols = taps.front().cols();
    if (rows < 1 || cols < 1)
      throw std::invalid_argument(std::string(where) + ": tap matrices must be at least 1x1");
    for (const auto& t : taps)
      if (t.rows() != rows || t.cols() != cols)
        throw std::invalid_argument(std::string(where) + ": inconsistent tap dimensions");
    if (L < 1) throw std::invalid_argument(std::string(where) + ": L must be >= 1");
    if (rate == RateTag::nyquist && L != 1)
      throw std::invalid_argument(std::string(where) + ": Nyquist-rate taps must have L == 1");
  }

  static ChannelTaps siso(std::vector<cplx> values, RateTag rate, int L, int first_index = 0) {
    ChannelTaps out;
    out.taps.reserve(values.size());
    for (const cplx& v : values) {
      Eigen::MatrixXcd m(1, 1);
      m(0, 0) = v;
      out.taps.push_back(std::move(m));
    }
    out.first_index = first_index;
    out.rate = rate;
    out.L = L;
    out.validate("ChannelTaps::siso");
    return out;
  }
};

// Power and geometry of one link. P is the total transmit power per Nyquist
// interval and N0 the noise density; bandwidth is normalized to 1, so the
// reference SNR is P / N0.
struct LinkParams {
  double P = 1.0;
  double N0 = 1.0;
  int L = 1;
  int Nt = 1;
  int Nr = 1;
  int M = 1;

  void validate(const char* where) const {
    if (!(P > 0.0)) throw std::invalid_argument(std::string(where) + ": P must be > 0");
    if (!(N0 > 0.0)) throw std::invalid_argument(std::string(where) + ": N0 must be > 0");
    if (L < 1) throw std::invalid_argument(std::string(where) + ": L must be >= 1");
    if (Nt < 1) throw std::invalid_argument(std::string(where) + ": Nt must be >= 1");
    if (Nr < 1) throw std::invalid_argument(std::string(where) + ": Nr must be >= 1");
    if (M < 1) throw std::invalid_argument(std::string(where) + ": M must be >= 1");
  }
};

}  // namespace snq
