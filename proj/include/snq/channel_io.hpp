#pragma once
// Plain-text serialization of channel tap sequences. One header row declares
// the geometry, then one row per tap index: the time index followed by
// re/im columns for every antenna pair (receive-major). Values are written
// with 17 significant digits, which round-trips IEEE doubles bit-exactly.

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "snq/types.hpp"

namespace snq {

inline void save_taps(const ChannelTaps& ch, std::ostream& os) {
  ch.validate("save_taps");
  os << "taps Nt=" << ch.nt() << " Nr=" << ch.nr() << " rate=" << rate_tag_name(ch.rate)
     << " L=" << ch.L << " first=" << ch.first_index << " n=" << ch.n_taps() << "\n";
  char buf[32];
  for (int i = 0; i < ch.n_taps(); ++i) {
    os << (ch.first_index + i);
    const Eigen::MatrixXcd& m = ch.taps[static_cast<size_t>(i)];
    for (int r = 0; r < ch.nr(); ++r) {
      for (int t = 0; t < ch.nt(); ++t) {
        std::snprintf(buf, sizeof buf, " %.17g", m(r, t).real());
        os << buf;
        std::snprintf(buf, sizeof buf, " %.17g", m(r, t).imag());
        os << buf;
      }
    }
    os << "\n";
  }
}

inline void save_taps(const ChannelTaps& ch, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("save_taps: cannot open " + path);
  save_taps(ch, f);
}

namespace detail {

inline long long parse_header_field(const std::string& tok, const char* key) {
  const std::string prefix = std::string(key) + "=";
  if (tok.rfind(prefix, 0) != 0)
    throw std::invalid_argument("load_taps: expected header field " + prefix + ", got '" + tok + "'");
  size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(tok.substr(prefix.size()), &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("load_taps: bad value in header field '" + tok + "'");
  }
  if (pos != tok.size() - prefix.size())
    throw std::invalid_argument("load_taps: bad value in header field '" + tok + "'");
  return v;
}

}  // namespace detail

inline ChannelTaps load_taps(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("load_taps: missing header row");
  std::istringstream hs(line);
  std::string magic, nt_tok, nr_tok, rate_tok, l_tok, first_tok, n_tok;
  if (!(hs >> magic >> nt_tok >> nr_tok >> rate_tok >> l_tok >> first_tok >> n_tok) || magic != "taps")
    throw std::invalid_argument("load_taps: malformed header row '" + line + "'");
  ChannelTaps ch;
  const int Nt = static_cast<int>(detail::parse_header_field(nt_tok, "Nt"));
  const int Nr = static_cast<int>(detail::parse_header_field(nr_tok, "Nr"));
  if (rate_tok == "rate=nyquist")
    ch.rate = RateTag::nyquist;
  else if (rate_tok == "rate=snq")
    ch.rate = RateTag::snq;
  else
    throw std::invalid_argument("load_taps: unknown rate tag in '" + rate_tok + "'");
  ch.L = static_cast<int>(detail::parse_header_field(l_tok, "L"));
  ch.first_index = static_cast<int>(detail::parse_header_field(first_tok, "first"));
  const int n = static_cast<int>(detail::parse_header_field(n_tok, "n"));
  if (Nt < 1 || Nr < 1 || n < 1) throw std::invalid_argument("load_taps: non-positive dimension in header");

  ch.taps.assign(static_cast<size_t>(n), Eigen::MatrixXcd::Zero(Nr, Nt));
  for (int i = 0; i < n; ++i) {
    if (!std::getline(is, line))
      throw std::invalid_argument("load_taps: truncated file at tap row " + std::to_string(i));
    std::istringstream rs(line);
    long long idx = 0;
    if (!(rs >> idx) || idx != ch.first_index + i)
      throw std::invalid_argument("load_taps: bad tap index on row " + std::to_string(i));
    for (int r = 0; r < Nr; ++r) {
      for (int t = 0; t < Nt; ++t) {
        double re = 0.0, im = 0.0;
        if (!(rs >> re >> im))
          throw std::invalid_argument("load_taps: missing value on tap row " + std::to_string(i));
        ch.taps[static_cast<size_t>(i)](r, t) = cplx(re, im);
      }
    }
    double extra = 0.0;
    if (rs >> extra)
      throw std::invalid_argument("load_taps: trailing values on tap row " + std::to_string(i));
  }
  ch.validate("load_taps");
  return ch;
}

inline ChannelTaps load_taps(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_taps: cannot open " + path);
  return load_taps(f);
}

}  // namespace snq
