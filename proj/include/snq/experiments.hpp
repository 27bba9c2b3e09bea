#pragma once
// Declarative Monte Carlo experiments over random channel ensembles, plus
// the flat key=value config format and CSV emission used by the CLI. Every
// experiment is deterministic given its seed: trial t draws its channel
// from derive_seed(seed, t), and the channel is shared across the whole SNR
// grid (common random numbers), so method orderings are paired per trial.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "snq/channel.hpp"
#include "snq/mimo_snq.hpp"
#include "snq/rng.hpp"
#include "snq/snq_link.hpp"
#include "snq/types.hpp"
#include "snq/vblast.hpp"
#include "snq/version.hpp"

namespace snq {

// siso_rateless: per-packet fading SISO link, packets accumulate capacity
//   against a target rate.
// mimo_noisi:    single-tap MIMO ensemble; SNQ throughput vs V-BLAST
//   (fixed and best order) vs white-input capacity.
// mimo_isi:      multi-tap MIMO ensemble; SNQ throughput vs capacity.
// long_channel:  many-tap MIMO ensemble; reports the SNR-domain gap between
//   SNQ throughput and capacity.
enum class ExperimentKind { siso_rateless, mimo_noisi, mimo_isi, long_channel };

inline const char* experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::siso_rateless: return "siso_rateless";
    case ExperimentKind::mimo_noisi: return "mimo_noisi";
    case ExperimentKind::mimo_isi: return "mimo_isi";
    default: return "long_channel";
  }
}

inline ExperimentKind parse_experiment_kind(const std::string& s) {
  if (s == "siso_rateless") return ExperimentKind::siso_rateless;
  if (s == "mimo_noisi") return ExperimentKind::mimo_noisi;
  if (s == "mimo_isi") return ExperimentKind::mimo_isi;
  if (s == "long_channel") return ExperimentKind::long_channel;
  throw std::invalid_argument("kind: unknown experiment kind '" + s + "'");
}

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::mimo_noisi;
  std::vector<double> snr_grid_db;
  int n_trials = 1;
  int Nt = 1;
  int Nr = 1;
  int n_taps = 1;
  int L = 1;
  int M = 1;
  int Q = kDefaultGridSize;
  int block_len = 1024;
  int discard = 64;
  std::uint64_t seed = 1;
  double target_rate = 1.0;  // b/SNQ symbol, siso_rateless only

  static ExperimentSpec defaults_for(ExperimentKind kind) {
    ExperimentSpec s;
    s.kind = kind;
    auto grid = [](double lo, double hi, double step) {
      std::vector<double> g;
      for (double v = lo; v <= hi + 1e-9; v += step) g.push_back(v);
      return g;
    };
    switch (kind) {
      case ExperimentKind::siso_rateless:
        s.snr_grid_db = grid(0, 20, 2);
        s.n_trials = 200;
        s.Nt = s.Nr = 1;
        s.n_taps = 3;
        s.L = 4;
        s.M = 4;
        s.target_rate = 1.0;
        break;
      case ExperimentKind::mimo_noisi:
        s.snr_grid_db = grid(0, 20, 2);
        s.n_trials = 500;
        s.Nt = s.Nr = 2;
        s.n_taps = 1;
        s.L = 2;
        break;
      case ExperimentKind::mimo_isi:
        s.snr_grid_db = grid(0, 20, 4);
        s.n_trials = 200;
        s.Nt = s.Nr = 2;
        s.n_taps = 5;
        s.L = 2;
        break;
      default:  // long_channel
        s.snr_grid_db = grid(0, 14, 2);
        s.n_trials = 20;
        s.Nt = s.Nr = 2;
        s.n_taps = 100;
        s.L = 2;
        s.block_len = 2048;
        s.discard = 512;
        break;
    }
    return s;
  }

  bool is_mimo_kind() const { return kind != ExperimentKind::siso_rateless; }

  // SNQ tap length after pulse upsampling with the default pulse support.
  int upsampled_len() const {
    return (n_taps - 1) * L + 2 * kDefaultSincHalfLenPerL * L + 1;
  }

  void validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("spec: " + msg); };
    if (snr_grid_db.empty()) fail("snr_grid_db must be nonempty");
    for (size_t i = 1; i < snr_grid_db.size(); ++i)
      if (!(snr_grid_db[i] > snr_grid_db[i - 1])) fail("snr_grid_db must be strictly increasing");
    if (n_trials < 1) fail("n_trials must be >= 1");
    if (Nt < 1) fail("Nt must be >= 1");
    if (Nr < 1) fail("Nr must be >= 1");
    if (n_taps < 1) fail("n_taps must be >= 1");
    if (L < 1) fail("L must be >= 1");
    if (M < 1) fail("M must be >= 1");
    if (!detail::is_pow2(Q) || Q < 2 * L) fail("Q must be a power of two >= 2L");
    if (discard < 0) fail("discard must be >= 0");
    if (block_len - 2 * discard < 4 * Nt) fail("block_len - 2*discard must be >= 4*Nt");
    if (kind == ExperimentKind::siso_rateless) {
      if (Nt != 1 || Nr != 1) fail("Nt and Nr must be 1 for siso_rateless");
      if (M > L) fail("M must be <= L for siso_rateless (subbands exhaust)");
      if (!(target_rate > 0.0)) fail("target_rate must be > 0");
      if (upsampled_len() > Q) fail("Q too small for the upsampled packet taps");
    } else {
      if (L < Nt * M) fail("L must be >= Nt*M (white transmit covariance)");
      if (kind == ExperimentKind::mimo_noisi && n_taps != 1)
        fail("n_taps must be 1 for mimo_noisi");
      if (n_taps > Q) fail("Q too small for the channel taps");
    }
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline double parse_double_field(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": not a number: '" + v + "'");
  }
}

inline long long parse_int_field(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": not an integer: '" + v + "'");
  }
}

inline std::uint64_t parse_u64_field(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": not an unsigned integer: '" + v + "'");
  }
}

inline std::vector<double> parse_grid_field(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::string item;
  std::istringstream ss(v);
  while (std::getline(ss, item, ',')) out.push_back(parse_double_field(key, trim(item)));
  if (out.empty()) throw std::invalid_argument(key + ": empty grid");
  return out;
}

inline double vec_mean(const std::vector<double>& v) {
  if (v.empty()) return std::nan("");
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / v.size();
}

// Standard error of the mean with the n-1 variance estimator.
inline double vec_se(const std::vector<double>& v) {
  const size_t n = v.size();
  if (n < 2) return std::nan("");
  const double m = vec_mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / (n - 1) / n);
}

inline double vec_median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

// x such that eval.capacity at x equals target, bisected in the dB domain;
// returns snr_db - x, the horizontal distance between the capacity curve
// and the point (snr_db, target). Bracket [-20, +60] dB of gap.
inline double snr_domain_gap_db(const NyquistCapacityEvaluator& eval, double snr_db,
                                double target) {
  double lo = snr_db - 60.0;
  double hi = snr_db + 20.0;
  for (int it = 0; it < 48; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (eval.capacity(db_to_linear(mid), 1.0) < target)
      lo = mid;
    else
      hi = mid;
  }
  return snr_db - 0.5 * (lo + hi);
}

}  // namespace detail

// Parse the flat key=value config format. '#' lines and blank lines are
// skipped; unknown or duplicate keys are rejected by name; 'kind' selects
// the defaults that unspecified keys fall back to.
inline ExperimentSpec parse_experiment_spec(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key=value, got '" + t + "'");
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string val = detail::trim(t.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
    if (!seen.insert(key).second) throw std::invalid_argument("config: duplicate key '" + key + "'");
    entries.emplace_back(key, val);
  }

  std::string kind_value;
  for (const auto& [k, v] : entries)
    if (k == "kind") kind_value = v;
  if (kind_value.empty()) throw std::invalid_argument("config: missing required key 'kind'");
  ExperimentSpec spec = ExperimentSpec::defaults_for(parse_experiment_kind(kind_value));

  for (const auto& [k, v] : entries) {
    if (k == "kind") continue;
    if (k == "snr_grid_db") spec.snr_grid_db = detail::parse_grid_field(k, v);
    else if (k == "n_trials") spec.n_trials = static_cast<int>(detail::parse_int_field(k, v));
    else if (k == "Nt") spec.Nt = static_cast<int>(detail::parse_int_field(k, v));
    else if (k == "Nr") spec.Nr = static_cast<int>(detail::parse_int_field(k, v));
    else if (k == "n_taps") spec.n_taps = static_cast<int>(detail::parse_int_field(k, v));
    else if (k == "L") spec.L = static_cast<int>(detail::parse_int_field(k, v));
    else if (k == "M") spec.M = static_cast<int>(detail::parse_int_field(k, v));
    else if (k == "Q") spec.Q = static_cast<int>(detail::parse_int_field(k, v));
    else if (k == "block_len") spec.block_len = static_cast<int>(detail::parse_int_field(k, v));
    else if (k == "discard") spec.discard = static_cast<int>(detail::parse_int_field(k, v));
    else if (k == "seed") spec.seed = detail::parse_u64_field(k, v);
    else if (k == "target_rate") spec.target_rate = detail::parse_double_field(k, v);
    else throw std::invalid_argument("config: unknown key '" + k + "'");
  }
  spec.validate();
  return spec;
}

inline ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  return parse_experiment_spec(in);
}

// Per-trial metrics, in CSV column order before the derived statistics.
inline std::vector<std::string> trial_metric_names(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::siso_rateless: return {"capacity", "packets", "insufficient"};
    case ExperimentKind::mimo_noisi: return {"capacity", "snq", "vblast_fixed", "vblast_best"};
    case ExperimentKind::mimo_isi: return {"capacity", "snq"};
    default: return {"capacity", "snq", "gap_db"};
  }
}

// One trial's metric values, indexed [snr][metric]. The channel draw
// depends only on (seed, trial); SNR only scales powers, so every metric is
// nondecreasing in SNR within a trial.
inline std::vector<std::vector<double>> run_single_trial(const ExperimentSpec& spec, int trial) {
  spec.validate();
  const std::uint64_t base = derive_seed(spec.seed, static_cast<std::uint64_t>(trial));
  const size_t n_snr = spec.snr_grid_db.size();
  std::vector<std::vector<double>> out(n_snr);

  if (spec.kind == ExperimentKind::siso_rateless) {
    // Independent fading per packet: packet m sees its own channel draw.
    std::vector<ChannelTaps> packets;
    packets.reserve(static_cast<size_t>(spec.M));
    for (int m = 0; m < spec.M; ++m) {
      const ChannelTaps h = random_gaussian_channel(1, 1, spec.n_taps,
                                                    derive_seed(base, static_cast<std::uint64_t>(m)));
      packets.push_back(upsample_to_snq(h, spec.L));
    }
    for (size_t i = 0; i < n_snr; ++i) {
      LinkParams link;
      link.P = db_to_linear(spec.snr_grid_db[i]);
      link.L = spec.L;
      link.M = spec.M;
      std::vector<double> caps(static_cast<size_t>(spec.M));
      for (int m = 0; m < spec.M; ++m)
        caps[static_cast<size_t>(m)] = packet_capacity(packets[static_cast<size_t>(m)], link, spec.Q);
      double total = 0.0;
      for (double c : caps) total += c;
      const std::optional<int> k = packets_to_decode(caps, spec.target_rate);
      out[i] = {total, k ? static_cast<double>(*k) : std::nan(""), k ? 0.0 : 1.0};
    }
    return out;
  }

  const ChannelTaps h = random_gaussian_channel(spec.Nt, spec.Nr, spec.n_taps, base);
  const ChannelTaps b = upsample_to_snq(h, spec.L);
  const NyquistCapacityEvaluator eval(h, spec.Q);
  for (size_t i = 0; i < n_snr; ++i) {
    const double snr_db = spec.snr_grid_db[i];
    LinkParams link;
    link.P = db_to_linear(snr_db);
    link.L = spec.L;
    link.Nt = spec.Nt;
    link.Nr = spec.Nr;
    const double capacity = eval.capacity(link.P, link.N0);
    const PhaseReport rep = phase_report({b}, {0}, link, spec.block_len, spec.discard);
    // L SNQ symbols per Nyquist interval.
    const double snq_thr = spec.L * rep.min_phase;
    if (spec.kind == ExperimentKind::mimo_noisi) {
      const double snr_stream = link.P / (spec.Nt * link.N0);
      const OrderingReport fixed = vblast_fixed_order(h.taps.front(), snr_stream);
      const OrderingReport best = vblast_best_order(h.taps.front(), snr_stream);
      out[i] = {capacity, snq_thr, fixed.throughput, best.throughput};
    } else if (spec.kind == ExperimentKind::mimo_isi) {
      out[i] = {capacity, snq_thr};
    } else {
      out[i] = {capacity, snq_thr, detail::snr_domain_gap_db(eval, snr_db, snq_thr)};
    }
  }
  return out;
}

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // one row per SNR grid point
  std::vector<std::pair<std::string, double>> summary;
};

// Run all trials sequentially in trial order and reduce. Deterministic:
// identical spec and seed give identical results bit for bit.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const std::vector<std::string> metrics = trial_metric_names(spec.kind);
  const size_t n_snr = spec.snr_grid_db.size();
  const size_t n_met = metrics.size();

  // store[i_snr][i_metric] = per-trial values.
  std::vector<std::vector<std::vector<double>>> store(
      n_snr, std::vector<std::vector<double>>(n_met));
  for (int t = 0; t < spec.n_trials; ++t) {
    const auto vals = run_single_trial(spec, t);
    for (size_t i = 0; i < n_snr; ++i)
      for (size_t j = 0; j < n_met; ++j) store[i][j].push_back(vals[i][j]);
  }

  ExperimentResult res;
  res.spec = spec;
  using detail::vec_mean;
  using detail::vec_median;
  using detail::vec_se;

  if (spec.kind == ExperimentKind::siso_rateless) {
    res.columns = {"snr_db",     "capacity",   "se_capacity",
                   "packets",    "se_packets", "p_insufficient"};
    for (size_t i = 0; i < n_snr; ++i) {
      std::vector<double> decoded;
      for (double v : store[i][1])
        if (!std::isnan(v)) decoded.push_back(v);
      res.rows.push_back({spec.snr_grid_db[i], vec_mean(store[i][0]), vec_se(store[i][0]),
                          vec_mean(decoded), vec_se(decoded), vec_mean(store[i][2])});
    }
  } else if (spec.kind == ExperimentKind::mimo_noisi) {
    res.columns = {"snr_db",          "capacity",        "snq",
                   "vblast_fixed",    "vblast_best",     "se_capacity",
                   "se_snq",          "se_vblast_fixed", "se_vblast_best",
                   "se_diff_fixed_snq", "se_diff_snq_best", "se_diff_best_capacity"};
    for (size_t i = 0; i < n_snr; ++i) {
      const auto& cap = store[i][0];
      const auto& snq = store[i][1];
      const auto& vf = store[i][2];
      const auto& vb = store[i][3];
      auto diff = [](const std::vector<double>& a, const std::vector<double>& b) {
        std::vector<double> d(a.size());
        for (size_t k = 0; k < a.size(); ++k) d[k] = b[k] - a[k];
        return d;
      };
      res.rows.push_back({spec.snr_grid_db[i], vec_mean(cap), vec_mean(snq), vec_mean(vf),
                          vec_mean(vb), vec_se(cap), vec_se(snq), vec_se(vf), vec_se(vb),
                          vec_se(diff(vf, snq)), vec_se(diff(snq, vb)), vec_se(diff(vb, cap))});
    }
  } else if (spec.kind == ExperimentKind::mimo_isi) {
    res.columns = {"snr_db", "capacity", "snq", "gap", "se_capacity", "se_snq", "se_gap"};
    for (size_t i = 0; i < n_snr; ++i) {
      std::vector<double> gap(store[i][0].size());
      for (size_t k = 0; k < gap.size(); ++k) gap[k] = store[i][0][k] - store[i][1][k];
      res.rows.push_back({spec.snr_grid_db[i], vec_mean(store[i][0]), vec_mean(store[i][1]),
                          vec_mean(gap), vec_se(store[i][0]), vec_se(store[i][1]), vec_se(gap)});
    }
  } else {
    res.columns = {"snr_db", "capacity",    "snq",    "gap_db_mean",
                   "gap_db_median", "se_capacity", "se_snq", "se_gap_db"};
    std::vector<double> all_gaps;
    for (size_t i = 0; i < n_snr; ++i) {
      const auto& gaps = store[i][2];
      all_gaps.insert(all_gaps.end(), gaps.begin(), gaps.end());
      res.rows.push_back({spec.snr_grid_db[i], vec_mean(store[i][0]), vec_mean(store[i][1]),
                          vec_mean(gaps), vec_median(gaps), vec_se(store[i][0]),
                          vec_se(store[i][1]), vec_se(gaps)});
    }
    res.summary.emplace_back("gap_db_overall_median", vec_median(all_gaps));
  }
  return res;
}

// CSV with a '#' metadata preamble echoing the spec, then a header row and
// one row per SNR point at 10 significant digits.
inline void write_csv(const ExperimentResult& res, std::ostream& out) {
  const ExperimentSpec& s = res.spec;
  out << "# version " << kVersion << "\n";
  out << "# kind " << experiment_kind_name(s.kind) << "\n";
  out << "# seed " << s.seed << "\n";
  out << "# n_trials " << s.n_trials << "\n";
  out << "# Nt " << s.Nt << "\n";
  out << "# Nr " << s.Nr << "\n";
  out << "# n_taps " << s.n_taps << "\n";
  out << "# L " << s.L << "\n";
  out << "# M " << s.M << "\n";
  out << "# Q " << s.Q << "\n";
  out << "# block_len " << s.block_len << "\n";
  out << "# discard " << s.discard << "\n";
  if (s.kind == ExperimentKind::siso_rateless)
    out << "# target_rate " << detail::fmt_double(s.target_rate) << "\n";
  out << "# snr_grid_db ";
  for (size_t i = 0; i < s.snr_grid_db.size(); ++i)
    out << (i ? "," : "") << detail::fmt_double(s.snr_grid_db[i]);
  out << "\n";
  if (s.kind == ExperimentKind::siso_rateless)
    out << "# units capacity=b/SNQ-symbol\n";
  else
    out << "# units b/Nyquist-interval (snq = L*min_phase; L SNQ symbols per Nyquist interval)"
        << (s.kind == ExperimentKind::long_channel ? "; gap in dB" : "") << "\n";
  for (const auto& [k, v] : res.summary) out << "# summary " << k << " " << detail::fmt_double(v) << "\n";
  for (size_t i = 0; i < res.columns.size(); ++i) out << (i ? "," : "") << res.columns[i];
  out << "\n";
  for (const auto& row : res.rows) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << detail::fmt_double(row[i]);
    out << "\n";
  }
}

inline std::string result_to_csv(const ExperimentResult& res) {
  std::ostringstream ss;
  write_csv(res, ss);
  return ss.str();
}

}  // namespace snq
