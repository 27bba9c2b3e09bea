#pragma once
// Command-line front end for the experiment runner. Kept out of the other
// headers so that only the tool translation unit pays for CLI11.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "snq/experiments.hpp"

namespace snq {

// --spec <path> [--out <path>] [--seed <n>] [--trials <n>] [--quiet]
// CSV goes to --out (or stdout); the per-SNR summary goes to stderr.
// Returns nonzero with a diagnostic naming the offending field on any
// validation error.
inline int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Monte Carlo experiments for super-Nyquist rateless links"};
  std::string spec_path;
  std::string out_path;
  std::uint64_t seed = 0;
  int trials = 0;
  bool quiet = false;
  app.add_option("--spec", spec_path, "experiment config file (key=value lines)")->required();
  app.add_option("--out", out_path, "output CSV path (default: stdout)");
  auto* seed_opt = app.add_option("--seed", seed, "override the config seed");
  auto* trials_opt = app.add_option("--trials", trials, "override the config trial count");
  app.add_flag("--quiet", quiet, "suppress the per-SNR summary lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    ExperimentSpec spec = load_experiment_spec(spec_path);
    if (seed_opt->count() > 0) spec.seed = seed;
    if (trials_opt->count() > 0) spec.n_trials = trials;
    spec.validate();

    const ExperimentResult res = run_experiment(spec);

    if (out_path.empty()) {
      write_csv(res, std::cout);
    } else {
      std::ofstream out(out_path);
      if (!out) throw std::runtime_error("cannot open output file '" + out_path + "'");
      write_csv(res, out);
    }

    if (!quiet) {
      for (const auto& row : res.rows) {
        std::ostringstream line;
        for (size_t c = 0; c < res.columns.size(); ++c) {
          if (res.columns[c].rfind("se_", 0) == 0) continue;
          line << (line.tellp() > 0 ? "  " : "") << res.columns[c] << "="
               << detail::fmt_double(row[c]);
        }
        std::cerr << line.str() << "\n";
      }
      for (const auto& [k, v] : res.summary)
        std::cerr << k << "=" << detail::fmt_double(v) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace snq
