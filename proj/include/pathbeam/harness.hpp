#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pathbeam/optim.hpp"
#include "pathbeam/types.hpp"

namespace pathbeam {

inline constexpr const char* kVersion = "0.1.0";

/// Everything a reproducible sweep needs. The SNR axis is the per-BS power
/// budget in dB over unit-variance noise, with per-link average channel
/// energy normalized in the channel model. `threads` is an execution detail
/// (0 = all hardware threads) and is not part of the config-file schema:
/// it never affects the output bytes.
struct SweepConfig {
  int cells = 2;
  int users_per_cell = 2;
  int paths = 3;
  int tx_antennas = 0;
  int rx_antennas = 0;
  int streams_per_user = 1;
  std::vector<double> snr_db = {0, 5, 10, 15, 20, 25, 30};
  std::vector<Algorithm> algorithms = {Algorithm::MinorizeIcsit,
                                       Algorithm::MinorizePwcsit};
  int trials = 500;
  std::uint64_t master_seed = 1;
  int slow_fading_draws = 50;
  double tol = 1e-5;
  int max_iter = 80;
  int threads = 0;

  void validate() const;
};

/// Built-in scenario presets: fig2 (Nt=3, Nr=3), fig3 (Nt=4, Nr=4) and
/// fig4 (Nt=10, Nr=4), all with 2 cells, 2 users per cell and 3 paths.
SweepConfig preset_config(const std::string& name);

/// Parses a key = value config file (UTF-8, '#' comments). A `preset` key
/// loads the named preset first; any other keys override it. Unknown keys,
/// type mismatches and missing scenario geometry are ConfigErrors naming
/// the offending key.
SweepConfig parse_config(const std::string& path);

/// "start:step:stop" (inclusive) or a comma-separated list of dB values.
std::vector<double> parse_snr_spec(const std::string& spec);

/// Comma-separated algorithm names.
std::vector<Algorithm> parse_algorithm_list(const std::string& spec);

/// Canonical one-line rendering of a config; hashing it identifies the run.
std::string config_fingerprint(const SweepConfig& cfg);

/// FNV-1a hash of the fingerprint.
std::uint64_t config_hash(const SweepConfig& cfg);

struct SweepRow {
  double snr_db = 0.0;
  std::string algorithm;
  int geometry_draw = 0;
  double objective_nats = 0.0;
  double objective_bits = 0.0;
  double ewsr_mc_mean = 0.0;
  double ewsr_mc_stderr = 0.0;
  double iterations = 0.0;
  double kkt_residual = 0.0;
  bool converged = false;
};

/// Runs the full (geometry, SNR, algorithm) grid. Perfect-CSIT algorithms
/// optimize per channel realization and average the achieved rates over the
/// trials; the pathwise design is computed once per geometry and SNR point
/// and its achieved expected rate is then measured by Monte Carlo over the
/// same trial count. Failed instances are recorded with converged=false,
/// never dropped. Output is a deterministic function of the config
/// (including master_seed) regardless of thread count.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg);

/// Writes rows as CSV: one '#' metadata line, a header with the exact
/// SweepRow field names, then the rows in (geometry, snr, algorithm) order
/// with 12 significant digits. Pass "-" to write to stdout.
void emit_csv(const std::vector<SweepRow>& rows, const std::string& path,
              const std::string& metadata);

}  // namespace pathbeam
