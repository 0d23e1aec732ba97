#include "pathbeam/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "pathbeam/channel.hpp"
#include "pathbeam/rate.hpp"

namespace pathbeam {

namespace {

// Stream tags keep the derived seed families disjoint.
constexpr std::uint64_t kSeedGeometry = 0x47454f4dULL;
constexpr std::uint64_t kSeedCell = 0x43454c4cULL;
constexpr std::uint64_t kSeedEval = 0x4556414cULL;

}  // namespace

void SweepConfig::validate() const {
  if (cells < 1 || users_per_cell < 1 || paths < 1)
    throw ConfigError("config: cells, users_per_cell and paths must be >= 1");
  if (tx_antennas < 1 || rx_antennas < 1)
    throw ConfigError("config: nt and nr must be >= 1");
  if (streams_per_user < 1 ||
      streams_per_user > std::min(tx_antennas, rx_antennas))
    throw ConfigError("config: streams must be in [1, min(nt, nr)]");
  if (snr_db.empty()) throw ConfigError("config: snr_db must be non-empty");
  if (algorithms.empty())
    throw ConfigError("config: at least one algorithm required");
  if (trials < 1) throw ConfigError("config: trials must be >= 1");
  if (slow_fading_draws < 1)
    throw ConfigError("config: slow_fading_draws must be >= 1");
  if (!(tol > 0.0)) throw ConfigError("config: tol must be positive");
  if (max_iter < 1) throw ConfigError("config: max_iter must be >= 1");
}

SweepConfig preset_config(const std::string& name) {
  SweepConfig cfg;
  if (name == "fig2") {
    cfg.tx_antennas = 3;
    cfg.rx_antennas = 3;
  } else if (name == "fig3") {
    cfg.tx_antennas = 4;
    cfg.rx_antennas = 4;
  } else if (name == "fig4") {
    cfg.tx_antennas = 10;
    cfg.rx_antennas = 4;
  } else {
    throw ConfigError("unknown preset: " + name);
  }
  return cfg;
}

std::vector<double> parse_snr_spec(const std::string& spec) {
  std::vector<double> out;
  const auto to_double = [&](const std::string& tok) {
    size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &pos);
    } catch (const std::exception&) {
      throw ConfigError("snr_db: cannot parse value '" + tok + "'");
    }
    if (pos != tok.size())
      throw ConfigError("snr_db: cannot parse value '" + tok + "'");
    return v;
  };

  if (spec.find(':') != std::string::npos) {
    std::stringstream ss(spec);
    std::string a, b, c;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') ||
        !std::getline(ss, c))
      throw ConfigError("snr_db: expected start:step:stop");
    const double start = to_double(a), step = to_double(b), stop = to_double(c);
    if (!(step > 0.0)) throw ConfigError("snr_db: step must be positive");
    for (double v = start; v <= stop + 1e-9; v += step) out.push_back(v);
  } else {
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(to_double(tok));
  }
  if (out.empty()) throw ConfigError("snr_db: no points given");
  return out;
}

std::vector<Algorithm> parse_algorithm_list(const std::string& spec) {
  std::vector<Algorithm> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(parse_algorithm(tok));
    } catch (const ValidationError& e) {
      throw ConfigError(e.what());
    }
  }
  if (out.empty()) throw ConfigError("algorithms: empty list");
  return out;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

int to_int(const std::string& key, const std::string& value) {
  size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
  if (pos != value.size())
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  return static_cast<int>(v);
}

double to_real(const std::string& key, const std::string& value) {
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
  if (pos != value.size())
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  return v;
}

std::uint64_t to_seed(const std::string& key, const std::string& value) {
  size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an unsigned integer, got '" + value +
                      "'");
  }
  if (pos != value.size())
    throw ConfigError(key + ": expected an unsigned integer, got '" + value +
                      "'");
  return v;
}

}  // namespace

SweepConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);

  std::map<std::string, std::string> kv;
  std::vector<std::string> order;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    if (kv.count(key))
      throw ConfigError(path + ": duplicate key '" + key + "'");
    kv[key] = value;
    order.push_back(key);
  }

  SweepConfig cfg;
  bool have_geometry = false;
  if (kv.count("preset")) {
    cfg = preset_config(kv.at("preset"));
    have_geometry = true;
  }

  for (const std::string& key : order) {
    const std::string& value = kv.at(key);
    if (key == "preset") {
      continue;  // applied above
    } else if (key == "cells") {
      cfg.cells = to_int(key, value);
    } else if (key == "users_per_cell") {
      cfg.users_per_cell = to_int(key, value);
    } else if (key == "paths") {
      cfg.paths = to_int(key, value);
    } else if (key == "nt") {
      cfg.tx_antennas = to_int(key, value);
    } else if (key == "nr") {
      cfg.rx_antennas = to_int(key, value);
    } else if (key == "streams_per_user") {
      cfg.streams_per_user = to_int(key, value);
    } else if (key == "snr_db") {
      cfg.snr_db = parse_snr_spec(value);
    } else if (key == "algorithms") {
      cfg.algorithms = parse_algorithm_list(value);
    } else if (key == "trials") {
      cfg.trials = to_int(key, value);
    } else if (key == "master_seed") {
      cfg.master_seed = to_seed(key, value);
    } else if (key == "slow_fading_draws") {
      cfg.slow_fading_draws = to_int(key, value);
    } else if (key == "tol") {
      cfg.tol = to_real(key, value);
    } else if (key == "max_iter") {
      cfg.max_iter = to_int(key, value);
    } else {
      throw ConfigError(path + ": unknown key '" + key + "'");
    }
  }

  const bool explicit_geometry = kv.count("nt") && kv.count("nr");
  if (!have_geometry && !explicit_geometry)
    throw ConfigError(path +
                      ": missing required key 'preset' (or explicit 'nt' and "
                      "'nr' geometry)");
  cfg.validate();
  return cfg;
}

std::string config_fingerprint(const SweepConfig& cfg) {
  std::ostringstream os;
  os << "cells=" << cfg.cells << " users_per_cell=" << cfg.users_per_cell
     << " paths=" << cfg.paths << " nt=" << cfg.tx_antennas
     << " nr=" << cfg.rx_antennas << " streams=" << cfg.streams_per_user
     << " snr=";
  for (size_t i = 0; i < cfg.snr_db.size(); ++i)
    os << (i ? "," : "") << cfg.snr_db[i];
  os << " algos=";
  for (size_t i = 0; i < cfg.algorithms.size(); ++i)
    os << (i ? "," : "") << algorithm_name(cfg.algorithms[i]);
  os << " trials=" << cfg.trials << " seed=" << cfg.master_seed
     << " draws=" << cfg.slow_fading_draws << " tol=" << cfg.tol
     << " max_iter=" << cfg.max_iter;
  return os.str();
}

std::uint64_t config_hash(const SweepConfig& cfg) {
  const std::string text = config_fingerprint(cfg);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

SweepRow eval_cell(const SweepConfig& cfg, const Scenario& geometry,
                   int geometry_draw, int snr_index, int algo_index) {
  const Algorithm algo = cfg.algorithms[algo_index];
  const double snr_db = cfg.snr_db[snr_index];

  Scenario scn = geometry;
  scn.bs_power.setConstant(std::pow(10.0, snr_db / 10.0));

  const std::uint64_t cell_seed = seed_mix(
      {cfg.master_seed, kSeedCell, static_cast<std::uint64_t>(geometry_draw),
       static_cast<std::uint64_t>(snr_index),
       static_cast<std::uint64_t>(algo_index)});

  SweepRow row;
  row.snr_db = snr_db;
  row.algorithm = algorithm_name(algo);
  row.geometry_draw = geometry_draw;

  const OptimizeOptions opts{cfg.tol, cfg.max_iter};
  Rng init_rng(seed_mix({cell_seed, kSeedEval, 0}));

  if (algo == Algorithm::MinorizePwcsit) {
    // One design per geometry; phases only enter the Monte-Carlo evaluation.
    bool failed = false;
    try {
      const BeamformerSet init = init_beamformers(
          scn, InitStrategy::Matched, cfg.streams_per_user, init_rng, nullptr);
      const OptimizeResult res = optimize(algo, scn, nullptr, init, opts);
      const MonteCarloRate mc = monte_carlo_ewsr(
          scn, res.beams, cfg.trials, seed_mix({cell_seed, kSeedEval, 1}));
      row.objective_nats = res.objective;
      row.ewsr_mc_mean = mc.mean;
      row.ewsr_mc_stderr = mc.std_error;
      row.iterations = res.iterations;
      row.kkt_residual = res.kkt_residual;
      row.converged = res.converged;
    } catch (const NumericError&) {
      failed = true;
    }
    if (failed) row.converged = false;
  } else {
    double mean = 0.0, m2 = 0.0;
    double iter_sum = 0.0, kkt_max = 0.0;
    int ok = 0;
    bool all_converged = true;
    for (int t = 0; t < cfg.trials; ++t) {
      try {
        Rng rng(seed_mix({cell_seed, static_cast<std::uint64_t>(t)}));
        const ChannelRealization h = sample_realization(scn, rng);
        const BeamformerSet init = init_beamformers(
            scn, InitStrategy::Matched, cfg.streams_per_user, rng, &h);
        const OptimizeResult res = optimize(algo, scn, &h, init, opts);
        ++ok;
        const double delta = res.objective - mean;
        mean += delta / ok;
        m2 += delta * (res.objective - mean);
        iter_sum += res.iterations;
        kkt_max = std::max(kkt_max, res.kkt_residual);
        all_converged = all_converged && res.converged;
      } catch (const NumericError&) {
        all_converged = false;
      }
    }
    if (ok > 0) {
      row.objective_nats = mean;
      row.ewsr_mc_mean = mean;
      if (ok > 1)
        row.ewsr_mc_stderr = std::sqrt(m2 / (ok - 1.0) / ok);
      row.iterations = iter_sum / ok;
      row.kkt_residual = kkt_max;
    }
    row.converged = all_converged && ok == cfg.trials;
  }
  row.objective_bits = row.objective_nats / std::log(2.0);
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  cfg.validate();

  std::vector<Scenario> geometries(cfg.slow_fading_draws);
  for (int g = 0; g < cfg.slow_fading_draws; ++g) {
    Rng rng(seed_mix(
        {cfg.master_seed, kSeedGeometry, static_cast<std::uint64_t>(g)}));
    geometries[g] = random_scenario(cfg.cells, cfg.users_per_cell, cfg.paths,
                                    cfg.tx_antennas, cfg.rx_antennas,
                                    1.0 /* replaced per SNR point */, rng);
  }

  struct Task {
    int geometry, snr, algo;
  };
  std::vector<Task> tasks;
  for (int g = 0; g < cfg.slow_fading_draws; ++g)
    for (size_t s = 0; s < cfg.snr_db.size(); ++s)
      for (size_t a = 0; a < cfg.algorithms.size(); ++a)
        tasks.push_back({g, static_cast<int>(s), static_cast<int>(a)});

  std::vector<SweepRow> rows(tasks.size());
  const unsigned hw = std::thread::hardware_concurrency();
  const int thread_count =
      cfg.threads > 0 ? cfg.threads : static_cast<int>(hw ? hw : 1);

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& t = tasks[i];
      rows[i] = eval_cell(cfg, geometries[t.geometry], t.geometry, t.snr,
                          t.algo);
    }
  };
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < thread_count; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::stable_sort(rows.begin(), rows.end(),
                   [](const SweepRow& a, const SweepRow& b) {
                     if (a.geometry_draw != b.geometry_draw)
                       return a.geometry_draw < b.geometry_draw;
                     if (a.snr_db != b.snr_db) return a.snr_db < b.snr_db;
                     return a.algorithm < b.algorithm;
                   });
  return rows;
}

void emit_csv(const std::vector<SweepRow>& rows, const std::string& path,
              const std::string& metadata) {
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (path != "-") {
    file.open(path);
    if (!file) throw std::runtime_error("emit_csv: cannot write " + path);
    out = &file;
  }

  const auto fmt = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
  };

  *out << "# " << metadata << "\n";
  *out << "snr_db,algorithm,geometry_draw,objective_nats,objective_bits,"
          "ewsr_mc_mean,ewsr_mc_stderr,iterations,kkt_residual,converged\n";
  for (const SweepRow& r : rows) {
    *out << fmt(r.snr_db) << ',' << r.algorithm << ',' << r.geometry_draw
         << ',' << fmt(r.objective_nats) << ',' << fmt(r.objective_bits)
         << ',' << fmt(r.ewsr_mc_mean) << ',' << fmt(r.ewsr_mc_stderr) << ','
         << fmt(r.iterations) << ',' << fmt(r.kkt_residual) << ','
         << (r.converged ? 1 : 0) << "\n";
  }
  out->flush();
  if (out->fail())
    throw std::runtime_error("emit_csv: write failed for " + path);
}

}  // namespace pathbeam
