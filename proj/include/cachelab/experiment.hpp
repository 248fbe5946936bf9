#pragma once

// Experiment runner behind the `cachelab` command: builds victims, runs
// attack campaigns, scores them and writes the artifacts of one run.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cachelab/cache.hpp"
#include "cachelab/config.hpp"
#include "cachelab/engine.hpp"
#include "cachelab/figures.hpp"
#include "cachelab/genome.hpp"
#include "cachelab/recovery.hpp"
#include "cachelab/rsa.hpp"

namespace cachelab {

enum class Scenario { RsaAttack, RsaHardened, GenomeAttack, GenomeNegative, CacheSelftest };

Scenario parse_scenario(const std::string& name);
std::string to_string(Scenario s);

/// Every tunable of an experiment. Field names double as config keys.
struct Settings {
  // cache
  std::uint32_t line_size = 64;
  std::uint32_t num_sets = 64;
  std::uint32_t associativity = 8;
  // attack
  std::uint64_t probe_period_cycles = 500;
  std::uint32_t probes_per_epoch = 33;
  std::optional<std::uint32_t> repetitions;  // 15 for RSA, 20 for genome
  std::uint64_t probe_cost_cycles = 0;
  // noise
  double timer_hz = 100.0;
  double cpu_hz = 3.4e9;
  std::uint32_t timer_burst_accesses = 8;
  std::uint32_t timer_burst_spread = 64;
  double spurious_eviction_prob = 0.0;
  std::uint32_t self_pollution_rate = 4;
  std::vector<std::uint32_t> self_pollution_multipliers = {11, 12, 13, 14, 15, 16};
  // rsa victim
  std::uint32_t key_bits = 2048;
  std::uint32_t window_bits = 4;
  std::vector<std::uint32_t> monitored_multipliers = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<std::uint32_t> excluded_multipliers;
  std::uint64_t table_base = 0x10000;
  std::uint32_t entry_size_bytes = 128;
  std::uint64_t square_cycles = 1500;
  std::uint64_t multiply_cycles = 10500;
  std::uint32_t word_bytes = 8;
  // recovery
  std::uint32_t candidate_threshold = 12;
  std::uint32_t zero_floor = 2;
  std::uint32_t window_epochs = 10;
  double density_threshold = 0.5;
  // genome victim
  std::uint64_t genome_length = 100000;
  std::string genome_file;
  std::uint32_t kmer_k = 4;
  std::uint32_t index_entry_bytes = 8;
  std::uint64_t index_base = 0;
  std::uint64_t insertion_cycles = 4125;
  std::string satellite_unit = "ATCG";
  std::uint32_t satellite_repeats = 10;
  std::uint64_t satellite_offset = 25000;
  // self-test
  std::uint64_t lru_sequences = 10000;
  std::uint32_t lru_max_length = 1000;
  std::uint64_t roundtrip_samples = 1000;
  // artifacts
  bool dump_trace = false;

  void set(const std::string& key, const std::string& value);
  void apply(const ConfigMap& map);
  /// Sorted `key = value` lines of the effective configuration.
  std::string echo(Scenario scenario) const;

  std::uint32_t repetitions_for(Scenario s) const;
  CacheConfig cache() const;
  AttackConfig attack(Scenario s, std::uint64_t seed, unsigned threads) const;
  std::vector<std::uint32_t> effective_monitored() const;
};

struct ExperimentSpec {
  Scenario scenario = Scenario::RsaAttack;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "out";
  std::optional<std::filesystem::path> config_file;
  std::vector<std::pair<std::string, std::string>> overrides;
  unsigned threads = 1;
  bool inject_lru_fault = false;  // self-test fault injection hook
};

struct ExperimentResult {
  nlohmann::ordered_json report;
  std::vector<std::string> files;  // artifact names, manifest last
  bool ok = true;                  // false when a self-test suite failed
};

ExperimentResult run_experiment(const ExperimentSpec& spec);

// Scenario cores, usable without touching the filesystem.

struct RsaOutcome {
  rsa::RsaSecret key;
  std::vector<RunObservation> observations;  // d_p campaign, then d_q
  recovery::RecoveredWindows dp, dq;
  recovery::RecoveryReport report;
  std::uint64_t victim_executions = 0;
  double zero_window_fraction = 0;
  std::vector<std::uint32_t> monitored;
  VictimTrace trace;  // one full decryption, not counted as an execution
};

RsaOutcome run_rsa_scenario(const Settings& s, bool hardened, std::uint64_t seed, unsigned threads);

struct GenomeOutcome {
  std::vector<RunObservation> observations;
  recovery::SatelliteDetection detection;
  std::vector<std::pair<std::string, SetIndex>> rotations;
  std::optional<std::uint64_t> satellite_epoch;  // set when a satellite was embedded
  std::uint64_t victim_executions = 0;
  VictimTrace trace;
};

GenomeOutcome run_genome_scenario(const Settings& s, bool embed, std::uint64_t seed,
                                  unsigned threads);

/// Candidate marks: x = epoch (d_q offset after d_p), row = repetition,
/// color = multiplier.
FigureData rsa_figure(const RsaOutcome& r, std::uint32_t repetitions, std::uint32_t threshold);
/// Epochs with any eviction: one block of `repetitions` rows per rotation set.
FigureData genome_figure(const GenomeOutcome& g, std::uint32_t repetitions);

struct SuiteResult {
  std::string name;
  std::uint64_t cases = 0;
  std::uint64_t failures = 0;
};

struct SelftestOptions {
  std::uint64_t seed = 1;
  std::uint64_t lru_sequences = 10000;
  std::uint32_t lru_max_length = 1000;
  std::uint64_t roundtrip_samples = 1000;
  bool inject_lru_fault = false;
};

std::vector<SuiteResult> selftest(const SelftestOptions& opts);
std::uint64_t rotation_uniqueness_violations(const genome::HashIndexLayout& layout,
                                             const CacheConfig& cache);

}  // namespace cachelab
