#pragma once

// Prime+Probe engine. A victim trace is replayed against a shared CacheState
// on a global cycle clock while the attacker probes (and thereby re-primes)
// its monitored sets every probe period. OS timer interrupts and spurious
// evictions are injected from a seeded generator.

#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "cachelab/cache.hpp"
#include "cachelab/trace.hpp"

namespace cachelab {

struct NoiseConfig {
  double timer_hz = 100.0;               // 0 disables timer interrupts
  double cpu_hz = 3.4e9;
  std::uint32_t timer_burst_accesses = 8; // OS lines touched per interrupt
  std::uint32_t timer_burst_spread = 64;  // consecutive sets the burst lands in
  double spurious_eviction_prob = 0.0;    // per probe
  std::uint32_t self_pollution_rate = 4;  // victim data accesses per iteration

  void validate() const;
};

struct Target {
  int id = 0;
  std::string label;
  std::vector<SetIndex> sets;
};

struct AttackConfig {
  Cycle probe_period_cycles = 500;
  std::uint32_t probes_per_epoch = 33;
  std::uint32_t repetitions = 15;
  Cycle probe_cost_cycles = 0;
  std::vector<SetIndex> monitored_sets;  // used by run_once
  std::vector<Target> targets;           // multiplexed by run_campaign
  NoiseConfig noise;
  CacheConfig cache;
  std::uint64_t seed = 1;
  int phase = 0;             // which victim phase a campaign observes
  unsigned threads = 1;

  Cycle cycles_per_epoch() const { return probe_period_cycles * probes_per_epoch; }
  void validate() const;
};

struct ProbeRecord {
  std::uint64_t run_id = 0;
  std::uint64_t epoch = 0;
  std::uint32_t probe = 0;  // within the epoch
  SetIndex set = 0;
  std::uint32_t eviction_count = 0;

  friend bool operator==(const ProbeRecord&, const ProbeRecord&) = default;
};

/// Everything the attacker learned in one victim execution. Eviction counts
/// are stored densely, probe-major.
struct RunObservation {
  std::uint64_t run_id = 0;
  Target target;
  std::uint32_t repetition = 0;
  int phase = 0;
  std::vector<SetIndex> sets;
  std::uint64_t num_probes = 0;  // per set
  std::uint32_t probes_per_epoch = 33;
  Cycle cycles_per_epoch = 0;
  std::vector<std::uint8_t> counts;

  std::uint32_t count(std::uint64_t probe, std::size_t set_pos) const {
    return counts[probe * sets.size() + set_pos];
  }
  std::uint64_t num_epochs() const { return num_probes / probes_per_epoch; }
  /// Records ordered by (epoch, probe, set).
  std::vector<ProbeRecord> records() const;
};

RunObservation run_once(const VictimTrace& victim, const AttackConfig& cfg,
                        std::uint64_t run_seed);

using VictimFactory = std::function<VictimTrace(const Target& target, std::uint32_t repetition)>;

/// One run per (target, repetition), each monitoring that target's sets.
/// Result order is target-major regardless of thread count.
std::vector<RunObservation> run_campaign(const VictimFactory& factory, const AttackConfig& cfg);

std::uint64_t derive_run_seed(std::uint64_t seed, int phase, std::size_t target_index,
                              std::uint32_t repetition);

struct EpochAggregate {
  std::vector<SetIndex> sets;
  std::vector<std::vector<std::uint32_t>> sums;  // [epoch][set position]
};

/// Sums eviction counts per set over each full epoch; a trailing partial
/// epoch is dropped.
EpochAggregate epoch_slice(const RunObservation& obs);

/// `run,target,epoch,probe,set,evictions`. Zero rows are omitted except the
/// final probe of each (run, set), which keeps run length recoverable.
void write_observations_csv(std::ostream& out, std::span<const RunObservation> observations);
std::vector<RunObservation> read_observations_csv(std::istream& in,
                                                  std::uint32_t probes_per_epoch);

}  // namespace cachelab
