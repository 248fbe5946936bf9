#pragma once

// Turns campaign observations into secrets: multiplier-window recovery by
// candidate marking and majority voting, and microsatellite detection by
// aligning the activity of a repeat unit's rotation sets.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cachelab/engine.hpp"
#include "cachelab/rsa.hpp"

namespace cachelab::recovery {

struct CandidateMark {
  int target = 0;
  std::uint64_t epoch = 0;
  std::uint32_t strength = 0;

  friend bool operator==(const CandidateMark&, const CandidateMark&) = default;
};

/// Epochs whose summed evictions over all of the observation's sets reach
/// `threshold`.
std::vector<CandidateMark> mark_candidates(const RunObservation& obs, std::uint32_t threshold);

/// Marks of one run, with the identity needed to align runs.
struct MarkedRun {
  int target = 0;
  std::uint32_t repetition = 0;
  std::uint64_t epochs = 0;
  std::vector<CandidateMark> marks;
};

MarkedRun mark_run(const RunObservation& obs, std::uint32_t threshold);

struct WindowDecision {
  enum class Kind { Multiplier, Zero, Unknown };
  Kind kind = Kind::Unknown;
  std::uint32_t value = 0;  // meaningful for Multiplier

  static WindowDecision multiplier(std::uint32_t v) { return {Kind::Multiplier, v}; }
  static WindowDecision zero() { return {Kind::Zero, 0}; }
  static WindowDecision unknown() { return {Kind::Unknown, 0}; }
  std::string to_string() const;
  friend bool operator==(const WindowDecision&, const WindowDecision&) = default;
};

struct RecoveredWindows {
  std::vector<WindowDecision> decisions;            // one per epoch
  std::vector<std::map<int, std::uint32_t>> tallies; // epoch -> target -> repetitions marked
};

struct VoteConfig {
  // An epoch with at most this many marks (all targets, all repetitions)
  // and no majority is decided Zero.
  std::uint32_t zero_floor = 2;
};

/// Per epoch, a target marked by more than half of the `repetitions` wins;
/// a nearly unmarked epoch is a zero window; anything else is Unknown.
/// Throws if any run's epoch count differs from `epochs`.
RecoveredWindows vote_windows(std::span<const MarkedRun> runs, std::uint32_t repetitions,
                              std::uint64_t epochs, const VoteConfig& cfg = {});

struct WindowOutcome {
  int exponent = 0;  // 0 = d_p, 1 = d_q
  std::uint64_t window = 0;
  WindowDecision decision;
  std::uint32_t truth = 0;
  bool correct = false;
};

struct RecoveryReport {
  double fraction = 0;           // recovered bits / total exponent bits
  double expected_fraction = 0;  // (monitored + 1) / 2^k
  std::uint64_t recovered_bits = 0;
  std::uint64_t total_bits = 0;
  std::uint64_t incorrect_decisions = 0;  // Multiplier/Zero decisions that miss the truth
  std::vector<WindowOutcome> log;
};

/// Scores the recovered windows of both CRT exponents against the key.
RecoveryReport score_key(const RecoveredWindows& dp, const RecoveredWindows& dq,
                         const rsa::RsaSecret& truth, std::span<const std::uint32_t> monitored,
                         unsigned k);

struct SatelliteDetection {
  bool detected = false;
  std::uint64_t interval_begin = 0;  // epochs, half-open
  std::uint64_t interval_end = 0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> intervals;
  std::vector<int> targets;                   // order of the per-set series below
  std::vector<double> densities;              // per set, in the reported window
  std::vector<std::vector<double>> activity;  // per set, per epoch, mean over repetitions
};

/// Every rotation target must be observed. A window start w detects when the
/// mean activity of every set over epochs [w, w + window_epochs) exceeds
/// `density_threshold`; adjacent detecting windows merge into one interval and
/// the interval with the strongest weakest-set density is reported.
SatelliteDetection detect_satellite(std::span<const RunObservation> observations,
                                    std::span<const int> rotation_targets,
                                    std::uint32_t window_epochs, double density_threshold);

}  // namespace cachelab::recovery
