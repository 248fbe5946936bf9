#include "cachelab/recovery.hpp"

#include <algorithm>
#include <stdexcept>

namespace cachelab::recovery {

std::vector<CandidateMark> mark_candidates(const RunObservation& obs, std::uint32_t threshold) {
  std::vector<CandidateMark> marks;
  const EpochAggregate agg = epoch_slice(obs);
  for (std::uint64_t e = 0; e < agg.sums.size(); ++e) {
    std::uint32_t total = 0;
    for (std::uint32_t s : agg.sums[e]) total += s;
    if (total >= threshold && total > 0) marks.push_back({obs.target.id, e, total});
  }
  return marks;
}

MarkedRun mark_run(const RunObservation& obs, std::uint32_t threshold) {
  return {obs.target.id, obs.repetition, obs.num_epochs(), mark_candidates(obs, threshold)};
}

std::string WindowDecision::to_string() const {
  switch (kind) {
    case Kind::Multiplier: return "g" + std::to_string(value);
    case Kind::Zero: return "zero";
    case Kind::Unknown: return "unknown";
  }
  return "unknown";
}

RecoveredWindows vote_windows(std::span<const MarkedRun> runs, std::uint32_t repetitions,
                              std::uint64_t epochs, const VoteConfig& cfg) {
  if (repetitions == 0) throw std::invalid_argument("repetitions must be positive");
  RecoveredWindows out;
  out.tallies.assign(epochs, {});
  for (const MarkedRun& run : runs) {
    if (run.epochs != epochs)
      throw std::invalid_argument("run of target " + std::to_string(run.target) + " has " +
                                  std::to_string(run.epochs) + " epochs, expected " +
                                  std::to_string(epochs));
    for (const CandidateMark& m : run.marks) ++out.tallies[m.epoch][run.target];
  }
  out.decisions.reserve(epochs);
  for (const auto& tally : out.tallies) {
    std::uint32_t total = 0, best = 0;
    int best_target = 0;
    bool tie = false;
    for (const auto& [target, count] : tally) {
      total += count;
      if (count > best) {
        best = count;
        best_target = target;
        tie = false;
      } else if (count == best) {
        tie = true;
      }
    }
    if (2 * best > repetitions && !tie)
      out.decisions.push_back(WindowDecision::multiplier(static_cast<std::uint32_t>(best_target)));
    else if (total <= cfg.zero_floor)
      out.decisions.push_back(WindowDecision::zero());
    else
      out.decisions.push_back(WindowDecision::unknown());
  }
  return out;
}

RecoveryReport score_key(const RecoveredWindows& dp, const RecoveredWindows& dq,
                         const rsa::RsaSecret& truth, std::span<const std::uint32_t> monitored,
                         unsigned k) {
  RecoveryReport report;
  const rsa::WindowSequence truths[2] = {rsa::window_decompose(truth.dp, k),
                                         rsa::window_decompose(truth.dq, k)};
  const RecoveredWindows* recovered[2] = {&dp, &dq};
  for (int x = 0; x < 2; ++x) {
    const auto& windows = truths[x].windows;
    const auto& decisions = recovered[x]->decisions;
    if (decisions.size() != windows.size())
      throw std::invalid_argument("exponent " + std::to_string(x) + ": " +
                                  std::to_string(decisions.size()) + " decisions for " +
                                  std::to_string(windows.size()) + " windows");
    for (std::size_t i = 0; i < windows.size(); ++i) {
      const WindowDecision& d = decisions[i];
      bool correct = false;
      if (d.kind == WindowDecision::Kind::Zero) correct = windows[i] == 0;
      if (d.kind == WindowDecision::Kind::Multiplier) correct = windows[i] == d.value;
      if (d.kind != WindowDecision::Kind::Unknown && !correct) ++report.incorrect_decisions;
      if (correct) report.recovered_bits += k;
      report.total_bits += k;
      report.log.push_back({x, i, d, windows[i], correct});
    }
  }
  report.fraction = report.total_bits == 0
                        ? 0.0
                        : static_cast<double>(report.recovered_bits) /
                              static_cast<double>(report.total_bits);
  std::vector<std::uint32_t> distinct;
  for (std::uint32_t m : monitored)
    if (m >= 1 && m < (1u << k) && std::find(distinct.begin(), distinct.end(), m) == distinct.end())
      distinct.push_back(m);
  report.expected_fraction =
      static_cast<double>(distinct.size() + 1) / static_cast<double>(1u << k);
  return report;
}

SatelliteDetection detect_satellite(std::span<const RunObservation> observations,
                                    std::span<const int> rotation_targets,
                                    std::uint32_t window_epochs, double density_threshold) {
  if (window_epochs == 0) throw std::invalid_argument("window_epochs must be positive");
  SatelliteDetection det;
  det.targets.assign(rotation_targets.begin(), rotation_targets.end());
  const std::size_t nsets = det.targets.size();
  if (nsets == 0) throw std::invalid_argument("no rotation targets");

  std::uint64_t epochs = UINT64_MAX;
  std::vector<std::uint32_t> reps(nsets, 0);
  for (const auto& obs : observations) {
    const auto it = std::find(det.targets.begin(), det.targets.end(), obs.target.id);
    if (it == det.targets.end()) continue;
    ++reps[static_cast<std::size_t>(it - det.targets.begin())];
    epochs = std::min(epochs, obs.num_epochs());
  }
  for (std::size_t i = 0; i < nsets; ++i)
    if (reps[i] == 0)
      throw std::invalid_argument("no observations for rotation target " +
                                  std::to_string(det.targets[i]));

  std::vector<std::vector<std::uint32_t>> active(nsets, std::vector<std::uint32_t>(epochs, 0));
  for (const auto& obs : observations) {
    const auto it = std::find(det.targets.begin(), det.targets.end(), obs.target.id);
    if (it == det.targets.end()) continue;
    const auto s = static_cast<std::size_t>(it - det.targets.begin());
    const EpochAggregate agg = epoch_slice(obs);
    for (std::uint64_t e = 0; e < epochs; ++e) {
      std::uint32_t sum = 0;
      for (std::uint32_t c : agg.sums[e]) sum += c;
      if (sum > 0) ++active[s][e];
    }
  }

  det.activity.assign(nsets, std::vector<double>(epochs, 0.0));
  for (std::size_t s = 0; s < nsets; ++s)
    for (std::uint64_t e = 0; e < epochs; ++e)
      det.activity[s][e] = static_cast<double>(active[s][e]) / reps[s];

  if (epochs < window_epochs) return det;
  const std::uint64_t starts = epochs - window_epochs + 1;
  std::vector<std::vector<double>> density(nsets, std::vector<double>(starts, 0.0));
  for (std::size_t s = 0; s < nsets; ++s) {
    for (std::uint64_t w = 0; w < starts; ++w) {
      double sum = 0;
      for (std::uint64_t e = w; e < w + window_epochs; ++e) sum += det.activity[s][e];
      density[s][w] = sum / window_epochs;
    }
  }

  double best_score = -1;
  std::size_t best_interval = 0;
  std::vector<double> best_densities;
  std::uint64_t w = 0;
  while (w < starts) {
    auto weakest = [&](std::uint64_t at) {
      double m = density[0][at];
      for (std::size_t s = 1; s < nsets; ++s) m = std::min(m, density[s][at]);
      return m;
    };
    if (weakest(w) <= density_threshold) {
      ++w;
      continue;
    }
    const std::uint64_t first = w;
    double peak = -1;
    std::uint64_t peak_at = w;
    while (w < starts && weakest(w) > density_threshold) {
      if (weakest(w) > peak) {
        peak = weakest(w);
        peak_at = w;
      }
      ++w;
    }
    det.intervals.emplace_back(first, w - 1 + window_epochs);
    if (peak > best_score) {
      best_score = peak;
      best_interval = det.intervals.size() - 1;
      best_densities.clear();
      for (std::size_t s = 0; s < nsets; ++s) best_densities.push_back(density[s][peak_at]);
    }
  }
  if (!det.intervals.empty()) {
    det.detected = true;
    det.interval_begin = det.intervals[best_interval].first;
    det.interval_end = det.intervals[best_interval].second;
    det.densities = best_densities;
  }
  return det;
}

}  // namespace cachelab::recovery
