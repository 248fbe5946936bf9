#include "cachelab/engine.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace cachelab {

void NoiseConfig::validate() const {
  if (timer_hz < 0) throw std::invalid_argument("timer_hz must be >= 0");
  if (timer_hz > 0 && cpu_hz < timer_hz) throw std::invalid_argument("cpu_hz must exceed timer_hz");
  if (!(spurious_eviction_prob >= 0 && spurious_eviction_prob < 1))
    throw std::invalid_argument("spurious_eviction_prob must be in [0, 1)");
  if (timer_burst_spread == 0) throw std::invalid_argument("timer_burst_spread must be positive");
}

void AttackConfig::validate() const {
  cache.validate();
  noise.validate();
  if (probe_period_cycles == 0 || probes_per_epoch == 0 || repetitions == 0)
    throw std::invalid_argument("probe period, probes per epoch and repetitions must be positive");
  auto check_sets = [&](const std::vector<SetIndex>& sets) {
    for (SetIndex s : sets)
      if (s >= cache.num_sets)
        throw std::invalid_argument("monitored set " + std::to_string(s) + " out of range");
    auto sorted = sets;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("monitored sets must be distinct");
  };
  check_sets(monitored_sets);
  for (const auto& t : targets) {
    if (t.sets.empty()) throw std::invalid_argument("target " + t.label + " has no sets");
    check_sets(t.sets);
  }
}

std::vector<ProbeRecord> RunObservation::records() const {
  std::vector<ProbeRecord> out;
  out.reserve(counts.size());
  for (std::uint64_t p = 0; p < num_probes; ++p)
    for (std::size_t i = 0; i < sets.size(); ++i)
      out.push_back({run_id, p / probes_per_epoch, static_cast<std::uint32_t>(p % probes_per_epoch),
                     sets[i], count(p, i)});
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

struct NoiseEvent {
  Cycle cycle;
  Address address;
};

constexpr Address kOsBase = Address{1} << 36;

std::vector<NoiseEvent> timer_events(const NoiseConfig& noise, const CacheConfig& cache,
                                     Cycle duration, std::mt19937_64& rng) {
  std::vector<NoiseEvent> out;
  if (noise.timer_hz <= 0) return out;
  const auto period = static_cast<Cycle>(noise.cpu_hz / noise.timer_hz);
  const Cycle first = rng() % period;
  for (Cycle t = first; t < duration; t += period) {
    const SetIndex start = static_cast<SetIndex>(rng() % cache.num_sets);
    for (std::uint32_t b = 0; b < noise.timer_burst_accesses; ++b) {
      const SetIndex set = static_cast<SetIndex>((start + rng() % noise.timer_burst_spread) %
                                                 cache.num_sets);
      const Address line = rng() % 16;
      out.push_back({t, kOsBase + line * cache.set_stride_bytes() +
                            Address{set} * cache.line_size_bytes});
    }
  }
  return out;
}

}  // namespace

std::uint64_t derive_run_seed(std::uint64_t seed, int phase, std::size_t target_index,
                              std::uint32_t repetition) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(phase));
  h = splitmix64(h ^ target_index);
  return splitmix64(h ^ repetition);
}

RunObservation run_once(const VictimTrace& victim, const AttackConfig& cfg,
                        std::uint64_t run_seed) {
  cfg.validate();
  if (cfg.monitored_sets.empty()) throw std::invalid_argument("no monitored sets");
  if (victim.duration_cycles == 0) throw std::invalid_argument("victim trace is empty");

  const CacheConfig& cc = cfg.cache;
  CacheState cache(cc);
  std::mt19937_64 rng(run_seed);
  const std::vector<NoiseEvent> noise = timer_events(cfg.noise, cc, victim.duration_cycles, rng);

  const std::size_t nsets = cfg.monitored_sets.size();
  std::vector<int> position(cc.num_sets, -1);
  for (std::size_t i = 0; i < nsets; ++i) {
    position[cfg.monitored_sets[i]] = static_cast<int>(i);
    cache.prime(cfg.monitored_sets[i]);
  }
  std::vector<bool> dirty(nsets, false);

  RunObservation obs;
  obs.sets = cfg.monitored_sets;
  obs.probes_per_epoch = cfg.probes_per_epoch;
  obs.cycles_per_epoch = cfg.cycles_per_epoch();
  obs.num_probes = victim.duration_cycles / cfg.probe_period_cycles;
  obs.counts.assign(obs.num_probes * nsets, 0);

  auto touch = [&](Address address, Owner owner) {
    if (!cache.access(address, owner).hit) {
      const int pos = position[addr_to_set(address, cc)];
      if (pos >= 0) dirty[static_cast<std::size_t>(pos)] = true;
    }
  };

  const auto& events = victim.events;
  std::size_t vi = 0, ni = 0;
  const bool spurious = cfg.noise.spurious_eviction_prob > 0;
  for (std::uint64_t p = 0; p < obs.num_probes; ++p) {
    for (std::size_t m = 0; m < nsets; ++m) {
      const Cycle when = (p + 1) * cfg.probe_period_cycles + m * cfg.probe_cost_cycles;
      for (;;) {
        while (vi < events.size() && !events[vi].touches_memory()) ++vi;
        const bool v_ready = vi < events.size() && events[vi].cycle < when;
        const bool n_ready = ni < noise.size() && noise[ni].cycle < when;
        if (!v_ready && !n_ready) break;
        if (v_ready && (!n_ready || events[vi].cycle <= noise[ni].cycle)) {
          touch(events[vi].address, Owner::Victim);
          ++vi;
        } else {
          touch(noise[ni].address, Owner::OsNoise);
          ++ni;
        }
      }
      // An untouched primed set probes as all hits and keeps its state.
      std::uint32_t evictions = 0;
      if (dirty[m]) {
        evictions = cache.probe(cfg.monitored_sets[m]);
        dirty[m] = false;
      }
      if (spurious) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        if (u < cfg.noise.spurious_eviction_prob && evictions < cc.associativity) ++evictions;
      }
      obs.counts[p * nsets + m] = static_cast<std::uint8_t>(evictions);
    }
  }
  return obs;
}

std::vector<RunObservation> run_campaign(const VictimFactory& factory, const AttackConfig& cfg) {
  cfg.validate();
  if (cfg.targets.empty()) throw std::invalid_argument("campaign has no targets");
  const std::size_t reps = cfg.repetitions;
  const std::size_t total = cfg.targets.size() * reps;
  std::vector<RunObservation> results(total);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      try {
        const std::size_t ti = task / reps;
        const auto rep = static_cast<std::uint32_t>(task % reps);
        const Target& target = cfg.targets[ti];
        AttackConfig run_cfg = cfg;
        run_cfg.monitored_sets = target.sets;
        run_cfg.targets.clear();
        const VictimTrace trace = factory(target, rep);
        RunObservation obs = run_once(trace, run_cfg, derive_run_seed(cfg.seed, cfg.phase, ti, rep));
        obs.run_id = task;
        obs.target = target;
        obs.repetition = rep;
        obs.phase = cfg.phase;
        results[task] = std::move(obs);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(total)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

EpochAggregate epoch_slice(const RunObservation& obs) {
  EpochAggregate agg;
  agg.sets = obs.sets;
  const std::uint64_t epochs = obs.num_epochs();
  agg.sums.assign(epochs, std::vector<std::uint32_t>(obs.sets.size(), 0));
  for (std::uint64_t p = 0; p < epochs * obs.probes_per_epoch; ++p)
    for (std::size_t i = 0; i < obs.sets.size(); ++i)
      agg.sums[p / obs.probes_per_epoch][i] += obs.count(p, i);
  return agg;
}

void write_observations_csv(std::ostream& out, std::span<const RunObservation> observations) {
  out << "run,target,epoch,probe,set,evictions\n";
  for (const auto& obs : observations) {
    for (std::uint64_t p = 0; p < obs.num_probes; ++p) {
      for (std::size_t i = 0; i < obs.sets.size(); ++i) {
        const std::uint32_t c = obs.count(p, i);
        if (c == 0 && p + 1 != obs.num_probes) continue;
        out << obs.run_id << ',' << obs.target.label << ',' << p / obs.probes_per_epoch << ','
            << p % obs.probes_per_epoch << ',' << obs.sets[i] << ',' << c << '\n';
      }
    }
  }
}

std::vector<RunObservation> read_observations_csv(std::istream& in,
                                                  std::uint32_t probes_per_epoch) {
  if (probes_per_epoch == 0) throw std::invalid_argument("probes_per_epoch must be positive");
  struct Row {
    std::uint64_t probe;
    SetIndex set;
    std::uint32_t evictions;
  };
  struct Partial {
    std::string label;
    std::vector<SetIndex> sets;
    std::vector<Row> rows;
  };
  std::map<std::uint64_t, Partial> runs;
  std::string line;
  if (!std::getline(in, line) || line != "run,target,epoch,probe,set,evictions")
    throw std::runtime_error("observation CSV: missing or unexpected header");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 6)
      throw std::runtime_error("observation CSV line " + std::to_string(line_no) + ": expected 6 fields");
    try {
      const std::uint64_t run = std::stoull(f[0]);
      const std::uint64_t epoch = std::stoull(f[2]);
      const std::uint64_t probe = std::stoull(f[3]);
      const auto set = static_cast<SetIndex>(std::stoul(f[4]));
      const auto ev = static_cast<std::uint32_t>(std::stoul(f[5]));
      Partial& part = runs[run];
      part.label = f[1];
      if (std::find(part.sets.begin(), part.sets.end(), set) == part.sets.end())
        part.sets.push_back(set);
      part.rows.push_back({epoch * probes_per_epoch + probe, set, ev});
    } catch (const std::logic_error&) {
      throw std::runtime_error("observation CSV line " + std::to_string(line_no) + ": bad number");
    }
  }

  std::vector<RunObservation> out;
  std::map<std::string, int> label_ids;
  for (auto& [run, part] : runs) {
    RunObservation obs;
    obs.run_id = run;
    obs.target.label = part.label;
    const auto [it, inserted] = label_ids.emplace(part.label, static_cast<int>(label_ids.size()));
    obs.target.id = it->second;
    const auto slash = part.label.find_last_of('/');
    if (slash != std::string::npos) {
      try {
        obs.target.id = std::stoi(part.label.substr(slash + 1));
      } catch (const std::logic_error&) {
      }
    }
    obs.sets = part.sets;
    obs.target.sets = part.sets;
    obs.probes_per_epoch = probes_per_epoch;
    std::uint64_t last = 0;
    for (const Row& r : part.rows) last = std::max(last, r.probe);
    obs.num_probes = last + 1;
    obs.counts.assign(obs.num_probes * obs.sets.size(), 0);
    for (const Row& r : part.rows) {
      const auto pos = static_cast<std::size_t>(
          std::find(obs.sets.begin(), obs.sets.end(), r.set) - obs.sets.begin());
      obs.counts[r.probe * obs.sets.size() + pos] = static_cast<std::uint8_t>(r.evictions);
    }
    out.push_back(std::move(obs));
  }
  return out;
}

}  // namespace cachelab
