#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <random>
#include <set>
#include <sstream>

#include "cachelab/engine.hpp"

using namespace cachelab;

namespace {

AttackConfig quiet_config(std::vector<SetIndex> sets) {
  AttackConfig cfg;
  cfg.monitored_sets = std::move(sets);
  cfg.noise.timer_hz = 0;
  return cfg;
}

VictimTrace silent(Cycle duration) {
  VictimTrace t;
  t.duration_cycles = duration;
  return t;
}

Address line(SetIndex set, std::uint64_t n) { return n * 4096 + Address{set} * 64; }

std::uint64_t total(const RunObservation& o) {
  std::uint64_t s = 0;
  for (auto c : o.counts) s += c;
  return s;
}

VictimTrace random_trace(std::mt19937_64& rng, Cycle duration, std::size_t n) {
  VictimTrace t;
  t.duration_cycles = duration;
  std::vector<Cycle> cycles(n);
  for (auto& c : cycles) c = rng() % duration;
  std::sort(cycles.begin(), cycles.end());
  for (Cycle c : cycles)
    t.events.push_back({c, line(static_cast<SetIndex>(rng() % 8), rng() % 12), EventKind::TableRead,
                        static_cast<std::int64_t>(rng() % 100)});
  return t;
}

}  // namespace

TEST_CASE("silent victim yields all-zero observations") {
  const RunObservation o = run_once(silent(66 * 500), quiet_config({0, 1, 2}), 1);
  CHECK(o.num_probes == 66);
  CHECK(o.num_epochs() == 2);
  CHECK(o.counts.size() == 66 * 3);
  CHECK(total(o) == 0);
}

TEST_CASE("one victim access appears in the next probe of its set only") {
  VictimTrace t = silent(10 * 500);
  t.events.push_back({1234, line(1, 3), EventKind::TableRead, std::nullopt});
  const RunObservation o = run_once(t, quiet_config({0, 1, 2}), 1);
  // probe p of every set happens at (p + 1) * 500, so cycle 1234 is seen by probe 2
  for (std::uint64_t p = 0; p < o.num_probes; ++p)
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(o.count(p, i) == ((p == 2 && i == 1) ? 1u : 0u));
}

TEST_CASE("squaring markers never touch the cache") {
  VictimTrace t = silent(5 * 500);
  t.events.push_back({10, 0, EventKind::Square, 0});
  CHECK(total(run_once(t, quiet_config({0}), 1)) == 0);
}

TEST_CASE("run_once validation") {
  CHECK_THROWS_AS(run_once(silent(1000), quiet_config({}), 1), std::invalid_argument);
  CHECK_THROWS_AS(run_once(silent(0), quiet_config({0}), 1), std::invalid_argument);
  CHECK_THROWS_AS(run_once(silent(1000), quiet_config({64}), 1), std::invalid_argument);
  CHECK_THROWS_AS(run_once(silent(1000), quiet_config({3, 3}), 1), std::invalid_argument);
  AttackConfig bad = quiet_config({0});
  bad.noise.spurious_eviction_prob = 1.5;
  CHECK_THROWS_AS(run_once(silent(1000), bad, 1), std::invalid_argument);
  bad = quiet_config({0});
  bad.probe_period_cycles = 0;
  CHECK_THROWS_AS(run_once(silent(1000), bad, 1), std::invalid_argument);
}

TEST_CASE("property: evictions are bounded by foreign distinct lines per probe interval") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const VictimTrace t = random_trace(rng, 40 * 500, 60);
    const RunObservation o = run_once(t, quiet_config({0, 1, 2, 3, 4, 5, 6, 7}), rng());
    for (std::uint64_t p = 0; p < o.num_probes; ++p) {
      for (std::size_t i = 0; i < o.sets.size(); ++i) {
        std::set<Address> distinct;
        for (const auto& e : t.events)
          if (e.cycle >= p * 500 && e.cycle < (p + 1) * 500 &&
              addr_to_set(e.address, {}) == o.sets[i])
            distinct.insert(e.address / 64);
        CHECK(o.count(p, i) == std::min<std::size_t>(distinct.size(), 8));
      }
    }
  }
}

TEST_CASE("observations are independent of ground-truth labels") {
  std::mt19937_64 rng(9);
  const VictimTrace a = random_trace(rng, 100 * 500, 200);
  VictimTrace b = a;
  for (auto& e : b.events) e.label = e.label ? std::optional<std::int64_t>(-*e.label) : 7;
  AttackConfig cfg = quiet_config({0, 1, 2, 3});
  cfg.noise.timer_hz = 100;
  cfg.noise.cpu_hz = 1e6;
  cfg.noise.spurious_eviction_prob = 0.1;
  CHECK(run_once(a, cfg, 5).counts == run_once(b, cfg, 5).counts);
}

TEST_CASE("runs are deterministic in the seed") {
  std::mt19937_64 rng(2);
  const VictimTrace t = random_trace(rng, 200 * 500, 300);
  AttackConfig cfg = quiet_config({0, 1, 2, 3, 4, 5, 6, 7});
  cfg.noise.timer_hz = 1000;
  cfg.noise.cpu_hz = 1e6;
  cfg.noise.spurious_eviction_prob = 0.05;
  CHECK(run_once(t, cfg, 11).counts == run_once(t, cfg, 11).counts);
  CHECK(run_once(t, cfg, 11).counts != run_once(t, cfg, 12).counts);
}

TEST_CASE("total probes follow the victim duration") {
  for (Cycle d : {499u, 500u, 16500u, 33001u}) {
    const RunObservation o = run_once(silent(d), quiet_config({0, 5}), 1);
    CHECK(o.num_probes == d / 500);
    CHECK(o.records().size() == (d / 500) * 2);
  }
}

TEST_CASE("campaign sizes and ordering") {
  AttackConfig cfg = quiet_config({});
  for (int i = 0; i < 10; ++i) cfg.targets.push_back({i, "t/" + std::to_string(i), {SetIndex(i)}});
  cfg.repetitions = 15;
  cfg.threads = 3;
  std::atomic<int> calls{0};
  const auto obs = run_campaign(
      [&](const Target&, std::uint32_t) {
        ++calls;
        return silent(33 * 500);
      },
      cfg);
  CHECK(calls == 150);
  REQUIRE(obs.size() == 150);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    CHECK(obs[i].run_id == i);
    CHECK(obs[i].target.id == static_cast<int>(i / 15));
    CHECK(obs[i].repetition == i % 15);
    CHECK(obs[i].sets == obs[i].target.sets);
  }

  AttackConfig g = quiet_config({});
  for (int i = 0; i < 4; ++i) g.targets.push_back({i, "r" + std::to_string(i), {SetIndex(i)}});
  g.repetitions = 20;
  CHECK(run_campaign([](const Target&, std::uint32_t) { return silent(500); }, g).size() == 80);
}

TEST_CASE("a one-repetition campaign equals run_once with the derived seed") {
  std::mt19937_64 rng(6);
  const VictimTrace t = random_trace(rng, 50 * 500, 100);
  AttackConfig cfg = quiet_config({});
  cfg.noise.timer_hz = 1000;
  cfg.noise.cpu_hz = 1e6;
  cfg.targets = {{3, "x/3", {1, 2}}};
  cfg.repetitions = 1;
  cfg.seed = 99;
  const auto obs = run_campaign([&](const Target&, std::uint32_t) { return t; }, cfg);
  AttackConfig single = cfg;
  single.monitored_sets = {1, 2};
  CHECK(obs.at(0).counts == run_once(t, single, derive_run_seed(99, 0, 0, 0)).counts);
}

TEST_CASE("campaign results do not depend on thread count") {
  std::mt19937_64 rng(1);
  const VictimTrace t = random_trace(rng, 60 * 500, 200);
  AttackConfig cfg = quiet_config({});
  cfg.noise.timer_hz = 1000;
  cfg.noise.cpu_hz = 1e6;
  for (int i = 0; i < 4; ++i) cfg.targets.push_back({i, std::to_string(i), {SetIndex(2 * i)}});
  cfg.repetitions = 5;
  const auto one = run_campaign([&](const Target&, std::uint32_t) { return t; }, cfg);
  cfg.threads = 4;
  const auto four = run_campaign([&](const Target&, std::uint32_t) { return t; }, cfg);
  for (std::size_t i = 0; i < one.size(); ++i) CHECK(one[i].counts == four[i].counts);
}

TEST_CASE("campaign propagates factory errors") {
  AttackConfig cfg = quiet_config({});
  cfg.targets = {{0, "a", {0}}};
  CHECK_THROWS_AS(run_campaign([](const Target&, std::uint32_t) -> VictimTrace {
                    throw std::runtime_error("boom");
                  }, cfg),
                  std::runtime_error);
  cfg.targets.clear();
  CHECK_THROWS_AS(run_campaign([](const Target&, std::uint32_t) { return silent(1); }, cfg),
                  std::invalid_argument);
}

TEST_CASE("epoch_slice") {
  RunObservation o;
  o.sets = {4, 5};
  o.probes_per_epoch = 33;
  o.num_probes = 67;
  o.counts.assign(67 * 2, 0);
  SUBCASE("zeros") {
    const EpochAggregate a = epoch_slice(o);
    CHECK(a.sums.size() == 2);
    CHECK(a.sums[0] == std::vector<std::uint32_t>{0, 0});
  }
  SUBCASE("uniform ones sum to the epoch length") {
    std::fill(o.counts.begin(), o.counts.end(), 1);
    const EpochAggregate a = epoch_slice(o);
    REQUIRE(a.sums.size() == 2);
    for (const auto& e : a.sums) CHECK(e == std::vector<std::uint32_t>{33, 33});
  }
}

TEST_CASE("observation CSV round trip keeps every count") {
  std::mt19937_64 rng(13);
  AttackConfig cfg = quiet_config({});
  cfg.targets = {{2, "rsa/dp/2", {2, 3}}, {7, "rsa/dp/7", {12, 13}}};
  cfg.repetitions = 3;
  const auto obs = run_campaign(
      [&](const Target&, std::uint32_t r) {
        std::mt19937_64 local(r);
        VictimTrace t = random_trace(local, 70 * 500, 300);
        for (auto& e : t.events) e.address += 2 * 64;
        return t;
      },
      cfg);
  std::stringstream csv;
  write_observations_csv(csv, obs);
  const std::string text = csv.str();
  const auto back = read_observations_csv(csv, 33);
  REQUIRE(back.size() == obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    CHECK(back[i].run_id == obs[i].run_id);
    CHECK(back[i].target.id == obs[i].target.id);
    CHECK(back[i].num_probes == obs[i].num_probes);
    // sets are recovered in order of first appearance
    auto sorted_back = back[i].sets;
    std::sort(sorted_back.begin(), sorted_back.end());
    REQUIRE(sorted_back == obs[i].sets);
    for (std::uint64_t p = 0; p < obs[i].num_probes; ++p)
      for (std::size_t s = 0; s < obs[i].sets.size(); ++s) {
        const auto pos = static_cast<std::size_t>(
            std::find(back[i].sets.begin(), back[i].sets.end(), obs[i].sets[s]) -
            back[i].sets.begin());
        CHECK(back[i].count(p, pos) == obs[i].count(p, s));
      }
  }
  std::stringstream bad("wrong,header\n");
  CHECK_THROWS(read_observations_csv(bad, 33));
}
