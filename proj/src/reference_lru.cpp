#include "cachelab/reference_lru.hpp"

#include <random>

namespace cachelab {

ReferenceLru::ReferenceLru(CacheConfig config) : config_(config) {
  config_.validate();
  history_.resize(config_.num_sets);
}

AccessResult ReferenceLru::access(Address address, Owner owner) {
  const SetIndex set = addr_to_set(address, config_);
  const std::uint64_t tag = addr_to_tag(address, config_);
  auto& hist = history_[set];

  // Distinct lines, most recent first, with the owner from their latest fill.
  // Only the `associativity` most recent distinct lines can be resident.
  std::vector<Touch> recent;
  for (auto it = hist.rbegin(); it != hist.rend() && recent.size() < config_.associativity; ++it) {
    bool seen = false;
    for (const auto& r : recent) seen = seen || r.tag == it->tag;
    if (!seen) recent.push_back(*it);
  }

  AccessResult result;
  Owner line_owner = owner;
  for (std::size_t i = 0; i < recent.size(); ++i) {
    if (recent[i].tag == tag) {
      result.hit = true;
      line_owner = recent[i].owner;
    }
  }
  if (!result.hit) {
    ++misses_[static_cast<std::size_t>(owner)];
    if (recent.size() >= config_.associativity) {
      const Touch& lru = recent[config_.associativity - 1];
      result.evicted = CacheLineTag{lru.owner, lru.tag};
    }
  }
  hist.push_back({tag, line_owner});
  return result;
}

OracleSuiteResult run_lru_oracle_suite(std::uint64_t seed, std::uint64_t sequences,
                                       std::uint32_t max_length,
                                       std::shared_ptr<const ReplacementPolicy> policy) {
  // Small geometry keeps conflicts frequent.
  const CacheConfig config{64, 4, 4};
  std::mt19937_64 rng(seed);
  OracleSuiteResult out;
  for (std::uint64_t s = 0; s < sequences; ++s) {
    CacheState cache(config, policy);
    ReferenceLru ref(config);
    const std::uint32_t length = 1 + static_cast<std::uint32_t>(rng() % max_length);
    // Each owner draws from its own region so a line never changes hands.
    const std::uint64_t lines_per_owner = 2 + rng() % 24;
    bool clean = true;
    for (std::uint32_t i = 0; i < length; ++i) {
      const auto owner = static_cast<Owner>(rng() % kOwnerCount);
      const Address line = rng() % lines_per_owner;
      const Address address = (Address{static_cast<std::uint8_t>(owner)} << 32) +
                              line * config.line_size_bytes + rng() % config.line_size_bytes;
      const AccessResult got = cache.access(address, owner);
      const AccessResult want = ref.access(address, owner);
      if (!(got == want)) clean = false;
      ++out.accesses;
    }
    for (std::size_t o = 0; o < kOwnerCount; ++o)
      if (cache.misses(static_cast<Owner>(o)) != ref.misses(static_cast<Owner>(o))) clean = false;
    if (!clean) ++out.mismatches;
    ++out.sequences;
  }
  return out;
}

}  // namespace cachelab
