#pragma once

// Brute-force LRU reference. Keeps the complete per-set access history and
// decides residency directly from it: a line is cached iff it is among the
// `associativity` most recently used distinct lines of its set. Used as the
// oracle for CacheState.

#include <cstdint>
#include <vector>

#include "cachelab/cache.hpp"

namespace cachelab {

class ReferenceLru {
 public:
  explicit ReferenceLru(CacheConfig config);

  AccessResult access(Address address, Owner owner);
  std::uint64_t misses(Owner owner) const { return misses_[static_cast<std::size_t>(owner)]; }

 private:
  struct Touch {
    std::uint64_t tag;
    Owner owner;  // owner of the line when it was brought in
  };

  CacheConfig config_;
  std::vector<std::vector<Touch>> history_;
  std::array<std::uint64_t, kOwnerCount> misses_{};
};

struct OracleSuiteResult {
  std::uint64_t sequences = 0;
  std::uint64_t accesses = 0;
  std::uint64_t mismatches = 0;
};

/// Replays `sequences` random mixed-owner access streams (each up to
/// `max_length` long) through CacheState and ReferenceLru and counts
/// disagreements in hit/miss/evicted-line outcomes.
OracleSuiteResult run_lru_oracle_suite(std::uint64_t seed, std::uint64_t sequences,
                                       std::uint32_t max_length,
                                       std::shared_ptr<const ReplacementPolicy> policy = nullptr);

}  // namespace cachelab
