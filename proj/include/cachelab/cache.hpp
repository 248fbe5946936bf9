#pragma once

// Set-associative L1 data cache model with owner-tagged lines.
//
// Each set is a way-list ordered most-recent-first. Replacement is delegated
// to a ReplacementPolicy so alternative policies can be swapped in; the
// default is strict LRU. Addresses are flat (identity-mapped) byte addresses.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cachelab {

using Address = std::uint64_t;
using SetIndex = std::uint32_t;

struct CacheConfig {
  std::uint32_t line_size_bytes = 64;
  std::uint32_t num_sets = 64;
  std::uint32_t associativity = 8;

  /// Throws std::invalid_argument unless line size and set count are powers
  /// of two and every field is positive.
  void validate() const;
  std::uint64_t capacity_bytes() const {
    return std::uint64_t{line_size_bytes} * num_sets * associativity;
  }
  /// Byte distance between two addresses that map to the same set.
  std::uint64_t set_stride_bytes() const {
    return std::uint64_t{line_size_bytes} * num_sets;
  }
};

enum class Owner : std::uint8_t { Attacker = 0, Victim = 1, OsNoise = 2 };
inline constexpr std::size_t kOwnerCount = 3;

std::string to_string(Owner owner);

struct CacheLineTag {
  Owner owner = Owner::Victim;
  std::uint64_t address_tag = 0;

  friend bool operator==(const CacheLineTag&, const CacheLineTag&) = default;
};

struct AccessResult {
  bool hit = false;
  std::optional<CacheLineTag> evicted;

  friend bool operator==(const AccessResult&, const AccessResult&) = default;
};

SetIndex addr_to_set(Address address, const CacheConfig& config);
std::uint64_t addr_to_tag(Address address, const CacheConfig& config);

/// Replacement strategy over a most-recent-first way-list.
class ReplacementPolicy {
 public:
  virtual ~ReplacementPolicy() = default;
  virtual std::string name() const = 0;
  /// Called when ways[position] is hit.
  virtual void on_hit(std::vector<CacheLineTag>& ways, std::size_t position) const = 0;
  /// Inserts a missing line; returns the evicted line if the set was full.
  virtual std::optional<CacheLineTag> on_miss(std::vector<CacheLineTag>& ways,
                                              const CacheLineTag& incoming,
                                              std::uint32_t associativity) const = 0;
};

class LruPolicy final : public ReplacementPolicy {
 public:
  std::string name() const override { return "lru"; }
  void on_hit(std::vector<CacheLineTag>& ways, std::size_t position) const override;
  std::optional<CacheLineTag> on_miss(std::vector<CacheLineTag>& ways,
                                      const CacheLineTag& incoming,
                                      std::uint32_t associativity) const override;
};

/// Deliberately broken policy (evicts the most recent line). Fault-injection
/// hook for the self-test.
class MruFaultPolicy final : public ReplacementPolicy {
 public:
  std::string name() const override { return "mru-fault"; }
  void on_hit(std::vector<CacheLineTag>& ways, std::size_t position) const override;
  std::optional<CacheLineTag> on_miss(std::vector<CacheLineTag>& ways,
                                      const CacheLineTag& incoming,
                                      std::uint32_t associativity) const override;
};

class ProbeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class CacheState {
 public:
  /// Start of the attacker's priming buffer. Way w of set s lives at
  /// kAttackerBase + w * set_stride + s * line_size.
  static constexpr Address kAttackerBase = Address{1} << 40;

  explicit CacheState(CacheConfig config = {},
                      std::shared_ptr<const ReplacementPolicy> policy = nullptr);

  const CacheConfig& config() const { return config_; }
  const ReplacementPolicy& policy() const { return *policy_; }

  AccessResult access(Address address, Owner owner);

  /// Fills every way of `set` with attacker lines, accessed in way order.
  void prime(SetIndex set);

  /// Re-accesses the attacker's priming lines of `set` and returns how many
  /// missed. Surviving lines are touched first, so the refill only displaces
  /// foreign lines and the set ends up primed again.
  std::uint32_t probe(SetIndex set);

  bool is_primed(SetIndex set) const;
  Address attacker_line_address(SetIndex set, std::uint32_t way) const;

  /// Most-recent-first contents of one set.
  const std::vector<CacheLineTag>& ways(SetIndex set) const;
  std::uint64_t misses(Owner owner) const { return misses_[static_cast<std::size_t>(owner)]; }

  friend bool operator==(const CacheState& a, const CacheState& b) {
    return a.sets_ == b.sets_ && a.misses_ == b.misses_ && a.primed_ == b.primed_;
  }

 private:
  void check_set(SetIndex set) const;
  std::optional<std::size_t> find(SetIndex set, std::uint64_t tag) const;

  CacheConfig config_;
  std::shared_ptr<const ReplacementPolicy> policy_;
  std::vector<std::vector<CacheLineTag>> sets_;
  std::vector<bool> primed_;
  std::array<std::uint64_t, kOwnerCount> misses_{};
};

}  // namespace cachelab
