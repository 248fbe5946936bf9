#include "cachelab/cache.hpp"

#include <algorithm>
#include <bit>

namespace cachelab {

void CacheConfig::validate() const {
  if (line_size_bytes == 0 || num_sets == 0 || associativity == 0)
    throw std::invalid_argument("cache geometry fields must be positive");
  if (!std::has_single_bit(line_size_bytes))
    throw std::invalid_argument("line_size_bytes must be a power of two");
  if (!std::has_single_bit(num_sets))
    throw std::invalid_argument("num_sets must be a power of two");
}

std::string to_string(Owner owner) {
  switch (owner) {
    case Owner::Attacker: return "attacker";
    case Owner::Victim: return "victim";
    case Owner::OsNoise: return "os-noise";
  }
  return "unknown";
}

SetIndex addr_to_set(Address address, const CacheConfig& config) {
  return static_cast<SetIndex>((address / config.line_size_bytes) % config.num_sets);
}

std::uint64_t addr_to_tag(Address address, const CacheConfig& config) {
  return address / config.line_size_bytes / config.num_sets;
}

void LruPolicy::on_hit(std::vector<CacheLineTag>& ways, std::size_t position) const {
  std::rotate(ways.begin(), ways.begin() + static_cast<std::ptrdiff_t>(position),
              ways.begin() + static_cast<std::ptrdiff_t>(position) + 1);
}

std::optional<CacheLineTag> LruPolicy::on_miss(std::vector<CacheLineTag>& ways,
                                               const CacheLineTag& incoming,
                                               std::uint32_t associativity) const {
  std::optional<CacheLineTag> evicted;
  if (ways.size() >= associativity) {
    evicted = ways.back();
    ways.pop_back();
  }
  ways.insert(ways.begin(), incoming);
  return evicted;
}

void MruFaultPolicy::on_hit(std::vector<CacheLineTag>& ways, std::size_t position) const {
  LruPolicy{}.on_hit(ways, position);
}

std::optional<CacheLineTag> MruFaultPolicy::on_miss(std::vector<CacheLineTag>& ways,
                                                    const CacheLineTag& incoming,
                                                    std::uint32_t associativity) const {
  std::optional<CacheLineTag> evicted;
  if (ways.size() >= associativity) {
    evicted = ways.front();
    ways.erase(ways.begin());
  }
  ways.insert(ways.begin(), incoming);
  return evicted;
}

CacheState::CacheState(CacheConfig config, std::shared_ptr<const ReplacementPolicy> policy)
    : config_(config), policy_(std::move(policy)) {
  config_.validate();
  if (!policy_) policy_ = std::make_shared<LruPolicy>();
  if (kAttackerBase % config_.set_stride_bytes() != 0)
    throw std::invalid_argument("cache way size does not divide the attacker base");
  sets_.resize(config_.num_sets);
  for (auto& s : sets_) s.reserve(config_.associativity + 1);
  primed_.assign(config_.num_sets, false);
}

void CacheState::check_set(SetIndex set) const {
  if (set >= config_.num_sets)
    throw std::out_of_range("set index " + std::to_string(set) + " out of range");
}

std::optional<std::size_t> CacheState::find(SetIndex set, std::uint64_t tag) const {
  const auto& ways = sets_[set];
  for (std::size_t i = 0; i < ways.size(); ++i)
    if (ways[i].address_tag == tag) return i;
  return std::nullopt;
}

AccessResult CacheState::access(Address address, Owner owner) {
  const SetIndex set = addr_to_set(address, config_);
  const std::uint64_t tag = addr_to_tag(address, config_);
  auto& ways = sets_[set];
  if (auto pos = find(set, tag)) {
    policy_->on_hit(ways, *pos);
    return {true, std::nullopt};
  }
  ++misses_[static_cast<std::size_t>(owner)];
  return {false, policy_->on_miss(ways, CacheLineTag{owner, tag}, config_.associativity)};
}

Address CacheState::attacker_line_address(SetIndex set, std::uint32_t way) const {
  return kAttackerBase + Address{way} * config_.set_stride_bytes() +
         Address{set} * config_.line_size_bytes;
}

void CacheState::prime(SetIndex set) {
  check_set(set);
  for (std::uint32_t w = 0; w < config_.associativity; ++w)
    access(attacker_line_address(set, w), Owner::Attacker);
  primed_[set] = true;
}

std::uint32_t CacheState::probe(SetIndex set) {
  check_set(set);
  if (!primed_[set])
    throw ProbeError("probe of set " + std::to_string(set) + " before it was primed");
  std::vector<std::uint32_t> missing;
  for (std::uint32_t w = 0; w < config_.associativity; ++w) {
    const Address a = attacker_line_address(set, w);
    if (find(set, addr_to_tag(a, config_)))
      access(a, Owner::Attacker);
    else
      missing.push_back(w);
  }
  std::uint32_t count = 0;
  for (std::uint32_t w : missing)
    if (!access(attacker_line_address(set, w), Owner::Attacker).hit) ++count;
  return count;
}

bool CacheState::is_primed(SetIndex set) const {
  check_set(set);
  return primed_[set];
}

const std::vector<CacheLineTag>& CacheState::ways(SetIndex set) const {
  check_set(set);
  return sets_[set];
}

}  // namespace cachelab
