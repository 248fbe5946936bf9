#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "cachelab/cache.hpp"

namespace cachelab {

using Cycle = std::uint64_t;

enum class EventKind : std::uint8_t {
  TableRead,  // secret-dependent lookup (multiplier load, bucket pointer)
  DataAccess, // unrelated victim data: self-pollution, position stores
  Square,     // squaring marker, touches no memory
};

struct AccessEvent {
  Cycle cycle = 0;
  Address address = 0;
  EventKind kind = EventKind::TableRead;
  // Ground truth for evaluation only (window index or genome position).
  // The attack engine never reads it.
  std::optional<std::int64_t> label;

  bool touches_memory() const { return kind != EventKind::Square; }
  friend bool operator==(const AccessEvent&, const AccessEvent&) = default;
};

/// A victim's access stream in non-decreasing cycle order, plus the cycle at
/// which the victim finished.
struct VictimTrace {
  std::vector<AccessEvent> events;
  Cycle duration_cycles = 0;

  /// Appends `other` shifted to start at this trace's end.
  void append(const VictimTrace& other);
  bool is_ordered() const;
};

/// Writes memory-touching events as `cycle,address,label` (label blank when absent).
void write_trace_csv(std::ostream& out, const VictimTrace& trace);

}  // namespace cachelab
