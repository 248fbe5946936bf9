#include "cachelab/trace.hpp"

#include <algorithm>

namespace cachelab {

void VictimTrace::append(const VictimTrace& other) {
  const Cycle offset = duration_cycles;
  events.reserve(events.size() + other.events.size());
  for (AccessEvent e : other.events) {
    e.cycle += offset;
    events.push_back(e);
  }
  duration_cycles += other.duration_cycles;
}

bool VictimTrace::is_ordered() const {
  return std::is_sorted(events.begin(), events.end(),
                        [](const AccessEvent& a, const AccessEvent& b) { return a.cycle < b.cycle; });
}

void write_trace_csv(std::ostream& out, const VictimTrace& trace) {
  out << "cycle,address,label\n";
  for (const auto& e : trace.events) {
    if (!e.touches_memory()) continue;
    out << e.cycle << ',' << e.address << ',';
    if (e.label) out << *e.label;
    out << '\n';
  }
}

}  // namespace cachelab
