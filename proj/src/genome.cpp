#include "cachelab/genome.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cachelab::genome {

namespace {
constexpr char kAlphabet[4] = {'A', 'C', 'G', 'T'};
}

GenomeSequence::GenomeSequence(std::string b) : bases(std::move(b)) {
  for (char c : bases) encode_nucleotide(c);
}

void Microsatellite::validate() const {
  if (unit.size() < 2 || unit.size() > 5)
    throw std::invalid_argument("microsatellite unit must have 2-5 bases");
  for (char c : unit) encode_nucleotide(c);
  if (repeat_count < 5 || repeat_count > 50)
    throw std::invalid_argument("microsatellite repeat count must be in [5, 50]");
}

std::string Microsatellite::expand() const {
  std::string out;
  out.reserve(unit.size() * repeat_count);
  for (std::uint32_t i = 0; i < repeat_count; ++i) out += unit;
  return out;
}

std::uint32_t encode_nucleotide(char n) {
  switch (n) {
    case 'A': return 0;
    case 'C': return 1;
    case 'G': return 2;
    case 'T': return 3;
    default:
      throw std::invalid_argument(std::string("not a nucleotide: '") + n + "'");
  }
}

std::uint64_t kmer_index(std::string_view kmer, unsigned k) {
  if (kmer.size() != k)
    throw std::invalid_argument("k-mer length " + std::to_string(kmer.size()) +
                                " does not match k = " + std::to_string(k));
  std::uint64_t idx = 0;
  for (char n : kmer) idx = 4 * idx + encode_nucleotide(n);
  return idx;
}

HashIndex build_index(const GenomeSequence& genome, const HashIndexLayout& layout,
                      VictimTrace* trace, const CacheConfig& cache, const InsertionTiming& timing) {
  const unsigned k = layout.k;
  if (k == 0 || k > 16) throw std::invalid_argument("k must be in [1, 16]");
  if (genome.length() < k) throw std::invalid_argument("genome shorter than k");

  HashIndex index(layout.num_entries());
  const std::size_t count = genome.length() - k + 1;

  std::vector<SetIndex> free_sets;
  if (trace) {
    std::vector<bool> used(cache.num_sets, false);
    for (Address a = layout.base_address - layout.base_address % cache.line_size_bytes;
         a < layout.end_address(); a += cache.line_size_bytes)
      used[addr_to_set(a, cache)] = true;
    for (SetIndex s = 0; s < cache.num_sets; ++s)
      if (!used[s]) free_sets.push_back(s);
    if (free_sets.empty()) free_sets.push_back(0);
    trace->events.reserve(trace->events.size() + 2 * count);
  }
  const Address stride = cache.set_stride_bytes();
  const Address store_base = timing.store_base - timing.store_base % stride;
  const Cycle start = trace ? trace->duration_cycles : 0;

  const std::string_view bases = genome.bases;
  for (std::size_t pos = 0; pos < count; ++pos) {
    const std::uint64_t idx = kmer_index(bases.substr(pos, k), k);
    index[idx].push_back(static_cast<std::uint32_t>(pos));
    if (trace) {
      const Cycle t0 = start + pos * timing.insertion_cycles;
      const auto label = static_cast<std::int64_t>(pos);
      trace->events.push_back({t0 + timing.insertion_cycles / 4, layout.entry_address(idx),
                               EventKind::TableRead, label});
      const SetIndex s = free_sets[pos % free_sets.size()];
      const Address store = store_base + Address{s} * cache.line_size_bytes +
                            ((pos / free_sets.size()) % 64) * stride;
      trace->events.push_back(
          {t0 + timing.insertion_cycles / 2, store, EventKind::DataAccess, label});
    }
  }
  if (trace) trace->duration_cycles = start + count * timing.insertion_cycles;
  return index;
}

std::vector<std::pair<std::string, SetIndex>> microsatellite_cache_sets(
    const Microsatellite& msat, const HashIndexLayout& layout, const CacheConfig& cache) {
  const std::size_t len = msat.unit.size();
  if (len == 0) throw std::invalid_argument("empty microsatellite unit");
  for (char c : msat.unit) encode_nucleotide(c);
  if (layout.k < len)
    throw std::invalid_argument("k = " + std::to_string(layout.k) +
                                " is shorter than the repeat unit");
  std::string periodic;
  while (periodic.size() < len + layout.k) periodic += msat.unit;

  std::vector<std::pair<std::string, SetIndex>> out;
  for (std::size_t off = 0; off < len; ++off) {
    std::string kmer = periodic.substr(off, layout.k);
    const bool seen = std::any_of(out.begin(), out.end(),
                                  [&](const auto& p) { return p.first == kmer; });
    if (seen) continue;
    const SetIndex set = addr_to_set(layout.entry_address(kmer_index(kmer, layout.k)), cache);
    out.emplace_back(std::move(kmer), set);
  }
  return out;
}

std::vector<SetIndex> footprint(const std::string& unit, const HashIndexLayout& layout,
                                const CacheConfig& cache) {
  std::vector<SetIndex> sets;
  for (const auto& [kmer, set] : microsatellite_cache_sets({unit, 10}, layout, cache))
    sets.push_back(set);
  std::sort(sets.begin(), sets.end());
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
  return sets;
}

std::string random_bases(std::size_t length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::string out(length, 'A');
  for (auto& c : out) c = kAlphabet[rng() & 3u];
  return out;
}

void purge_kmers(std::string& bases, const std::vector<std::string>& forbidden,
                 std::uint64_t seed) {
  if (forbidden.empty()) return;
  const std::size_t k = forbidden.front().size();
  const std::set<std::string, std::less<>> banned(forbidden.begin(), forbidden.end());
  std::mt19937_64 rng(seed);
  for (std::size_t end = k; end <= bases.size(); ++end) {
    const std::size_t pos = end - 1;
    if (!banned.contains(std::string_view(bases).substr(end - k, k))) continue;
    const std::size_t first = rng() & 3u;
    for (std::size_t j = 1; j <= 4; ++j) {
      bases[pos] = kAlphabet[(first + j) & 3u];
      if (!banned.contains(std::string_view(bases).substr(end - k, k))) break;
    }
  }
}

GenomeSequence parse_genome_text(std::string_view text) {
  std::string bases;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.front() == '>') continue;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c)))
        bases.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return GenomeSequence(std::move(bases));
}

GenomeSequence read_genome_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open genome file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_genome_text(buf.str());
}

}  // namespace cachelab::genome
