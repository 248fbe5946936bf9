#pragma once

// k-mer hash-index construction (the victim) and the attacker-side mapping
// from microsatellite repeat units to the cache sets of their table entries.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cachelab/cache.hpp"
#include "cachelab/trace.hpp"

namespace cachelab::genome {

struct GenomeSequence {
  std::string bases;  // over {A, C, G, T}

  /// Throws std::invalid_argument on any non-nucleotide character.
  explicit GenomeSequence(std::string b);
  std::size_t length() const { return bases.size(); }
};

struct HashIndexLayout {
  unsigned k = 4;
  std::uint32_t entry_size_bytes = 8;
  Address base_address = 0;

  std::uint64_t num_entries() const { return std::uint64_t{1} << (2 * k); }
  Address entry_address(std::uint64_t index) const {
    return base_address + index * entry_size_bytes;
  }
  Address end_address() const { return entry_address(num_entries()); }
  std::uint32_t entries_per_line(const CacheConfig& cache) const {
    return cache.line_size_bytes / entry_size_bytes;
  }
};

struct Microsatellite {
  std::string unit;
  std::uint32_t repeat_count = 10;

  /// Unit of 2-5 nucleotides repeated 5-50 times.
  void validate() const;
  std::string expand() const;
};

struct InsertionTiming {
  Cycle insertion_cycles = 4125;
  // Position-array stores go here; they are steered away from the table's sets.
  Address store_base = Address{1} << 30;
};

using HashIndex = std::vector<std::vector<std::uint32_t>>;

std::uint32_t encode_nucleotide(char n);
std::uint64_t kmer_index(std::string_view kmer, unsigned k);

/// Builds the index and, when `trace` is non-null, records one bucket-pointer
/// read per insertion plus a position store outside the table's sets.
HashIndex build_index(const GenomeSequence& genome, const HashIndexLayout& layout,
                      VictimTrace* trace = nullptr, const CacheConfig& cache = {},
                      const InsertionTiming& timing = {});

/// Distinct k-mers a repeat of `msat.unit` streams through the sliding window,
/// in order of first appearance, each with the cache set of its table entry.
std::vector<std::pair<std::string, SetIndex>> microsatellite_cache_sets(
    const Microsatellite& msat, const HashIndexLayout& layout, const CacheConfig& cache);

/// Sorted distinct cache sets of a unit's rotations.
std::vector<SetIndex> footprint(const std::string& unit, const HashIndexLayout& layout,
                                const CacheConfig& cache);

/// Uniform random genome, deterministic in `seed`.
std::string random_bases(std::size_t length, std::uint64_t seed);

/// Rewrites bases so that no k-mer in `forbidden` occurs anywhere.
void purge_kmers(std::string& bases, const std::vector<std::string>& forbidden, std::uint64_t seed);

/// Plain text or FASTA: '>' header lines skipped, whitespace dropped,
/// letters upper-cased.
GenomeSequence read_genome_file(const std::filesystem::path& path);
GenomeSequence parse_genome_text(std::string_view text);

}  // namespace cachelab::genome
