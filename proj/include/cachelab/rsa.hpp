#pragma once

// CRT-RSA victim built on fixed-window exponentiation. The exponentiation
// calls into an ExpTracer, which turns the algorithm's table lookups into a
// cycle-stamped access trace against a simulated memory layout.

#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "cachelab/cache.hpp"
#include "cachelab/trace.hpp"

namespace cachelab::rsa {

using BigInt = mpz_class;

struct RsaSecret {
  BigInt p, q, n;
  BigInt e;     // public exponent
  BigInt d;     // private exponent
  BigInt dp, dq;
  BigInt q_inv; // q^-1 mod p
  unsigned bits = 0;

  /// Checks N = p*q and the CRT exponent congruences.
  bool is_consistent() const;
};

struct WindowSequence {
  unsigned k = 4;
  std::vector<std::uint32_t> windows;  // most significant first, windows[0] != 0
};

/// Base-2^k digits of `e`, most significant first. Throws for e < 1 or k outside [1, 8].
WindowSequence window_decompose(const BigInt& e, unsigned k);
BigInt reassemble(const WindowSequence& w);

/// Multiplier table g[1..2^k], each entry `entry_size_bytes` wide.
struct MultiplierTable {
  Address base_address = 0x10000;
  std::uint32_t entry_size_bytes = 128;
  std::uint32_t entries = 16;

  Address entry_address(std::uint32_t index) const {
    return base_address + Address{index - 1} * entry_size_bytes;
  }
  Address end_address() const { return base_address + Address{entries} * entry_size_bytes; }
  /// Cache sets occupied by g[index] in the contiguous layout.
  std::vector<SetIndex> entry_sets(std::uint32_t index, const CacheConfig& cache) const;
  /// Every set touched by the table region.
  std::vector<SetIndex> region_sets(const CacheConfig& cache) const;
};

struct ExpTiming {
  Cycle square_cycles = 1500;
  Cycle multiply_cycles = 10500;
  std::uint32_t word_bytes = 8;

  Cycle iteration_cycles(unsigned k) const { return k * square_cycles + multiply_cycles; }
};

/// Non-table victim data accesses that land in chosen cache sets.
struct SelfPollution {
  std::uint32_t accesses_per_iteration = 0;
  std::vector<SetIndex> sets;
  Address base_address = 0x80000;
};

enum class TableLayout { Contiguous, Interleaved };

class ExpTracer {
 public:
  ExpTracer(CacheConfig cache, MultiplierTable table, ExpTiming timing = {},
            SelfPollution pollution = {});

  /// Marks the start of an exponentiation; every window that follows is
  /// labeled relative to it.
  void begin_exponentiation(unsigned k);
  void end_exponentiation();

  void begin_window(bool leading);
  void square();
  /// Sequential word reads over g[value] (contiguous layout).
  void load_multiplier(std::uint32_t value);
  /// One read in every line of the interleaved table (scatter-gather layout).
  void gather_multiplier(std::uint32_t value);
  void end_window();

  const VictimTrace& trace() const { return trace_; }
  std::size_t exponentiation_count() const { return phases_.size(); }
  /// Events of one exponentiation, rebased to cycle 0.
  VictimTrace exponentiation_trace(std::size_t index) const;

 private:
  CacheConfig cache_;
  MultiplierTable table_;
  ExpTiming timing_;
  SelfPollution pollution_;
  VictimTrace trace_;
  std::vector<AccessEvent> pending_;
  struct Phase { std::size_t first_event; std::size_t end_event; Cycle start; Cycle end; };
  std::vector<Phase> phases_;
  unsigned k_ = 4;
  Cycle window_start_ = 0;
  std::int64_t window_index_ = -1;
  std::uint32_t squarings_ = 0;
  std::uint64_t pollution_cursor_ = 0;
};

/// a^e mod N with k-bit fixed windows. `tracer` may be null.
BigInt mod_exp_fixed_window(const BigInt& a, const BigInt& e, const BigInt& n, unsigned k,
                            ExpTracer* tracer = nullptr);

/// Same result as mod_exp_fixed_window, but every multiplier fetch touches
/// all table lines (interleaved storage).
BigInt mod_exp_scatter_gather(const BigInt& a, const BigInt& e, const BigInt& n, unsigned k,
                              ExpTracer* tracer = nullptr);

BigInt encrypt(const BigInt& m, const RsaSecret& key);

/// CRT decryption: one exponentiation mod p with d_p, one mod q with d_q,
/// recombined with Garner's formula.
BigInt decrypt_crt(const BigInt& ciphertext, const RsaSecret& key, unsigned k,
                   ExpTracer* tracer = nullptr, TableLayout layout = TableLayout::Contiguous);

/// Deterministic key generation for 512, 1024 or 2048-bit moduli.
RsaSecret keygen(unsigned bits, std::uint64_t seed);

/// Uniform value in [1, n) drawn deterministically from `seed`.
BigInt random_below(const BigInt& n, std::uint64_t seed);

}  // namespace cachelab::rsa
