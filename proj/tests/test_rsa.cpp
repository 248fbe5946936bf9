#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "cachelab/rsa.hpp"

using namespace cachelab;
using namespace cachelab::rsa;

namespace {

// Right-to-left square-and-multiply, no windows.
BigInt naive_pow(BigInt a, BigInt e, const BigInt& n) {
  BigInt r = 1;
  a %= n;
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) r = (r * a) % n;
    a = (a * a) % n;
    e >>= 1;
  }
  return r % n;
}

BigInt random_bits(std::mt19937_64& rng, unsigned bits) {
  BigInt x = 0;
  for (unsigned i = 0; i < bits; i += 32) {
    x <<= 32;
    x += static_cast<unsigned long>(rng() & 0xffffffffu);
  }
  return x >> ((bits + 31) / 32 * 32 - bits);
}

std::vector<AccessEvent> reads(const VictimTrace& t) {
  std::vector<AccessEvent> out;
  for (const auto& e : t.events)
    if (e.kind == EventKind::TableRead) out.push_back(e);
  return out;
}

}  // namespace

TEST_CASE("window decomposition examples") {
  CHECK(window_decompose(0xB4, 4).windows == std::vector<std::uint32_t>{0xB, 0x4});
  CHECK(window_decompose(1, 4).windows == std::vector<std::uint32_t>{1});
  const BigInt all_ones = (BigInt(1) << 1024) - 1;
  const WindowSequence w = window_decompose(all_ones, 4);
  CHECK(w.windows.size() == 256);
  CHECK(std::all_of(w.windows.begin(), w.windows.end(), [](auto d) { return d == 0xF; }));
  CHECK_THROWS_AS(window_decompose(0, 4), std::invalid_argument);
  CHECK_THROWS_AS(window_decompose(5, 0), std::invalid_argument);
  CHECK_THROWS_AS(window_decompose(5, 9), std::invalid_argument);
}

TEST_CASE("window decomposition round-trips and leads with a nonzero digit") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const unsigned k = 1 + rng() % 8;
    const BigInt e = random_bits(rng, 1 + rng() % 700) + 1;
    const WindowSequence w = window_decompose(e, k);
    CHECK(reassemble(w) == e);
    CHECK(w.windows.front() != 0);
    for (auto d : w.windows) CHECK(d < (1u << k));
  }
}

TEST_CASE("mod_exp small example") {
  CHECK(mod_exp_fixed_window(2, 5, 33, 2) == 32);
  CHECK(mod_exp_scatter_gather(2, 5, 33, 2) == 32);
  CHECK_THROWS_AS(mod_exp_fixed_window(2, 0, 33, 4), std::invalid_argument);
  CHECK_THROWS_AS(mod_exp_fixed_window(33, 3, 33, 4), std::invalid_argument);
}

TEST_CASE("mod_exp agrees with square-and-multiply on random inputs") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 1000; ++i) {
    const unsigned k = 1 + rng() % 6;
    BigInt n = random_bits(rng, 16 + rng() % 300);
    if (n < 3) n += 3;
    const BigInt a = 1 + BigInt(random_bits(rng, 320) % (n - 1));
    const BigInt e = 1 + random_bits(rng, 1 + rng() % 300);
    const BigInt want = naive_pow(a, e, n);
    REQUIRE(mod_exp_fixed_window(a, e, n, k) == want);
    REQUIRE(mod_exp_scatter_gather(a, e, n, k) == want);
  }
}

TEST_CASE("trace of windows [3, 0, 7]") {
  const MultiplierTable table;
  ExpTracer tracer({}, table);
  const BigInt e = 3 * 256 + 0 * 16 + 7;
  mod_exp_fixed_window(5, e, BigInt(1000003), 4, &tracer);
  const auto rd = reads(tracer.trace());
  REQUIRE(rd.size() == 32);
  std::map<std::int64_t, std::vector<AccessEvent>> by_window;
  for (const auto& r : rd) by_window[*r.label].push_back(r);
  CHECK(by_window.count(1) == 0);
  REQUIRE(by_window[0].size() == 16);
  REQUIRE(by_window[2].size() == 16);
  for (int w : {0, 2}) {
    const std::uint32_t value = w == 0 ? 3 : 7;
    const auto& v = by_window[w];
    for (std::size_t i = 0; i < v.size(); ++i) {
      CHECK(v[i].address == table.entry_address(value) + 8 * i);
      if (i > 0) CHECK(v[i].cycle > v[i - 1].cycle);
    }
  }
  CHECK(tracer.trace().is_ordered());
  CHECK(tracer.trace().duration_cycles == 3 * ExpTiming{}.iteration_cycles(4));
}

TEST_CASE("a = 1 still loads g[w] for every nonzero window") {
  ExpTracer tracer({}, MultiplierTable{});
  CHECK(mod_exp_fixed_window(1, 0x1234, 101, 4, &tracer) == 1);
  CHECK(reads(tracer.trace()).size() == 4 * 16);
}

TEST_CASE("every table read sits in its window's entry and nothing else is read") {
  std::mt19937_64 rng(21);
  const MultiplierTable table;
  const CacheConfig cache;
  for (int trial = 0; trial < 50; ++trial) {
    const BigInt e = 1 + random_bits(rng, 256);
    ExpTracer tracer(cache, table);
    mod_exp_fixed_window(7, e, (BigInt(1) << 127) - 1, 4, &tracer);
    const WindowSequence ws = window_decompose(e, 4);
    std::vector<std::uint32_t> counted(ws.windows.size(), 0);
    for (const auto& r : reads(tracer.trace())) {
      const auto w = static_cast<std::size_t>(*r.label);
      const std::uint32_t value = ws.windows[w];
      REQUIRE(value != 0);
      CHECK(r.address >= table.entry_address(value));
      CHECK(r.address < table.entry_address(value) + table.entry_size_bytes);
      ++counted[w];
    }
    for (std::size_t w = 0; w < ws.windows.size(); ++w)
      CHECK(counted[w] == (ws.windows[w] == 0 ? 0u : 16u));
  }
}

TEST_CASE("table entries map to two sets each") {
  const MultiplierTable table;
  const CacheConfig cache;
  CHECK(table.entry_sets(1, cache) == std::vector<SetIndex>{0, 1});
  CHECK(table.entry_sets(16, cache) == std::vector<SetIndex>{30, 31});
  CHECK(table.region_sets(cache).size() == 32);
}

TEST_CASE("self-pollution adds data accesses in the chosen sets") {
  SelfPollution pol{4, {20, 21}};
  ExpTracer tracer({}, MultiplierTable{}, {}, pol);
  mod_exp_fixed_window(3, 0xFF, 1009, 4, &tracer);
  std::uint32_t data = 0;
  for (const auto& e : tracer.trace().events)
    if (e.kind == EventKind::DataAccess) {
      ++data;
      const SetIndex s = addr_to_set(e.address, {});
      CHECK((s == 20 || s == 21));
      CHECK_FALSE(e.label.has_value());
    }
  CHECK(data == 2 * 4);
}

TEST_CASE("scatter-gather touches every table line once per nonzero window") {
  const MultiplierTable table;
  const CacheConfig cache;
  ExpTracer tracer(cache, table);
  const BigInt e = 0x9A05;
  mod_exp_scatter_gather(11, e, 65521, 4, &tracer);
  std::map<std::int64_t, std::set<Address>> lines;
  std::map<std::int64_t, int> count;
  for (const auto& r : reads(tracer.trace())) {
    lines[*r.label].insert(r.address / 64);
    ++count[*r.label];
  }
  CHECK(lines.size() == 3);  // the 0 window fetches nothing
  for (const auto& [w, l] : lines) {
    CHECK(l.size() == 32);
    CHECK(count[w] == 32);
  }
}

TEST_CASE("scatter-gather footprints are identical for exponents with equal zero-window counts") {
  std::mt19937_64 rng(8);
  const CacheConfig cache;
  auto set_multiset = [&](const BigInt& e) {
    ExpTracer tracer(cache, MultiplierTable{});
    mod_exp_scatter_gather(5, e, 1000003, 4, &tracer);
    std::map<SetIndex, int> m;
    for (const auto& r : reads(tracer.trace())) ++m[addr_to_set(r.address, cache)];
    return m;
  };
  for (int trial = 0; trial < 50; ++trial) {
    BigInt a = 0, b = 0;
    for (int i = 0; i < 16; ++i) {
      a = a * 16 + (1 + rng() % 15);
      b = b * 16 + (1 + rng() % 15);
    }
    CHECK(set_multiset(a) == set_multiset(b));
  }
}

TEST_CASE("CRT decryption round trip") {
  const RsaSecret key = keygen(2048, 4);
  CHECK(key.is_consistent());
  CHECK(key.n == key.p * key.q);
  CHECK(mpz_sizeinbase(key.n.get_mpz_t(), 2) == 2048);
  CHECK(decrypt_crt(encrypt(42, key), key, 4) == 42);
  CHECK(decrypt_crt(1, key, 4) == 1);
  CHECK(decrypt_crt(encrypt(42, key), key, 4, nullptr, TableLayout::Interleaved) == 42);
  CHECK_THROWS_AS(decrypt_crt(0, key, 4), std::invalid_argument);
}

TEST_CASE("CRT decryption equals plain c^d mod N") {
  const RsaSecret key = keygen(512, 9);
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const BigInt c = random_below(key.n, s);
    BigInt want;
    mpz_powm(want.get_mpz_t(), c.get_mpz_t(), key.d.get_mpz_t(), key.n.get_mpz_t());
    CHECK(decrypt_crt(c, key, 4) == want);
  }
}

TEST_CASE("decryption with a tracer records two exponentiations") {
  const RsaSecret key = keygen(512, 2);
  ExpTracer tracer({}, MultiplierTable{});
  decrypt_crt(encrypt(99, key), key, 4, &tracer);
  REQUIRE(tracer.exponentiation_count() == 2);
  const VictimTrace dp = tracer.exponentiation_trace(0);
  const std::size_t windows = window_decompose(key.dp, 4).windows.size();
  CHECK(dp.duration_cycles == windows * ExpTiming{}.iteration_cycles(4));
  CHECK(dp.is_ordered());
}

TEST_CASE("keygen is deterministic and round-trips") {
  const RsaSecret a = keygen(1024, 77), b = keygen(1024, 77);
  CHECK(a.n == b.n);
  CHECK(a.d == b.d);
  CHECK(keygen(1024, 78).n != a.n);
  CHECK_THROWS_AS(keygen(1000, 1), std::invalid_argument);
  for (std::uint64_t s = 1; s <= 100; ++s) {
    const BigInt m = random_below(a.n, s);
    REQUIRE(decrypt_crt(encrypt(m, a), a, 4) == m);
  }
}
