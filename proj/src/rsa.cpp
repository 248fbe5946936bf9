#include "cachelab/rsa.hpp"

#include <algorithm>
#include <stdexcept>

namespace cachelab::rsa {

bool RsaSecret::is_consistent() const {
  if (n != p * q) return false;
  const BigInt pm1 = p - 1, qm1 = q - 1;
  BigInt r1 = d % pm1, r2 = d % qm1;
  if (r1 != dp || r2 != dq) return false;
  BigInt check = (q * q_inv) % p;
  return check == 1;
}

WindowSequence window_decompose(const BigInt& e, unsigned k) {
  if (k < 1 || k > 8) throw std::invalid_argument("window width must be in [1, 8]");
  if (e < 1) throw std::invalid_argument("exponent must be positive");
  const std::size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
  const std::size_t count = (bits + k - 1) / k;
  WindowSequence out{k, std::vector<std::uint32_t>(count, 0)};
  for (std::size_t i = 0; i < count; ++i) {
    // windows[0] holds the highest-order digit
    const std::size_t low_bit = (count - 1 - i) * k;
    std::uint32_t w = 0;
    for (unsigned b = 0; b < k; ++b)
      if (mpz_tstbit(e.get_mpz_t(), low_bit + b)) w |= 1u << b;
    out.windows[i] = w;
  }
  return out;
}

BigInt reassemble(const WindowSequence& w) {
  BigInt x = 0;
  for (std::uint32_t digit : w.windows) {
    x <<= w.k;
    x += digit;
  }
  return x;
}

std::vector<SetIndex> MultiplierTable::entry_sets(std::uint32_t index,
                                                  const CacheConfig& cache) const {
  std::vector<SetIndex> sets;
  const Address begin = entry_address(index);
  for (Address a = begin - begin % cache.line_size_bytes; a < begin + entry_size_bytes;
       a += cache.line_size_bytes)
    sets.push_back(addr_to_set(a, cache));
  return sets;
}

std::vector<SetIndex> MultiplierTable::region_sets(const CacheConfig& cache) const {
  std::vector<SetIndex> sets;
  for (Address a = base_address - base_address % cache.line_size_bytes; a < end_address();
       a += cache.line_size_bytes)
    sets.push_back(addr_to_set(a, cache));
  std::sort(sets.begin(), sets.end());
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
  return sets;
}

ExpTracer::ExpTracer(CacheConfig cache, MultiplierTable table, ExpTiming timing,
                     SelfPollution pollution)
    : cache_(cache), table_(table), timing_(timing), pollution_(std::move(pollution)) {
  cache_.validate();
  if (timing_.word_bytes == 0 || table_.entry_size_bytes % timing_.word_bytes != 0)
    throw std::invalid_argument("entry size must be a multiple of the word size");
  if (pollution_.accesses_per_iteration > 0 && pollution_.sets.empty())
    throw std::invalid_argument("self-pollution needs at least one target set");
}

void ExpTracer::begin_exponentiation(unsigned k) {
  k_ = k;
  window_index_ = -1;
  phases_.push_back({trace_.events.size(), trace_.events.size(), trace_.duration_cycles,
                     trace_.duration_cycles});
}

void ExpTracer::end_exponentiation() {
  if (phases_.empty()) throw std::logic_error("end_exponentiation without begin");
  phases_.back().end_event = trace_.events.size();
  phases_.back().end = trace_.duration_cycles;
}

void ExpTracer::begin_window(bool leading) {
  (void)leading;
  ++window_index_;
  window_start_ = trace_.duration_cycles;
  squarings_ = 0;
  pending_.clear();
}

void ExpTracer::square() {
  pending_.push_back({window_start_ + Cycle{squarings_} * timing_.square_cycles, 0,
                      EventKind::Square, window_index_});
  ++squarings_;
}

void ExpTracer::load_multiplier(std::uint32_t value) {
  const std::uint32_t reads = table_.entry_size_bytes / timing_.word_bytes;
  const Cycle spacing = timing_.multiply_cycles / reads;
  const Cycle start = window_start_ + Cycle{k_} * timing_.square_cycles;
  const Address entry = table_.entry_address(value);
  for (std::uint32_t r = 0; r < reads; ++r)
    pending_.push_back({start + r * spacing + spacing / 2, entry + Address{r} * timing_.word_bytes,
                        EventKind::TableRead, window_index_});
}

void ExpTracer::gather_multiplier(std::uint32_t value) {
  const Address begin = table_.base_address;
  const std::uint32_t lines = static_cast<std::uint32_t>(
      (table_.end_address() - begin + cache_.line_size_bytes - 1) / cache_.line_size_bytes);
  const Cycle spacing = timing_.multiply_cycles / lines;
  const Cycle start = window_start_ + Cycle{k_} * timing_.square_cycles;
  const Address offset = (value - 1) % cache_.line_size_bytes;
  for (std::uint32_t l = 0; l < lines; ++l)
    pending_.push_back({start + l * spacing + spacing / 2,
                        begin + Address{l} * cache_.line_size_bytes + offset, EventKind::TableRead,
                        window_index_});
}

void ExpTracer::end_window() {
  const Cycle length = timing_.iteration_cycles(k_);
  const std::uint32_t n = pollution_.accesses_per_iteration;
  for (std::uint32_t j = 0; j < n; ++j) {
    const SetIndex set = pollution_.sets[pollution_cursor_++ % pollution_.sets.size()];
    const Address addr = pollution_.base_address + Address{set} * cache_.line_size_bytes;
    pending_.push_back({window_start_ + (2 * j + 1) * length / (2 * n), addr,
                        EventKind::DataAccess, std::nullopt});
  }
  std::stable_sort(pending_.begin(), pending_.end(),
                   [](const AccessEvent& a, const AccessEvent& b) { return a.cycle < b.cycle; });
  trace_.events.insert(trace_.events.end(), pending_.begin(), pending_.end());
  pending_.clear();
  trace_.duration_cycles = window_start_ + length;
}

VictimTrace ExpTracer::exponentiation_trace(std::size_t index) const {
  const Phase& ph = phases_.at(index);
  VictimTrace out;
  out.duration_cycles = ph.end - ph.start;
  out.events.reserve(ph.end_event - ph.first_event);
  for (std::size_t i = ph.first_event; i < ph.end_event; ++i) {
    AccessEvent e = trace_.events[i];
    e.cycle -= ph.start;
    out.events.push_back(e);
  }
  return out;
}

namespace {

void check_domain(const BigInt& a, const BigInt& e, const BigInt& n) {
  if (n < 2) throw std::invalid_argument("modulus must be at least 2");
  if (a <= 0 || a >= n) throw std::invalid_argument("base must satisfy 0 < a < N");
  if (e < 1) throw std::invalid_argument("exponent must be positive");
}

std::vector<BigInt> precompute(const BigInt& a, const BigInt& n, unsigned k) {
  const std::uint32_t count = 1u << k;
  std::vector<BigInt> g(count + 1);
  g[1] = a;
  for (std::uint32_t i = 2; i <= count; ++i) g[i] = (g[i - 1] * a) % n;
  return g;
}

template <typename Fetch>
BigInt windowed_power(const BigInt& a, const BigInt& e, const BigInt& n, unsigned k,
                      ExpTracer* tracer, Fetch fetch) {
  check_domain(a, e, n);
  const WindowSequence ws = window_decompose(e, k);
  const std::vector<BigInt> g = precompute(a, n, k);
  if (tracer) tracer->begin_exponentiation(k);

  if (tracer) tracer->begin_window(true);
  BigInt x = g[ws.windows[0]];
  if (tracer) fetch(*tracer, ws.windows[0]);
  if (tracer) tracer->end_window();

  for (std::size_t i = 1; i < ws.windows.size(); ++i) {
    if (tracer) tracer->begin_window(false);
    for (unsigned s = 0; s < k; ++s) {
      x = (x * x) % n;
      if (tracer) tracer->square();
    }
    if (const std::uint32_t w = ws.windows[i]; w != 0) {
      x = (g[w] * x) % n;
      if (tracer) fetch(*tracer, w);
    }
    if (tracer) tracer->end_window();
  }
  if (tracer) tracer->end_exponentiation();
  return x;
}

}  // namespace

BigInt mod_exp_fixed_window(const BigInt& a, const BigInt& e, const BigInt& n, unsigned k,
                            ExpTracer* tracer) {
  return windowed_power(a, e, n, k, tracer,
                        [](ExpTracer& t, std::uint32_t w) { t.load_multiplier(w); });
}

BigInt mod_exp_scatter_gather(const BigInt& a, const BigInt& e, const BigInt& n, unsigned k,
                              ExpTracer* tracer) {
  return windowed_power(a, e, n, k, tracer,
                        [](ExpTracer& t, std::uint32_t w) { t.gather_multiplier(w); });
}

BigInt encrypt(const BigInt& m, const RsaSecret& key) {
  BigInt c;
  mpz_powm(c.get_mpz_t(), m.get_mpz_t(), key.e.get_mpz_t(), key.n.get_mpz_t());
  return c;
}

BigInt decrypt_crt(const BigInt& ciphertext, const RsaSecret& key, unsigned k, ExpTracer* tracer,
                   TableLayout layout) {
  if (ciphertext <= 0 || ciphertext >= key.n)
    throw std::invalid_argument("ciphertext must satisfy 0 < c < N");
  const auto power = layout == TableLayout::Contiguous ? mod_exp_fixed_window
                                                       : mod_exp_scatter_gather;
  const BigInt cp = ciphertext % key.p;
  const BigInt cq = ciphertext % key.q;
  // A residue of zero means c shares a factor with N; the half-result is zero.
  const BigInt mp = cp == 0 ? BigInt(0) : power(cp, key.dp, key.p, k, tracer);
  const BigInt mq = cq == 0 ? BigInt(0) : power(cq, key.dq, key.q, k, tracer);
  BigInt h = (key.q_inv * (mp - mq)) % key.p;
  if (h < 0) h += key.p;
  return mq + h * key.q;
}

namespace {

BigInt random_prime(gmp_randclass& rng, unsigned bits, const BigInt& e) {
  for (;;) {
    BigInt candidate = rng.get_z_bits(bits);
    mpz_setbit(candidate.get_mpz_t(), bits - 1);
    mpz_setbit(candidate.get_mpz_t(), bits - 2);
    mpz_setbit(candidate.get_mpz_t(), 0);
    BigInt p;
    mpz_nextprime(p.get_mpz_t(), candidate.get_mpz_t());
    if (mpz_sizeinbase(p.get_mpz_t(), 2) != bits) continue;
    BigInt g;
    const BigInt pm1 = p - 1;
    mpz_gcd(g.get_mpz_t(), pm1.get_mpz_t(), e.get_mpz_t());
    if (g == 1) return p;
  }
}

}  // namespace

RsaSecret keygen(unsigned bits, std::uint64_t seed) {
  if (bits != 512 && bits != 1024 && bits != 2048)
    throw std::invalid_argument("unsupported key size " + std::to_string(bits));
  gmp_randclass rng(gmp_randinit_mt);
  rng.seed(static_cast<unsigned long>(seed));
  RsaSecret key;
  key.bits = bits;
  key.e = 65537;
  do {
    key.p = random_prime(rng, bits / 2, key.e);
    key.q = random_prime(rng, bits / 2, key.e);
  } while (key.p == key.q);
  if (key.p < key.q) std::swap(key.p, key.q);
  key.n = key.p * key.q;
  const BigInt phi = (key.p - 1) * (key.q - 1);
  mpz_invert(key.d.get_mpz_t(), key.e.get_mpz_t(), phi.get_mpz_t());
  key.dp = key.d % (key.p - 1);
  key.dq = key.d % (key.q - 1);
  mpz_invert(key.q_inv.get_mpz_t(), key.q.get_mpz_t(), key.p.get_mpz_t());
  return key;
}

BigInt random_below(const BigInt& n, std::uint64_t seed) {
  gmp_randclass rng(gmp_randinit_mt);
  rng.seed(static_cast<unsigned long>(seed));
  BigInt m;
  do {
    m = rng.get_z_range(n);
  } while (m == 0);
  return m;
}

}  // namespace cachelab::rsa
