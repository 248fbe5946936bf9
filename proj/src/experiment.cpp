#include "cachelab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <variant>

#include "cachelab/figures.hpp"
#include "cachelab/reference_lru.hpp"

namespace cachelab {

Scenario parse_scenario(const std::string& name) {
  if (name == "rsa-attack") return Scenario::RsaAttack;
  if (name == "rsa-hardened") return Scenario::RsaHardened;
  if (name == "genome-attack") return Scenario::GenomeAttack;
  if (name == "genome-negative") return Scenario::GenomeNegative;
  if (name == "cache-selftest") return Scenario::CacheSelftest;
  throw std::invalid_argument("unknown scenario '" + name + "'");
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::RsaAttack: return "rsa-attack";
    case Scenario::RsaHardened: return "rsa-hardened";
    case Scenario::GenomeAttack: return "genome-attack";
    case Scenario::GenomeNegative: return "genome-negative";
    case Scenario::CacheSelftest: return "cache-selftest";
  }
  return "unknown";
}

namespace {

using Field = std::variant<std::uint32_t Settings::*, std::uint64_t Settings::*, double Settings::*,
                           std::string Settings::*, std::vector<std::uint32_t> Settings::*,
                           bool Settings::*, std::optional<std::uint32_t> Settings::*>;

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      {"line_size", &Settings::line_size},
      {"num_sets", &Settings::num_sets},
      {"associativity", &Settings::associativity},
      {"probe_period_cycles", &Settings::probe_period_cycles},
      {"probes_per_epoch", &Settings::probes_per_epoch},
      {"repetitions", &Settings::repetitions},
      {"probe_cost_cycles", &Settings::probe_cost_cycles},
      {"timer_hz", &Settings::timer_hz},
      {"cpu_hz", &Settings::cpu_hz},
      {"timer_burst_accesses", &Settings::timer_burst_accesses},
      {"timer_burst_spread", &Settings::timer_burst_spread},
      {"spurious_eviction_prob", &Settings::spurious_eviction_prob},
      {"self_pollution_rate", &Settings::self_pollution_rate},
      {"self_pollution_multipliers", &Settings::self_pollution_multipliers},
      {"key_bits", &Settings::key_bits},
      {"window_bits", &Settings::window_bits},
      {"monitored_multipliers", &Settings::monitored_multipliers},
      {"excluded_multipliers", &Settings::excluded_multipliers},
      {"table_base", &Settings::table_base},
      {"entry_size_bytes", &Settings::entry_size_bytes},
      {"square_cycles", &Settings::square_cycles},
      {"multiply_cycles", &Settings::multiply_cycles},
      {"word_bytes", &Settings::word_bytes},
      {"candidate_threshold", &Settings::candidate_threshold},
      {"zero_floor", &Settings::zero_floor},
      {"window_epochs", &Settings::window_epochs},
      {"density_threshold", &Settings::density_threshold},
      {"genome_length", &Settings::genome_length},
      {"genome_file", &Settings::genome_file},
      {"kmer_k", &Settings::kmer_k},
      {"index_entry_bytes", &Settings::index_entry_bytes},
      {"index_base", &Settings::index_base},
      {"insertion_cycles", &Settings::insertion_cycles},
      {"satellite_unit", &Settings::satellite_unit},
      {"satellite_repeats", &Settings::satellite_repeats},
      {"satellite_offset", &Settings::satellite_offset},
      {"lru_sequences", &Settings::lru_sequences},
      {"lru_max_length", &Settings::lru_max_length},
      {"roundtrip_samples", &Settings::roundtrip_samples},
      {"dump_trace", &Settings::dump_trace},
  };
  return table;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::uint32_t to_u32(const std::string& key, const std::string& value) {
  const std::uint64_t v = parse_u64(key, value);
  if (v > UINT32_MAX) throw std::invalid_argument("config key '" + key + "': value too large");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

void Settings::set(const std::string& key, const std::string& value) {
  const auto it = fields().find(key);
  if (it == fields().end()) throw std::invalid_argument("unknown config key '" + key + "'");
  std::visit(
      [&](auto member) {
        auto& slot = this->*member;
        using T = std::decay_t<decltype(slot)>;
        if constexpr (std::is_same_v<T, std::uint32_t>) slot = to_u32(key, value);
        else if constexpr (std::is_same_v<T, std::uint64_t>) slot = parse_u64(key, value);
        else if constexpr (std::is_same_v<T, double>) slot = parse_double(key, value);
        else if constexpr (std::is_same_v<T, std::string>) slot = value;
        else if constexpr (std::is_same_v<T, std::vector<std::uint32_t>>) slot = parse_u32_list(key, value);
        else if constexpr (std::is_same_v<T, std::optional<std::uint32_t>>) slot = to_u32(key, value);
        else if constexpr (std::is_same_v<T, bool>) {
          if (value == "true" || value == "1") slot = true;
          else if (value == "false" || value == "0") slot = false;
          else throw std::invalid_argument("config key '" + key + "': expected true or false");
        }
      },
      it->second);
}

void Settings::apply(const ConfigMap& map) {
  for (const auto& [k, v] : map) set(k, v);
}

std::string Settings::echo(Scenario scenario) const {
  std::ostringstream out;
  out << "scenario = " << to_string(scenario) << '\n';
  for (const auto& [key, field] : fields()) {
    out << key << " = ";
    std::visit(
        [&](auto member) {
          const auto& slot = this->*member;
          using T = std::decay_t<decltype(slot)>;
          if constexpr (std::is_same_v<T, double>) out << format_double(slot);
          else if constexpr (std::is_same_v<T, std::vector<std::uint32_t>>) out << format_u32_list(slot);
          else if constexpr (std::is_same_v<T, std::optional<std::uint32_t>>) out << repetitions_for(scenario);
          else if constexpr (std::is_same_v<T, bool>) out << (slot ? "true" : "false");
          else out << slot;
        },
        field);
    out << '\n';
  }
  return out.str();
}

std::uint32_t Settings::repetitions_for(Scenario s) const {
  if (repetitions) return *repetitions;
  return (s == Scenario::GenomeAttack || s == Scenario::GenomeNegative) ? 20 : 15;
}

CacheConfig Settings::cache() const {
  CacheConfig c{line_size, num_sets, associativity};
  c.validate();
  return c;
}

AttackConfig Settings::attack(Scenario s, std::uint64_t seed, unsigned threads) const {
  AttackConfig cfg;
  cfg.cache = cache();
  cfg.probe_period_cycles = probe_period_cycles;
  cfg.probes_per_epoch = probes_per_epoch;
  cfg.repetitions = repetitions_for(s);
  cfg.probe_cost_cycles = probe_cost_cycles;
  cfg.noise.timer_hz = timer_hz;
  cfg.noise.cpu_hz = cpu_hz;
  cfg.noise.timer_burst_accesses = timer_burst_accesses;
  cfg.noise.timer_burst_spread = timer_burst_spread;
  cfg.noise.spurious_eviction_prob = spurious_eviction_prob;
  cfg.noise.self_pollution_rate = self_pollution_rate;
  cfg.seed = seed;
  cfg.threads = std::max(1u, threads);
  cfg.validate();
  return cfg;
}

std::vector<std::uint32_t> Settings::effective_monitored() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t m : monitored_multipliers)
    if (std::find(excluded_multipliers.begin(), excluded_multipliers.end(), m) ==
        excluded_multipliers.end())
      out.push_back(m);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// RSA

RsaOutcome run_rsa_scenario(const Settings& s, bool hardened, std::uint64_t seed,
                            unsigned threads) {
  const unsigned k = s.window_bits;
  if (k < 1 || k > 8) throw std::invalid_argument("window_bits must be in [1, 8]");
  const CacheConfig cache = s.cache();
  const std::uint32_t entries = 1u << k;

  RsaOutcome out;
  out.key = rsa::keygen(s.key_bits, seed);
  const rsa::BigInt message = rsa::random_below(out.key.n, seed ^ 0x5eed5eed5eedull);
  const rsa::BigInt ciphertext = rsa::encrypt(message, out.key);

  const rsa::MultiplierTable table{s.table_base, s.entry_size_bytes, entries};
  const rsa::ExpTiming timing{s.square_cycles, s.multiply_cycles, s.word_bytes};
  rsa::SelfPollution pollution;
  pollution.accesses_per_iteration = s.self_pollution_rate;
  for (std::uint32_t m : s.self_pollution_multipliers) {
    if (m < 1 || m > entries)
      throw std::invalid_argument("self_pollution_multipliers: " + std::to_string(m) +
                                  " is not a table entry");
    for (SetIndex set : table.entry_sets(m, cache)) pollution.sets.push_back(set);
  }
  if (pollution.sets.empty()) pollution.accesses_per_iteration = 0;

  out.monitored = s.effective_monitored();
  for (std::uint32_t m : out.monitored)
    if (m < 1 || m > entries)
      throw std::invalid_argument("monitored multiplier " + std::to_string(m) + " out of range");

  const auto layout = hardened ? rsa::TableLayout::Interleaved : rsa::TableLayout::Contiguous;
  std::atomic<std::uint64_t> executions{0};
  const rsa::BigInt exponents[2] = {out.key.dp, out.key.dq};
  recovery::RecoveredWindows* results[2] = {&out.dp, &out.dq};
  const Scenario scenario = hardened ? Scenario::RsaHardened : Scenario::RsaAttack;

  for (int phase = 0; phase < 2; ++phase) {
    AttackConfig cfg = s.attack(scenario, seed, threads);
    cfg.phase = phase;
    for (std::uint32_t m : out.monitored)
      cfg.targets.push_back({static_cast<int>(m),
                             std::string(phase == 0 ? "dp/" : "dq/") + std::to_string(m),
                             table.entry_sets(m, cache)});
    const std::uint64_t windows = rsa::window_decompose(exponents[phase], k).windows.size();
    if (cfg.targets.empty()) {
      *results[phase] = recovery::vote_windows({}, cfg.repetitions, windows,
                                               {s.zero_floor});
      continue;
    }
    const VictimFactory factory = [&](const Target&, std::uint32_t) {
      ++executions;
      rsa::ExpTracer tracer(cache, table, timing, pollution);
      const rsa::BigInt plain = rsa::decrypt_crt(ciphertext, out.key, k, &tracer, layout);
      if (plain != message) throw std::logic_error("victim decryption produced a wrong plaintext");
      return tracer.exponentiation_trace(static_cast<std::size_t>(phase));
    };
    std::vector<RunObservation> obs = run_campaign(factory, cfg);
    std::vector<recovery::MarkedRun> marked;
    marked.reserve(obs.size());
    for (const auto& o : obs) marked.push_back(recovery::mark_run(o, s.candidate_threshold));
    *results[phase] = recovery::vote_windows(marked, cfg.repetitions, obs.front().num_epochs(),
                                             {s.zero_floor});
    const std::uint64_t first_id = out.observations.size();
    for (auto& o : obs) {
      o.run_id += first_id;  // run ids stay unique across both phases
      out.observations.push_back(std::move(o));
    }
  }

  out.victim_executions = executions.load();
  {
    rsa::ExpTracer tracer(cache, table, timing, pollution);
    rsa::decrypt_crt(ciphertext, out.key, k, &tracer, layout);
    out.trace = tracer.trace();
  }
  out.report = recovery::score_key(out.dp, out.dq, out.key, out.monitored, k);
  std::uint64_t zeros = 0, total = 0;
  for (const auto& e : exponents)
    for (std::uint32_t w : rsa::window_decompose(e, k).windows) {
      zeros += w == 0;
      ++total;
    }
  out.zero_window_fraction = static_cast<double>(zeros) / static_cast<double>(total);
  return out;
}

// ---------------------------------------------------------------------------
// Genome

GenomeOutcome run_genome_scenario(const Settings& s, bool embed, std::uint64_t seed,
                                  unsigned threads) {
  const CacheConfig cache = s.cache();
  const genome::HashIndexLayout layout{s.kmer_k, s.index_entry_bytes, s.index_base};
  genome::InsertionTiming timing;
  timing.insertion_cycles = s.insertion_cycles;
  const genome::Microsatellite msat{s.satellite_unit, s.satellite_repeats};
  msat.validate();

  GenomeOutcome out;
  std::string bases = s.genome_file.empty() ? genome::random_bases(s.genome_length, seed)
                                            : genome::read_genome_file(s.genome_file).bases;
  out.rotations = genome::microsatellite_cache_sets(msat, layout, cache);
  const Scenario scenario = embed ? Scenario::GenomeAttack : Scenario::GenomeNegative;
  AttackConfig cfg = s.attack(scenario, seed, threads);

  if (embed) {
    const std::string sat = msat.expand();
    if (s.satellite_offset + sat.size() > bases.size())
      throw std::invalid_argument("satellite does not fit at offset " +
                                  std::to_string(s.satellite_offset));
    bases.replace(s.satellite_offset, sat.size(), sat);
    const Cycle first_read = s.satellite_offset * timing.insertion_cycles + timing.insertion_cycles / 4;
    out.satellite_epoch = first_read / cfg.cycles_per_epoch();
  } else {
    std::vector<std::string> kmers;
    for (const auto& [kmer, set] : out.rotations) kmers.push_back(kmer);
    genome::purge_kmers(bases, kmers, seed ^ 0x9e3779b97f4a7c15ull);
  }

  const genome::GenomeSequence sequence(std::move(bases));
  VictimTrace trace;
  genome::build_index(sequence, layout, &trace, cache, timing);

  std::vector<int> ids;
  for (std::size_t i = 0; i < out.rotations.size(); ++i) {
    const auto& [kmer, set] = out.rotations[i];
    cfg.targets.push_back({static_cast<int>(i), kmer + "/" + std::to_string(i), {set}});
    ids.push_back(static_cast<int>(i));
  }
  std::atomic<std::uint64_t> executions{0};
  // The victim is deterministic, so every run replays the same insertion stream.
  const VictimFactory factory = [&](const Target&, std::uint32_t) {
    ++executions;
    return trace;
  };
  out.observations = run_campaign(factory, cfg);
  out.victim_executions = executions.load();
  out.trace = std::move(trace);
  out.detection = recovery::detect_satellite(out.observations, ids, s.window_epochs,
                                             s.density_threshold);
  return out;
}

// ---------------------------------------------------------------------------
// Self-test

std::uint64_t rotation_uniqueness_violations(const genome::HashIndexLayout& layout,
                                             const CacheConfig& cache) {
  constexpr char kBases[] = {'A', 'C', 'G', 'T'};
  std::vector<std::string> units;
  for (int i = 0; i < 256; ++i)
    units.push_back({kBases[(i >> 6) & 3], kBases[(i >> 4) & 3], kBases[(i >> 2) & 3], kBases[i & 3]});
  std::vector<std::vector<SetIndex>> prints;
  for (const auto& u : units) prints.push_back(genome::footprint(u, layout, cache));
  auto is_rotation = [](const std::string& a, const std::string& b) {
    return (a + a).find(b) != std::string::npos;
  };
  std::uint64_t violations = 0;
  for (std::size_t i = 0; i < units.size(); ++i)
    for (std::size_t j = i + 1; j < units.size(); ++j)
      if ((prints[i] == prints[j]) != is_rotation(units[i], units[j])) ++violations;
  return violations;
}

std::vector<SuiteResult> selftest(const SelftestOptions& opts) {
  std::vector<SuiteResult> suites;

  std::shared_ptr<const ReplacementPolicy> policy;
  if (opts.inject_lru_fault) policy = std::make_shared<MruFaultPolicy>();
  const OracleSuiteResult lru =
      run_lru_oracle_suite(opts.seed, opts.lru_sequences, opts.lru_max_length, policy);
  suites.push_back({"lru-oracle", lru.sequences, lru.mismatches});

  SuiteResult rt{"window-roundtrip", 0, 0};
  gmp_randclass rng(gmp_randinit_mt);
  rng.seed(static_cast<unsigned long>(opts.seed));
  std::mt19937_64 small(opts.seed);
  for (std::uint64_t i = 0; i < opts.roundtrip_samples; ++i) {
    const unsigned bits = 1 + static_cast<unsigned>(small() % 1024);
    const unsigned k = 1 + static_cast<unsigned>(small() % 8);
    rsa::BigInt e = rng.get_z_bits(bits);
    mpz_setbit(e.get_mpz_t(), bits - 1);
    const rsa::WindowSequence ws = rsa::window_decompose(e, k);
    bool ok = rsa::reassemble(ws) == e && !ws.windows.empty() && ws.windows.front() != 0;
    for (std::uint32_t w : ws.windows) ok = ok && w < (1u << k);
    ++rt.cases;
    if (!ok) ++rt.failures;
  }
  suites.push_back(rt);

  const genome::HashIndexLayout layout{};
  suites.push_back({"rotation-uniqueness", 256, rotation_uniqueness_violations(layout, CacheConfig{})});
  return suites;
}

// ---------------------------------------------------------------------------
// Artifacts

namespace {

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << body;
  if (!f.flush()) throw std::runtime_error("write failed: " + path.string());
}

nlohmann::ordered_json decisions_json(const recovery::RecoveredWindows& w) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& d : w.decisions) arr.push_back(d.to_string());
  return arr;
}

}  // namespace

FigureData rsa_figure(const RsaOutcome& r, std::uint32_t repetitions, std::uint32_t threshold) {
  FigureData fig;
  fig.title = "Multiplier accesses (d_p then d_q)";
  for (std::uint32_t m : r.monitored) fig.series.push_back("g" + std::to_string(m));
  fig.rows = repetitions;
  std::uint64_t dp_epochs = r.dp.decisions.size();
  fig.x_extent = dp_epochs + r.dq.decisions.size();
  for (const auto& obs : r.observations) {
    const auto series = static_cast<std::uint32_t>(
        std::find(r.monitored.begin(), r.monitored.end(), static_cast<std::uint32_t>(obs.target.id)) -
        r.monitored.begin());
    const std::uint64_t offset = obs.phase == 0 ? 0 : dp_epochs;
    for (const auto& m : recovery::mark_candidates(obs, threshold))
      fig.points.push_back({offset + m.epoch, obs.repetition, series});
  }
  return fig;
}

FigureData genome_figure(const GenomeOutcome& g, std::uint32_t repetitions) {
  FigureData fig;
  fig.title = "Hash-table activity of the repeat unit's rotation sets";
  for (const auto& [kmer, set] : g.rotations)
    fig.series.push_back(kmer + " (set " + std::to_string(set) + ")");
  fig.rows = static_cast<std::uint32_t>(g.rotations.size()) * repetitions;
  for (const auto& obs : g.observations) {
    const EpochAggregate agg = epoch_slice(obs);
    fig.x_extent = std::max<std::uint64_t>(fig.x_extent, agg.sums.size());
    const auto series = static_cast<std::uint32_t>(obs.target.id);
    for (std::uint64_t e = 0; e < agg.sums.size(); ++e) {
      std::uint32_t sum = 0;
      for (std::uint32_t c : agg.sums[e]) sum += c;
      if (sum > 0) fig.points.push_back({e, series * repetitions + obs.repetition, series});
    }
  }
  return fig;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  Settings settings;
  if (spec.config_file) settings.apply(read_config_file(*spec.config_file));
  for (const auto& [k, v] : spec.overrides) settings.set(k, v);

  std::filesystem::create_directories(spec.out_dir);
  const auto& dir = spec.out_dir;
  std::filesystem::remove(dir / "manifest.txt");

  ExperimentResult result;
  auto& report = result.report;
  report["scenario"] = to_string(spec.scenario);
  report["seed"] = spec.seed;

  std::vector<RunObservation> observations;
  FigureData figure;
  std::optional<VictimTrace> trace_dump;
  const std::uint32_t reps = settings.repetitions_for(spec.scenario);

  switch (spec.scenario) {
    case Scenario::RsaAttack:
    case Scenario::RsaHardened: {
      const bool hardened = spec.scenario == Scenario::RsaHardened;
      RsaOutcome r = run_rsa_scenario(settings, hardened, spec.seed, spec.threads);
      report["fraction"] = r.report.fraction;
      report["expected_fraction"] = r.report.expected_fraction;
      report["zero_window_fraction"] = r.zero_window_fraction;
      report["recovered_bits"] = r.report.recovered_bits;
      report["total_bits"] = r.report.total_bits;
      report["incorrect_decisions"] = r.report.incorrect_decisions;
      report["victim_executions"] = r.victim_executions;
      report["observations"] = r.observations.size();
      report["monitored_multipliers"] = r.monitored;
      report["per_epoch_decisions"] = {{"dp", decisions_json(r.dp)}, {"dq", decisions_json(r.dq)}};
      report["detection_interval"] = nullptr;
      figure = rsa_figure(r, reps, settings.candidate_threshold);
      if (settings.dump_trace) trace_dump = std::move(r.trace);
      observations = std::move(r.observations);
      break;
    }
    case Scenario::GenomeAttack:
    case Scenario::GenomeNegative: {
      const bool embed = spec.scenario == Scenario::GenomeAttack;
      GenomeOutcome g = run_genome_scenario(settings, embed, spec.seed, spec.threads);
      const auto& det = g.detection;
      report["fraction"] = nullptr;
      report["per_epoch_decisions"] = nullptr;
      report["detected"] = det.detected;
      report["detection_interval"] =
          det.detected ? nlohmann::ordered_json::array({det.interval_begin, det.interval_end})
                       : nlohmann::ordered_json(nullptr);
      nlohmann::ordered_json intervals = nlohmann::ordered_json::array();
      for (const auto& [b, e] : det.intervals) intervals.push_back({b, e});
      report["intervals"] = intervals;
      report["satellite_epoch"] = g.satellite_epoch ? nlohmann::ordered_json(*g.satellite_epoch)
                                                    : nlohmann::ordered_json(nullptr);
      nlohmann::ordered_json rot = nlohmann::ordered_json::array();
      for (const auto& [kmer, set] : g.rotations) rot.push_back({{"kmer", kmer}, {"set", set}});
      report["rotations"] = rot;
      report["densities"] = det.densities;
      report["victim_executions"] = g.victim_executions;
      report["observations"] = g.observations.size();
      figure = genome_figure(g, reps);
      if (settings.dump_trace) trace_dump = std::move(g.trace);
      observations = std::move(g.observations);
      break;
    }
    case Scenario::CacheSelftest: {
      SelftestOptions opts;
      opts.seed = spec.seed;
      opts.lru_sequences = settings.lru_sequences;
      opts.lru_max_length = settings.lru_max_length;
      opts.roundtrip_samples = settings.roundtrip_samples;
      opts.inject_lru_fault = spec.inject_lru_fault;
      const auto suites = selftest(opts);
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& s : suites) {
        arr.push_back({{"name", s.name}, {"cases", s.cases}, {"failures", s.failures}});
        result.ok = result.ok && s.failures == 0;
      }
      report["fraction"] = nullptr;
      report["per_epoch_decisions"] = nullptr;
      report["detection_interval"] = nullptr;
      report["suites"] = arr;
      report["passed"] = result.ok;
      figure.title = "no campaign";
      break;
    }
  }

  write_file(dir / "config.txt", settings.echo(spec.scenario));
  result.files.push_back("config.txt");
  {
    std::ostringstream csv;
    write_observations_csv(csv, observations);
    write_file(dir / "observations.csv", csv.str());
    result.files.push_back("observations.csv");
  }
  write_file(dir / "report.json", report.dump(2) + "\n");
  result.files.push_back("report.json");
  for (auto& name : emit_figures(figure, dir)) result.files.push_back(name);
  if (trace_dump) {
    std::ostringstream csv;
    write_trace_csv(csv, *trace_dump);
    write_file(dir / "trace.csv", csv.str());
    result.files.push_back("trace.csv");
  }

  std::ostringstream manifest;
  for (const auto& name : result.files)
    manifest << name << ' ' << std::filesystem::file_size(dir / name) << '\n';
  write_file(dir / "manifest.txt.tmp", manifest.str());
  std::filesystem::rename(dir / "manifest.txt.tmp", dir / "manifest.txt");
  result.files.push_back("manifest.txt");
  return result;
}

}  // namespace cachelab
