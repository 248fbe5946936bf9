#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cachelab/config.hpp"
#include "cachelab/experiment.hpp"

using namespace cachelab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cachelab_test_" + name);
  fs::remove_all(p);
  return p;
}

ExperimentSpec quick(Scenario sc, std::uint64_t seed, const fs::path& out) {
  ExperimentSpec spec;
  spec.scenario = sc;
  spec.seed = seed;
  spec.out_dir = out;
  spec.overrides = {{"key_bits", "512"}, {"genome_length", "30000"}, {"satellite_offset", "9000"},
                    {"lru_sequences", "300"}, {"roundtrip_samples", "100"}};
  return spec;
}

}  // namespace

TEST_CASE("config text parsing") {
  const ConfigMap m = parse_config_text("# comment\nkey_bits = 1024\n\n  timer_hz=0 # inline\nkey_bits=512\n");
  CHECK(m.at("key_bits") == "512");
  CHECK(m.at("timer_hz") == "0");
  CHECK(m.size() == 2);
  CHECK_THROWS(parse_config_text("no equals sign\n"));
  CHECK(parse_override("a=b=c") == std::pair<std::string, std::string>{"a", "b=c"});
  CHECK_THROWS(parse_override("novalue"));
}

TEST_CASE("numeric and list values") {
  CHECK(parse_u64("x", "0x10000") == 0x10000);
  CHECK(parse_u64("x", "42") == 42);
  CHECK_THROWS(parse_u64("x", "-1"));
  CHECK_THROWS(parse_u64("x", "12abc"));
  CHECK(parse_double("x", "3.4e9") == 3.4e9);
  CHECK_THROWS(parse_double("x", "fast"));
  CHECK(parse_u32_list("x", "1-4,9") == std::vector<std::uint32_t>{1, 2, 3, 4, 9});
  CHECK(parse_u32_list("x", "").empty());
  CHECK_THROWS(parse_u32_list("x", "4-1"));
  CHECK(format_u32_list({1, 2, 3, 4, 9}) == "1,2,3,4,9");
  CHECK(parse_u32_list("x", format_u32_list({3, 7})) == std::vector<std::uint32_t>{3, 7});
}

TEST_CASE("settings: overrides, unknown keys and bad values") {
  Settings s;
  s.set("key_bits", "1024");
  s.set("monitored_multipliers", "1-3");
  s.set("excluded_multipliers", "2");
  s.set("dump_trace", "true");
  CHECK(s.key_bits == 1024);
  CHECK(s.effective_monitored() == std::vector<std::uint32_t>{1, 3});
  CHECK(s.dump_trace);
  CHECK(s.repetitions_for(Scenario::RsaAttack) == 15);
  CHECK(s.repetitions_for(Scenario::GenomeAttack) == 20);
  s.set("repetitions", "7");
  CHECK(s.repetitions_for(Scenario::GenomeAttack) == 7);
  CHECK_THROWS_AS(s.set("no_such_key", "1"), std::invalid_argument);
  CHECK_THROWS_AS(s.set("dump_trace", "maybe"), std::invalid_argument);
  CHECK_THROWS_AS(s.set("num_sets", "5000000000"), std::invalid_argument);
  s.set("num_sets", "60");
  CHECK_THROWS_AS(s.cache(), std::invalid_argument);
}

TEST_CASE("settings echo lists every key in sorted order") {
  const std::string echo = Settings{}.echo(Scenario::RsaAttack);
  CHECK(echo.find("scenario = rsa-attack\n") == 0);
  CHECK(echo.find("monitored_multipliers = 1,2,3,4,5,6,7,8,9,10\n") != std::string::npos);
  CHECK(echo.find("repetitions = 15\n") != std::string::npos);
  CHECK(echo.find("cpu_hz = 3.4e+09\n") != std::string::npos);
  // echo is itself a loadable config (apart from the scenario line)
  ConfigMap m = parse_config_text(echo);
  m.erase("scenario");
  Settings back;
  back.apply(m);
  CHECK(back.echo(Scenario::RsaAttack) == echo);
}

TEST_CASE("scenario names") {
  for (auto sc : {Scenario::RsaAttack, Scenario::RsaHardened, Scenario::GenomeAttack,
                  Scenario::GenomeNegative, Scenario::CacheSelftest})
    CHECK(parse_scenario(to_string(sc)) == sc);
  CHECK_THROWS_AS(parse_scenario("rsa"), std::invalid_argument);
}

TEST_CASE("config file plus overrides") {
  const fs::path dir = scratch("cfgfile");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "c.txt");
    f << "key_bits = 1024\ntimer_hz = 0\n";
  }
  ExperimentSpec spec = quick(Scenario::CacheSelftest, 1, dir / "out");
  spec.config_file = dir / "c.txt";
  spec.overrides.push_back({"timer_hz", "50"});
  run_experiment(spec);
  const std::string cfg = slurp(dir / "out" / "config.txt");
  CHECK(cfg.find("key_bits = 512\n") != std::string::npos);
  CHECK(cfg.find("timer_hz = 50\n") != std::string::npos);
  ExperimentSpec missing = spec;
  missing.config_file = dir / "absent.txt";
  CHECK_THROWS(run_experiment(missing));
}

TEST_CASE("artifacts and manifest") {
  const fs::path out = scratch("artifacts");
  ExperimentSpec spec = quick(Scenario::RsaAttack, 4, out);
  spec.overrides.push_back({"dump_trace", "true"});
  const ExperimentResult r = run_experiment(spec);
  CHECK(r.ok);
  REQUIRE(r.files.back() == "manifest.txt");
  for (const char* f : {"config.txt", "observations.csv", "report.json", "figure.svg", "figure.csv",
                        "trace.csv", "manifest.txt"})
    CHECK(fs::exists(out / f));
  CHECK_FALSE(fs::exists(out / "manifest.txt.tmp"));

  std::istringstream manifest(slurp(out / "manifest.txt"));
  std::string name;
  std::uintmax_t size = 0;
  std::size_t listed = 0;
  const auto manifest_time = fs::last_write_time(out / "manifest.txt");
  while (manifest >> name >> size) {
    ++listed;
    CHECK(fs::file_size(out / name) == size);
    CHECK(fs::last_write_time(out / name) <= manifest_time);
  }
  CHECK(listed == r.files.size() - 1);

  const auto report = nlohmann::json::parse(slurp(out / "report.json"));
  CHECK(report.at("victim_executions") == 300);
  CHECK(report.at("fraction").is_number());
  CHECK(report.contains("per_epoch_decisions"));
  CHECK(report.at("detection_interval").is_null());
  CHECK(slurp(out / "observations.csv").rfind("run,target,epoch,probe,set,evictions\n", 0) == 0);
  CHECK(slurp(out / "trace.csv").rfind("cycle,address,label\n", 0) == 0);
}

TEST_CASE("observations.csv reloads into the same recovery") {
  const fs::path out = scratch("reload");
  run_experiment(quick(Scenario::RsaAttack, 6, out));
  std::ifstream in(out / "observations.csv");
  const auto obs = read_observations_csv(in, 33);
  CHECK(obs.size() == 300);
  const auto report = nlohmann::json::parse(slurp(out / "report.json"));
  // d_p runs come first: vote them again from the file
  std::vector<recovery::MarkedRun> marked;
  std::uint64_t epochs = 0;
  for (std::size_t i = 0; i < 150; ++i) {
    auto run = recovery::mark_run(obs[i], 12);
    run.repetition = static_cast<std::uint32_t>(i % 15);
    epochs = run.epochs;
    marked.push_back(run);
  }
  const auto dp = recovery::vote_windows(marked, 15, epochs);
  const auto& saved = report.at("per_epoch_decisions").at("dp");
  REQUIRE(saved.size() == dp.decisions.size());
  for (std::size_t i = 0; i < saved.size(); ++i) CHECK(saved[i] == dp.decisions[i].to_string());
}

TEST_CASE("every scenario is byte-for-byte reproducible") {
  for (auto sc : {Scenario::RsaAttack, Scenario::RsaHardened, Scenario::GenomeAttack,
                  Scenario::GenomeNegative, Scenario::CacheSelftest}) {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    ExperimentSpec sa = quick(sc, 21, a), sb = quick(sc, 21, b);
    sb.threads = 3;
    run_experiment(sa);
    run_experiment(sb);
    for (const char* f : {"observations.csv", "report.json", "figure.svg", "figure.csv", "config.txt"})
      CHECK_MESSAGE(slurp(a / f) == slurp(b / f), to_string(sc) << ": " << f);
  }
}

TEST_CASE("genome scenario reports the satellite interval") {
  const fs::path out = scratch("genome");
  const ExperimentResult r = run_experiment(quick(Scenario::GenomeAttack, 2, out));
  CHECK(r.report.at("detected") == true);
  const std::uint64_t truth = r.report.at("satellite_epoch");
  CHECK(r.report.at("detection_interval")[0] <= truth);
  CHECK(r.report.at("detection_interval")[1] >= truth);
  CHECK(r.report.at("observations") == 80);

  const ExperimentResult neg = run_experiment(quick(Scenario::GenomeNegative, 2, scratch("neg")));
  CHECK(neg.report.at("detected") == false);
  CHECK(neg.report.at("detection_interval").is_null());
}

TEST_CASE("self-test passes for seeds 1 to 10 and catches a broken policy") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SelftestOptions o;
    o.seed = seed;
    o.lru_sequences = 300;
    o.roundtrip_samples = 200;
    for (const auto& suite : selftest(o)) CHECK_MESSAGE(suite.failures == 0, suite.name);
  }
  SelftestOptions bad;
  bad.lru_sequences = 100;
  bad.roundtrip_samples = 10;
  bad.inject_lru_fault = true;
  const auto suites = selftest(bad);
  CHECK(suites.at(0).name == "lru-oracle");
  CHECK(suites.at(0).failures > 0);
  CHECK(suites.at(1).failures == 0);

  ExperimentSpec spec = quick(Scenario::CacheSelftest, 1, scratch("fault"));
  spec.inject_lru_fault = true;
  const ExperimentResult r = run_experiment(spec);
  CHECK_FALSE(r.ok);
  CHECK(r.report.at("passed") == false);
}
