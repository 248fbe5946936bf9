// cachelab: run one Prime+Probe experiment and write its artifacts.

#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "cachelab/experiment.hpp"

namespace {

unsigned thread_budget() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CACHELAB_THREADS")) {
    try {
      const unsigned long cap = std::stoul(env);
      if (cap > 0 && cap < n) n = static_cast<unsigned>(cap);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring invalid CACHELAB_THREADS='" << env << "'\n";
    }
  }
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prime+Probe cache side-channel laboratory"};
  std::string scenario;
  std::string config;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::vector<std::string> overrides;
  bool inject_fault = false;

  app.add_option("--scenario", scenario,
                 "rsa-attack | rsa-hardened | genome-attack | genome-negative | cache-selftest")
      ->required();
  app.add_option("--config", config, "flat key = value config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "experiment seed")->required();
  app.add_option("--out", out_dir, "output directory")->required();
  app.add_option("--set", overrides, "override a config key (key=value); repeatable");
  app.add_flag("--inject-lru-fault", inject_fault, "self-test only: swap in a broken replacement policy")
      ->group("");
  CLI11_PARSE(app, argc, argv);

  try {
    cachelab::ExperimentSpec spec;
    spec.scenario = cachelab::parse_scenario(scenario);
    spec.seed = seed;
    spec.out_dir = out_dir;
    if (!config.empty()) spec.config_file = config;
    for (const auto& o : overrides) spec.overrides.push_back(cachelab::parse_override(o));
    spec.threads = thread_budget();
    spec.inject_lru_fault = inject_fault;

    const auto result = cachelab::run_experiment(spec);
    const auto& r = result.report;
    std::cout << "scenario " << scenario << " seed " << seed << '\n';
    if (r.contains("suites")) {
      for (const auto& s : r["suites"])
        std::cout << "  " << s["name"].get<std::string>() << ": " << s["cases"] << " cases, "
                  << s["failures"] << " failures\n";
    }
    if (!r["fraction"].is_null())
      std::cout << "  key-bit fraction " << r["fraction"] << " (expected "
                << r["expected_fraction"] << ", zero windows " << r["zero_window_fraction"] << ")\n";
    if (r.contains("detected"))
      std::cout << "  satellite detected: " << (r["detected"].get<bool>() ? "yes" : "no")
                << "  interval " << r["detection_interval"] << '\n';
    if (r.contains("victim_executions"))
      std::cout << "  victim executions " << r["victim_executions"] << '\n';
    std::cout << "  artifacts in " << out_dir << '\n';
    return result.ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "cachelab: " << e.what() << '\n';
    return 2;
  }
}
