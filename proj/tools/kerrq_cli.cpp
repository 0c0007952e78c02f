// Scenario runner. Parses arguments and hands everything to the C API.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kerrq.h"

namespace {

std::vector<std::string> split_lines(const char* s) {
  std::vector<std::string> out;
  std::string cur;
  for (; *s; ++s) {
    if (*s == '\n') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += *s;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kerr-effect quantum optics scenarios"};
  app.set_version_flag("--version", std::string(kerrq_version()));
  app.require_subcommand(1);

  std::string config, out_dir = ".";
  long long seed = 0;
  int threads = 0;
  bool seed_given = false;

  for (const std::string& name : split_lines(kerrq_scenario_names())) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " scenario");
    sub->add_option("--config", config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "override the config seed")
        ->check(CLI::NonNegativeNumber)
        ->each([&](const std::string&) { seed_given = true; });
    sub->add_option("--threads", threads, "worker threads (0: runtime default)")
        ->check(CLI::NonNegativeNumber);
  }

  CLI11_PARSE(app, argc, argv);

  const std::string scenario = app.get_subcommands().front()->get_name();
  const int rc = kerrq_run_scenario_file(scenario.c_str(), config.c_str(), out_dir.c_str(),
                                         static_cast<unsigned long long>(seed), seed_given ? 1 : 0,
                                         threads);
  if (rc != KERRQ_OK) {
    std::fprintf(stderr, "kerrq %s: error %d: %s\n", scenario.c_str(), rc, kerrq_last_error());
    return rc;
  }
  std::printf("%s: wrote %s/manifest.json\n", scenario.c_str(), out_dir.c_str());
  return 0;
}
