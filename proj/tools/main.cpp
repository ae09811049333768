#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "addyn/commands.hpp"
#include "addyn/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Adaptive dynamics: individual-based, PES and TSS simulation and singularity analysis"};
  app.set_version_flag("--version", addyn::kVersion);
  app.require_subcommand(1);

  addyn::CommandOptions options;
  std::uint64_t seed = 0;
  int replicates = 0;
  int workers = 0;
  std::string out;

  const std::map<std::string, std::string> help{
      {"simulate-ibm", "individual-based birth-death-mutation process"},
      {"simulate-pes", "polymorphic evolution sequence with branching detection"},
      {"simulate-tss", "trait substitution sequence paths and their mean"},
      {"canonical", "solve the canonical equation"},
      {"analyze", "find and classify evolutionary singularities (JSON on stdout)"},
      {"pip", "pairwise invasibility plot and coexistence boundary slopes"},
  };

  for (const auto& name : addyn::command_names()) {
    const auto h = help.find(name);
    auto* sub = app.add_subcommand(name, h == help.end() ? "" : h->second);
    sub->add_option("--config,-c", options.config_path, "INI run configuration")->required();
    sub->add_option("--seed", seed, "master seed (overrides [run] seed)");
    sub->add_option("--replicates", replicates, "replicate count")->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "output directory");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  auto* sub = app.get_subcommands().front();
  if (sub->count("--seed")) {
    options.seed = seed;
  }
  if (sub->count("--replicates")) {
    options.replicates = replicates;
  }
  if (sub->count("--workers")) {
    options.workers = workers;
  }
  if (sub->count("--out")) {
    options.out = out;
  }
  return addyn::run_command(sub->get_name(), options, std::cout, std::cerr);
}
