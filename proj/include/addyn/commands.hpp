#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "addyn/config.hpp"
#include "addyn/ibm.hpp"

namespace addyn {

/// Command-line overrides; each one wins over the [run] section.
struct CommandOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> replicates;
  std::optional<std::string> out;
  std::optional<int> workers;
};

/// Names accepted by run_command.
const std::vector<std::string>& command_names();

/// Runs one command. Returns the process exit code: 0 on success, 2 for an
/// invalid configuration, 1 for any other failure (message written to `err`).
int run_command(const std::string& command, const CommandOptions& options, std::ostream& out,
                std::ostream& err);

/// Same, with an already parsed configuration.
int run_command(const std::string& command, const RunConfig& config,
                const CommandOptions& options, std::ostream& out, std::ostream& err);

struct Cluster {
  double lo = 0.0;
  double hi = 0.0;
  double mean = 0.0;  ///< count-weighted mean trait
  double mass = 0.0;  ///< count / K
};

/// Sorts the support and splits it wherever consecutive traits are more than
/// `gap` apart.
std::vector<Cluster> gap_clusters(const PopulationState& state, double gap = 0.1);

/// "# addyn <version> format=<kind> config_hash=<hash> seed=<seed>"
std::string output_header(const std::string& kind, const std::string& config_hash,
                          std::uint64_t seed);

/// True when log(K) K u_K >= 0.1, i.e. mutations are not rare enough for the
/// lower side of the scaling window.
bool scaling_advisory(const ModelSpec& model);

/// Runs body(i) for i in [0, n) on `workers` threads.
void parallel_for(int n, int workers, const std::function<void(int)>& body);

}  // namespace addyn
