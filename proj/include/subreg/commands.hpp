#ifndef SUBREG_COMMANDS_HPP
#define SUBREG_COMMANDS_HPP

#include <cstdint>
#include <string>

#include "subreg/config.hpp"

namespace subreg {

// Options shared by the CLI subcommands; zero/empty fields defer to the
// config file (and the config defers to family defaults).
struct CliOptions {
  std::string config_path;             // empty = built-in defaults
  std::string out_dir = ".";
  bool seed_given = false;
  std::uint64_t seed = 0;              // replaces the config's seed list
  bool stochastic = false;             // forces stochastic gradients on
  bool quick = false;                  // verify: reduced sample counts
  bool inject_counterexample = false;  // verify: demand a known-bad check pass
  int workers = 0;                     // overrides config when > 0
  std::string k_sweep;                 // "A..B": Meta-FW K sweep instead of the matrix
  std::string instances_dir;           // read {family}_{seed}.inst instead of generating
};

// Exit codes: 0 success, 1 config error, 2 runtime failure, 3 verification
// failure. Progress goes to stderr; data to files or stdout.
int cmd_generate(const CliOptions& opts);
int cmd_run(const CliOptions& opts);
int cmd_verify(const CliOptions& opts);

}  // namespace subreg

#endif
