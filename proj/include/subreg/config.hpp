#ifndef SUBREG_CONFIG_HPP
#define SUBREG_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "subreg/algorithms.hpp"
#include "subreg/objectives.hpp"

namespace subreg {

struct ConfigError : std::runtime_error {
  ConfigError(int line_number, const std::string& message);
  int line;
};

// One experiment matrix. Zero-valued dimension fields mean "family default";
// apply_family_defaults fills them in. An empty checkpoints list means the
// standard geometric grid for the horizon.
struct RunConfig {
  Family family = Family::coverage;
  int horizon = 100;  // T
  int n = 0;
  int m = 2;
  int num_designs = 0;     // N (dopt decision dimension)
  int universe = 0;        // coverage
  int cover_per_elem = 0;  // coverage
  int k_meta = 0;          // K; 0 = family default
  double eta = 0.0;        // 0 = theory schedule D/(G sqrt(t)), D/(G sqrt(T)) for RFTL
  double ridge = 1e-6;     // dopt
  int k_off = 200;         // offline FW steps for the hindsight comparator
  int samples = 100;       // random-search draws per round
  int workers = 1;
  bool stochastic = false;
  std::vector<std::uint64_t> seeds;  // empty = 1..10
  std::vector<PolicyKind> policies;  // empty = family default
  std::vector<int> checkpoints;      // ascending, must contain T when given
};

// Plain `key value...` lines, `#` comments, an optional `=` after the key.
// seeds accepts either a list or a range `A..B`. Unknown keys, malformed
// values, and checkpoint lists that violate the grid invariant are hard
// errors carrying the line number.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Fills zero/empty fields: dimensions per family (coverage: 20 sets over a
// 50-element universe, 3 covers each; nqp: n=10; dopt: 8-dim designs, N=16),
// seeds 1..10, K = ceil(sqrt(T)) for coverage and 50 for nqp/dopt, and the
// family's policy list (coverage adds the surrogate ascent baseline).
void apply_family_defaults(RunConfig& cfg);

}  // namespace subreg

#endif
