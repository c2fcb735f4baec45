#include "subreg/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace subreg {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

long long parse_int(const std::string& tok, int line) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(tok, &used);
  } catch (const std::exception&) {
    throw ConfigError(line, "expected an integer, got '" + tok + "'");
  }
  if (used != tok.size()) throw ConfigError(line, "expected an integer, got '" + tok + "'");
  return v;
}

double parse_real(const std::string& tok, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw ConfigError(line, "expected a number, got '" + tok + "'");
  }
  if (used != tok.size()) throw ConfigError(line, "expected a number, got '" + tok + "'");
  return v;
}

int parse_positive_int(const std::vector<std::string>& values, int line, const char* key) {
  if (values.size() != 1) throw ConfigError(line, std::string(key) + " takes one value");
  const long long v = parse_int(values[0], line);
  if (v < 1 || v > 1'000'000'000) throw ConfigError(line, std::string(key) + " must be >= 1");
  return static_cast<int>(v);
}

int parse_nonneg_int(const std::vector<std::string>& values, int line, const char* key) {
  if (values.size() != 1) throw ConfigError(line, std::string(key) + " takes one value");
  const long long v = parse_int(values[0], line);
  if (v < 0 || v > 1'000'000'000) throw ConfigError(line, std::string(key) + " must be >= 0");
  return static_cast<int>(v);
}

// Either `A..B` (inclusive, A <= B) or an explicit list.
std::vector<std::uint64_t> parse_seeds(const std::vector<std::string>& values, int line) {
  if (values.empty()) throw ConfigError(line, "seeds needs at least one value");
  std::vector<std::uint64_t> seeds;
  if (values.size() == 1 && values[0].find("..") != std::string::npos) {
    const std::size_t dots = values[0].find("..");
    const long long a = parse_int(values[0].substr(0, dots), line);
    const long long b = parse_int(values[0].substr(dots + 2), line);
    if (a < 0 || b < a) throw ConfigError(line, "seed range must satisfy 0 <= A <= B");
    if (b - a >= 100000) throw ConfigError(line, "seed range too wide");
    for (long long s = a; s <= b; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
    return seeds;
  }
  for (const std::string& tok : values) {
    const long long v = parse_int(tok, line);
    if (v < 0) throw ConfigError(line, "seeds must be >= 0");
    seeds.push_back(static_cast<std::uint64_t>(v));
  }
  return seeds;
}

std::vector<PolicyKind> parse_policies(const std::vector<std::string>& values, int line) {
  if (values.empty()) throw ConfigError(line, "policies needs at least one name");
  std::vector<PolicyKind> kinds;
  for (const std::string& tok : values) {
    try {
      kinds.push_back(parse_policy(tok));
    } catch (const std::exception&) {
      throw ConfigError(line, "unknown policy '" + tok + "'");
    }
  }
  return kinds;
}

bool parse_flag(const std::vector<std::string>& values, int line, const char* key) {
  if (values.size() != 1) throw ConfigError(line, std::string(key) + " takes one value");
  const std::string& v = values[0];
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(line, std::string(key) + " must be true/false");
}

}  // namespace

// line 0 marks errors from command-line values rather than a config file.
ConfigError::ConfigError(int line_number, const std::string& message)
    : std::runtime_error(line_number > 0
                             ? "config line " + std::to_string(line_number) + ": " + message
                             : "config: " + message),
      line(line_number) {}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  int horizon_line = 0;
  int checkpoints_line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const std::size_t hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::vector<std::string> tokens = tokenize(raw);
    if (tokens.empty()) continue;

    const std::string key = tokens[0];
    std::vector<std::string> values(tokens.begin() + 1, tokens.end());
    if (!values.empty() && values[0] == "=") values.erase(values.begin());
    if (values.empty()) throw ConfigError(line, "key '" + key + "' has no value");

    if (key == "family") {
      if (values.size() != 1) throw ConfigError(line, "family takes one value");
      try {
        cfg.family = parse_family(values[0]);
      } catch (const std::exception&) {
        throw ConfigError(line, "unknown family '" + values[0] + "'");
      }
      if (cfg.family == Family::custom)
        throw ConfigError(line, "custom objectives cannot be configured from a file");
    } else if (key == "T") {
      cfg.horizon = parse_positive_int(values, line, "T");
      horizon_line = line;
    } else if (key == "n") {
      cfg.n = parse_positive_int(values, line, "n");
    } else if (key == "m") {
      cfg.m = parse_nonneg_int(values, line, "m");
    } else if (key == "N") {
      cfg.num_designs = parse_positive_int(values, line, "N");
    } else if (key == "universe") {
      cfg.universe = parse_positive_int(values, line, "universe");
    } else if (key == "cover_per_elem") {
      cfg.cover_per_elem = parse_positive_int(values, line, "cover_per_elem");
    } else if (key == "K") {
      cfg.k_meta = parse_positive_int(values, line, "K");
    } else if (key == "eta") {
      if (values.size() != 1) throw ConfigError(line, "eta takes one value");
      cfg.eta = parse_real(values[0], line);
      if (!(cfg.eta >= 0.0) || !std::isfinite(cfg.eta))
        throw ConfigError(line, "eta must be finite and >= 0");
    } else if (key == "ridge") {
      if (values.size() != 1) throw ConfigError(line, "ridge takes one value");
      cfg.ridge = parse_real(values[0], line);
      if (!(cfg.ridge > 0.0) || !std::isfinite(cfg.ridge))
        throw ConfigError(line, "ridge must be finite and > 0");
    } else if (key == "k_off") {
      cfg.k_off = parse_positive_int(values, line, "k_off");
    } else if (key == "samples") {
      cfg.samples = parse_positive_int(values, line, "samples");
    } else if (key == "workers") {
      cfg.workers = parse_positive_int(values, line, "workers");
    } else if (key == "stochastic") {
      cfg.stochastic = parse_flag(values, line, "stochastic");
    } else if (key == "seeds") {
      cfg.seeds = parse_seeds(values, line);
    } else if (key == "policies") {
      cfg.policies = parse_policies(values, line);
    } else if (key == "checkpoints") {
      cfg.checkpoints.clear();
      for (const std::string& tok : values) {
        const long long v = parse_int(tok, line);
        if (v < 1) throw ConfigError(line, "checkpoints must be >= 1");
        if (!cfg.checkpoints.empty() && v <= cfg.checkpoints.back())
          throw ConfigError(line, "checkpoints must be strictly increasing");
        cfg.checkpoints.push_back(static_cast<int>(v));
      }
      checkpoints_line = line;
    } else {
      throw ConfigError(line, "unknown key '" + key + "'");
    }
  }

  if (!cfg.checkpoints.empty()) {
    const int bad_line = checkpoints_line > 0 ? checkpoints_line : horizon_line;
    if (cfg.checkpoints.back() > cfg.horizon)
      throw ConfigError(bad_line, "checkpoints must lie in [1, T]");
    if (cfg.checkpoints.back() != cfg.horizon)
      throw ConfigError(bad_line, "checkpoints must contain T");
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

void apply_family_defaults(RunConfig& cfg) {
  switch (cfg.family) {
    case Family::coverage:
      if (cfg.n == 0) cfg.n = 20;
      if (cfg.universe == 0) cfg.universe = 50;
      if (cfg.cover_per_elem == 0) cfg.cover_per_elem = 3;
      if (cfg.policies.empty())
        cfg.policies = {PolicyKind::meta_fw, PolicyKind::oga, PolicyKind::random100,
                        PolicyKind::surrogate_ga};
      if (cfg.k_meta == 0)
        cfg.k_meta = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(cfg.horizon))));
      break;
    case Family::nqp:
      if (cfg.n == 0) cfg.n = 10;
      if (cfg.policies.empty())
        cfg.policies = {PolicyKind::meta_fw, PolicyKind::oga, PolicyKind::random100};
      if (cfg.k_meta == 0) cfg.k_meta = 50;
      break;
    case Family::dopt:
      if (cfg.n == 0) cfg.n = 8;
      if (cfg.num_designs == 0) cfg.num_designs = 2 * cfg.n;
      if (cfg.policies.empty())
        cfg.policies = {PolicyKind::meta_fw, PolicyKind::oga, PolicyKind::random100};
      if (cfg.k_meta == 0) cfg.k_meta = 50;
      break;
    case Family::custom:
      throw std::invalid_argument("apply_family_defaults: no defaults for custom");
  }
  if (cfg.cover_per_elem > cfg.n) cfg.cover_per_elem = cfg.n;
  if (cfg.seeds.empty()) {
    for (std::uint64_t s = 1; s <= 10; ++s) cfg.seeds.push_back(s);
  }
}

}  // namespace subreg
