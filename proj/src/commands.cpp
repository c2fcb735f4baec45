#include "subreg/commands.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "subreg/harness.hpp"

namespace subreg {

namespace {

std::mutex g_stderr_mutex;

void progress(const std::string& line) {
  std::lock_guard<std::mutex> lock(g_stderr_mutex);
  std::cerr << line << '\n';
}

RunConfig load_config(const CliOptions& opts) {
  RunConfig cfg = opts.config_path.empty() ? RunConfig{} : parse_config_file(opts.config_path);
  if (opts.seed_given) cfg.seeds = {opts.seed};
  if (opts.stochastic) cfg.stochastic = true;
  if (opts.workers > 0) cfg.workers = opts.workers;
  apply_family_defaults(cfg);
  return cfg;
}

SequenceParams params_from(const RunConfig& cfg) {
  SequenceParams params;
  params.family = cfg.family;
  params.horizon = cfg.horizon;
  params.n = cfg.n;
  params.m = cfg.m;
  params.universe = cfg.universe;
  params.cover_per_elem = cfg.cover_per_elem;
  params.num_designs = cfg.num_designs;
  params.ridge = cfg.ridge;
  return params;
}

std::string instance_path(const std::string& dir, Family family, std::uint64_t seed) {
  return dir + "/" + std::string(family_name(family)) + "_" + std::to_string(seed) + ".inst";
}

InstanceBundle obtain_sequence(const RunConfig& cfg, const CliOptions& opts,
                               std::uint64_t seed) {
  if (opts.instances_dir.empty()) return build_sequence(params_from(cfg), seed);
  InstanceBundle bundle = read_bundle_file(instance_path(opts.instances_dir, cfg.family, seed));
  if (bundle.family != cfg.family)
    throw std::runtime_error("instance file family does not match the config");
  if (bundle.horizon() != cfg.horizon)
    throw std::runtime_error("instance file horizon does not match the config T");
  return bundle;
}

// Same derivation everywhere: the policy stream is independent of the
// polytope and instance streams, and of every other policy's stream.
Rng policy_rng(Family family, std::uint64_t seed, PolicyKind kind) {
  return Rng(seed).split(family_name(family)).split("policy").split(policy_name(kind));
}

std::unique_ptr<OnlinePolicy> make_policy(PolicyKind kind, const InstanceBundle& bundle,
                                          const SequenceStats& stats, const RunConfig& cfg,
                                          std::uint64_t seed) {
  const Polytope& p = bundle.polytope;
  const double d = stats.geo.diameter_d;
  const double g = stats.geo.grad_bound_g;
  Rng rng = policy_rng(bundle.family, seed, kind);
  switch (kind) {
    case PolicyKind::meta_fw: {
      const double eta = cfg.eta > 0.0 ? cfg.eta : rftl_default_eta(d, g, bundle.horizon());
      return std::make_unique<MetaFwPolicy>(p, cfg.k_meta, eta, cfg.stochastic, rng);
    }
    case PolicyKind::oga:
    case PolicyKind::stochastic_oga:
      return std::make_unique<OgaPolicy>(p, rftl_default_anchor(p), d, g, cfg.eta,
                                         kind == PolicyKind::stochastic_oga, rng);
    case PolicyKind::random100:
      return std::make_unique<RandomSearchPolicy>(p, cfg.samples, rng);
    case PolicyKind::surrogate_ga:
      return std::make_unique<SurrogateGaPolicy>(p, rftl_default_anchor(p), d, g, cfg.eta);
  }
  throw std::logic_error("make_policy: bad kind");
}

EpisodeOptions episode_options(PolicyKind kind, Family family, const SequenceStats& stats) {
  EpisodeOptions eo;
  eo.grad_bound_limit = stats.geo.grad_bound_g;
  // Meta-FW probes gradients at partial averages all the way down to the
  // origin; on the ridge-regularized family the origin gradient is a genuine
  // spike far above the play-region bound, so the limit is waived there.
  if (kind == PolicyKind::meta_fw && family == Family::dopt) eo.grad_bound_limit = 0.0;
  return eo;
}

// Runs fn(i) for i in [0, count) on up to `workers` threads. Exceptions are
// captured per index and the lowest-index one is rethrown after the join, so
// failures are reported deterministically.
void parallel_for(int workers, std::size_t count, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(count);
  const int width = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (width == 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(width);
    for (int w = 0; w < width; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= count) return;
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (std::thread& th : pool) th.join();
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  return os;
}

// ---------------------------------------------------------------------------
// generate

int generate_impl(const CliOptions& opts) {
  const RunConfig cfg = load_config(opts);
  std::filesystem::create_directories(opts.out_dir);
  for (std::uint64_t seed : cfg.seeds) {
    const InstanceBundle bundle = build_sequence(params_from(cfg), seed);
    const std::string path = instance_path(opts.out_dir, cfg.family, seed);
    write_bundle_file(path, bundle);
    progress("generated " + path);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// run

int run_matrix(const RunConfig& cfg, const CliOptions& opts) {
  // Under --stochastic the ascent policy switches to its estimator form;
  // Meta-FW keeps its name and draws estimator feedback via cfg.stochastic.
  std::vector<PolicyKind> kinds;
  for (PolicyKind kind : cfg.policies) {
    kinds.push_back(cfg.stochastic && kind == PolicyKind::oga ? PolicyKind::stochastic_oga
                                                              : kind);
  }
  const std::vector<int> grid =
      cfg.checkpoints.empty() ? default_checkpoint_grid(cfg.horizon) : cfg.checkpoints;

  std::vector<std::vector<RegretTrace>> per_seed(cfg.seeds.size());
  parallel_for(cfg.workers, cfg.seeds.size(), [&](std::size_t i) {
    const std::uint64_t seed = cfg.seeds[i];
    const InstanceBundle bundle = obtain_sequence(cfg, opts, seed);
    const SequenceStats stats = sequence_stats(bundle);
    const std::vector<HindsightPoint> curve = hindsight_curve(bundle, grid, cfg.k_off);
    for (PolicyKind kind : kinds) {
      try {
        std::unique_ptr<OnlinePolicy> policy = make_policy(kind, bundle, stats, cfg, seed);
        RegretTrace trace = run_episode(bundle, *policy, episode_options(kind, cfg.family, stats));
        trace.seed = seed;
        attach_checkpoints(trace, curve, alphas_for(kind));
        per_seed[i].push_back(std::move(trace));
      } catch (const std::exception& e) {
        throw std::runtime_error("cell family=" + std::string(family_name(cfg.family)) +
                                 " policy=" + std::string(policy_name(kind)) +
                                 " seed=" + std::to_string(seed) + ": " + e.what());
      }
    }
    progress("seed " + std::to_string(seed) + " done (" +
             std::to_string(kinds.size()) + " policies)");
  });

  std::filesystem::create_directories(opts.out_dir);
  for (std::size_t ki = 0; ki < kinds.size(); ++ki) {
    const std::string path = opts.out_dir + "/" + std::string(family_name(cfg.family)) + "_" +
                             std::string(policy_name(kinds[ki])) + ".csv";
    std::ofstream os = open_output(path);
    write_trace_csv_header(os);
    for (std::size_t i = 0; i < per_seed.size(); ++i) write_trace_csv_rows(os, per_seed[i][ki]);
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + path);
    progress("wrote " + path);
  }
  return 0;
}

int run_k_sweep(const RunConfig& cfg, const CliOptions& opts) {
  const std::size_t dots = opts.k_sweep.find("..");
  if (dots == std::string::npos)
    throw ConfigError(0, "--k-sweep expects a range A..B");
  int k_lo = 0, k_hi = 0;
  try {
    k_lo = std::stoi(opts.k_sweep.substr(0, dots));
    k_hi = std::stoi(opts.k_sweep.substr(dots + 2));
  } catch (const std::exception&) {
    throw ConfigError(0, "--k-sweep expects a range A..B");
  }
  if (k_lo < 1 || k_hi < k_lo || k_hi > 1000)
    throw ConfigError(0, "--k-sweep range must satisfy 1 <= A <= B <= 1000");

  struct SweepRow {
    double cum_reward = 0.0;
    double hindsight = 0.0;
  };
  const int num_k = k_hi - k_lo + 1;
  std::vector<std::vector<SweepRow>> per_seed(cfg.seeds.size());

  parallel_for(cfg.workers, cfg.seeds.size(), [&](std::size_t i) {
    const std::uint64_t seed = cfg.seeds[i];
    const InstanceBundle bundle = obtain_sequence(cfg, opts, seed);
    const SequenceStats stats = sequence_stats(bundle);
    const HindsightPoint best = hindsight_optimum(bundle, bundle.horizon(), cfg.k_off);
    per_seed[i].resize(num_k);
    for (int k = k_lo; k <= k_hi; ++k) {
      RunConfig one = cfg;
      one.k_meta = k;
      try {
        std::unique_ptr<OnlinePolicy> policy =
            make_policy(PolicyKind::meta_fw, bundle, stats, one, seed);
        const RegretTrace trace =
            run_episode(bundle, *policy, episode_options(PolicyKind::meta_fw, cfg.family, stats));
        per_seed[i][k - k_lo] = {trace.steps.back().cum_reward, best.value};
      } catch (const std::exception& e) {
        throw std::runtime_error("cell family=" + std::string(family_name(cfg.family)) +
                                 " policy=meta_fw K=" + std::to_string(k) +
                                 " seed=" + std::to_string(seed) + ": " + e.what());
      }
    }
    progress("seed " + std::to_string(seed) + " swept K=" + std::to_string(k_lo) + ".." +
             std::to_string(k_hi));
  });

  std::filesystem::create_directories(opts.out_dir);
  const std::string path =
      opts.out_dir + "/" + std::string(family_name(cfg.family)) + "_ksweep.csv";
  std::ofstream os = open_output(path);
  os << "k,seed,cum_reward,hindsight_value,alpha,alpha_regret\n";
  for (int k = k_lo; k <= k_hi; ++k) {
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
      const SweepRow& row = per_seed[i][k - k_lo];
      const double regret = kFwAlpha * row.hindsight - row.cum_reward;
      os << k << ',' << cfg.seeds[i] << ',' << format_double(row.cum_reward) << ','
         << format_double(row.hindsight) << ',' << format_double(kFwAlpha) << ','
         << format_double(regret) << '\n';
    }
  }
  os.flush();
  if (!os) throw std::runtime_error("write failed: " + path);
  progress("wrote " + path);
  return 0;
}

// ---------------------------------------------------------------------------
// verify

struct CheckLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

class Suite {
 public:
  void add(const std::string& name, bool pass, const std::string& detail = "") {
    lines_.push_back({name, pass, detail});
  }
  // A probe that must trip: the checker finding the planted defect is the pass.
  void add_expected_fail(const std::string& name, const PropertyReport& report) {
    add(name, !report.pass, report.pass ? "checker missed the planted defect" : report.witness);
  }

  int print_and_exit_code(std::ostream& os) const {
    bool all = true;
    for (const CheckLine& line : lines_) {
      os << (line.pass ? "[PASS] " : "[FAIL] ") << line.name;
      if (!line.detail.empty()) os << " (" << line.detail << ")";
      os << '\n';
      all = all && line.pass;
    }
    os << (all ? "verification passed" : "verification FAILED") << " (" << lines_.size()
       << " checks)\n";
    return all ? 0 : 3;
  }

 private:
  std::vector<CheckLine> lines_;
};

void add_report(Suite& suite, const std::string& name, const PropertyReport& report) {
  suite.add(name, report.pass, report.pass ? "" : report.witness);
}

// Family triple used by the checker suite; small enough that the full suite
// stays interactive.
struct VerifyFixture {
  std::unique_ptr<const Objective> objective;
  std::string label;
};

std::vector<VerifyFixture> verify_fixtures(Rng& rng) {
  std::vector<VerifyFixture> fixtures;
  {
    Rng r = rng.split("coverage");
    fixtures.push_back(
        {std::make_unique<CoverageObjective>(coverage_generate(30, 12, 3, r)), "coverage"});
  }
  {
    Rng r = rng.split("nqp");
    fixtures.push_back({std::make_unique<NqpObjective>(nqp_generate(8, r)), "nqp"});
  }
  {
    Rng r = rng.split("dopt");
    fixtures.push_back(
        {std::make_unique<DoptObjective>(dopt_generate(6, 12, 1e-6, r)), "dopt"});
  }
  return fixtures;
}

// f(x) = x1 x2: monotone but with a positive mixed partial, so the gradient
// is not antitone.
CustomObjective product_counterexample() {
  return CustomObjective(
      Box::unit(2), 2.0, 2.0, 1.0, [](const Vec& x) { return x[0] * x[1]; },
      [](const Vec& x) {
        Vec g(2);
        g[0] = x[1];
        g[1] = x[0];
        return g;
      });
}

// f(x) = ||x||^2: convex, so concavity along directions fails.
CustomObjective norm_sq_counterexample(int n) {
  return CustomObjective(
      Box::unit(n), 2.0 * std::sqrt(static_cast<double>(n)), 2.0, 1.0,
      [](const Vec& x) { return x.squaredNorm(); }, [](const Vec& x) { return Vec(2.0 * x); });
}

// The quadratic family with the matrix sign flipped to +1 entries: gradients
// grow along the diagonal, so both halves of the DR check break.
CustomObjective sign_flipped_quadratic(int n) {
  Mat h = Mat::Constant(n, n, 1.0);
  Vec u = Vec::Ones(n);
  const Mat sym = 0.5 * (h + h.transpose());
  const Vec lin = -h.transpose() * u;
  const double g_bound = sym.norm() * std::sqrt(static_cast<double>(n)) + lin.norm();
  return CustomObjective(
      Box::unit(n), g_bound, sym.norm(), 1.0,
      [h, u](const Vec& x) { return (0.5 * x - u).dot(h * x); },
      [sym, lin](const Vec& x) { return Vec(sym * x + lin); });
}

void run_checker_suite(Suite& suite, bool quick, bool inject) {
  const int dr_samples = quick ? 60 : 200;
  const int concave_samples = quick ? 30 : 100;
  Rng root(0x5017e);
  Rng fixture_rng = root.split("fixtures");
  for (const VerifyFixture& fx : verify_fixtures(fixture_rng)) {
    const Objective& f = *fx.objective;
    Rng r1 = root.split(fx.label + "/dr");
    add_report(suite, fx.label + "/dr_submodular", check_dr_submodular(f, r1, dr_samples));
    Rng r2 = root.split(fx.label + "/concave");
    add_report(suite, fx.label + "/concave_along_nonneg",
               check_concave_along_nonneg(f, r2, concave_samples));
    Rng r3 = root.split(fx.label + "/weak_dr");
    add_report(suite, fx.label + "/weak_dr(gamma=1)",
               check_weak_dr_inequality(f, 1.0, r3, dr_samples));
    Rng r4 = root.split(fx.label + "/smooth");
    add_report(suite, fx.label + "/beta_smooth",
               check_beta_smooth(f, f.smoothness(), r4, dr_samples));
  }

  // Planted defects: each check passes exactly when the checker trips.
  {
    CustomObjective bad = product_counterexample();
    Rng r = root.split("ce/product");
    suite.add_expected_fail("counterexample/product_xy_dr",
                            check_dr_submodular(bad, r, dr_samples));
  }
  {
    CustomObjective bad = norm_sq_counterexample(3);
    Rng r = root.split("ce/normsq");
    suite.add_expected_fail("counterexample/norm_sq_concavity",
                            check_concave_along_nonneg(bad, r, concave_samples));
  }
  {
    Rng gen = root.split("ce/nqp");
    NqpObjective f(nqp_generate(6, gen));
    Rng r = root.split("ce/halved_beta");
    suite.add_expected_fail("counterexample/halved_beta_smoothness",
                            check_beta_smooth(f, 0.5 * f.smoothness(), r, dr_samples));
  }
  {
    CustomObjective bad = sign_flipped_quadratic(4);
    Rng r = root.split("ce/flipped");
    suite.add_expected_fail("counterexample/sign_flipped_quadratic_dr",
                            check_dr_submodular(bad, r, dr_samples));
  }
  if (inject) {
    // Deliberately graded as a regular check: the DR failure must surface as
    // a suite failure (nonzero exit).
    CustomObjective bad = sign_flipped_quadratic(4);
    Rng r = root.split("ce/injected");
    add_report(suite, "injected/sign_flipped_quadratic",
               check_dr_submodular(bad, r, dr_samples));
  }
}

void run_squeeze_check(Suite& suite, bool quick) {
  const int instances = quick ? 3 : 10;
  const int points = quick ? 100 : 1000;
  Rng root(0xc0ffee);
  int violations = 0;
  std::string witness;
  for (int i = 0; i < instances; ++i) {
    Rng gen = root.split("inst").split(static_cast<std::uint64_t>(i));
    const CoverageObjective f(coverage_generate(25, 10, 3, gen));
    Rng pr = root.split("pts").split(static_cast<std::uint64_t>(i));
    for (int j = 0; j < points; ++j) {
      Vec x(f.num_sets());
      for (int c = 0; c < x.size(); ++c) x[c] = pr.uniform(0.0, 1.0);
      const double exact = f.value(x);
      const double sur = f.surrogate_value(x);
      if (exact - sur > 1e-9 || kFwAlpha * sur - exact > 1e-9) {
        ++violations;
        if (witness.empty())
          witness = "instance " + std::to_string(i) + ": value " + format_double(exact) +
                    " vs surrogate " + format_double(sur);
      }
    }
  }
  suite.add("coverage/surrogate_squeeze", violations == 0, witness);
}

// Exact expectation of the per-coordinate estimator by enumerating the random
// subset, compared against the closed-form gradient.
void run_unbiasedness_check(Suite& suite, bool quick) {
  const int points = quick ? 2 : 5;
  Rng root(0xbead);
  Rng gen = root.split("inst");
  const int n = 6;
  const CoverageObjective f(coverage_generate(12, n, 2, gen));
  double worst = 0.0;
  Rng pr = root.split("pts");
  for (int j = 0; j < points; ++j) {
    Vec x(n);
    for (int c = 0; c < n; ++c) x[c] = pr.uniform(0.0, 1.0);
    const Vec grad = f.gradient(x);
    for (int i = 0; i < n; ++i) {
      double expectation = 0.0;
      const int others = n - 1;
      for (int mask = 0; mask < (1 << others); ++mask) {
        std::vector<bool> with(n, false), without(n, false);
        double prob = 1.0;
        int bit = 0;
        for (int c = 0; c < n; ++c) {
          if (c == i) continue;
          const bool in = (mask >> bit) & 1;
          prob *= in ? x[c] : (1.0 - x[c]);
          with[c] = without[c] = in;
          ++bit;
        }
        with[i] = true;
        expectation += prob * (f.covered_weight(with) - f.covered_weight(without));
      }
      worst = std::max(worst, std::abs(expectation - grad[i]));
    }
  }
  suite.add("coverage/estimator_unbiased", worst <= 1e-9,
            "max |E[estimate] - gradient| = " + format_double(worst));
}

void run_geometry_checks(Suite& suite, bool quick) {
  const int polytopes = quick ? 3 : 10;
  const int proj_points = quick ? 5 : 20;
  const int vi_samples = quick ? 20 : 50;
  const int lp_samples = quick ? 50 : 200;
  Rng root(0x9e0);

  bool vi_ok = true, lp_ok = true;
  std::string vi_witness, lp_witness;
  for (int pi = 0; pi < polytopes && (vi_ok || lp_ok); ++pi) {
    Rng gen = root.split("poly").split(static_cast<std::uint64_t>(pi));
    const int n = 2 + static_cast<int>(gen.uniform(0.0, 4.999));
    Mat a(2, n);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < n; ++c) a(r, c) = gen.uniform(0.0, 1.0);
    const Vec b = Vec::Constant(2, 0.25 * n);
    const Polytope p(a, b, Box::unit(n));

    Rng misc = root.split("misc").split(static_cast<std::uint64_t>(pi));
    for (int j = 0; j < proj_points && vi_ok; ++j) {
      Vec x(n);
      for (int c = 0; c < n; ++c) x[c] = misc.uniform(-0.5, 1.5);
      const Vec px = project(x, p);
      if (!contains(px, p, 1e-7)) {
        vi_ok = false;
        vi_witness = "projection left the set";
        break;
      }
      for (int s = 0; s < vi_samples; ++s) {
        const Vec y = sample_uniform(p, misc);
        if ((x - px).dot(y - px) > 1e-7) {
          vi_ok = false;
          vi_witness = "variational inequality violated by " +
                       format_double((x - px).dot(y - px));
          break;
        }
      }
    }
    for (int j = 0; j < 5 && lp_ok; ++j) {
      Vec c(n);
      for (int k = 0; k < n; ++k) c[k] = misc.uniform(-1.0, 1.0);
      const Vec v = linear_maximize(c, p);
      if (!contains(v, p, 1e-7)) {
        lp_ok = false;
        lp_witness = "LP vertex infeasible";
        break;
      }
      const double best = c.dot(v);
      for (int s = 0; s < lp_samples; ++s) {
        const Vec y = sample_uniform(p, misc);
        if (c.dot(y) > best + 1e-9) {
          lp_ok = false;
          lp_witness = "sampled point beats the LP vertex by " +
                       format_double(c.dot(y) - best);
          break;
        }
      }
    }
  }
  suite.add("polytope/projection_variational_inequality", vi_ok, vi_witness);
  suite.add("polytope/linear_oracle_dominates_samples", lp_ok, lp_witness);
}

void run_rftl_regret_check(Suite& suite, bool quick) {
  const int horizon = quick ? 32 : 64;
  const int n = 5;
  Rng root(0xf71);
  Rng gen = root.split("poly");
  Mat a(1, n);
  for (int c = 0; c < n; ++c) a(0, c) = gen.uniform(0.0, 1.0);
  const Polytope p(a, Vec::Constant(1, 0.25 * n), Box::unit(n));

  const double d = diameter_upper_bound(p);
  std::vector<Vec> payoffs;
  double g = 0.0;
  Rng pay = root.split("payoffs");
  for (int t = 0; t < horizon; ++t) {
    Vec v(n);
    for (int c = 0; c < n; ++c) v[c] = pay.uniform(0.0, 1.0);
    g = std::max(g, v.norm());
    payoffs.push_back(std::move(v));
  }

  RftlState state(p, rftl_default_anchor(p), rftl_default_eta(d, g, horizon));
  double earned = 0.0;
  Vec total = Vec::Zero(n);
  for (const Vec& payoff : payoffs) {
    const Vec v = state.select(p);
    earned += payoff.dot(v);
    state.feedback(payoff);
    total += payoff;
  }
  const double best = total.dot(linear_maximize(total, p));
  const double bound = 2.0 * d * g * std::sqrt(static_cast<double>(horizon));
  suite.add("online_linear/rftl_regret_within_bound", best - earned <= bound,
            "regret " + format_double(best - earned) + " vs bound " + format_double(bound));
}

void run_bound_checks(Suite& suite, bool quick) {
  const int horizon = quick ? 32 : 64;
  const int seeds = quick ? 1 : 3;
  const int k_off = quick ? 50 : 200;

  RunConfig cfg;
  cfg.family = Family::nqp;
  cfg.horizon = horizon;
  cfg.k_meta = 8;
  cfg.k_off = k_off;
  apply_family_defaults(cfg);

  bool oga_ok = true, meta_ok = true;
  std::string oga_witness, meta_witness;
  for (int s = 1; s <= seeds; ++s) {
    const std::uint64_t seed = static_cast<std::uint64_t>(s);
    const InstanceBundle bundle = build_sequence(params_from(cfg), seed);
    const SequenceStats stats = sequence_stats(bundle);
    const std::vector<HindsightPoint> curve = {hindsight_optimum(bundle, horizon, k_off)};

    {
      std::unique_ptr<OnlinePolicy> policy =
          make_policy(PolicyKind::oga, bundle, stats, cfg, seed);
      RegretTrace trace =
          run_episode(bundle, *policy, episode_options(PolicyKind::oga, cfg.family, stats));
      attach_checkpoints(trace, curve, alphas_for(PolicyKind::oga));
      const BoundReport report = oga_bound_check(trace, stats);
      if (!report.pass && oga_ok) {
        oga_ok = false;
        oga_witness = "seed " + std::to_string(s) + ": lhs " + format_double(report.lhs) +
                      " vs rhs " + format_double(report.rhs);
      }
    }
    {
      std::unique_ptr<OnlinePolicy> policy =
          make_policy(PolicyKind::meta_fw, bundle, stats, cfg, seed);
      RegretTrace trace =
          run_episode(bundle, *policy, episode_options(PolicyKind::meta_fw, cfg.family, stats));
      attach_checkpoints(trace, curve, alphas_for(PolicyKind::meta_fw));
      const BoundReport report = meta_fw_bound_check(trace, bundle, stats, cfg.k_meta);
      if (!report.pass && meta_ok) {
        meta_ok = false;
        meta_witness = "seed " + std::to_string(s) + ": lhs " + format_double(report.lhs) +
                       " vs rhs " + format_double(report.rhs);
      }
    }
  }
  suite.add("harness/oga_regret_bound", oga_ok, oga_witness);
  suite.add("harness/meta_fw_regret_bound", meta_ok, meta_witness);
}

int verify_impl(const CliOptions& opts) {
  Suite suite;
  progress("running checker suite" + std::string(opts.quick ? " (quick)" : ""));
  run_checker_suite(suite, opts.quick, opts.inject_counterexample);
  progress("running squeeze and estimator checks");
  run_squeeze_check(suite, opts.quick);
  run_unbiasedness_check(suite, opts.quick);
  progress("running geometry checks");
  run_geometry_checks(suite, opts.quick);
  progress("running online-learning bound checks");
  run_rftl_regret_check(suite, opts.quick);
  run_bound_checks(suite, opts.quick);
  return suite.print_and_exit_code(std::cout);
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

int cmd_generate(const CliOptions& opts) {
  return guarded([&]() { return generate_impl(opts); });
}

int cmd_run(const CliOptions& opts) {
  return guarded([&]() {
    const RunConfig cfg = load_config(opts);
    return opts.k_sweep.empty() ? run_matrix(cfg, opts) : run_k_sweep(cfg, opts);
  });
}

int cmd_verify(const CliOptions& opts) {
  return guarded([&]() { return verify_impl(opts); });
}

}  // namespace subreg
