#include "subreg/harness.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace subreg {

namespace {

[[noreturn]] void round_error(int t, const std::string& what) {
  throw std::runtime_error("round " + std::to_string(t) + ": " + what);
}

}  // namespace

InstanceBundle build_sequence(const SequenceParams& params, std::uint64_t seed) {
  if (params.horizon < 1) throw std::invalid_argument("build_sequence: horizon >= 1 required");
  if (params.m < 0) throw std::invalid_argument("build_sequence: m >= 0 required");

  // Independent named streams: the polytope draw never shifts when T changes,
  // and round t's instance never depends on rounds before it.
  Rng family_rng = Rng(seed).split(family_name(params.family));
  Rng poly_rng = family_rng.split("polytope");
  const Rng inst_rng = family_rng.split("instance");

  auto round_rng = [&inst_rng](int t) { return inst_rng.split(static_cast<std::uint64_t>(t)); };

  switch (params.family) {
    case Family::coverage: {
      if (params.n < 1 || params.universe < 1)
        throw std::invalid_argument("build_sequence: coverage needs n >= 1, universe >= 1");
      if (params.cover_per_elem < 1 || params.cover_per_elem > params.n)
        throw std::invalid_argument("build_sequence: cover_per_elem must be in [1, n]");
      InstanceBundle bundle{params.family, coverage_polytope(params.n, params.m, poly_rng), {}};
      bundle.objectives.reserve(params.horizon);
      for (int t = 0; t < params.horizon; ++t) {
        Rng rng = round_rng(t);
        bundle.objectives.push_back(std::make_unique<CoverageObjective>(
            coverage_generate(params.universe, params.n, params.cover_per_elem, rng)));
      }
      return bundle;
    }
    case Family::nqp: {
      if (params.n < 1) throw std::invalid_argument("build_sequence: nqp needs n >= 1");
      InstanceBundle bundle{params.family, nqp_polytope(params.n, params.m, poly_rng), {}};
      bundle.objectives.reserve(params.horizon);
      for (int t = 0; t < params.horizon; ++t) {
        Rng rng = round_rng(t);
        bundle.objectives.push_back(std::make_unique<NqpObjective>(nqp_generate(params.n, rng)));
      }
      return bundle;
    }
    case Family::dopt: {
      if (params.n < 1 || params.num_designs < 1)
        throw std::invalid_argument("build_sequence: dopt needs n >= 1, num_designs >= 1");
      if (!(params.ridge > 0.0))
        throw std::invalid_argument("build_sequence: dopt needs ridge > 0");
      InstanceBundle bundle{params.family, dopt_polytope(params.num_designs, params.m, poly_rng),
                            {}};
      bundle.objectives.reserve(params.horizon);
      for (int t = 0; t < params.horizon; ++t) {
        Rng rng = round_rng(t);
        bundle.objectives.push_back(std::make_unique<DoptObjective>(
            dopt_generate(params.n, params.num_designs, params.ridge, rng)));
      }
      return bundle;
    }
    case Family::custom:
      break;
  }
  throw std::invalid_argument("build_sequence: no generator for this family");
}

SequenceStats sequence_stats(const InstanceBundle& bundle) {
  if (bundle.objectives.empty()) throw std::invalid_argument("sequence_stats: empty sequence");
  double g = 0.0, beta = 0.0, gamma = 1.0;
  for (const auto& f : bundle.objectives) {
    g = std::max(g, f->grad_bound());
    beta = std::max(beta, f->smoothness());
    gamma = std::min(gamma, f->weak_dr_gamma());
  }
  SequenceStats stats;
  stats.geo = GeometryConstants(diameter_upper_bound(bundle.polytope),
                                radius_upper_bound(bundle.polytope), g, beta);
  stats.gamma = gamma;
  return stats;
}

// ---------------------------------------------------------------------------
// CountingObjective

CountingObjective::CountingObjective(const Objective& inner, EvalCounters& counters)
    : Objective(inner.family(), inner.domain_box(), inner.grad_bound(), inner.smoothness(),
                inner.weak_dr_gamma()),
      inner_(&inner),
      counters_(&counters) {}

double CountingObjective::do_value(const Vec& x) const {
  ++counters_->value_evals;
  return inner_->value(x);
}

Vec CountingObjective::do_gradient(const Vec& x) const {
  ++counters_->grad_evals;
  Vec g = inner_->gradient(x);
  counters_->max_grad_norm = std::max(counters_->max_grad_norm, g.norm());
  return g;
}

Vec CountingObjective::do_stochastic_gradient(const Vec& x, Rng& rng) const {
  ++counters_->stoch_evals;
  Vec g = inner_->stochastic_gradient(x, rng);
  counters_->max_grad_norm = std::max(counters_->max_grad_norm, g.norm());
  return g;
}

double CountingObjective::surrogate_value(const Vec& x) const {
  ++counters_->value_evals;
  return inner_->surrogate_value(x);
}

// Surrogate ascent directions are not reward gradients, so they count as
// evaluations but stay out of max_grad_norm (the declared G bounds grad f).
Vec CountingObjective::surrogate_supergradient(const Vec& x) const {
  ++counters_->grad_evals;
  return inner_->surrogate_supergradient(x);
}

// ---------------------------------------------------------------------------
// Episode driver

RegretTrace run_episode(const InstanceBundle& bundle, OnlinePolicy& policy,
                        const EpisodeOptions& opts) {
  RegretTrace trace;
  trace.family = bundle.family;
  trace.policy = policy.kind();
  const int horizon = bundle.horizon();
  trace.steps.reserve(horizon);

  double cum = 0.0;
  for (int t = 1; t <= horizon; ++t) {
    const Objective& f = *bundle.objectives[t - 1];
    CountingObjective counted(f, trace.totals);
    const EvalCounters before = trace.totals;

    Vec x;
    try {
      x = policy.play(t, policy.peeks_at_objective() ? &counted : nullptr);
    } catch (const std::exception& e) {
      round_error(t, std::string("play failed: ") + e.what());
    }
    if (!policy.peeks_at_objective() &&
        (trace.totals.value_evals != before.value_evals ||
         trace.totals.grad_evals != before.grad_evals ||
         trace.totals.stoch_evals != before.stoch_evals)) {
      round_error(t, "policy evaluated the objective before committing its play");
    }
    if (!contains(x, bundle.polytope, 1e-7)) round_error(t, "infeasible play");

    // The reward is scored on the raw objective; it is the harness's
    // evaluation, not the policy's, so it stays out of the counters.
    const double reward = f.value(x);
    cum += reward;

    try {
      policy.observe(t, counted);
    } catch (const std::exception& e) {
      round_error(t, std::string("observe failed: ") + e.what());
    }
    if (opts.grad_bound_limit > 0.0 &&
        trace.totals.max_grad_norm > opts.grad_bound_limit * (1.0 + 1e-9) + 1e-12) {
      round_error(t, "observed gradient norm " + format_double(trace.totals.max_grad_norm) +
                         " exceeds the declared bound " + format_double(opts.grad_bound_limit));
    }

    StepRecord rec;
    rec.t = t;
    rec.reward = reward;
    rec.cum_reward = cum;
    rec.value_evals = trace.totals.value_evals - before.value_evals;
    rec.grad_evals = (trace.totals.grad_evals - before.grad_evals) +
                     (trace.totals.stoch_evals - before.stoch_evals);
    trace.steps.push_back(std::move(rec));
  }
  return trace;
}

std::vector<int> default_checkpoint_grid(int horizon_t) {
  if (horizon_t < 1) throw std::invalid_argument("checkpoint grid: horizon >= 1 required");
  constexpr int kPoints = 20;
  std::vector<int> grid;
  if (horizon_t <= kPoints) {
    for (int t = 1; t <= horizon_t; ++t) grid.push_back(t);
    return grid;
  }
  for (int k = 1; k <= kPoints; ++k) {
    const double frac = static_cast<double>(k) / kPoints;
    int c = static_cast<int>(std::lround(std::pow(static_cast<double>(horizon_t), frac)));
    c = std::clamp(c, 1, horizon_t);
    if (grid.empty() || c > grid.back()) grid.push_back(c);
  }
  if (grid.back() != horizon_t) grid.push_back(horizon_t);
  return grid;
}

// ---------------------------------------------------------------------------
// Hindsight comparator

HindsightPoint hindsight_optimum(const InstanceBundle& bundle, int prefix_t, int k_off) {
  const int horizon = bundle.horizon();
  if (prefix_t < 1 || prefix_t > horizon)
    throw std::invalid_argument("hindsight_optimum: prefix must be in [1, T]");

  // The prefix average keeps the gradient scale of a single round, so the
  // declared per-round constants stay valid for the combined objective.
  const double inv = 1.0 / static_cast<double>(prefix_t);
  double g = 0.0, beta = 0.0, gamma = 1.0;
  for (int s = 0; s < prefix_t; ++s) {
    g = std::max(g, bundle.objectives[s]->grad_bound());
    beta = std::max(beta, bundle.objectives[s]->smoothness());
    gamma = std::min(gamma, bundle.objectives[s]->weak_dr_gamma());
  }
  CustomObjective prefix_avg(
      bundle.objectives[0]->domain_box(), g, beta, gamma,
      [&bundle, prefix_t, inv](const Vec& x) {
        double total = 0.0;
        for (int s = 0; s < prefix_t; ++s) total += bundle.objectives[s]->value(x);
        return total * inv;
      },
      [&bundle, prefix_t, inv](const Vec& x) {
        Vec total = Vec::Zero(x.size());
        for (int s = 0; s < prefix_t; ++s) total += bundle.objectives[s]->gradient(x);
        return Vec(total * inv);
      });

  HindsightPoint point;
  point.t = prefix_t;
  point.x = offline_fw_maximize(prefix_avg, bundle.polytope, k_off);
  double total = 0.0;
  for (int s = 0; s < prefix_t; ++s) total += bundle.objectives[s]->value(point.x);
  point.value = total;
  return point;
}

std::vector<HindsightPoint> hindsight_curve(const InstanceBundle& bundle,
                                            const std::vector<int>& checkpoints, int k_off) {
  std::vector<HindsightPoint> curve;
  curve.reserve(checkpoints.size());
  int prev = 0;
  for (int t : checkpoints) {
    if (t <= prev) throw std::invalid_argument("hindsight_curve: checkpoints must be increasing");
    curve.push_back(hindsight_optimum(bundle, t, k_off));
    prev = t;
  }
  return curve;
}

std::vector<double> alphas_for(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::oga:
    case PolicyKind::stochastic_oga:
      return {kFwAlpha, kGaAlpha};
    case PolicyKind::meta_fw:
    case PolicyKind::random100:
    case PolicyKind::surrogate_ga:
      return {kFwAlpha};
  }
  throw std::logic_error("alphas_for: bad kind");
}

void attach_checkpoints(RegretTrace& trace, const std::vector<HindsightPoint>& curve,
                        const std::vector<double>& alphas) {
  trace.checkpoints.clear();
  for (const HindsightPoint& point : curve) {
    if (point.t < 1 || point.t > static_cast<int>(trace.steps.size()))
      throw std::invalid_argument("attach_checkpoints: checkpoint outside the trace");
    const double cum = trace.steps[point.t - 1].cum_reward;
    for (double alpha : alphas) {
      CheckpointRecord rec;
      rec.t = point.t;
      rec.hindsight_value = point.value;
      rec.cum_reward = cum;
      rec.alpha = alpha;
      rec.alpha_regret = alpha * point.value - cum;
      trace.checkpoints.push_back(rec);
    }
  }
}

// ---------------------------------------------------------------------------
// Guarantee checks

namespace {

// The final checkpoint carries the full-horizon comparator.
const CheckpointRecord& final_checkpoint(const RegretTrace& trace) {
  const int horizon = static_cast<int>(trace.steps.size());
  for (const CheckpointRecord& rec : trace.checkpoints) {
    if (rec.t == horizon) return rec;
  }
  throw std::invalid_argument("bound check: no checkpoint at t = T");
}

}  // namespace

BoundReport meta_fw_bound_check(const RegretTrace& trace, const InstanceBundle& bundle,
                                const SequenceStats& stats, int k_meta) {
  if (k_meta < 1) throw std::invalid_argument("meta_fw_bound_check: k_meta >= 1 required");
  const CheckpointRecord& last = final_checkpoint(trace);
  const double horizon = static_cast<double>(trace.steps.size());

  double sum_f0 = 0.0;
  const Vec origin = Vec::Zero(bundle.polytope.dim());
  for (const auto& f : bundle.objectives) sum_f0 += f->value(origin);

  const double d = stats.geo.diameter_d;
  const double r = stats.geo.radius_r;
  const double g = stats.geo.grad_bound_g;
  const double beta = stats.geo.smoothness_beta;

  BoundReport report;
  report.name = "meta_fw_regret_bound";
  report.rhs = -std::exp(-1.0) * sum_f0 + 2.0 * d * g * std::sqrt(horizon) +
               beta * r * r * horizon / (2.0 * k_meta);
  report.lhs = kFwAlpha * last.hindsight_value - last.cum_reward;
  report.lhs_adjusted = kFwAlpha * (last.hindsight_value / kFwAlpha) - last.cum_reward;
  report.pass = report.lhs <= report.rhs;
  report.pass_adjusted = report.lhs_adjusted <= report.rhs;
  return report;
}

BoundReport oga_bound_check(const RegretTrace& trace, const SequenceStats& stats, double gamma) {
  if (!(gamma > 0.0) || gamma > 1.0)
    throw std::invalid_argument("oga_bound_check: gamma must be in (0, 1]");
  const CheckpointRecord& last = final_checkpoint(trace);
  const double horizon = static_cast<double>(trace.steps.size());
  const double alpha = gamma * gamma / (gamma * gamma + 1.0);

  BoundReport report;
  report.name = "oga_regret_bound(gamma=" + format_double(gamma) + ")";
  report.rhs = 3.0 * gamma * stats.geo.diameter_d * stats.geo.grad_bound_g *
               std::sqrt(horizon) / (2.0 * (gamma * gamma + 1.0));
  report.lhs = alpha * last.hindsight_value - last.cum_reward;
  report.lhs_adjusted = alpha * (last.hindsight_value / kFwAlpha) - last.cum_reward;
  report.pass = report.lhs <= report.rhs;
  report.pass_adjusted = report.lhs_adjusted <= report.rhs;
  return report;
}

BoundReport stochastic_mean_bound_check(const std::vector<RegretTrace>& replicates,
                                        const std::vector<SequenceStats>& stats_per_replicate,
                                        double gamma) {
  const std::size_t n = replicates.size();
  if (n < 2) throw std::invalid_argument("stochastic bound check: need >= 2 replicates");
  if (stats_per_replicate.size() != n)
    throw std::invalid_argument("stochastic bound check: one stats entry per replicate");

  double mean_lhs = 0.0, mean_adj = 0.0, mean_rhs = 0.0;
  std::vector<double> lhs_values(n);
  for (std::size_t i = 0; i < n; ++i) {
    const BoundReport one = oga_bound_check(replicates[i], stats_per_replicate[i], gamma);
    lhs_values[i] = one.lhs;
    mean_lhs += one.lhs;
    mean_adj += one.lhs_adjusted;
    mean_rhs += one.rhs;
  }
  mean_lhs /= static_cast<double>(n);
  mean_adj /= static_cast<double>(n);
  mean_rhs /= static_cast<double>(n);

  double var = 0.0;
  for (double v : lhs_values) var += (v - mean_lhs) * (v - mean_lhs);
  var /= static_cast<double>(n - 1);
  const double slack = 2.0 * std::sqrt(var) / std::sqrt(static_cast<double>(n));

  BoundReport report;
  report.name = "stochastic_oga_mean_bound(gamma=" + format_double(gamma) + ")";
  report.lhs = mean_lhs;
  report.lhs_adjusted = mean_adj;
  report.rhs = mean_rhs + slack;
  report.pass = mean_lhs <= report.rhs;
  report.pass_adjusted = mean_adj <= report.rhs;
  return report;
}

// ---------------------------------------------------------------------------
// Trace CSV

void write_trace_csv_header(std::ostream& os) {
  os << "family,policy,seed,t,reward,cum_reward,checkpoint,hindsight_value,alpha,alpha_regret\n";
}

void write_trace_csv_rows(std::ostream& os, const RegretTrace& trace) {
  std::string prefix;
  prefix.append(family_name(trace.family));
  prefix += ',';
  prefix.append(policy_name(trace.policy));
  prefix += ',';
  prefix += std::to_string(trace.seed);
  prefix += ',';

  std::size_t ci = 0;
  for (const StepRecord& step : trace.steps) {
    os << prefix << step.t << ',' << format_double(step.reward) << ','
       << format_double(step.cum_reward) << ",0,,,\n";
    while (ci < trace.checkpoints.size() && trace.checkpoints[ci].t == step.t) {
      const CheckpointRecord& rec = trace.checkpoints[ci++];
      os << prefix << rec.t << ',' << format_double(step.reward) << ','
         << format_double(rec.cum_reward) << ",1," << format_double(rec.hindsight_value) << ','
         << format_double(rec.alpha) << ',' << format_double(rec.alpha_regret) << '\n';
    }
  }
}

}  // namespace subreg
