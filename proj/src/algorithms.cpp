#include "subreg/algorithms.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace subreg {

std::string_view policy_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::meta_fw: return "meta_fw";
    case PolicyKind::oga: return "oga";
    case PolicyKind::stochastic_oga: return "stochastic_oga";
    case PolicyKind::random100: return "random100";
    case PolicyKind::surrogate_ga: return "surrogate_ga";
  }
  throw std::logic_error("policy_name: bad kind");
}

PolicyKind parse_policy(std::string_view name) {
  if (name == "meta_fw") return PolicyKind::meta_fw;
  if (name == "oga") return PolicyKind::oga;
  if (name == "stochastic_oga") return PolicyKind::stochastic_oga;
  if (name == "random100") return PolicyKind::random100;
  if (name == "surrogate_ga") return PolicyKind::surrogate_ga;
  throw std::invalid_argument("unknown policy: " + std::string(name));
}

// ---------------------------------------------------------------------------
// MetaFwPolicy

MetaFwPolicy::MetaFwPolicy(const Polytope& p, int num_instances, double eta,
                           bool stochastic_grads, Rng rng)
    : OnlinePolicy(PolicyKind::meta_fw),
      p_(&p),
      stochastic_(stochastic_grads),
      rng_(rng) {
  if (num_instances <= 0) throw std::invalid_argument("MetaFwPolicy: need K >= 1");
  if (!(eta >= 0.0) || !std::isfinite(eta))
    throw std::invalid_argument("MetaFwPolicy: eta must be finite and >= 0");
  const Vec anchor = rftl_default_anchor(p);
  instances_.reserve(num_instances);
  for (int k = 0; k < num_instances; ++k) instances_.emplace_back(p, anchor, eta);
}

Vec MetaFwPolicy::play(int, const Objective*) {
  selections_.clear();
  selections_.reserve(instances_.size());
  Vec x = Vec::Zero(p_->dim());
  for (const RftlState& inst : instances_) {
    selections_.push_back(inst.select(*p_));
    x += selections_.back();
  }
  x /= static_cast<double>(instances_.size());
  return x;
}

void MetaFwPolicy::observe(int, const Objective& f) {
  if (selections_.size() != instances_.size())
    throw std::logic_error("MetaFwPolicy: observe without a matching play");
  const double inv_k = 1.0 / static_cast<double>(instances_.size());
  Vec partial = Vec::Zero(p_->dim());
  for (size_t k = 0; k < instances_.size(); ++k) {
    const Vec g = stochastic_ ? f.stochastic_gradient(partial, rng_) : f.gradient(partial);
    instances_[k].feedback(g);
    partial += inv_k * selections_[k];
  }
  selections_.clear();
}

// ---------------------------------------------------------------------------
// OgaPolicy

OgaPolicy::OgaPolicy(const Polytope& p, Vec start, double diameter_d, double grad_bound_g,
                     double eta_scale, bool stochastic, Rng rng)
    : OnlinePolicy(stochastic ? PolicyKind::stochastic_oga : PolicyKind::oga),
      p_(&p),
      x_(std::move(start)),
      diameter_(diameter_d),
      grad_bound_(grad_bound_g),
      eta_scale_(eta_scale),
      stochastic_(stochastic),
      rng_(rng) {
  if (!contains(x_, p, 1e-7)) throw std::invalid_argument("OgaPolicy: start not in P");
  if (!(diameter_ >= 0.0) || !(grad_bound_ >= 0.0))
    throw std::invalid_argument("OgaPolicy: D and G must be >= 0");
}

double OgaPolicy::eta_at(int t) const {
  if (t <= 0) throw std::invalid_argument("OgaPolicy: rounds are 1-based");
  if (eta_scale_ > 0.0) return eta_scale_ / std::sqrt(static_cast<double>(t));
  if (diameter_ <= 0.0 || grad_bound_ <= 0.0) return 0.0;
  return diameter_ / (grad_bound_ * std::sqrt(static_cast<double>(t)));
}

Vec OgaPolicy::play(int, const Objective*) { return x_; }

void OgaPolicy::observe(int t, const Objective& f) {
  const Vec g = stochastic_ ? f.stochastic_gradient(x_, rng_) : f.gradient(x_);
  x_ = project(x_ + eta_at(t) * g, *p_);
}

// ---------------------------------------------------------------------------
// RandomSearchPolicy

RandomSearchPolicy::RandomSearchPolicy(const Polytope& p, int num_samples, Rng rng)
    : OnlinePolicy(PolicyKind::random100), p_(&p), num_samples_(num_samples), rng_(rng) {
  if (num_samples <= 0) throw std::invalid_argument("RandomSearchPolicy: need samples >= 1");
}

Vec RandomSearchPolicy::play(int, const Objective* revealed) {
  if (revealed == nullptr)
    throw std::logic_error("RandomSearchPolicy: needs the revealed objective");
  Vec best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < num_samples_; ++i) {
    Vec x = sample_uniform(*p_, rng_);
    const double v = revealed->value(x);
    // Strict improvement, so ties keep the earliest sample.
    if (v > best_value) {
      best_value = v;
      best = std::move(x);
    }
  }
  return best;
}

void RandomSearchPolicy::observe(int, const Objective&) {}

// ---------------------------------------------------------------------------
// SurrogateGaPolicy

SurrogateGaPolicy::SurrogateGaPolicy(const Polytope& p, Vec start, double diameter_d,
                                     double grad_bound_g, double eta_scale)
    : OnlinePolicy(PolicyKind::surrogate_ga),
      p_(&p),
      x_(std::move(start)),
      diameter_(diameter_d),
      grad_bound_(grad_bound_g),
      eta_scale_(eta_scale) {
  if (!contains(x_, p, 1e-7)) throw std::invalid_argument("SurrogateGaPolicy: start not in P");
  if (!(diameter_ >= 0.0) || !(grad_bound_ >= 0.0))
    throw std::invalid_argument("SurrogateGaPolicy: D and G must be >= 0");
}

double SurrogateGaPolicy::eta_at(int t) const {
  if (t <= 0) throw std::invalid_argument("SurrogateGaPolicy: rounds are 1-based");
  if (eta_scale_ > 0.0) return eta_scale_ / std::sqrt(static_cast<double>(t));
  if (diameter_ <= 0.0 || grad_bound_ <= 0.0) return 0.0;
  return diameter_ / (grad_bound_ * std::sqrt(static_cast<double>(t)));
}

Vec SurrogateGaPolicy::play(int, const Objective*) { return x_; }

void SurrogateGaPolicy::observe(int t, const Objective& f) {
  const Vec g = kFwAlpha * f.surrogate_supergradient(x_);
  x_ = project(x_ + eta_at(t) * g, *p_);
}

// ---------------------------------------------------------------------------

Vec offline_fw_maximize(const Objective& f, const Polytope& p, int k_steps) {
  if (k_steps <= 0) throw std::invalid_argument("offline_fw_maximize: need k_steps >= 1");
  const double step = 1.0 / static_cast<double>(k_steps);
  Vec x = Vec::Zero(p.dim());
  for (int k = 0; k < k_steps; ++k) {
    const Vec v = linear_maximize(f.gradient(x), p);
    x += step * v;
  }
  return project(x, p);
}

}  // namespace subreg
