#ifndef SUBREG_ALGORITHMS_HPP
#define SUBREG_ALGORITHMS_HPP

#include <cmath>
#include <string_view>
#include <vector>

#include "subreg/core.hpp"
#include "subreg/objectives.hpp"
#include "subreg/online_linear.hpp"
#include "subreg/polytope.hpp"

namespace subreg {

// Approximation ratios the policies compete against. Frank-Wolfe style
// policies reach (1 - 1/e) of the best fixed point in hindsight; gradient
// ascent reaches gamma^2 / (gamma^2 + 1), which is 1/2 at gamma = 1.
inline const double kFwAlpha = 1.0 - std::exp(-1.0);
inline const double kGaAlpha = 0.5;

enum class PolicyKind { meta_fw, oga, stochastic_oga, random100, surrogate_ga };

std::string_view policy_name(PolicyKind k);
PolicyKind parse_policy(std::string_view name);

// One online decision maker. The protocol per round t = 1..T is
//   x_t = play(t);  reward f_t(x_t);  observe(t, f_t);
// and play() must not touch f_t unless peeks_at_objective() says so (the
// sampling baseline is the one exception; it gets the revealed objective).
class OnlinePolicy {
 public:
  virtual ~OnlinePolicy() = default;

  PolicyKind kind() const { return kind_; }
  virtual bool peeks_at_objective() const { return false; }

  // revealed is null for every policy with peeks_at_objective() == false.
  virtual Vec play(int t, const Objective* revealed) = 0;
  virtual void observe(int t, const Objective& f) = 0;

 protected:
  explicit OnlinePolicy(PolicyKind kind) : kind_(kind) {}

 private:
  PolicyKind kind_;
};

// K follow-the-leader instances, one per Frank-Wolfe step. Each round the
// selections v^1..v^K are averaged into the play, and instance k is then paid
// the reward gradient taken at the partial average (v^1 + .. + v^{k-1}) / K
// (the point instance k's step was applied to, exactly as in offline FW).
class MetaFwPolicy : public OnlinePolicy {
 public:
  // eta is shared by all K instances; stochastic_grads switches the feedback
  // to the objective's gradient estimator, with fresh noise per instance.
  MetaFwPolicy(const Polytope& p, int num_instances, double eta, bool stochastic_grads,
               Rng rng);

  Vec play(int t, const Objective* revealed) override;
  void observe(int t, const Objective& f) override;

  int num_instances() const { return static_cast<int>(instances_.size()); }
  const RftlState& instance(int k) const { return instances_[k]; }

 private:
  const Polytope* p_;
  std::vector<RftlState> instances_;
  std::vector<Vec> selections_;  // v^1..v^K from the latest play
  bool stochastic_;
  Rng rng_;
};

// Projected gradient ascent x_{t+1} = proj_P(x_t + eta_t grad f_t(x_t)) with
// the schedule eta_t = D / (G sqrt(t)), or eta_scale / sqrt(t) when an
// override is given.
class OgaPolicy : public OnlinePolicy {
 public:
  OgaPolicy(const Polytope& p, Vec start, double diameter_d, double grad_bound_g,
            double eta_scale, bool stochastic, Rng rng);

  Vec play(int t, const Objective* revealed) override;
  void observe(int t, const Objective& f) override;

  double eta_at(int t) const;
  const Vec& iterate() const { return x_; }

 private:
  const Polytope* p_;
  Vec x_;
  double diameter_;
  double grad_bound_;
  double eta_scale_;  // <= 0 means use D / (G sqrt(t))
  bool stochastic_;
  Rng rng_;
};

// Best of num_samples uniform feasible points under the revealed objective.
// This baseline peeks: it evaluates f_t before committing to a play.
class RandomSearchPolicy : public OnlinePolicy {
 public:
  RandomSearchPolicy(const Polytope& p, int num_samples, Rng rng);

  bool peeks_at_objective() const override { return true; }
  Vec play(int t, const Objective* revealed) override;
  void observe(int t, const Objective& f) override;

 private:
  const Polytope* p_;
  int num_samples_;
  Rng rng_;
};

// Projected ascent on the scaled concave surrogate (1 - 1/e) * f~_t instead of
// the reward itself. Only meaningful for families with a surrogate.
class SurrogateGaPolicy : public OnlinePolicy {
 public:
  SurrogateGaPolicy(const Polytope& p, Vec start, double diameter_d, double grad_bound_g,
                    double eta_scale);

  Vec play(int t, const Objective* revealed) override;
  void observe(int t, const Objective& f) override;

  double eta_at(int t) const;

 private:
  const Polytope* p_;
  Vec x_;
  double diameter_;
  double grad_bound_;
  double eta_scale_;
};

// Offline Frank-Wolfe for a single objective: k_steps rounds of
// v = argmax <grad f(x), v>, x += v / k_steps, starting from the origin. The
// returned point is the final average projected onto P (it is a convex
// combination of vertices, so the projection only scrubs rounding).
Vec offline_fw_maximize(const Objective& f, const Polytope& p, int k_steps);

}  // namespace subreg

#endif
