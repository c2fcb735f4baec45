#ifndef SUBREG_ONLINE_LINEAR_HPP
#define SUBREG_ONLINE_LINEAR_HPP

#include "subreg/core.hpp"
#include "subreg/polytope.hpp"

namespace subreg {

// Regularized follow-the-leader over P for linear payoffs <g_t, v>, with the
// quadratic regularizer r(v) = ||v - x0||^2 / 2.
class RftlState {
 public:
  // anchor must lie in P (it is the round-1 play); eta >= 0.
  RftlState(const Polytope& p, Vec anchor, double eta);

  // argmax_{v in P} { eta <payoff_sum, v> - ||v - x0||^2 / 2 }.
  Vec select(const Polytope& p) const;

  // Records the payoff gradient g_t revealed after the round. Rejects
  // non-finite entries.
  void feedback(const Vec& payoff_gradient);

  const Vec& payoff_sum() const { return payoff_sum_; }
  const Vec& anchor() const { return anchor_; }
  double eta() const { return eta_; }
  int rounds_fed() const { return rounds_fed_; }

 private:
  Vec anchor_;
  Vec payoff_sum_;
  double eta_;
  int rounds_fed_ = 0;
};

// Default anchor: the box center pushed into P.
Vec rftl_default_anchor(const Polytope& p);

// The horizon-tuned step eta = D / (G sqrt(T)); zero when D or G vanish
// (payoffs are zero or P is a point, so the selection is pinned anyway).
double rftl_default_eta(double diameter_d, double grad_bound_g, int horizon_t);

}  // namespace subreg

#endif
