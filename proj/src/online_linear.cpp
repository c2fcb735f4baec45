#include "subreg/online_linear.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace subreg {

RftlState::RftlState(const Polytope& p, Vec anchor, double eta)
    : anchor_(std::move(anchor)), payoff_sum_(Vec::Zero(p.dim())), eta_(eta) {
  if (anchor_.size() != p.dim()) throw std::invalid_argument("RftlState: anchor dimension mismatch");
  if (!contains(anchor_, p, 1e-7)) throw std::invalid_argument("RftlState: anchor not in the polytope");
  if (!(eta_ >= 0.0) || !std::isfinite(eta_)) throw std::invalid_argument("RftlState: bad eta");
}

Vec RftlState::select(const Polytope& p) const {
  // With S = sum of payoff gradients, the selection objective is
  //   eta <S, v> - ||v - x0||^2 / 2
  //   = -(1/2) ||v - (x0 + eta S)||^2 + const,
  // so the argmax over P is exactly the Euclidean projection of
  // x0 + eta S onto P. One projection per call, no inner solver.
  return project(anchor_ + eta_ * payoff_sum_, p);
}

void RftlState::feedback(const Vec& payoff_gradient) {
  if (payoff_gradient.size() != payoff_sum_.size())
    throw std::invalid_argument("RftlState::feedback: dimension mismatch");
  if (!all_finite(payoff_gradient))
    throw std::invalid_argument("RftlState::feedback: non-finite payoff gradient");
  payoff_sum_ += payoff_gradient;
  ++rounds_fed_;
}

Vec rftl_default_anchor(const Polytope& p) { return project(p.box().center(), p); }

double rftl_default_eta(double diameter_d, double grad_bound_g, int horizon_t) {
  if (horizon_t <= 0) throw std::invalid_argument("rftl_default_eta: nonpositive horizon");
  if (diameter_d <= 0.0 || grad_bound_g <= 0.0) return 0.0;
  return diameter_d / (grad_bound_g * std::sqrt(static_cast<double>(horizon_t)));
}

}  // namespace subreg
