#ifndef SUBREG_POLYTOPE_HPP
#define SUBREG_POLYTOPE_HPP

#include <stdexcept>
#include <string>

#include "subreg/core.hpp"

namespace subreg {

// P = {x : a x <= b} intersected with a box in the nonnegative orthant.
// Construction verifies feasibility (via the LP oracle with a zero objective)
// and keeps the feasible point it found.
class Polytope {
 public:
  Polytope(Mat a, Vec b, Box box);
  static Polytope box_only(Box box);

  int dim() const { return box_.dim(); }
  int num_rows() const { return static_cast<int>(b_.size()); }
  const Mat& a_matrix() const { return a_; }
  const Vec& b_vector() const { return b_; }
  const Box& box() const { return box_; }
  const Vec& feasible_point() const { return feasible_point_; }

 private:
  Mat a_;
  Vec b_;
  Box box_;
  Vec feasible_point_;
};

struct ProjectionError : std::runtime_error {
  ProjectionError(std::string msg, Vec best_iterate, double residual);
  Vec best;
  double residual;
};

// argmax_{v in P} <c, v>, returned as a vertex of P. Ties on the pure-box fast
// path (zero coefficients) resolve to the upper bound; on the simplex path the
// fixed pivot order makes degenerate faces resolve deterministically.
Vec linear_maximize(const Vec& c, const Polytope& p);

// Euclidean projection onto P. Pure box projects by clamping; otherwise
// Dykstra's alternating projections over the halfspaces and the box, stopping
// once a full sweep moves the iterate by less than 1e-10 and the iterate is
// feasible within 1e-9 (throws ProjectionError with the best iterate after
// 200,000 sweeps).
Vec project(const Vec& x, const Polytope& p);

bool contains(const Vec& x, const Polytope& p, double tol = kNumTol);

// Rejection sampling from the bounding box; uniform on P conditioned on
// acceptance. Throws after max_attempts rejections.
Vec sample_uniform(const Polytope& p, Rng& rng, int max_attempts = 100000);

// ||hi - lo|| over the per-coordinate LP ranges; an upper bound on diam(P)
// that is tight for boxes.
double diameter_upper_bound(const Polytope& p);

// ||hi|| over the per-coordinate LP maxima; an upper bound on sup ||x|| since
// P sits in the nonnegative orthant.
double radius_upper_bound(const Polytope& p);

}  // namespace subreg

#endif
