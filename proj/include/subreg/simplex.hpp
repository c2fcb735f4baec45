#ifndef SUBREG_SIMPLEX_HPP
#define SUBREG_SIMPLEX_HPP

#include "subreg/core.hpp"

namespace subreg::lp {

enum class Status { optimal, infeasible };

struct Result {
  Status status = Status::infeasible;
  Vec x;              // structural variables only
  double objective = 0.0;
  int iterations = 0; // both phases combined
};

// maximize c'x  subject to  a x <= b,  lower <= x <= upper  (finite bounds).
//
// Bounded-variable primal simplex: slacks carry the rows, nonbasic structural
// variables rest on a box bound, and Bland's smallest-index rule picks both the
// entering and the leaving variable, so ties resolve deterministically and the
// walk cannot cycle. When the all-slack start is infeasible a phase-1 pass
// drives per-row artificials to zero first; a positive phase-1 optimum means
// the feasible set is empty. The returned point is a basic feasible solution,
// i.e. a vertex of the feasible set.
Result maximize(const Vec& c, const Mat& a, const Vec& b, const Vec& lower, const Vec& upper);

}  // namespace subreg::lp

#endif
