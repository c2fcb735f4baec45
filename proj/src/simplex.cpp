#include "subreg/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace subreg::lp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-11;

enum VarState : char { kAtLower, kAtUpper, kBasic };

// Variable layout: [0, n) structurals, [n, n+m) slacks, [n+m, total) artificials.
struct Worker {
  int n, m;
  const Mat& a;
  const Vec& b;
  Vec lb, ub;                 // per-variable bounds, artificials included
  std::vector<int> art_row;   // artificial ordinal -> constraint row
  std::vector<int> basis;     // row -> basic variable
  std::vector<char> state;    // variable -> VarState
  int total;
  int iterations = 0;

  Worker(const Mat& a_in, const Vec& b_in, const Vec& l_in, const Vec& u_in)
      : n(static_cast<int>(l_in.size())), m(static_cast<int>(b_in.size())), a(a_in), b(b_in) {
    total = n + m;
    lb = Vec::Zero(total);
    ub = Vec::Zero(total);
    lb.head(n) = l_in;
    ub.head(n) = u_in;
    lb.segment(n, m).setZero();
    ub.segment(n, m).setConstant(kInf);
    state.assign(total, kAtLower);
    basis.resize(m);
  }

  Vec column(int j) const {
    if (j < n) return a.col(j);
    Vec e = Vec::Zero(m);
    if (j < n + m) {
      e[j - n] = 1.0;
    } else {
      e[art_row[j - n - m]] = -1.0;
    }
    return e;
  }

  // Value of a nonbasic variable.
  double rest_value(int j) const { return state[j] == kAtUpper ? ub[j] : lb[j]; }

  Vec nonbasic_rhs() const {
    Vec rhs = b;
    for (int j = 0; j < total; ++j) {
      if (state[j] == kBasic) continue;
      const double v = rest_value(j);
      if (v != 0.0) rhs -= column(j) * v;
    }
    return rhs;
  }

  // Runs Bland-rule pivots until the given objective is optimal.
  void optimize(const Vec& cobj) {
    const double cost_tol = 1e-9 * (1.0 + cobj.cwiseAbs().maxCoeff());
    const int max_iter = 5000 + 100 * total;
    for (;; ++iterations) {
      if (iterations > max_iter) throw std::runtime_error("simplex: iteration cap exceeded");

      Mat basis_mat(m, m);
      for (int r = 0; r < m; ++r) basis_mat.col(r) = column(basis[r]);
      const Mat b_inv = basis_mat.partialPivLu().inverse();

      const Vec x_basic = b_inv * nonbasic_rhs();
      Vec c_basic(m);
      for (int r = 0; r < m; ++r) c_basic[r] = cobj[basis[r]];
      const Vec y = b_inv.transpose() * c_basic;

      // Entering variable: smallest index with a favorable reduced cost.
      int enter = -1;
      double dir = 0.0;
      for (int j = 0; j < total; ++j) {
        if (state[j] == kBasic || lb[j] == ub[j]) continue;
        const double reduced = cobj[j] - y.dot(column(j));
        if (state[j] == kAtLower && reduced > cost_tol) { enter = j; dir = 1.0; break; }
        if (state[j] == kAtUpper && reduced < -cost_tol) { enter = j; dir = -1.0; break; }
      }
      if (enter < 0) return;

      const Vec w = b_inv * column(enter);

      // Ratio test: the entering step is limited by the entering variable's own
      // span and by every basic variable reaching one of its bounds.
      double step = ub[enter] - lb[enter];  // may be +inf for slacks
      int leave_row = -1;
      bool leave_to_upper = false;
      for (int r = 0; r < m; ++r) {
        const double delta = -dir * w[r];  // d(basic value)/d(step)
        double limit = kInf;
        bool hits_upper = false;
        if (delta > kPivotTol) {
          if (std::isfinite(ub[basis[r]])) { limit = (ub[basis[r]] - x_basic[r]) / delta; hits_upper = true; }
        } else if (delta < -kPivotTol) {
          limit = (x_basic[r] - lb[basis[r]]) / (-delta);
        } else {
          continue;
        }
        if (limit < 0.0) limit = 0.0;  // degenerate basic slightly past its bound
        bool take = limit < step - kPivotTol;
        // Tie on the leaving step: smallest basic variable index (Bland).
        if (!take && limit <= step + kPivotTol && leave_row >= 0 && basis[r] < basis[leave_row]) take = true;
        if (take) {
          step = std::min(step, limit);
          leave_row = r;
          leave_to_upper = hits_upper;
        }
      }

      if (!std::isfinite(step)) throw std::runtime_error("simplex: unbounded objective");

      if (leave_row < 0) {
        // Bound flip: the entering variable crosses its whole span.
        state[enter] = (state[enter] == kAtLower) ? kAtUpper : kAtLower;
        continue;
      }

      const int leave = basis[leave_row];
      basis[leave_row] = enter;
      state[enter] = kBasic;
      state[leave] = leave_to_upper ? kAtUpper : kAtLower;
    }
  }

  // Appends an artificial for constraint row r.
  int add_artificial(int r) {
    art_row.push_back(r);
    lb.conservativeResize(total + 1);
    ub.conservativeResize(total + 1);
    lb[total] = 0.0;
    ub[total] = kInf;
    state.push_back(kAtLower);
    return total++;
  }

  Vec structural_solution() const {
    const Vec rhs = nonbasic_rhs();
    Mat basis_mat(m, m);
    for (int r = 0; r < m; ++r) basis_mat.col(r) = column(basis[r]);
    const Vec x_basic = basis_mat.partialPivLu().solve(rhs);
    Vec x(n);
    for (int j = 0; j < n; ++j) x[j] = rest_value(j);
    for (int r = 0; r < m; ++r)
      if (basis[r] < n) x[basis[r]] = x_basic[r];
    return x;
  }

  double artificial_total() const {
    const Vec rhs = nonbasic_rhs();
    Mat basis_mat(m, m);
    for (int r = 0; r < m; ++r) basis_mat.col(r) = column(basis[r]);
    const Vec x_basic = basis_mat.partialPivLu().solve(rhs);
    double s = 0.0;
    for (int r = 0; r < m; ++r)
      if (basis[r] >= n + m) s += std::max(x_basic[r], 0.0);
    for (int j = n + m; j < total; ++j)
      if (state[j] == kAtUpper) s += ub[j];
    return s;
  }
};

}  // namespace

Result maximize(const Vec& c, const Mat& a, const Vec& b, const Vec& lower, const Vec& upper) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(b.size());
  if (lower.size() != n || upper.size() != n || (m > 0 && a.cols() != n) || a.rows() != m)
    throw std::invalid_argument("lp::maximize: dimension mismatch");
  if (!all_finite(c) || !all_finite(a) || !all_finite(b) || !all_finite(lower) || !all_finite(upper))
    throw std::invalid_argument("lp::maximize: non-finite input");
  if ((lower.array() > upper.array()).any())
    throw std::invalid_argument("lp::maximize: lower > upper");

  Result res;
  if (m == 0) {
    // Pure box: coordinatewise sign selection, zero coefficients to the upper bound.
    res.status = Status::optimal;
    res.x = Vec(n);
    for (int j = 0; j < n; ++j) res.x[j] = c[j] >= 0.0 ? upper[j] : lower[j];
    res.objective = c.dot(res.x);
    return res;
  }

  Worker w(a, b, lower, upper);

  // All structurals at their lower bound; rows whose slack would start negative
  // get an artificial instead.
  const Vec slack0 = b - a * lower;
  const double feas_tol = 1e-9 * (1.0 + b.cwiseAbs().maxCoeff());
  bool need_phase1 = false;
  for (int r = 0; r < m; ++r) {
    if (slack0[r] >= 0.0) {
      w.basis[r] = w.n + r;
      w.state[w.n + r] = kBasic;
    } else {
      const int art = w.add_artificial(r);
      w.basis[r] = art;
      w.state[art] = kBasic;
      need_phase1 = true;
    }
  }

  if (need_phase1) {
    Vec c1 = Vec::Zero(w.total);
    for (int j = w.n + w.m; j < w.total; ++j) c1[j] = -1.0;
    w.optimize(c1);
    if (w.artificial_total() > feas_tol) {
      res.status = Status::infeasible;
      res.iterations = w.iterations;
      return res;
    }
    // Artificials stay pinned at zero through phase 2.
    for (int j = w.n + w.m; j < w.total; ++j) { w.lb[j] = 0.0; w.ub[j] = 0.0; }
  }

  Vec c2 = Vec::Zero(w.total);
  c2.head(n) = c;
  w.optimize(c2);

  res.status = Status::optimal;
  res.x = w.structural_solution();
  res.objective = c.dot(res.x);
  res.iterations = w.iterations;
  return res;
}

}  // namespace subreg::lp
