#include "subreg/polytope.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "subreg/simplex.hpp"

namespace subreg {

Polytope::Polytope(Mat a, Vec b, Box box)
    : a_(std::move(a)), b_(std::move(b)), box_(std::move(box)), feasible_point_(box_.lower()) {
  if (a_.rows() != b_.size()) throw std::invalid_argument("Polytope: row count mismatch");
  if (a_.rows() > 0 && a_.cols() != box_.dim()) throw std::invalid_argument("Polytope: column count mismatch");
  if (!all_finite(a_) || !all_finite(b_)) throw std::invalid_argument("Polytope: non-finite constraint");
  if (a_.rows() == 0) return;  // box alone is trivially feasible
  const auto res = lp::maximize(Vec::Zero(box_.dim()), a_, b_, box_.lower(), box_.upper());
  if (res.status != lp::Status::optimal) throw std::invalid_argument("Polytope: infeasible constraint set");
  feasible_point_ = res.x;
}

Polytope Polytope::box_only(Box box) {
  const int n = box.dim();
  return Polytope(Mat::Zero(0, n), Vec::Zero(0), std::move(box));
}

ProjectionError::ProjectionError(std::string msg, Vec best_iterate, double res)
    : std::runtime_error(std::move(msg)), best(std::move(best_iterate)), residual(res) {}

Vec linear_maximize(const Vec& c, const Polytope& p) {
  if (c.size() != p.dim()) throw std::invalid_argument("linear_maximize: dimension mismatch");
  if (!all_finite(c)) throw std::invalid_argument("linear_maximize: non-finite objective");
  if (p.num_rows() == 0) {
    Vec v(p.dim());
    for (int j = 0; j < p.dim(); ++j)
      v[j] = c[j] >= 0.0 ? p.box().upper()[j] : p.box().lower()[j];
    return v;
  }
  const auto res = lp::maximize(c, p.a_matrix(), p.b_vector(), p.box().lower(), p.box().upper());
  if (res.status != lp::Status::optimal)
    throw std::runtime_error("linear_maximize: solver reported infeasible on a verified polytope");
  return res.x;
}

namespace {

constexpr double kMoveTol = 1e-10;
constexpr double kFeasTol = 1e-9;

// Projection onto {z : <a, z> <= b}.
Vec project_halfspace(const Vec& y, const Vec& a, double b) {
  const double violation = a.dot(y) - b;
  if (violation <= 0.0) return y;
  return y - (violation / a.squaredNorm()) * a;
}

// Dykstra's alternating projections over the m halfspaces and the box. One
// correction term per constraint set; carrying them is what makes the
// alternating projections converge to the projection onto the intersection
// rather than just a feasible point. Returns false when the sweep budget runs
// out, leaving the last iterate in z.
bool dykstra(const Vec& x, const Polytope& p, int max_sweeps, Vec& z) {
  const int m = p.num_rows();
  std::vector<Vec> correction(m + 1, Vec::Zero(p.dim()));
  z = x;
  int stalled = 0;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const Vec sweep_start = z;
    for (int i = 0; i < m; ++i) {
      const Vec y = z + correction[i];
      z = project_halfspace(y, p.a_matrix().row(i).transpose(), p.b_vector()[i]);
      correction[i] = y - z;
    }
    const Vec y = z + correction[m];
    z = p.box().clamp(y);
    correction[m] = y - z;
    const double moved = (z - sweep_start).norm();
    // Stationarity of z alone is not a safe stop: when the input is far
    // outside, the clamp can pin z to a box face while the correction terms
    // are still growing, so z stops moving at an infeasible point. Require
    // feasibility as well. When that pinned state persists the corrections
    // are crawling toward multipliers proportional to the input distance,
    // which can take millions of sweeps; give up early and let the caller's
    // dual solve finish the job.
    if (moved < kMoveTol) {
      if (contains(z, p, kFeasTol)) return true;
      if (++stalled >= 200) return false;
    } else {
      stalled = 0;
    }
  }
  return false;
}

// a . clamp(w - mu a) - b, the constraint residual along one dual coordinate.
double row_residual(const Vec& w, const Vec& a, double b, const Box& box, double mu) {
  double s = 0.0;
  for (int j = 0; j < w.size(); ++j)
    s += a[j] * std::clamp(w[j] - a[j] * mu, box.lower()[j], box.upper()[j]);
  return s - b;
}

// Smallest mu >= 0 with a . clamp(w - mu a) <= b. The residual is piecewise
// linear and nonincreasing in mu with breakpoints where a coordinate enters
// or leaves its box bound, so the root is exact up to rounding. A nonempty
// polytope guarantees the residual is <= 0 in the mu -> infinity limit
// (there the clamp reaches the box vertex minimizing <a, .>).
double solve_multiplier(const Vec& w, const Vec& a, double b, const Box& box) {
  double lo = 0.0;
  double res_lo = row_residual(w, a, b, box, 0.0);
  if (res_lo <= 0.0) return 0.0;
  std::vector<double> cuts;
  cuts.reserve(static_cast<std::size_t>(2 * w.size()));
  for (int j = 0; j < w.size(); ++j) {
    if (a[j] == 0.0) continue;
    const double to_lower = (w[j] - box.lower()[j]) / a[j];
    const double to_upper = (w[j] - box.upper()[j]) / a[j];
    if (to_lower > 0.0) cuts.push_back(to_lower);
    if (to_upper > 0.0) cuts.push_back(to_upper);
  }
  std::sort(cuts.begin(), cuts.end());
  for (double cut : cuts) {
    const double res = row_residual(w, a, b, box, cut);
    if (res <= 0.0)
      return res == res_lo ? cut : lo + (cut - lo) * res_lo / (res_lo - res);
    lo = cut;
    res_lo = res;
  }
  // Positive residual past the last breakpoint is a rounding artifact of the
  // feasibility argument above; the best attainable multiplier is the last cut.
  return lo;
}

// The clamp argument w[j] - a[j] mu is a difference of numbers as large as
// the pull, so its rounding error scales with the operands, not the box.
// Any residual comparison must budget for that: this is the floor below
// which a computed residual is indistinguishable from zero.
double residual_noise_floor(const Vec& w, const Vec& a, double mu) {
  double s = 0.0;
  for (int j = 0; j < w.size(); ++j)
    s += std::abs(a[j]) * (std::abs(w[j]) + std::abs(a[j] * mu));
  return 4e-16 * s;
}

// Root of a . clamp(w - t a) = b over unrestricted t. The residual is
// piecewise linear, continuous, and nonincreasing in t, flat outside the
// clamp breakpoints, so a breakpoint scan plus one interpolation is exact up
// to rounding. Because every coordinate passes through the clamp before the
// dot product, the residual is accurate at box scale no matter how large w
// is, which is what makes this usable where the alternating projections and
// their correction terms drown in the input magnitude.
std::optional<double> scan_equality_root(const Vec& w, const Vec& a, double b, const Box& box) {
  const double tol = 1e-10 * (1.0 + std::abs(b));
  std::vector<double> cuts;
  cuts.reserve(static_cast<std::size_t>(2 * w.size()));
  for (int j = 0; j < w.size(); ++j) {
    if (a[j] == 0.0) continue;
    cuts.push_back((w[j] - box.lower()[j]) / a[j]);
    cuts.push_back((w[j] - box.upper()[j]) / a[j]);
  }
  if (cuts.empty()) return std::abs(b) <= tol ? std::optional<double>(0.0) : std::nullopt;
  std::sort(cuts.begin(), cuts.end());
  double prev = cuts.front();
  double res_prev = row_residual(w, a, b, box, prev);
  if (res_prev <= 0.0) {
    // The residual is already at its plateau maximum left of the first cut.
    return -res_prev <= tol + residual_noise_floor(w, a, prev) ? std::optional<double>(prev)
                                                               : std::nullopt;
  }
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    const double res = row_residual(w, a, b, box, cuts[i]);
    if (res <= 0.0) return prev + (cuts[i] - prev) * res_prev / (res_prev - res);
    prev = cuts[i];
    res_prev = res;
  }
  return res_prev <= tol + residual_noise_floor(w, a, prev) ? std::optional<double>(prev)
                                                            : std::nullopt;
}

// Solves a_r . clamp(x - sum_s lam_s a_s) = b_r for every row r in `rows`,
// one nesting level per row: the innermost multiplier by exact breakpoint
// scan, outer ones by bracketing plus bisection. By the envelope theorem the
// outer residual, with the inner system re-solved at each probe, is the
// derivative of a partially maximized concave dual, hence nonincreasing, so
// the bisection is sound. Returns false when the equalities have no common
// solution over the box.
bool solve_equality_rows(const Vec& x, const Polytope& p, const std::vector<int>& rows,
                         std::size_t depth, Vec& lam) {
  const Vec a = p.a_matrix().row(rows[depth]).transpose();
  const double b = p.b_vector()[rows[depth]];
  Vec w = x;
  for (std::size_t d = 0; d < depth; ++d) w -= lam[d] * p.a_matrix().row(rows[d]).transpose();

  if (depth + 1 == rows.size()) {
    const auto root = scan_equality_root(w, a, b, p.box());
    if (!root) return false;
    lam[static_cast<int>(depth)] = *root;
    return true;
  }

  bool solved = true;
  auto residual_at = [&](double t) {
    lam[static_cast<int>(depth)] = t;
    if (!solve_equality_rows(x, p, rows, depth + 1, lam)) {
      solved = false;
      return 0.0;
    }
    Vec shifted = w - t * a;
    for (std::size_t d = depth + 1; d < rows.size(); ++d)
      shifted -= lam[d] * p.a_matrix().row(rows[d]).transpose();
    return row_residual(shifted, a, b, p.box(), 0.0);
  };

  // Residual tolerance at multiplier t: the clamp arguments stack the input,
  // this row's pull, and every inner row's pull, and the attainable residual
  // cannot beat the rounding of that chain. lam holds the inner solves from
  // the latest residual_at(t), so the floor is evaluated after it.
  auto accept_at = [&](double t) {
    Vec opmag = x.cwiseAbs() + (t * a).cwiseAbs();
    for (std::size_t d = 0; d < rows.size(); ++d)
      if (d != depth)
        opmag += (lam[static_cast<int>(d)] * p.a_matrix().row(rows[d]).transpose()).cwiseAbs();
    return 1e-10 * (1.0 + std::abs(b)) + 4e-16 * a.cwiseAbs().dot(opmag);
  };

  // Bracket the root: grow the interval until the residual changes sign or
  // stops changing (its plateaus are reached), then bisect.
  double lo = -1.0, hi = 1.0;
  double res_lo = residual_at(lo);
  if (!solved) return false;
  for (int i = 0; i < 200 && res_lo < 0.0; ++i) {
    lo *= 2.0;
    const double next = residual_at(lo);
    if (!solved) return false;
    if (next == res_lo && i > 60) break;
    res_lo = next;
  }
  double res_hi = residual_at(hi);
  if (!solved) return false;
  for (int i = 0; i < 200 && res_hi > 0.0; ++i) {
    hi *= 2.0;
    const double next = residual_at(hi);
    if (!solved) return false;
    if (next == res_hi && i > 60) break;
    res_hi = next;
  }
  if (res_lo < 0.0 || res_hi > 0.0) {
    // One plateau never reaches zero; accept a plateau endpoint only when its
    // residual already rounds to zero.
    const double t = res_lo < 0.0 ? lo : hi;
    const double res = residual_at(t);
    return solved && std::abs(res) <= accept_at(t);
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double res = residual_at(mid);
    if (!solved) return false;
    if (res > 0.0) {
      lo = mid;
      res_lo = res;
    } else {
      hi = mid;
      res_hi = res;
    }
  }
  // The remaining interval is below breakpoint resolution; one interpolation
  // lands on the root of the final linear piece.
  const double t = res_lo == res_hi ? hi : lo + (hi - lo) * res_lo / (res_lo - res_hi);
  const double res = residual_at(t);
  return solved && std::abs(res) <= accept_at(t);
}

// Exact projection via KKT active-set enumeration, for a handful of rows:
// some subset of the halfspaces holds with equality at the projection with
// nonnegative multipliers while the rest are slack, and checking all subsets
// in increasing size finds it. Subset solve failures and sign rejections fall
// through to the next candidate.
std::optional<Vec> project_by_active_sets(const Vec& x, const Polytope& p) {
  const int m = p.num_rows();
  std::vector<std::uint32_t> masks(std::size_t{1} << m);
  for (std::uint32_t i = 0; i < masks.size(); ++i) masks[i] = i;
  std::sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
    const int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa < pb : a < b;
  });

  for (const std::uint32_t mask : masks) {
    std::vector<int> rows;
    for (int r = 0; r < m; ++r)
      if (mask & (std::uint32_t{1} << r)) rows.push_back(r);

    Vec lam = Vec::Zero(static_cast<int>(rows.size()));
    if (!rows.empty() && !solve_equality_rows(x, p, rows, 0, lam)) continue;
    const double lam_floor = -1e-12 * (1.0 + (rows.empty() ? 0.0 : lam.cwiseAbs().maxCoeff()));
    if ((lam.array() < lam_floor).any()) continue;

    Vec z = x;
    Vec opmag = x.cwiseAbs();
    for (std::size_t d = 0; d < rows.size(); ++d) {
      const Vec pull = lam[static_cast<int>(d)] * p.a_matrix().row(rows[d]).transpose();
      z -= pull;
      opmag += pull.cwiseAbs();
    }
    z = p.box().clamp(z);

    // Slack rows tolerate the rounding of the multiplier chain: z came out of
    // differences as large as the pull, so box-scale precision is not there.
    bool slack_rows_ok = true;
    for (int r = 0; r < m && slack_rows_ok; ++r) {
      if (mask & (std::uint32_t{1} << r)) continue;
      const double tol = 1e-9 * (1.0 + std::abs(p.b_vector()[r])) +
                         4e-16 * p.a_matrix().row(r).cwiseAbs().dot(opmag);
      slack_rows_ok = p.a_matrix().row(r).dot(z) <= p.b_vector()[r] + tol;
    }
    if (slack_rows_ok) return z;
  }
  return std::nullopt;
}

// Fallback for inputs Dykstra cannot handle: maximize the Lagrangian dual of
// min ||z - x||^2 / 2 over z in the box with A z <= b. The primal
// reconstruction is z(mu) = clamp(x - A^T mu); cyclic exact maximization
// over the mu coordinates converges at a geometric rate set by the angles
// between constraints, independent of how far outside x is.
Vec dual_multipliers(const Vec& x, const Polytope& p) {
  const int m = p.num_rows();
  Vec mu = Vec::Zero(m);
  // Coordinates of z come from differences of numbers as large as x, so the
  // reachable feasibility resolution degrades with the input magnitude.
  const double feas_slack = kFeasTol + 1e-14 * x.cwiseAbs().maxCoeff();
  constexpr int kMaxCycles = 100000;
  for (int cycle = 0; cycle < kMaxCycles; ++cycle) {
    for (int r = 0; r < m; ++r) {
      Vec w = x;
      for (int s = 0; s < m; ++s)
        if (s != r) w -= mu[s] * p.a_matrix().row(s).transpose();
      mu[r] = solve_multiplier(w, p.a_matrix().row(r).transpose(), p.b_vector()[r], p.box());
    }
    // Weak duality: once z is feasible, ||z - projection||^2 <= 2 gap with
    // gap = sum_r mu_r slack_r, whether or not mu itself has settled. That
    // matters because near-dependent rows leave a flat ridge of optimal
    // multipliers that the coordinate updates can slide along indefinitely,
    // and because with multipliers this large the product cannot be resolved
    // below the relative scale of the objective, the gap test is relative.
    const Vec z = p.box().clamp(x - p.a_matrix().transpose() * mu);
    if (contains(z, p, feas_slack)) {
      double gap = 0.0;
      for (int r = 0; r < m; ++r)
        gap += mu[r] * std::max(0.0, p.b_vector()[r] - p.a_matrix().row(r).dot(z));
      if (gap <= 1e-12 * (1.0 + 0.5 * (x - z).squaredNorm())) return mu;
    }
  }
  throw ProjectionError("project: dual coordinate ascent did not converge",
                        p.box().clamp(x - p.a_matrix().transpose() * mu), 0.0);
}

}  // namespace

Vec project(const Vec& x, const Polytope& p) {
  if (x.size() != p.dim()) throw std::invalid_argument("project: dimension mismatch");
  if (!all_finite(x)) throw std::invalid_argument("project: non-finite input");
  if (p.num_rows() == 0) return p.box().clamp(x);
  if (contains(x, p, 0.0)) return x;

  Vec z(p.dim());
  if (dykstra(x, p, 20000, z)) return z;

  if (p.num_rows() <= 4) {
    if (const auto exact = project_by_active_sets(x, p)) {
      if (contains(*exact, p, kFeasTol)) return *exact;
      // Only rounding residue from the lambda solves can be left; restarting
      // the alternating projections this close has no transient to cross.
      if (dykstra(*exact, p, 200000, z)) return z;
    }
  }

  const Vec mu = dual_multipliers(x, p);
  z = p.box().clamp(x - p.a_matrix().transpose() * mu);
  if (contains(z, p, kFeasTol)) return z;
  Vec polished(p.dim());
  if (dykstra(z, p, 200000, polished)) return polished;
  throw ProjectionError("project: alternating projections did not converge", polished,
                        (polished - z).norm());
}

bool contains(const Vec& x, const Polytope& p, double tol) {
  if (!p.box().contains(x, tol)) return false;
  if (p.num_rows() == 0) return true;
  return ((p.a_matrix() * x).array() <= p.b_vector().array() + tol).all();
}

Vec sample_uniform(const Polytope& p, Rng& rng, int max_attempts) {
  if (max_attempts <= 0) throw std::invalid_argument("sample_uniform: nonpositive attempt budget");
  Vec z(p.dim());
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    for (int j = 0; j < p.dim(); ++j) z[j] = rng.uniform(p.box().lower()[j], p.box().upper()[j]);
    if (p.num_rows() == 0 || ((p.a_matrix() * z).array() <= p.b_vector().array()).all()) return z;
  }
  throw std::runtime_error("sample_uniform: no acceptance within the attempt budget");
}

namespace {

// Coordinate ranges of P: per-coordinate LP minima and maxima.
std::pair<Vec, Vec> coordinate_ranges(const Polytope& p) {
  if (p.num_rows() == 0) return {p.box().lower(), p.box().upper()};
  const int n = p.dim();
  Vec lo(n), hi(n);
  Vec c = Vec::Zero(n);
  for (int j = 0; j < n; ++j) {
    c[j] = 1.0;
    hi[j] = linear_maximize(c, p)[j];
    c[j] = -1.0;
    lo[j] = linear_maximize(c, p)[j];
    c[j] = 0.0;
  }
  return {lo, hi};
}

}  // namespace

double diameter_upper_bound(const Polytope& p) {
  const auto [lo, hi] = coordinate_ranges(p);
  return (hi - lo).norm();
}

double radius_upper_bound(const Polytope& p) {
  const auto [lo, hi] = coordinate_ranges(p);
  return hi.norm();
}

}  // namespace subreg
