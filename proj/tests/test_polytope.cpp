#include "subreg/polytope.hpp"

#include "doctest.h"

#include <cmath>
#include <stdexcept>

using namespace subreg;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Polytope simplex_like(double rhs) {
  Mat a(1, 2);
  a << 1.0, 1.0;
  return Polytope(a, Vec::Constant(1, rhs), Box::unit(2));
}

Polytope random_polytope(int n, int m, Rng& rng) {
  Mat a(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(0.0, 1.0);
  // b = n/4 keeps the rows binding without starving the sampler.
  return Polytope(a, Vec::Constant(m, 0.25 * n), Box::unit(n));
}

}  // namespace

TEST_CASE("construction rejects empty polytopes and keeps a feasible point") {
  const Polytope p = simplex_like(1.0);
  CHECK(contains(p.feasible_point(), p, 1e-9));

  Mat a(1, 2);
  a << 1.0, 1.0;
  CHECK_THROWS_AS(Polytope(a, Vec::Constant(1, -1.0), Box::unit(2)), std::invalid_argument);
}

TEST_CASE("box LP resolves zero coefficients to the upper bound") {
  const Polytope p = Polytope::box_only(Box::unit(2));
  CHECK(linear_maximize(vec2(1, 0), p) == vec2(1, 1));
  // Zero objective still returns a feasible point.
  CHECK(contains(linear_maximize(vec2(0, 0), p), p, 1e-9));
}

TEST_CASE("linear maximization reaches the binding facet") {
  const Polytope p = simplex_like(1.0);
  const Vec v = linear_maximize(vec2(1, 1), p);
  CHECK(v.sum() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(contains(v, p, 1e-9));
}

TEST_CASE("projection clamps on boxes and solves the halfspace case") {
  const Polytope box = Polytope::box_only(Box::unit(2));
  CHECK(project(vec2(2, 2), box) == vec2(1, 1));

  // Single halfspace x1 + x2 <= 0.8: the projection of (0.5, 0.5) moves along
  // the normal by (a.x - b) / |a|^2 = 0.1 per coordinate.
  const Polytope p = simplex_like(0.8);
  const Vec z = project(vec2(0.5, 0.5), p);
  CHECK(z[0] == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(z[1] == doctest::Approx(0.4).epsilon(1e-9));

  // Fixed point: interior inputs are returned unchanged.
  CHECK(project(vec2(0.1, 0.2), p) == vec2(0.1, 0.2));
}

TEST_CASE("projection satisfies the variational inequality") {
  Rng rng(0x9e01);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 5);
    Polytope p = random_polytope(n, 2, rng);
    for (int rep = 0; rep < 20; ++rep) {
      Vec x(n);
      for (int j = 0; j < n; ++j) x[j] = rng.uniform(-0.5, 1.5);
      const Vec z = project(x, p);
      CHECK(contains(z, p, 1e-7));
      for (int s = 0; s < 20; ++s) {
        const Vec y = sample_uniform(p, rng);
        CHECK((x - z).dot(y - z) <= 1e-7 * (1.0 + x.norm()));
      }
      // Idempotence and nonexpansiveness.
      CHECK((project(z, p) - z).norm() <= 1e-7);
      Vec x2(n);
      for (int j = 0; j < n; ++j) x2[j] = rng.uniform(-0.5, 1.5);
      CHECK((project(x2, p) - z).norm() <= (x2 - x).norm() + 1e-7);
    }
  }
}

TEST_CASE("projection from far outside stays feasible") {
  // Distant pulls in the positive orthant once stalled the iterate on a box
  // face; the result must respect every row, not just the box.
  Rng rng(0xfa3);
  for (int trial = 0; trial < 10; ++trial) {
    Polytope p = random_polytope(6, 2, rng);
    Vec far(6);
    for (int j = 0; j < 6; ++j) far[j] = rng.uniform(2.0, 30.0);
    const Vec z = project(far, p);
    CHECK(contains(z, p, 1e-7));
  }
}

TEST_CASE("projection handles inputs many orders of magnitude outside") {
  // Known answers on x1 + x2 <= 0.8 over the unit box. The symmetric pull
  // lands mid-facet, the negative pull on the box corner, and the skewed pull
  // on the point where the halfspace and the lower box bound meet.
  const Polytope p = simplex_like(0.8);
  const Vec z1 = project(vec2(1e9, 1e9), p);
  CHECK(z1[0] == doctest::Approx(0.4).epsilon(1e-6));
  CHECK(z1[1] == doctest::Approx(0.4).epsilon(1e-6));
  CHECK(project(vec2(-1e9, -1e9), p) == vec2(0, 0));
  const Vec z2 = project(vec2(1e9, 0.1), p);
  CHECK(z2[0] == doctest::Approx(0.8).epsilon(1e-6));
  CHECK(std::abs(z2[1]) <= 1e-6);
}

TEST_CASE("far pulls above a shifted box project to optimal points") {
  // Random rows over [1,2]^n with unit slack at the lower corner mirror the
  // geometry where alternating projections stall: the pull direction is deep
  // in the positive orthant and the binding rows are strongly correlated.
  Rng rng(0xbead);
  const int n = 16;
  Mat a(2, n);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(0.0, 1.0);
  const Vec b = Vec::Ones(2) + a.rowwise().sum();
  const Polytope p(a, b, Box::uniform(n, 1.0, 2.0));
  // The feasible sliver above the corner is far too thin for rejection
  // sampling; walk from the corner toward random box points instead, scaled
  // back until every row holds.
  const Vec corner = p.box().lower();
  auto sample_feasible = [&]() {
    Vec u(n);
    for (int j = 0; j < n; ++j) u[j] = rng.uniform(1.0, 2.0);
    double s = 1.0;
    for (int i = 0; i < 2; ++i) {
      const double along = a.row(i).dot(u - corner);
      if (along > 1.0) s = std::min(s, 1.0 / along);
    }
    return Vec(corner + rng.uniform(0.0, s) * (u - corner));
  };
  for (double scale : {1e6, 1e8}) {
    Vec x(n);
    for (int j = 0; j < n; ++j) x[j] = 1.5 + scale * rng.uniform(0.5, 1.0);
    const Vec z = project(x, p);
    CHECK(contains(z, p, 1e-7));
    for (int s = 0; s < 50; ++s) {
      const Vec y = sample_feasible();
      CHECK(contains(y, p, 1e-9));
      CHECK((x - z).dot(y - z) <= 1e-10 * (1.0 + x.norm()));
    }
  }
}

TEST_CASE("far pulls resolve when two rows are nearly dependent") {
  // Both rows bind at the solution and their normals differ by one part in a
  // thousand, the regime where dual coordinate updates slide along a ridge of
  // optimal multipliers instead of settling.
  const int n = 4;
  Mat a(2, n);
  a.row(0) = Vec::Ones(n).transpose();
  a.row(1) = Vec::Ones(n).transpose();
  a(1, n - 1) = 1.001;
  const Polytope p(a, Vec::Ones(2), Box::unit(n));
  Rng rng(0x7e11);
  const Vec x = Vec::Constant(n, 1e7);
  const Vec z = project(x, p);
  CHECK(contains(z, p, 1e-7));
  for (int s = 0; s < 50; ++s) {
    const Vec y = sample_uniform(p, rng);
    CHECK((x - z).dot(y - z) <= 1e-10 * (1.0 + x.norm()));
  }
}

TEST_CASE("far pulls with multipliers of mixed magnitudes resolve exactly") {
  // At the solution both rows bind with multipliers two orders of magnitude
  // apart (2.8e5 and 3.9e7), and the residual noise floor is set by the raw
  // coordinate scale, not by the smaller multiplier. An acceptance tolerance
  // that ignores the operand magnitudes rejects the correct subset here.
  const int n = 12;
  Mat a(2, n);
  a.row(0) << 0.42600044160023998, 0.053427793506566235, 0.050709974304594674,
      0.31629808636291878, 0.60309652737753683, 0.22750525703822366, 0.27114174221955889,
      0.023361173586839534, 0.18424173671818245, 0.49965975221843417, 0.060767212711270169,
      0.7944192282478898;
  a.row(1) << 0.74397177349212817, 0.2554630064003981, 0.0057944209342338793,
      0.93575541604848045, 0.57920924628593173, 0.94030543570550873, 0.71550717790274265,
      0.9739862440402971, 0.52443422939375917, 0.18277467583485385, 0.67011811943327437,
      0.90575781497162733;
  Vec b(2);
  b << 4.5106289258922549, 8.4330775604432358;
  const Polytope p(a, b, Box::uniform(n, 1.0, 2.0));
  Vec x(n);
  x << 18004780.551068839, 20412781.802361146, 13232280.95966454, 13252176.690513026,
      22920828.373083189, 15867561.691949122, 16219822.112724025, 16814267.883326247,
      20653390.122637298, 8810879.3207091521, 14329810.546697283, 16270250.831262892;
  const Vec z = project(x, p);
  CHECK(contains(z, p, 1e-7));
  Rng rng(0x5ca1e);
  for (int s = 0; s < 50; ++s) {
    const Vec y = sample_uniform(p, rng);
    CHECK((x - z).dot(y - z) <= 1e-10 * (1.0 + x.norm()));
  }
}

TEST_CASE("diameter and radius bounds take frozen values on known sets") {
  const Polytope box = Polytope::box_only(Box::unit(2));
  CHECK(diameter_upper_bound(box) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(radius_upper_bound(box) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  // The per-coordinate ranges of {x1 + x2 <= 1} over the unit box are [0,1]
  // each, so the bound equals the box diagonal and the true diameter.
  const Polytope p = simplex_like(1.0);
  CHECK(diameter_upper_bound(p) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));

  const Polytope degenerate = Polytope::box_only(Box::uniform(3, 0.0, 0.0));
  CHECK(diameter_upper_bound(degenerate) == 0.0);

  const Polytope flat = Polytope::box_only(Box(vec2(0, 0), vec2(2, 0)));
  CHECK(radius_upper_bound(flat) == doctest::Approx(2.0).epsilon(1e-12));

  const Polytope shifted = Polytope::box_only(Box::uniform(2, 1.0, 2.0));
  CHECK(radius_upper_bound(shifted) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-12));

  Rng rng(0xd1);
  for (int trial = 0; trial < 10; ++trial) {
    Polytope q = random_polytope(4, 2, rng);
    CHECK(diameter_upper_bound(q) <= 2.0 * radius_upper_bound(q) + 1e-12);
  }
}

TEST_CASE("sampler covers the box and fails loudly on thin slabs") {
  const Polytope box = Polytope::box_only(Box::unit(2));
  Rng rng(0x5a);
  Vec mean = Vec::Zero(2);
  const int draws = 1000;
  for (int i = 0; i < draws; ++i) mean += sample_uniform(box, rng);
  mean /= draws;
  CHECK(std::abs(mean[0] - 0.5) < 0.05);
  CHECK(std::abs(mean[1] - 0.5) < 0.05);

  // A near-zero slab accepts almost nothing; a tiny attempt budget must throw.
  Mat a(1, 2);
  a << 1.0, 1.0;
  const Polytope slab(a, Vec::Constant(1, 1e-12), Box::unit(2));
  Rng rng2(0x5b);
  CHECK_THROWS_AS(sample_uniform(slab, rng2, 10), std::runtime_error);
}

TEST_CASE("membership respects the tolerance band") {
  const Polytope p = simplex_like(1.0);
  CHECK(contains(vec2(0.5, 0.5), p, 1e-9));
  CHECK(contains(vec2(0.5, 0.5 + 1e-12), p, 1e-9));
  CHECK_FALSE(contains(vec2(0.9, 0.9), p, 1e-9));
  CHECK_FALSE(contains(vec2(-0.1, 0.0), p, 1e-9));
}
