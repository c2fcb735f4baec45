#include "subreg/objectives.hpp"

#include "doctest.h"

#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "subreg/harness.hpp"
#include "subreg/instance_io.hpp"

using namespace subreg;

namespace {

Vec vecn(std::initializer_list<double> vals) {
  Vec v(static_cast<int>(vals.size()));
  int i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

// One element of weight 1 covered by both sets.
CoverageObjective two_set_instance() {
  CoverageInstance inst;
  inst.universe_weights = Vec::Ones(1);
  inst.sets = {{0}, {0}};
  return CoverageObjective(std::move(inst));
}

// 2^n enumeration of the multilinear extension: E[W(S)] with independent
// inclusion probabilities x.
double multilinear_by_enumeration(const CoverageObjective& f, const Vec& x) {
  const int n = f.num_sets();
  double total = 0.0;
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::vector<bool> chosen(n);
    double prob = 1.0;
    for (int i = 0; i < n; ++i) {
      chosen[i] = (mask >> i) & 1;
      prob *= chosen[i] ? x[i] : 1.0 - x[i];
    }
    if (prob > 0.0) total += prob * f.covered_weight(chosen);
  }
  return total;
}

Vec central_difference_gradient(const Objective& f, const Vec& x, double h) {
  Vec g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vec hi = x, lo = x;
    hi[i] += h;
    lo[i] -= h;
    g[i] = (f.value(hi) - f.value(lo)) / (2.0 * h);
  }
  return g;
}

bool exactly_equal(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) return false;
  for (int i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

bool exactly_equal(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c)
      if (a(r, c) != b(r, c)) return false;
  return true;
}

}  // namespace

TEST_CASE("two-set coverage instance hits the closed-form values") {
  const CoverageObjective f = two_set_instance();
  CHECK(f.value(vecn({0.5, 0.5})) == doctest::Approx(0.75).epsilon(1e-12));
  const Vec g = f.gradient(vecn({0.5, 0.5}));
  CHECK(g[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(0.5).epsilon(1e-12));

  CHECK(f.value(Vec::Zero(2)) == 0.0);
  CHECK(f.value(Vec::Ones(2)) == doctest::Approx(1.0).epsilon(1e-12));
  // Every element is covered twice, so at x = 1 each product term vanishes.
  CHECK(f.gradient(Vec::Ones(2)).norm() == 0.0);
}

TEST_CASE("single-set and modular coverage cases are linear") {
  CoverageInstance single;
  single.universe_weights = Vec::Constant(1, 2.0);
  single.sets = {{0}};
  const CoverageObjective f(std::move(single));
  CHECK(f.value(Vec::Constant(1, 0.25)) == doctest::Approx(0.5).epsilon(1e-12));

  // Disjoint singletons: the extension is modular with the weights as slopes.
  CoverageInstance disjoint;
  disjoint.universe_weights = vecn({0.3, 1.2, 0.7});
  disjoint.sets = {{0}, {1}, {2}};
  const CoverageObjective g(std::move(disjoint));
  const Vec at = vecn({0.1, 0.6, 0.9});
  CHECK((g.gradient(at) - vecn({0.3, 1.2, 0.7})).norm() <= 1e-12);
}

TEST_CASE("coverage surrogate values, supergradients, and squeeze") {
  const CoverageObjective f = two_set_instance();
  CHECK(f.has_surrogate());
  CHECK(f.surrogate_value(vecn({0.3, 0.3})) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(exactly_equal(f.surrogate_supergradient(vecn({0.3, 0.3})), Vec::Ones(2)));
  CHECK(f.surrogate_value(vecn({0.8, 0.8})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(exactly_equal(f.surrogate_supergradient(vecn({0.8, 0.8})), Vec::Zero(2)));

  Rng rng(0x50e);
  Rng gen = rng.split("inst");
  const CoverageInstance inst = coverage_generate(20, 8, 3, gen);
  const CoverageObjective big(inst);
  const double ratio = 1.0 - std::exp(-1.0);
  for (int s = 0; s < 200; ++s) {
    Vec x(8);
    for (int i = 0; i < 8; ++i) x[i] = rng.uniform01();
    const double exact = big.value(x);
    const double sur = big.surrogate_value(x);
    CHECK(exact <= sur + 1e-9);
    CHECK(ratio * sur <= exact + 1e-9);
  }
}

TEST_CASE("coverage value matches 2^n enumeration") {
  Rng rng(0xc0);
  for (int inst_id = 0; inst_id < 3; ++inst_id) {
    Rng gen = rng.split(static_cast<std::uint64_t>(inst_id));
    const CoverageObjective f(coverage_generate(16, 8, 2, gen));
    for (int s = 0; s < 20; ++s) {
      Vec x(8);
      for (int i = 0; i < 8; ++i) x[i] = rng.uniform01();
      CHECK(f.value(x) == doctest::Approx(multilinear_by_enumeration(f, x)).epsilon(1e-9));
    }
  }
}

TEST_CASE("coverage estimator is deterministic at the box corners") {
  const CoverageObjective f = two_set_instance();
  Rng rng(5);
  // At x = 0 the random subset is always empty: estimate_i = W({i}) - W({}).
  const Vec at_zero = f.stochastic_gradient(Vec::Zero(2), rng);
  CHECK(exactly_equal(at_zero, Vec::Ones(2)));
  // At x = 1 the subset is always everything else; the marginal is 0 here
  // because the other set already covers the element.
  const Vec at_one = f.stochastic_gradient(Vec::Ones(2), rng);
  CHECK(exactly_equal(at_one, Vec::Zero(2)));
}

TEST_CASE("coverage estimator expectation equals the gradient by enumeration") {
  // The estimator draws, for coordinate i, a random subset S of the other
  // sets and returns W(S + i) - W(S). Enumerating S against its product
  // probabilities must reproduce the exact partial derivative.
  Rng gen(0xe57);
  Rng rng(0xe58);
  const int n = 5;
  const CoverageObjective f(coverage_generate(10, n, 2, gen));
  for (int pt = 0; pt < 3; ++pt) {
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.uniform01();
    const Vec grad = f.gradient(x);
    for (int i = 0; i < n; ++i) {
      double expect = 0.0;
      for (int mask = 0; mask < (1 << (n - 1)); ++mask) {
        std::vector<bool> with(n, false), without(n, false);
        double prob = 1.0;
        int bit = 0;
        for (int j = 0; j < n; ++j) {
          if (j == i) continue;
          const bool in = (mask >> bit) & 1;
          with[j] = without[j] = in;
          prob *= in ? x[j] : 1.0 - x[j];
          ++bit;
        }
        with[i] = true;
        expect += prob * (f.covered_weight(with) - f.covered_weight(without));
      }
      CHECK(expect == doctest::Approx(grad[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("coverage estimator sample mean converges to the gradient") {
  Rng gen(0xab);
  const CoverageObjective f(coverage_generate(12, 6, 2, gen));
  Rng rng(0xac);
  Vec x(6);
  for (int i = 0; i < 6; ++i) x[i] = rng.uniform01();
  const Vec grad = f.gradient(x);
  Vec mean = Vec::Zero(6);
  const int reps = 20000;
  for (int r = 0; r < reps; ++r) mean += f.stochastic_gradient(x, rng);
  mean /= static_cast<double>(reps);
  for (int i = 0; i < 6; ++i)
    CHECK(std::abs(mean[i] - grad[i]) <= 0.06 * (1.0 + std::abs(grad[i])));
}

TEST_CASE("nqp diagonal case matches hand values and rejects bad instances") {
  NqpInstance diag;
  diag.h = -Mat::Identity(2, 2);
  diag.u = Vec::Ones(2);
  const NqpObjective f(diag);
  // f(x) = -||x||^2/2 + sum x; gradient 1 - x.
  CHECK(f.value(vecn({0.5, 0.5})) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(f.value(Vec::Zero(2)) == 0.0);
  CHECK((f.gradient(vecn({0.25, 0.5})) - vecn({0.75, 0.5})).norm() <= 1e-12);
  CHECK(f.gradient(Vec::Ones(2)).norm() == 0.0);

  // Positive entries break DR-submodularity and must be rejected.
  NqpInstance positive;
  positive.h = Mat::Ones(2, 2);
  positive.u = Vec::Ones(2);
  CHECK_THROWS_AS(NqpObjective{positive}, std::invalid_argument);

  // Entrywise-nonpositive but non-monotone on the box: the corner gradient
  // check has to catch it.
  NqpInstance skew;
  skew.h = Mat::Zero(2, 2);
  skew.h(0, 1) = -100.0;
  skew.u = Vec::Ones(2);
  CHECK_THROWS_AS(NqpObjective{skew}, std::invalid_argument);
}

TEST_CASE("dopt diagonal designs reduce to a sum of logs") {
  DOptInstance inst;
  inst.designs = Mat::Identity(3, 3);
  inst.ridge_eps = 1e-9;
  const DoptObjective f(inst);
  const Vec ones = Vec::Ones(3);
  CHECK(std::abs(f.value(ones)) <= 1e-6);
  CHECK((f.gradient(ones) - ones).norm() <= 1e-6);
  const Vec lam = vecn({1.0, 2.0, 1.0});
  CHECK(f.gradient(lam)[1] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(f.value(lam) == doctest::Approx(std::log(2.0)).epsilon(1e-6));

  // Diagonal case: pure second partials are -1/(lambda_i + eps)^2 and the
  // mixed ones vanish.
  CHECK(f.second_partial(ones, 0, 0) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(std::abs(f.second_partial(ones, 0, 1)) <= 1e-12);
}

TEST_CASE("gradients match central finite differences on all families") {
  Rng rng(0xfd);
  const double h = 1e-6;

  Rng cov_gen = rng.split("cov");
  const CoverageObjective cov(coverage_generate(20, 8, 3, cov_gen));
  Rng nqp_gen = rng.split("nqp");
  const NqpObjective nqp(nqp_generate(6, nqp_gen));
  Rng dopt_gen = rng.split("dopt");
  const DoptObjective dopt(dopt_generate(4, 8, 1e-6, dopt_gen));

  struct Case {
    const Objective* f;
    double lo, hi;  // sampling range, the region the polytope confines play to
  };
  // D-optimal play happens on the shifted box [1, 2]; near lambda = 0 the
  // ridge makes third derivatives of order 1/ridge^3 and the centered stencil
  // loses the comparison for numerical rather than analytic reasons.
  const Case cases[] = {{&cov, 0.01, 0.99}, {&nqp, 0.01, 0.99}, {&dopt, 1.0, 1.95}};
  for (const Case& c : cases) {
    const int n = c.f->domain_box().dim();
    for (int s = 0; s < 10; ++s) {
      Vec x(n);
      for (int i = 0; i < n; ++i) x[i] = rng.uniform(c.lo, c.hi);
      const Vec g = c.f->gradient(x);
      const Vec fd = central_difference_gradient(*c.f, x, h);
      CHECK((g - fd).norm() <= 1e-5 * (1.0 + g.norm()));
    }
  }
}

TEST_CASE("dopt second partials match second differences") {
  Rng gen(0xd2);
  const DoptObjective f(dopt_generate(3, 6, 1e-6, gen));
  const double h = 1e-4;
  Rng rng(0xd3);
  Vec lam(6);
  for (int i = 0; i < 6; ++i) lam[i] = rng.uniform(1.1, 1.9);
  for (int i = 0; i < 6; ++i) {
    for (int j = i + 1; j < 6; ++j) {
      Vec pp = lam, pm = lam, mp = lam, mm = lam;
      pp[i] += h; pp[j] += h;
      pm[i] += h; pm[j] -= h;
      mp[i] -= h; mp[j] += h;
      mm[i] -= h; mm[j] -= h;
      const double fd = (f.value(pp) - f.value(pm) - f.value(mp) + f.value(mm)) / (4.0 * h * h);
      const double exact = f.second_partial(lam, i, j);
      CHECK(fd == doctest::Approx(exact).epsilon(1e-4));
      CHECK(exact <= 0.0);
    }
  }
}

TEST_CASE("dopt gradient is strictly positive on the shifted box") {
  Rng gen(0xd4);
  const DoptObjective f(dopt_generate(4, 8, 1e-6, gen));
  Rng rng(0xd5);
  for (int s = 0; s < 50; ++s) {
    Vec lam(8);
    for (int i = 0; i < 8; ++i) lam[i] = rng.uniform(1.0, 2.0);
    CHECK(f.gradient(lam).minCoeff() > 0.0);
  }
}

TEST_CASE("generators honor the documented shapes and ranges") {
  Rng rng(0x9);

  Rng cg = rng.split("c");
  const CoverageInstance cov = coverage_generate(30, 12, 3, cg);
  CHECK(static_cast<int>(cov.sets.size()) == 12);
  CHECK(cov.universe_weights.size() == 30);
  CHECK(cov.universe_weights.minCoeff() >= 0.0);
  std::vector<int> cover_count(30, 0);
  for (const auto& set : cov.sets)
    for (int u : set) ++cover_count[u];
  for (int u = 0; u < 30; ++u) CHECK(cover_count[u] == 3);

  Rng ng = rng.split("n");
  const NqpInstance nqp = nqp_generate(5, ng);
  CHECK(nqp.h.rows() == 5);
  CHECK(nqp.h.maxCoeff() <= 0.0);
  CHECK(nqp.h.minCoeff() >= -100.0);
  CHECK(exactly_equal(nqp.h, Mat(nqp.h.transpose())));
  CHECK(exactly_equal(nqp.u, Vec::Ones(5)));

  Rng dg = rng.split("d");
  const DOptInstance dopt = dopt_generate(4, 9, 1e-6, dg);
  CHECK(dopt.designs.rows() == 4);
  CHECK(dopt.designs.cols() == 9);

  Rng pg = rng.split("p");
  const Polytope cp = coverage_polytope(12, 2, pg);
  CHECK(cp.num_rows() == 2);
  CHECK(exactly_equal(cp.b_vector(), Vec::Constant(2, 3.0)));
  const Polytope np = nqp_polytope(5, 2, pg);
  CHECK(exactly_equal(np.b_vector(), Vec::Ones(2)));
  const Polytope dp = dopt_polytope(9, 2, pg);
  CHECK(exactly_equal(dp.box().lower(), Vec::Ones(9)));
  CHECK(exactly_equal(dp.box().upper(), Vec::Constant(9, 2.0)));
  CHECK(contains(Vec::Ones(9), dp, 1e-9));
}

TEST_CASE("objectives reject points outside their domain box") {
  const CoverageObjective f = two_set_instance();
  CHECK_THROWS_AS(f.value(vecn({1.5, 0.0})), std::domain_error);
  CHECK_THROWS_AS(f.gradient(vecn({-0.5, 0.0})), std::domain_error);
  CHECK_THROWS_AS(f.value(Vec::Zero(3)), std::domain_error);
}

TEST_CASE("property checkers accept the families and catch counterexamples") {
  Rng rng(0x11);

  Rng gen = rng.split("gen");
  const CoverageObjective cov(coverage_generate(20, 8, 3, gen));
  Rng r1 = rng.split(std::uint64_t{1});
  CHECK(check_dr_submodular(cov, r1, 60).pass);
  Rng r2 = rng.split(std::uint64_t{2});
  CHECK(check_concave_along_nonneg(cov, r2, 30).pass);
  Rng r3 = rng.split(std::uint64_t{3});
  CHECK(check_weak_dr_inequality(cov, 1.0, r3, 60).pass);
  Rng r4 = rng.split(std::uint64_t{4});
  CHECK(check_beta_smooth(cov, cov.smoothness(), r4, 60).pass);

  // f(x, y) = x y has a positive mixed partial: gradient is not antitone.
  const CustomObjective product(
      Box::unit(2), 2.0, 2.0, 1.0, [](const Vec& x) { return x[0] * x[1]; },
      [](const Vec& x) { return Vec(vecn({x[1], x[0]})); });
  Rng r5 = rng.split(std::uint64_t{5});
  CHECK_FALSE(check_dr_submodular(product, r5, 200).pass);

  const CustomObjective norm_sq(
      Box::unit(2), 4.0, 2.0, 1.0, [](const Vec& x) { return x.squaredNorm(); },
      [](const Vec& x) { return Vec(2.0 * x); });
  Rng r6 = rng.split(std::uint64_t{6});
  CHECK_FALSE(check_concave_along_nonneg(norm_sq, r6, 200).pass);

  // Halving the true smoothness constant must trip the Lipschitz check.
  Rng ngen = rng.split("ngen");
  const NqpObjective nqp(nqp_generate(6, ngen));
  Rng r7 = rng.split(std::uint64_t{7});
  CHECK(check_beta_smooth(nqp, nqp.smoothness(), r7, 60).pass);
  Rng r8 = rng.split(std::uint64_t{8});
  CHECK_FALSE(check_beta_smooth(nqp, 0.5 * nqp.smoothness(), r8, 200).pass);

  // Reports carry a witness only on failure.
  Rng r9 = rng.split(std::uint64_t{9});
  const PropertyReport bad = check_dr_submodular(product, r9, 200);
  CHECK_FALSE(bad.witness.empty());
  CHECK(bad.failures > 0);
}

TEST_CASE("instance bundles round-trip through the plain-text format") {
  Rng probe(0x10);
  for (Family family : {Family::coverage, Family::nqp, Family::dopt}) {
    SequenceParams params;
    params.family = family;
    params.horizon = 3;
    params.m = 2;
    switch (family) {
      case Family::coverage:
        params.n = 6;
        params.universe = 12;
        params.cover_per_elem = 2;
        break;
      case Family::nqp:
        params.n = 5;
        break;
      default:
        params.n = 3;
        params.num_designs = 6;
        params.ridge = 1e-6;
        break;
    }
    const InstanceBundle original = build_sequence(params, 7);

    std::stringstream ss;
    write_bundle(ss, original);
    const InstanceBundle loaded = read_bundle(ss);

    REQUIRE(loaded.family == original.family);
    REQUIRE(loaded.horizon() == original.horizon());
    CHECK(exactly_equal(loaded.polytope.a_matrix(), original.polytope.a_matrix()));
    CHECK(exactly_equal(loaded.polytope.b_vector(), original.polytope.b_vector()));
    CHECK(exactly_equal(loaded.polytope.box().lower(), original.polytope.box().lower()));
    CHECK(exactly_equal(loaded.polytope.box().upper(), original.polytope.box().upper()));

    // %.17g serialization has to reproduce values and gradients bitwise.
    const Box& box = original.polytope.box();
    for (int t = 0; t < original.horizon(); ++t) {
      const Objective& a = *original.objectives[t];
      const Objective& b = *loaded.objectives[t];
      CHECK(a.grad_bound() == b.grad_bound());
      CHECK(a.smoothness() == b.smoothness());
      for (int s = 0; s < 5; ++s) {
        Vec x(box.dim());
        for (int i = 0; i < box.dim(); ++i)
          x[i] = probe.uniform(box.lower()[i], box.upper()[i]);
        CHECK(a.value(x) == b.value(x));
        CHECK(exactly_equal(a.gradient(x), b.gradient(x)));
      }
    }
  }
}

TEST_CASE("custom objectives cannot be serialized") {
  InstanceBundle bundle{Family::custom, Polytope::box_only(Box::unit(1)), {}};
  bundle.objectives.push_back(std::make_unique<CustomObjective>(
      Box::unit(1), 1.0, 1.0, 1.0, [](const Vec& x) { return x[0]; },
      [](const Vec&) { return Vec(Vec::Ones(1)); }));
  std::stringstream ss;
  CHECK_THROWS_AS(write_bundle(ss, bundle), std::invalid_argument);
}
