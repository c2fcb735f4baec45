#ifndef SUBREG_OBJECTIVES_HPP
#define SUBREG_OBJECTIVES_HPP

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "subreg/core.hpp"
#include "subreg/polytope.hpp"

namespace subreg {

enum class Family { coverage, nqp, dopt, custom };

std::string_view family_name(Family f);
Family parse_family(std::string_view name);

// A monotone continuous DR-submodular reward function together with the
// constants the online algorithms read: a domain box the partial iterates stay
// inside, G >= sup ||grad f|| over sampled play points, beta (smoothness) and
// gamma (weak-DR parameter; 1 for the built-in families).
class Objective {
 public:
  virtual ~Objective() = default;

  Family family() const { return family_; }
  const Box& domain_box() const { return box_; }
  double grad_bound() const { return grad_bound_; }
  double smoothness() const { return smoothness_; }
  double weak_dr_gamma() const { return gamma_; }

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  // Unbiased gradient estimate where the family defines one; the default is
  // the exact gradient (zero noise).
  Vec stochastic_gradient(const Vec& x, Rng& rng) const;
  virtual bool has_stochastic_gradient() const { return false; }

  // Concave upper surrogate, where the family defines one (coverage only).
  virtual bool has_surrogate() const { return false; }
  virtual double surrogate_value(const Vec& x) const;
  virtual Vec surrogate_supergradient(const Vec& x) const;

 protected:
  Objective(Family family, Box box, double grad_bound, double smoothness, double gamma);
  void set_grad_bound(double g) { grad_bound_ = g; }
  void set_smoothness(double b) { smoothness_ = b; }

  virtual double do_value(const Vec& x) const = 0;
  virtual Vec do_gradient(const Vec& x) const = 0;
  virtual Vec do_stochastic_gradient(const Vec& x, Rng& rng) const;

  void check_domain(const Vec& x) const;

 private:
  Family family_;
  Box box_;
  double grad_bound_;
  double smoothness_;
  double gamma_;
};

// ---------------------------------------------------------------------------
// Weighted coverage, multilinear extension.

struct CoverageInstance {
  Vec universe_weights;                   // w(u) >= 0
  std::vector<std::vector<int>> sets;     // sets[i] = elements of B_i
};

class CoverageObjective : public Objective {
 public:
  explicit CoverageObjective(CoverageInstance inst);

  const CoverageInstance& instance() const { return inst_; }
  int num_sets() const { return static_cast<int>(inst_.sets.size()); }
  int universe_size() const { return static_cast<int>(inst_.universe_weights.size()); }

  // W(S) = total weight covered by the union of the chosen sets; the set
  // function whose multilinear extension this objective evaluates.
  double covered_weight(const std::vector<bool>& chosen) const;

  bool has_stochastic_gradient() const override { return true; }

  // Fenchel-style concave surrogate sum_u w(u) min{1, sum_{B_i ∋ u} x_i}.
  // Squeeze: (1 - 1/e) * surrogate <= multilinear value <= surrogate.
  bool has_surrogate() const override { return true; }
  double surrogate_value(const Vec& x) const override;
  Vec surrogate_supergradient(const Vec& x) const override;

 protected:
  double do_value(const Vec& x) const override;
  Vec do_gradient(const Vec& x) const override;
  Vec do_stochastic_gradient(const Vec& x, Rng& rng) const override;

 private:
  CoverageInstance inst_;
  std::vector<std::vector<int>> covers_;  // element -> covering set ids
};

CoverageInstance coverage_generate(int universe, int num_sets, int cover_per_elem, Rng& rng);
// A ~ U[0,1]^{m x n}, b = (n/4) * 1, box [0,1]^n. Binding but samplable.
Polytope coverage_polytope(int num_sets, int m, Rng& rng);

// ---------------------------------------------------------------------------
// Nonconvex/nonconcave quadratic f(x) = (x/2 - u)' H x, H <= 0 entrywise.

struct NqpInstance {
  Mat h;
  Vec u;
};

class NqpObjective : public Objective {
 public:
  // Requires H <= 0 entrywise and a monotone gradient on [0, u]; the gradient
  // grad f = (H + H')/2 x - H'u is affine with nonpositive slope, so checking
  // its minimum at the corner x = u settles the whole box.
  explicit NqpObjective(NqpInstance inst);

  const Mat& h() const { return inst_.h; }
  const Vec& u() const { return inst_.u; }

 protected:
  double do_value(const Vec& x) const override;
  Vec do_gradient(const Vec& x) const override;

 private:
  NqpInstance inst_;
  Mat sym_;   // (H + H')/2
  Vec lin_;   // -H'u
};

// Symmetric H with entries U[-100, 0]; u = 1.
NqpInstance nqp_generate(int n, Rng& rng);
// A ~ U[0,1]^{m x n}, b = 1, box [0,1]^n.
Polytope nqp_polytope(int n, int m, Rng& rng);

// ---------------------------------------------------------------------------
// D-optimal design f(lambda) = log det(sum_i lambda_i x_i x_i' + ridge I).

struct DOptInstance {
  Mat designs;        // n x N, column i is x_i... columns indexed by lambda_i
  double ridge_eps = 1e-6;
};

class DoptObjective : public Objective {
 public:
  // domain box [0, 2]^N; the ridge keeps the log det finite down to lambda = 0.
  explicit DoptObjective(DOptInstance inst);

  const Mat& designs() const { return inst_.designs; }
  double ridge() const { return inst_.ridge_eps; }

  // d2f / dlambda_i dlambda_j = -(x_i' M(lambda)^{-1} x_j)^2  (i = j included).
  double second_partial(const Vec& lambda, int i, int j) const;

 protected:
  double do_value(const Vec& x) const override;
  Vec do_gradient(const Vec& x) const override;

 private:
  Mat info_matrix(const Vec& lambda) const;
  DOptInstance inst_;
};

DOptInstance dopt_generate(int dim, int num_designs, double ridge_eps, Rng& rng);
// {lambda : A (lambda - 1) <= 1} with A ~ U[0,1]^{m x N}, box [1, 2]^N.
Polytope dopt_polytope(int num_designs, int m, Rng& rng);

// ---------------------------------------------------------------------------
// Ad-hoc objective for tests and synthetic counterexamples.

class CustomObjective : public Objective {
 public:
  using ValueFn = std::function<double(const Vec&)>;
  using GradFn = std::function<Vec(const Vec&)>;

  CustomObjective(Box box, double grad_bound, double smoothness, double gamma,
                  ValueFn value, GradFn gradient);

 protected:
  double do_value(const Vec& x) const override { return value_(x); }
  Vec do_gradient(const Vec& x) const override { return gradient_(x); }

 private:
  ValueFn value_;
  GradFn gradient_;
};

// ---------------------------------------------------------------------------
// Property checkers. Each samples the domain box and reports the first
// violation it finds (sampled evidence, not proof).

struct PropertyReport {
  std::string name;
  bool pass = true;
  int samples = 0;
  int failures = 0;
  std::string witness;  // empty when pass
};

// x <= y implies f(x) <= f(y) (tol 1e-9) and grad f(x) >= grad f(y) (tol 1e-7).
PropertyReport check_dr_submodular(const Objective& f, Rng& rng, int samples = 200);

// Midpoint concavity of z -> f(x + z v) along nonnegative and nonpositive
// directions v (tol 1e-7).
PropertyReport check_concave_along_nonneg(const Objective& f, Rng& rng, int samples = 100);

// f(y) - (1 + 1/gamma^2) f(x) <= (1/gamma) <grad f(x), y - x> (slack >= -1e-7).
PropertyReport check_weak_dr_inequality(const Objective& f, double gamma, Rng& rng, int samples = 200);

// Both quadratic-bound inequalities plus the gradient Lipschitz bound for the
// declared beta (tol 1e-7).
PropertyReport check_beta_smooth(const Objective& f, double beta, Rng& rng, int samples = 200);

}  // namespace subreg

#endif
