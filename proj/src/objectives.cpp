#include "subreg/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace subreg {

std::string_view family_name(Family f) {
  switch (f) {
    case Family::coverage: return "coverage";
    case Family::nqp: return "nqp";
    case Family::dopt: return "dopt";
    case Family::custom: return "custom";
  }
  throw std::logic_error("family_name: bad enum");
}

Family parse_family(std::string_view name) {
  if (name == "coverage") return Family::coverage;
  if (name == "nqp") return Family::nqp;
  if (name == "dopt") return Family::dopt;
  if (name == "custom") return Family::custom;
  throw std::invalid_argument("unknown family: " + std::string(name));
}

Objective::Objective(Family family, Box box, double grad_bound, double smoothness, double gamma)
    : family_(family), box_(std::move(box)), grad_bound_(grad_bound), smoothness_(smoothness), gamma_(gamma) {
  if (!(gamma_ > 0.0 && gamma_ <= 1.0)) throw std::invalid_argument("Objective: gamma outside (0, 1]");
  if (grad_bound_ < 0.0 || smoothness_ < 0.0) throw std::invalid_argument("Objective: negative constant");
}

void Objective::check_domain(const Vec& x) const {
  if (x.size() != box_.dim()) throw std::domain_error("Objective: dimension mismatch");
  if (!box_.contains(x, 1e-9)) throw std::domain_error("Objective: point outside the domain box");
}

double Objective::value(const Vec& x) const {
  check_domain(x);
  return do_value(x);
}

Vec Objective::gradient(const Vec& x) const {
  check_domain(x);
  return do_gradient(x);
}

Vec Objective::stochastic_gradient(const Vec& x, Rng& rng) const {
  check_domain(x);
  return do_stochastic_gradient(x, rng);
}

Vec Objective::do_stochastic_gradient(const Vec& x, Rng&) const { return do_gradient(x); }

double Objective::surrogate_value(const Vec&) const {
  throw std::logic_error("Objective: no surrogate for this family");
}

Vec Objective::surrogate_supergradient(const Vec&) const {
  throw std::logic_error("Objective: no surrogate for this family");
}

// ---------------------------------------------------------------------------
// Coverage.

namespace {

std::vector<std::vector<int>> invert_incidence(const CoverageInstance& inst) {
  const int universe = static_cast<int>(inst.universe_weights.size());
  std::vector<std::vector<int>> covers(universe);
  for (int i = 0; i < static_cast<int>(inst.sets.size()); ++i) {
    for (int u : inst.sets[i]) {
      if (u < 0 || u >= universe) throw std::invalid_argument("CoverageInstance: element out of range");
      covers[u].push_back(i);
    }
  }
  return covers;
}

double coverage_grad_bound(const CoverageInstance& inst) {
  Vec per_set = Vec::Zero(static_cast<int>(inst.sets.size()));
  for (int i = 0; i < per_set.size(); ++i)
    for (int u : inst.sets[i]) per_set[i] += inst.universe_weights[u];
  // grad_i is largest at x = 0, where it equals the total weight B_i touches;
  // the same componentwise cap holds for the marginal-gain estimator.
  return per_set.norm();
}

// |d²f/dx_i dx_j| never exceeds the weight B_i and B_j share (the pure second
// partials vanish: f is multilinear). The spectral norm of that fixed
// nonnegative matrix bounds the Hessian norm over the whole box, since
// entrywise dominance between nonnegative symmetric matrices carries over to
// spectral norms.
double coverage_smoothness_bound(const CoverageInstance& inst,
                                 const std::vector<std::vector<int>>& covers) {
  const int n = static_cast<int>(inst.sets.size());
  Mat shared = Mat::Zero(n, n);
  for (int u = 0; u < static_cast<int>(covers.size()); ++u) {
    const double w = inst.universe_weights[u];
    const std::vector<int>& ids = covers[u];
    for (std::size_t a = 0; a < ids.size(); ++a) {
      for (std::size_t b = a + 1; b < ids.size(); ++b) {
        shared(ids[a], ids[b]) += w;
        shared(ids[b], ids[a]) += w;
      }
    }
  }
  if (n == 1) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(shared, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

CoverageObjective::CoverageObjective(CoverageInstance inst)
    : Objective(Family::coverage, Box::unit(static_cast<int>(inst.sets.size())),
                coverage_grad_bound(inst), 0.0, 1.0),
      inst_(std::move(inst)), covers_(invert_incidence(inst_)) {
  if (inst_.sets.empty()) throw std::invalid_argument("CoverageInstance: no sets");
  if ((inst_.universe_weights.array() < 0.0).any())
    throw std::invalid_argument("CoverageInstance: negative weight");
  set_smoothness(coverage_smoothness_bound(inst_, covers_));
}

double CoverageObjective::covered_weight(const std::vector<bool>& chosen) const {
  if (static_cast<int>(chosen.size()) != num_sets())
    throw std::invalid_argument("covered_weight: mask size mismatch");
  double total = 0.0;
  for (int u = 0; u < universe_size(); ++u)
    for (int i : covers_[u])
      if (chosen[i]) { total += inst_.universe_weights[u]; break; }
  return total;
}

double CoverageObjective::do_value(const Vec& x) const {
  double total = 0.0;
  for (int u = 0; u < universe_size(); ++u) {
    double miss = 1.0;
    for (int i : covers_[u]) miss *= 1.0 - x[i];
    total += inst_.universe_weights[u] * (1.0 - miss);
  }
  return total;
}

Vec CoverageObjective::do_gradient(const Vec& x) const {
  Vec g = Vec::Zero(num_sets());
  // Per element, the leave-one-out products over its (few) covering sets.
  for (int u = 0; u < universe_size(); ++u) {
    const auto& cov = covers_[u];
    for (std::size_t a = 0; a < cov.size(); ++a) {
      double prod = inst_.universe_weights[u];
      for (std::size_t b = 0; b < cov.size(); ++b)
        if (b != a) prod *= 1.0 - x[cov[b]];
      g[cov[a]] += prod;
    }
  }
  return g;
}

Vec CoverageObjective::do_stochastic_gradient(const Vec& x, Rng& rng) const {
  const int n = num_sets();
  Vec g(n);
  std::vector<bool> in_r(n);
  for (int i = 0; i < n; ++i) {
    // R_i: every other set joins independently with probability x_j.
    for (int j = 0; j < n; ++j) in_r[j] = (j != i) && (rng.uniform01() < x[j]);
    // Marginal gain of adding B_i: weight of its elements not already covered.
    double gain = 0.0;
    for (int u : inst_.sets[i]) {
      bool covered = false;
      for (int j : covers_[u])
        if (j != i && in_r[j]) { covered = true; break; }
      if (!covered) gain += inst_.universe_weights[u];
    }
    g[i] = gain;
  }
  return g;
}

double CoverageObjective::surrogate_value(const Vec& x) const {
  check_domain(x);
  double total = 0.0;
  for (int u = 0; u < universe_size(); ++u) {
    double s = 0.0;
    for (int i : covers_[u]) s += x[i];
    total += inst_.universe_weights[u] * std::min(1.0, s);
  }
  return total;
}

Vec CoverageObjective::surrogate_supergradient(const Vec& x) const {
  check_domain(x);
  Vec g = Vec::Zero(num_sets());
  for (int u = 0; u < universe_size(); ++u) {
    double s = 0.0;
    for (int i : covers_[u]) s += x[i];
    // At the kink (s == 1) the flat branch is chosen: zero contribution.
    if (s < 1.0)
      for (int i : covers_[u]) g[i] += inst_.universe_weights[u];
  }
  return g;
}

CoverageInstance coverage_generate(int universe, int num_sets, int cover_per_elem, Rng& rng) {
  if (universe <= 0 || num_sets <= 0) throw std::invalid_argument("coverage_generate: bad sizes");
  if (cover_per_elem <= 0 || cover_per_elem > num_sets)
    throw std::invalid_argument("coverage_generate: bad cover count");
  CoverageInstance inst;
  inst.universe_weights = Vec(universe);
  for (int u = 0; u < universe; ++u) inst.universe_weights[u] = rng.uniform01();
  inst.sets.assign(num_sets, {});
  for (int u = 0; u < universe; ++u) {
    std::vector<int> picked;
    while (static_cast<int>(picked.size()) < cover_per_elem) {
      const int i = std::min(num_sets - 1, static_cast<int>(rng.uniform(0.0, num_sets)));
      if (std::find(picked.begin(), picked.end(), i) == picked.end()) picked.push_back(i);
    }
    for (int i : picked) inst.sets[i].push_back(u);
  }
  return inst;
}

Polytope coverage_polytope(int num_sets, int m, Rng& rng) {
  Mat a(m, num_sets);
  for (int r = 0; r < m; ++r)
    for (int j = 0; j < num_sets; ++j) a(r, j) = rng.uniform01();
  const Vec b = Vec::Constant(m, num_sets / 4.0);
  return Polytope(a, b, Box::unit(num_sets));
}

// ---------------------------------------------------------------------------
// NQP.

NqpObjective::NqpObjective(NqpInstance inst)
    : Objective(Family::nqp, Box(Vec::Zero(inst.u.size()), inst.u), 0.0, 0.0, 1.0),
      inst_(std::move(inst)) {
  const int n = static_cast<int>(inst_.u.size());
  if (inst_.h.rows() != n || inst_.h.cols() != n) throw std::invalid_argument("NqpInstance: H shape mismatch");
  if (!all_finite(inst_.h)) throw std::invalid_argument("NqpInstance: non-finite H");
  if ((inst_.h.array() > 0.0).any()) throw std::invalid_argument("NqpInstance: H has a positive entry");
  sym_ = 0.5 * (inst_.h + inst_.h.transpose());
  lin_ = -inst_.h.transpose() * inst_.u;
  // Affine gradient with nonpositive slope: its box minimum sits at x = u.
  const Vec corner_grad = sym_ * inst_.u + lin_;
  if (corner_grad.minCoeff() < -1e-9)
    throw std::invalid_argument("NqpInstance: gradient negative at the box corner (not monotone)");
  Eigen::SelfAdjointEigenSolver<Mat> eigs(sym_);
  const double spectral = eigs.eigenvalues().cwiseAbs().maxCoeff();
  set_smoothness(spectral);
  set_grad_bound(spectral * inst_.u.norm() + lin_.norm());
}

double NqpObjective::do_value(const Vec& x) const { return (0.5 * x - inst_.u).dot(inst_.h * x); }

Vec NqpObjective::do_gradient(const Vec& x) const { return sym_ * x + lin_; }

NqpInstance nqp_generate(int n, Rng& rng) {
  if (n <= 0) throw std::invalid_argument("nqp_generate: bad dimension");
  NqpInstance inst;
  inst.h = Mat(n, n);
  // Symmetric draw: the corner gradient (H + H')/2 u - H'u = (H - H')/2 u
  // vanishes only when H is symmetric, and monotonicity on the whole box
  // needs exactly that corner to stay nonnegative.
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) inst.h(i, j) = inst.h(j, i) = rng.uniform(-100.0, 0.0);
  inst.u = Vec::Ones(n);
  return inst;
}

Polytope nqp_polytope(int n, int m, Rng& rng) {
  Mat a(m, n);
  for (int r = 0; r < m; ++r)
    for (int j = 0; j < n; ++j) a(r, j) = rng.uniform01();
  return Polytope(a, Vec::Ones(m), Box::unit(n));
}

// ---------------------------------------------------------------------------
// D-optimal design.

namespace {

double dopt_sampled_grad_bound(const Objective& f, std::uint64_t seed, int samples) {
  Rng rng(seed);
  const Box& box = f.domain_box();
  const int n = box.dim();
  double worst = 0.0;
  Vec x(n);
  for (int s = 0; s < samples; ++s) {
    for (int j = 0; j < n; ++j) x[j] = rng.uniform(box.lower()[j], box.upper()[j]);
    worst = std::max(worst, f.gradient(x).norm());
  }
  return 1.5 * worst;
}

}  // namespace

DoptObjective::DoptObjective(DOptInstance inst)
    : Objective(Family::dopt, Box::uniform(static_cast<int>(inst.designs.cols()), 0.0, 2.0),
                0.0, 0.0, 1.0),
      inst_(std::move(inst)) {
  if (inst_.designs.rows() <= 0 || inst_.designs.cols() <= 0)
    throw std::invalid_argument("DOptInstance: empty design matrix");
  if (!all_finite(inst_.designs)) throw std::invalid_argument("DOptInstance: non-finite design");
  if (!(inst_.ridge_eps > 0.0)) throw std::invalid_argument("DOptInstance: ridge must be positive");
  set_grad_bound(dopt_sampled_grad_bound(*this, 0xd0b7u, 1000));
  // |d²f/dl_i dl_j| = (x_i' M^{-1} x_j)² <= (|x_i||x_j| / ridge)² because
  // M >= ridge * I everywhere on the box. Summing the squares bounds the
  // Hessian in Frobenius norm, hence in spectral norm. Near lambda = 0 the
  // curvature really is of order 1/ridge², so this is large but not loose
  // in kind.
  double total4 = 0.0;
  for (int i = 0; i < static_cast<int>(inst_.designs.cols()); ++i) {
    const double sq = inst_.designs.col(i).squaredNorm();
    total4 += sq * sq;
  }
  set_smoothness(total4 / (inst_.ridge_eps * inst_.ridge_eps));
}

Mat DoptObjective::info_matrix(const Vec& lambda) const {
  return inst_.designs * lambda.asDiagonal() * inst_.designs.transpose() +
         inst_.ridge_eps * Mat::Identity(inst_.designs.rows(), inst_.designs.rows());
}

double DoptObjective::do_value(const Vec& lambda) const {
  Eigen::LLT<Mat> llt(info_matrix(lambda));
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("DoptObjective: information matrix not positive definite");
  const Mat lower = llt.matrixL();
  return 2.0 * lower.diagonal().array().log().sum();
}

Vec DoptObjective::do_gradient(const Vec& lambda) const {
  Eigen::LLT<Mat> llt(info_matrix(lambda));
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("DoptObjective: information matrix not positive definite");
  // d/dlambda_i log det M = x_i' M^{-1} x_i.
  const Mat solved = llt.solve(inst_.designs);
  return (inst_.designs.array() * solved.array()).colwise().sum().matrix().transpose();
}

double DoptObjective::second_partial(const Vec& lambda, int i, int j) const {
  check_domain(lambda);
  if (i < 0 || j < 0 || i >= lambda.size() || j >= lambda.size())
    throw std::invalid_argument("second_partial: index out of range");
  Eigen::LLT<Mat> llt(info_matrix(lambda));
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("DoptObjective: information matrix not positive definite");
  const Vec solved = llt.solve(inst_.designs.col(i));
  const double cross = inst_.designs.col(j).dot(solved);
  return -cross * cross;
}

DOptInstance dopt_generate(int dim, int num_designs, double ridge_eps, Rng& rng) {
  if (dim <= 0 || num_designs <= 0) throw std::invalid_argument("dopt_generate: bad sizes");
  DOptInstance inst;
  inst.ridge_eps = ridge_eps;
  inst.designs = Mat(dim, num_designs);
  for (int c = 0; c < num_designs; ++c)
    for (int r = 0; r < dim; ++r) inst.designs(r, c) = rng.normal();
  return inst;
}

Polytope dopt_polytope(int num_designs, int m, Rng& rng) {
  Mat a(m, num_designs);
  for (int r = 0; r < m; ++r)
    for (int j = 0; j < num_designs; ++j) a(r, j) = rng.uniform01();
  // A (lambda - 1) <= 1 rewritten over lambda directly.
  const Vec b = Vec::Ones(m) + a.rowwise().sum();
  return Polytope(a, b, Box::uniform(num_designs, 1.0, 2.0));
}

// ---------------------------------------------------------------------------
// Custom.

CustomObjective::CustomObjective(Box box, double grad_bound, double smoothness, double gamma,
                                 ValueFn value, GradFn gradient)
    : Objective(Family::custom, std::move(box), grad_bound, smoothness, gamma),
      value_(std::move(value)), gradient_(std::move(gradient)) {
  if (!value_ || !gradient_) throw std::invalid_argument("CustomObjective: missing callable");
}

// ---------------------------------------------------------------------------
// Property checkers.

namespace {

Vec sample_box(const Box& box, Rng& rng) {
  Vec x(box.dim());
  for (int j = 0; j < box.dim(); ++j) x[j] = rng.uniform(box.lower()[j], box.upper()[j]);
  return x;
}

std::string describe_point(const Vec& x) {
  std::ostringstream os;
  os << "[" << x.transpose() << "]";
  return os.str();
}

}  // namespace

PropertyReport check_dr_submodular(const Objective& f, Rng& rng, int samples) {
  PropertyReport rep;
  rep.name = "dr_submodular";
  rep.samples = samples;
  const Box& box = f.domain_box();
  for (int s = 0; s < samples; ++s) {
    const Vec y = sample_box(box, rng);
    Vec x(y.size());
    for (int j = 0; j < y.size(); ++j)
      x[j] = box.lower()[j] + rng.uniform01() * (y[j] - box.lower()[j]);
    const double fx = f.value(x), fy = f.value(y);
    const Vec gap = f.gradient(x) - f.gradient(y);
    if (fx > fy + 1e-9) {
      rep.pass = false;
      ++rep.failures;
      if (rep.witness.empty())
        rep.witness = "monotonicity: f(x) > f(y) for x <= y at x=" + describe_point(x);
    }
    if (gap.minCoeff() < -1e-7) {
      rep.pass = false;
      ++rep.failures;
      if (rep.witness.empty())
        rep.witness = "antitone gradient violated at x=" + describe_point(x) + " y=" + describe_point(y);
    }
  }
  return rep;
}

PropertyReport check_concave_along_nonneg(const Objective& f, Rng& rng, int samples) {
  PropertyReport rep;
  rep.name = "concave_along_signed_directions";
  rep.samples = samples;
  const Box& box = f.domain_box();
  for (int s = 0; s < samples; ++s) {
    const Vec x = sample_box(box, rng);
    Vec v(x.size());
    for (int j = 0; j < x.size(); ++j) v[j] = rng.uniform01();
    if (v.norm() < 1e-12) continue;
    for (int sign = 0; sign < 2; ++sign) {
      const Vec dir = sign == 0 ? v : Vec(-v);
      // Largest step keeping x + z dir inside the box.
      double zmax = std::numeric_limits<double>::infinity();
      for (int j = 0; j < x.size(); ++j) {
        if (dir[j] > 1e-12) zmax = std::min(zmax, (box.upper()[j] - x[j]) / dir[j]);
        if (dir[j] < -1e-12) zmax = std::min(zmax, (x[j] - box.lower()[j]) / (-dir[j]));
      }
      if (!std::isfinite(zmax) || zmax < 1e-9) continue;
      const auto g = [&](double z) { return f.value(x + z * dir); };
      constexpr int kGrid = 5;
      for (int ia = 0; ia < kGrid; ++ia) {
        for (int ib = ia + 1; ib < kGrid; ++ib) {
          const double za = zmax * ia / (kGrid - 1), zb = zmax * ib / (kGrid - 1);
          if (g(0.5 * (za + zb)) < 0.5 * (g(za) + g(zb)) - 1e-7) {
            rep.pass = false;
            ++rep.failures;
            if (rep.witness.empty())
              rep.witness = "midpoint concavity violated along " + std::string(sign ? "-" : "+") +
                            describe_point(v) + " from x=" + describe_point(x);
          }
        }
      }
    }
  }
  return rep;
}

PropertyReport check_weak_dr_inequality(const Objective& f, double gamma, Rng& rng, int samples) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("check_weak_dr_inequality: bad gamma");
  PropertyReport rep;
  rep.name = "weak_dr_inequality";
  rep.samples = samples;
  const Box& box = f.domain_box();
  for (int s = 0; s < samples; ++s) {
    const Vec x = sample_box(box, rng);
    const Vec y = sample_box(box, rng);
    const double lhs = f.value(y) - (1.0 + 1.0 / (gamma * gamma)) * f.value(x);
    const double rhs = f.gradient(x).dot(y - x) / gamma;
    if (lhs > rhs + 1e-7) {
      rep.pass = false;
      ++rep.failures;
      if (rep.witness.empty())
        rep.witness = "key inequality violated at x=" + describe_point(x) + " y=" + describe_point(y);
    }
  }
  return rep;
}

PropertyReport check_beta_smooth(const Objective& f, double beta, Rng& rng, int samples) {
  PropertyReport rep;
  rep.name = "beta_smooth";
  rep.samples = samples;
  const Box& box = f.domain_box();
  for (int s = 0; s < samples; ++s) {
    const Vec x = sample_box(box, rng);
    const Vec y = sample_box(box, rng);
    const double fx = f.value(x), fy = f.value(y);
    const Vec gx = f.gradient(x), gy = f.gradient(y);
    const double quad = 0.5 * beta * (x - y).squaredNorm();
    const bool quad_x = std::abs(fy - fx - gx.dot(y - x)) <= quad + 1e-7;
    const bool quad_y = std::abs(fx - fy - gy.dot(x - y)) <= quad + 1e-7;
    const bool lipschitz = (gx - gy).norm() <= beta * (x - y).norm() + 1e-7;
    if (!(quad_x && quad_y && lipschitz)) {
      rep.pass = false;
      ++rep.failures;
      if (rep.witness.empty())
        rep.witness = std::string("smoothness violated (") + (quad_x ? "" : "quad_x ") +
                      (quad_y ? "" : "quad_y ") + (lipschitz ? "" : "lipschitz") +
                      ") at x=" + describe_point(x);
    }
  }
  return rep;
}

}  // namespace subreg
