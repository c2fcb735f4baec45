#ifndef SUBREG_CORE_HPP
#define SUBREG_CORE_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

#include <Eigen/Dense>

namespace subreg {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Default absolute tolerance for feasibility and invariant checks.
inline constexpr double kNumTol = 1e-9;

bool all_finite(const Vec& v);
bool all_finite(const Mat& m);

// Componentwise min/max of two points. The pair satisfies the lattice
// absorption identities: meet(x, join(x, y)) == x and join(x, meet(x, y)) == x.
std::pair<Vec, Vec> dominance_meet_join(const Vec& x, const Vec& y);

// FNV-1a, used to derive named RNG streams.
std::uint64_t fnv1a64(std::string_view s);

// %.17g: the shortest form that round-trips a double exactly. All file output
// goes through this so reruns are byte-identical.
std::string format_double(double v);

// Deterministic splittable generator built on the splitmix64 mixer.
// Same seed gives a bit-identical draw sequence on every run; split() derives
// a decorrelated child stream from a tag, independent of how many draws the
// parent has made.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform on [lo, hi). Degenerate lo == hi returns lo; lo > hi or a
  // non-finite bound is an error.
  double uniform(double lo, double hi);
  double uniform01() { return uniform(0.0, 1.0); }

  // Standard normal via Box-Muller (second value of each pair is cached).
  double normal();

  Rng split(std::uint64_t tag) const;
  Rng split(std::string_view tag) const;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

// Axis-aligned box {l <= x <= u} in the nonnegative orthant (l >= 0).
class Box {
 public:
  Box(Vec lower, Vec upper);
  static Box unit(int dim);                  // [0,1]^dim
  static Box uniform(int dim, double lo, double hi);

  int dim() const { return static_cast<int>(lower_.size()); }
  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }

  bool contains(const Vec& x, double tol = kNumTol) const;
  Vec clamp(const Vec& x) const;
  Vec center() const { return 0.5 * (lower_ + upper_); }

 private:
  Vec lower_, upper_;
};

// Per-run geometry bundle: D >= diam(P), R >= sup ||x||, G >= sup ||grad f||,
// beta >= smoothness constant. All step-size schedules read from here.
struct GeometryConstants {
  double diameter_d = 0.0;
  double radius_r = 0.0;
  double grad_bound_g = 0.0;
  double smoothness_beta = 0.0;

  GeometryConstants() = default;
  GeometryConstants(double d, double r, double g, double beta);
};

}  // namespace subreg

#endif
