#include "subreg/core.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace subreg {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

}  // namespace

bool all_finite(const Vec& v) { return v.allFinite(); }
bool all_finite(const Mat& m) { return m.allFinite(); }

std::pair<Vec, Vec> dominance_meet_join(const Vec& x, const Vec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("meet/join: dimension mismatch");
  if (!all_finite(x) || !all_finite(y)) throw std::invalid_argument("meet/join: non-finite input");
  return {x.cwiseMin(y), x.cwiseMax(y)};
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Rng::Rng(std::uint64_t seed) : key_(mix64(seed + kGolden)) {}

std::uint64_t Rng::next_u64() {
  counter_ += kGolden;
  return mix64(key_ ^ counter_);
}

double Rng::uniform(double lo, double hi) {
  if (!(std::isfinite(lo) && std::isfinite(hi))) throw std::invalid_argument("Rng::uniform: non-finite bound");
  if (lo > hi) throw std::invalid_argument("Rng::uniform: lo > hi");
  // 53-bit mantissa draw in [0, 1).
  const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  return lo + u * (hi - lo);
}

double Rng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  // u1 in (0, 1] keeps the log finite.
  const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_normal_ = true;
  return r * std::cos(theta);
}

Rng Rng::split(std::uint64_t tag) const {
  // Child key depends only on the parent's key and the tag, never on the
  // parent's draw position, so stream layouts are stable.
  return Rng(mix64(key_ ^ mix64(tag + kGolden)));
}

Rng Rng::split(std::string_view tag) const { return split(fnv1a64(tag)); }

Box::Box(Vec lower, Vec upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) throw std::invalid_argument("Box: dimension mismatch");
  if (lower_.size() == 0) throw std::invalid_argument("Box: empty");
  if (!all_finite(lower_) || !all_finite(upper_)) throw std::invalid_argument("Box: non-finite bound");
  if ((lower_.array() < 0.0).any()) throw std::invalid_argument("Box: lower bound below the nonnegative orthant");
  if ((lower_.array() > upper_.array()).any()) throw std::invalid_argument("Box: lower > upper");
}

Box Box::unit(int dim) { return uniform(dim, 0.0, 1.0); }

Box Box::uniform(int dim, double lo, double hi) {
  if (dim <= 0) throw std::invalid_argument("Box: nonpositive dimension");
  return Box(Vec::Constant(dim, lo), Vec::Constant(dim, hi));
}

bool Box::contains(const Vec& x, double tol) const {
  if (x.size() != lower_.size() || !all_finite(x)) return false;
  return (x.array() >= lower_.array() - tol).all() && (x.array() <= upper_.array() + tol).all();
}

Vec Box::clamp(const Vec& x) const {
  if (x.size() != lower_.size()) throw std::invalid_argument("Box::clamp: dimension mismatch");
  return x.cwiseMax(lower_).cwiseMin(upper_);
}

GeometryConstants::GeometryConstants(double d, double r, double g, double beta)
    : diameter_d(d), radius_r(r), grad_bound_g(g), smoothness_beta(beta) {
  if (!(std::isfinite(d) && std::isfinite(r) && std::isfinite(g) && std::isfinite(beta)))
    throw std::invalid_argument("GeometryConstants: non-finite entry");
  if (d < 0 || r < 0 || g < 0 || beta < 0)
    throw std::invalid_argument("GeometryConstants: negative entry");
  // Any set in the nonnegative orthant has diam <= 2 * radius.
  if (d > 2.0 * r + 1e-12)
    throw std::invalid_argument("GeometryConstants: diameter exceeds twice the radius");
}

}  // namespace subreg
