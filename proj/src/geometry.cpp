#include "relloc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relloc {

namespace {

constexpr double kFrameTol = 1e-12;

// Distance from 0 to the closed interval [lo, hi].
double clamp_to_zero(double lo, double hi) {
  if (lo > 0.0) return lo;
  if (hi < 0.0) return -hi;
  return 0.0;
}

bool same_frame(const FourVector& u, const FourVector& w) {
  for (int i = 0; i < 4; ++i) {
    if (std::abs(u[i] - w[i]) > kFrameTol) return false;
  }
  return true;
}

}  // namespace

double& FourVector::operator[](int i) {
  switch (i) {
    case 0: return t;
    case 1: return x;
    case 2: return y;
    case 3: return z;
  }
  throw std::out_of_range("FourVector index");
}

double FourVector::operator[](int i) const {
  return const_cast<FourVector&>(*this)[i];
}

double minkowski_square(const FourVector& v) {
  return -v.t * v.t + v.x * v.x + v.y * v.y + v.z * v.z;
}

std::string to_string(CausalClass c) {
  switch (c) {
    case CausalClass::Zero: return "ZERO";
    case CausalClass::Spacelike: return "SPACELIKE";
    case CausalClass::LightlikeFuture: return "LIGHTLIKE_FUTURE";
    case CausalClass::LightlikePast: return "LIGHTLIKE_PAST";
    case CausalClass::TimelikeFuture: return "TIMELIKE_FUTURE";
    case CausalClass::TimelikePast: return "TIMELIKE_PAST";
  }
  return "UNKNOWN";
}

CausalClass classify_vector(const FourVector& v, double tol) {
  if (tol < 0.0) throw std::invalid_argument("classify_vector: negative tolerance");
  const double sup = std::max({std::abs(v.t), std::abs(v.x), std::abs(v.y), std::abs(v.z)});
  const double g = minkowski_square(v);
  if (sup <= tol || g > tol) return CausalClass::Spacelike;
  const bool future = v.t > 0.0;
  if (g < -tol) return future ? CausalClass::TimelikeFuture : CausalClass::TimelikePast;
  return future ? CausalClass::LightlikeFuture : CausalClass::LightlikePast;
}

SpacetimeBox::SpacetimeBox(const FourVector& lo, const FourVector& hi) : lo_(lo), hi_(hi) {
  for (int i = 0; i < 4; ++i) {
    if (!(lo_[i] <= hi_[i])) {
      throw std::invalid_argument("SpacetimeBox: lo must not exceed hi in coordinate " +
                                  std::to_string(i));
    }
  }
}

SpacetimeBox SpacetimeBox::spatial(double time, const std::array<double, 3>& lo,
                                   const std::array<double, 3>& hi) {
  return SpacetimeBox({time, lo[0], lo[1], lo[2]}, {time, hi[0], hi[1], hi[2]});
}

bool SpacetimeBox::contains(const FourVector& p, double tol) const {
  for (int i = 0; i < 4; ++i) {
    if (p[i] < lo_[i] - tol || p[i] > hi_[i] + tol) return false;
  }
  return true;
}

bool SpacetimeBox::contains(const SpacetimeBox& other) const {
  for (int i = 0; i < 4; ++i) {
    if (other.lo_[i] < lo_[i] || other.hi_[i] > hi_[i]) return false;
  }
  return true;
}

SpacetimeBox SpacetimeBox::translated(const FourVector& v) const {
  return SpacetimeBox(lo_ + v, hi_ + v);
}

RegionUnion::RegionUnion(std::vector<SpacetimeBox> boxes, FourVector frame)
    : boxes_(std::move(boxes)), frame_(frame) {
  if (boxes_.empty()) throw std::invalid_argument("RegionUnion: empty box list");
  if (!(frame_.t > 0.0) || std::abs(minkowski_square(frame_) + 1.0) > 1e-9) {
    throw std::invalid_argument("RegionUnion: frame must be a unit future timelike vector");
  }
}

std::vector<SpacetimeBox> RegionUnion::boxes() const {
  if (offset_ == FourVector{}) return boxes_;
  std::vector<SpacetimeBox> out;
  out.reserve(boxes_.size());
  for (const auto& b : boxes_) out.push_back(b.translated(offset_));
  return out;
}

RegionUnion RegionUnion::translated(const FourVector& v) const {
  RegionUnion r = *this;
  r.offset_ = offset_ + v;
  return r;
}

BoxGap box_gap(const SpacetimeBox& a, const SpacetimeBox& b) {
  // The difference set b - a is the box [b.lo - a.hi, b.hi - a.lo].
  BoxGap gap;
  const double dt_lo = b.lo().t - a.hi().t;
  const double dt_hi = b.hi().t - a.lo().t;
  gap.max_abs_dt = std::max(std::abs(dt_lo), std::abs(dt_hi));
  double s2 = 0.0;
  for (int i = 1; i < 4; ++i) {
    const double d = clamp_to_zero(b.lo()[i] - a.hi()[i], b.hi()[i] - a.lo()[i]);
    s2 += d * d;
  }
  gap.min_spatial = std::sqrt(s2);
  return gap;
}

bool causally_separated(const SpacetimeBox& a, const SpacetimeBox& b, double tol) {
  // Time and space components of the difference set vary independently, so
  // the least spacelike difference pairs the largest |dt| with the smallest
  // spatial norm.
  const BoxGap gap = box_gap(a, b);
  return gap.min_spatial * gap.min_spatial - gap.max_abs_dt * gap.max_abs_dt > tol;
}

bool causally_separated(const RegionUnion& a, const RegionUnion& b, double tol) {
  if (!same_frame(a.frame(), b.frame())) {
    throw std::invalid_argument("causally_separated: regions are in different frames");
  }
  const auto boxes_a = a.boxes();
  const auto boxes_b = b.boxes();
  for (const auto& ba : boxes_a) {
    for (const auto& bb : boxes_b) {
      if (!causally_separated(ba, bb, tol)) return false;
    }
  }
  return true;
}

bool lab_contains(const FourVector& p, const SpacetimeBox& lab, double tol) {
  if (!lab.is_spatial()) throw std::invalid_argument("lab_contains: laboratory box is not spatial");
  const double r = std::abs(p.t - lab.lo().t);
  for (int i = 1; i < 4; ++i) {
    if (p[i] - r < lab.lo()[i] - tol || p[i] + r > lab.hi()[i] + tol) return false;
  }
  return true;
}

bool lab_contains(const FourVector& p, const RegionUnion& lab, double tol) {
  const auto boxes = lab.boxes();
  return std::any_of(boxes.begin(), boxes.end(),
                     [&](const SpacetimeBox& b) { return lab_contains(p, b, tol); });
}

double spatial_distance(const SpacetimeBox& a, const SpacetimeBox& b) {
  if (!a.is_spatial() || !b.is_spatial()) {
    throw std::invalid_argument("spatial_distance: boxes must be spatial");
  }
  if (a.lo().t != b.lo().t) {
    throw std::invalid_argument("spatial_distance: boxes lie on different rest planes");
  }
  return box_gap(a, b).min_spatial;
}

RegionUnion translate_region(const RegionUnion& r, const FourVector& v) {
  return r.translated(v);
}

}  // namespace relloc
