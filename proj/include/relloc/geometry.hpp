#pragma once

// Causal structure of Minkowski spacetime restricted to axis-aligned boxes.
//
// Coordinates are (t, x, y, z) in the frame a region is tagged with; the
// metric has signature (-,+,+,+) and c = 1.

#include <array>
#include <string>
#include <vector>

namespace relloc {

/// Half-width of the light-cone band inside which null separation is treated
/// as causal (not separated).
inline constexpr double kLightConeBand = 1e-9;

struct FourVector {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double& operator[](int i);
  double operator[](int i) const;

  friend FourVector operator+(const FourVector& a, const FourVector& b) {
    return {a.t + b.t, a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend FourVector operator-(const FourVector& a, const FourVector& b) {
    return {a.t - b.t, a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend FourVector operator-(const FourVector& a) { return {-a.t, -a.x, -a.y, -a.z}; }
  friend FourVector operator*(double s, const FourVector& a) {
    return {s * a.t, s * a.x, s * a.y, s * a.z};
  }
  friend bool operator==(const FourVector&, const FourVector&) = default;
};

/// g(v, v) = -t^2 + x^2 + y^2 + z^2.
double minkowski_square(const FourVector& v);

enum class CausalClass {
  Zero,
  Spacelike,
  LightlikeFuture,
  LightlikePast,
  TimelikeFuture,
  TimelikePast,
};

std::string to_string(CausalClass c);

/// Classifies v against a tolerance band of half-width `tol` around the cone.
/// Vectors with sup-norm <= tol are reported as Spacelike (the zero vector
/// is spacelike by convention).
CausalClass classify_vector(const FourVector& v, double tol = kLightConeBand);

/// Closed axis-aligned box; zero-width intervals are allowed.
class SpacetimeBox {
 public:
  SpacetimeBox() = default;
  /// Throws std::invalid_argument unless lo <= hi coordinatewise.
  SpacetimeBox(const FourVector& lo, const FourVector& hi);

  /// Spatial box [lo, hi] on the rest plane t = time.
  static SpacetimeBox spatial(double time, const std::array<double, 3>& lo,
                              const std::array<double, 3>& hi);

  const FourVector& lo() const { return lo_; }
  const FourVector& hi() const { return hi_; }

  bool is_spatial() const { return lo_.t == hi_.t; }
  bool contains(const FourVector& p, double tol = 0.0) const;
  /// Box containment (this contains other).
  bool contains(const SpacetimeBox& other) const;
  SpacetimeBox translated(const FourVector& v) const;

  friend bool operator==(const SpacetimeBox&, const SpacetimeBox&) = default;

 private:
  FourVector lo_;
  FourVector hi_;
};

/// A finite union of boxes expressed in the adapted coordinates of `frame`.
///
/// Translations are kept as a separate offset so that shifting by v and then
/// by -v restores the stored bounds bit-exactly.
class RegionUnion {
 public:
  RegionUnion() = default;
  /// Throws std::invalid_argument on an empty box list or a frame that is not
  /// a unit future-directed timelike vector.
  RegionUnion(std::vector<SpacetimeBox> boxes, FourVector frame = {1.0, 0.0, 0.0, 0.0});

  std::vector<SpacetimeBox> boxes() const;
  const FourVector& frame() const { return frame_; }
  const FourVector& offset() const { return offset_; }

  RegionUnion translated(const FourVector& v) const;

  friend bool operator==(const RegionUnion& a, const RegionUnion& b) {
    return a.frame_ == b.frame_ && a.boxes() == b.boxes();
  }

 private:
  std::vector<SpacetimeBox> boxes_;
  FourVector frame_{1.0, 0.0, 0.0, 0.0};
  FourVector offset_{};
};

/// Largest |dt| and smallest spatial Euclidean norm over the difference set
/// b - a of two boxes.
struct BoxGap {
  double max_abs_dt = 0.0;
  double min_spatial = 0.0;
};
BoxGap box_gap(const SpacetimeBox& a, const SpacetimeBox& b);

/// True iff no point of one box lies in the causal future or past of the
/// other: every difference vector is spacelike beyond the band `tol`.
bool causally_separated(const SpacetimeBox& a, const SpacetimeBox& b,
                        double tol = kLightConeBand);

/// Pairwise box test. Throws std::invalid_argument on frame mismatch.
bool causally_separated(const RegionUnion& a, const RegionUnion& b,
                        double tol = kLightConeBand);

/// Membership in the causal completion of a convex spatial box: the closed
/// ball of radius |p.t - t0| around p's spatial part must fit in the box.
/// Throws std::invalid_argument if `lab` is not spatial.
bool lab_contains(const FourVector& p, const SpacetimeBox& lab, double tol = kLightConeBand);

/// Union of the per-box completions (inner approximation for non-convex
/// unions).
bool lab_contains(const FourVector& p, const RegionUnion& lab, double tol = kLightConeBand);

/// Euclidean distance between two spatial boxes on the same rest plane.
/// Throws std::invalid_argument for non-spatial boxes or different planes.
double spatial_distance(const SpacetimeBox& a, const SpacetimeBox& b);

RegionUnion translate_region(const RegionUnion& r, const FourVector& v);

}  // namespace relloc
