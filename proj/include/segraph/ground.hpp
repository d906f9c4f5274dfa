#pragma once

#include "segraph/common.hpp"

#include <vector>

namespace segraph {

struct RangeImage;

struct GroundConfig {
  enum class Kind { Plane, SectorConstant };
  Kind kind = Kind::Plane;
  int sectors = 36;              // azimuth bins for ground candidates
  Scalar inlier_thresh = 0.2;    // meters; reweighting threshold of the plane fit
  int reweight_iters = 8;
};

/// Ground elevation as a function of (x, y): either a fitted plane
/// z = a*x + b*y + c or a per-azimuth-sector constant. The query is total;
/// empty sectors fall back to the global minimum elevation.
class GroundModel {
 public:
  GroundModel() = default;

  static GroundModel plane(Scalar a, Scalar b, Scalar c, bool fallback = false);
  static GroundModel sector_table(std::vector<Scalar> elevations, std::vector<bool> filled, Scalar fill_value,
                                  bool fallback);

  Scalar elevation(Scalar x, Scalar y) const;

  bool initialized() const { return initialized_; }
  /// Set when too few candidates existed and the model degraded to z = min_z.
  bool fallback() const { return fallback_; }
  bool is_plane() const { return is_plane_; }
  Scalar plane_a() const { return a_; }
  Scalar plane_b() const { return b_; }
  Scalar plane_c() const { return c_; }
  /// Unit normal of the plane form (sector models report the vertical).
  Vec3 normal() const;

 private:
  bool initialized_ = false;
  bool fallback_ = false;
  bool is_plane_ = true;
  Scalar a_ = 0, b_ = 0, c_ = 0;
  std::vector<Scalar> sector_elev_;
};

/// Fits the ground to the lowest valid return of each azimuth sector with an
/// iteratively reweighted plane fit. Falls back to the horizontal plane
/// z = min_z (flagged) when fewer than 3 sectors produce candidates.
GroundModel estimate_ground(const RangeImage& img, const GroundConfig& cfg = {});

}  // namespace segraph
