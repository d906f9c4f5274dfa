#pragma once

#include "segraph/common.hpp"
#include "segraph/nn/tensor.hpp"
#include "segraph/point_cloud.hpp"

namespace segraph {

class GroundModel;

/// seg-channel codes; values >= 0 are segment ids assigned by region growing.
namespace pixel {
inline constexpr int kUnvalid = -5;
inline constexpr int kGround = -4;
inline constexpr int kBackground = -3;
inline constexpr int kUnknown = -2;
inline constexpr int kEdge = -1;
}  // namespace pixel

struct ProjectionConfig {
  int rows = 40;
  int cols = 1800;
  /// Vertical field of view; rows bin elevation linearly across it.
  Scalar elev_min = deg2rad(-16.0);
  Scalar elev_max = deg2rad(7.0);

  Scalar elev_span() const { return elev_max - elev_min; }
};

/// Grid-aligned view of one sweep. Channels are 0 where a pixel is invalid;
/// validity is point_index >= 0 (back-reference into the source frame).
struct RangeImage {
  int rows = 0, cols = 0;
  int frame_id = 0;
  ArrayXX range_m;
  ArrayXX intensity;
  ArrayXX height_m;
  ArrayXX x_m, y_m, z_m;  // source point coordinates, copied for grid-local math
  ArrayXXi point_index;
  ArrayXXi point_label;   // class id of the source point, kUnlabeled otherwise
  ArrayXXi seg;
  bool has_heights = false;
  // projection summary
  int dropped_points = 0;     // outside the vertical FOV
  int collision_points = 0;   // displaced by a nearer return in the same pixel

  bool valid(int r, int c) const { return point_index(r, c) >= 0; }
  int valid_count() const { return static_cast<int>((point_index >= 0).count()); }
  Vec3 point3(int r, int c) const { return {x_m(r, c), y_m(r, c), z_m(r, c)}; }
};

// Projection lattice maps, exposed for tests and for the synthetic scanner.
Scalar beam_elevation(const ProjectionConfig& cfg, int row);    // row center
Scalar column_azimuth(const ProjectionConfig& cfg, int col);    // column center
int elevation_row(const ProjectionConfig& cfg, Scalar elev);    // -1 when outside the FOV
int azimuth_col(const ProjectionConfig& cfg, Scalar azimuth);   // always in [0, cols)

/// Spherical projection with keep-nearest pixel collision policy. Points
/// outside the vertical FOV are dropped and counted in the summary fields.
RangeImage project(const PointFrame& frame, const ProjectionConfig& cfg);

/// Fills height_m = max(0, z - ground elevation at (x,y)) for valid pixels.
RangeImage compute_heights(RangeImage img, const GroundModel& ground);

/// 3 x H x W raw-feature tensor: range [0,25]m -> [0,255] truncated,
/// intensity unchanged, height [0,5]m -> [0,255] truncated; invalid pixels 0.
/// Requires compute_heights to have run.
nn::Tensor normalize_raw(const RangeImage& img);

inline constexpr Scalar kRangeNormFull = 25.0;   // meters mapped to 255
inline constexpr Scalar kHeightNormFull = 5.0;   // meters mapped to 255

}  // namespace segraph
