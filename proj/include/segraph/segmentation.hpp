#pragma once

#include "segraph/ground.hpp"
#include "segraph/range_image.hpp"

#include <vector>

namespace segraph {

struct SegmentationConfig {
  Scalar ground_thresh = 0.2;       // meters above ground still labeled Ground
  Scalar background_height = 4.0;   // above this the pixel is Background
  Scalar edge_d_min = 0.3;          // edge threshold floor, meters
  Scalar edge_alpha = 0.02;         // range-proportional part of the threshold
  int min_pts = 5;                  // components below this are discarded
  Scalar max_centroid_range = 25.0;
  Scalar max_centroid_height = 5.0;
  GroundConfig ground;

  Scalar edge_threshold(Scalar range) const { return std::max(edge_d_min, edge_alpha * range); }
};

struct PixelCoord {
  int r = 0, c = 0;
  bool operator==(const PixelCoord&) const = default;
};

struct Segment {
  int id = 0;
  std::vector<PixelCoord> pixels;  // row-major order
  BBox bbox;
  Vec3 centroid = Vec3::Zero();
  Scalar centroid_range = 0;
  Scalar centroid_height = 0;  // mean member height above ground
  int majority_label = kUnlabeled;
  int point_count = 0;
};

struct SegmentSet {
  int frame_id = 0;
  std::vector<Segment> segments;

  int size() const { return static_cast<int>(segments.size()); }
};

/// Labels every valid pixel Ground / Background / Unknown from its height
/// above the ground model; invalid pixels become Unvalid.
RangeImage coarse_segment(RangeImage img, const GroundModel& ground, const SegmentationConfig& cfg);

/// Flags Unknown pixels whose 3D gap to a valid Unknown 4-neighbor exceeds
/// edge_threshold(min of the two ranges). Columns wrap; rows do not.
RangeImage extract_edges(RangeImage img, const SegmentationConfig& cfg);

/// 4-connected flood fill over Unknown pixels with EdgePt pixels as barriers
/// (columns wrap). Edge pixels are then attached to the adjacent component
/// with the nearest 3D point, components below min_pts are discarded, and the
/// survivors become segments with dense ids written back into img.seg.
SegmentSet region_grow(RangeImage& img, const SegmentationConfig& cfg);

/// Drops segments whose centroid range or height exceeds the configured
/// limits and re-densifies ids.
SegmentSet filter_segments(SegmentSet set, const SegmentationConfig& cfg);

/// Text dump: `id point_count label bbox_rmin bbox_cmin bbox_rmax bbox_cmax cx cy cz`.
void dump_segments(const SegmentSet& set, const std::string& path);

/// Whole per-frame pipeline: project, ground, heights, coarse labels, edges,
/// region growing, filtering.
struct SegmentationResult {
  RangeImage image;
  GroundModel ground;
  SegmentSet segments;
};
SegmentationResult run_segmentation(const PointFrame& frame, const ProjectionConfig& proj,
                                    const SegmentationConfig& cfg);

}  // namespace segraph
