#include "segraph/segmentation.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace segraph {

RangeImage coarse_segment(RangeImage img, const GroundModel& ground, const SegmentationConfig& cfg) {
  if (!ground.initialized()) throw std::runtime_error("coarse_segment: missing ground model");
  for (int r = 0; r < img.rows; ++r) {
    for (int c = 0; c < img.cols; ++c) {
      if (!img.valid(r, c)) {
        img.seg(r, c) = pixel::kUnvalid;
        continue;
      }
      const Scalar h = std::max(0.0, img.z_m(r, c) - ground.elevation(img.x_m(r, c), img.y_m(r, c)));
      if (h <= cfg.ground_thresh) {
        img.seg(r, c) = pixel::kGround;
      } else if (h > cfg.background_height) {
        img.seg(r, c) = pixel::kBackground;
      } else {
        img.seg(r, c) = pixel::kUnknown;
      }
    }
  }
  return img;
}

namespace {

// 4-neighborhood with horizontal wrap (the range image is a cylinder).
inline int wrap_col(int c, int cols) {
  if (c < 0) return c + cols;
  if (c >= cols) return c - cols;
  return c;
}

constexpr int kNeighborOffsets[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};

}  // namespace

RangeImage extract_edges(RangeImage img, const SegmentationConfig& cfg) {
  const ArrayXXi coarse = img.seg;  // decisions read pre-edge labels only
  for (int r = 0; r < img.rows; ++r) {
    for (int c = 0; c < img.cols; ++c) {
      if (coarse(r, c) != pixel::kUnknown) continue;
      for (const auto& off : kNeighborOffsets) {
        const int nr = r + off[0];
        if (nr < 0 || nr >= img.rows) continue;
        const int nc = wrap_col(c + off[1], img.cols);
        if (coarse(nr, nc) != pixel::kUnknown) continue;
        const Scalar gap = (img.point3(r, c) - img.point3(nr, nc)).norm();
        if (gap > cfg.edge_threshold(std::min(img.range_m(r, c), img.range_m(nr, nc)))) {
          img.seg(r, c) = pixel::kEdge;
          break;
        }
      }
    }
  }
  return img;
}

SegmentSet region_grow(RangeImage& img, const SegmentationConfig& cfg) {
  const int rows = img.rows, cols = img.cols;
  ArrayXXi comp = ArrayXXi::Constant(rows, cols, -1);

  // Stage 1: flood fill Unknown pixels; EdgePt (and everything else) blocks.
  int n_comp = 0;
  std::vector<PixelCoord> stack;
  for (int r0 = 0; r0 < rows; ++r0) {
    for (int c0 = 0; c0 < cols; ++c0) {
      if (img.seg(r0, c0) != pixel::kUnknown || comp(r0, c0) >= 0) continue;
      const int id = n_comp++;
      comp(r0, c0) = id;
      stack.assign(1, {r0, c0});
      while (!stack.empty()) {
        const PixelCoord p = stack.back();
        stack.pop_back();
        for (const auto& off : kNeighborOffsets) {
          const int nr = p.r + off[0];
          if (nr < 0 || nr >= rows) continue;
          const int nc = wrap_col(p.c + off[1], cols);
          if (img.seg(nr, nc) != pixel::kUnknown || comp(nr, nc) >= 0) continue;
          comp(nr, nc) = id;
          stack.push_back({nr, nc});
        }
      }
    }
  }

  // Stage 2: attach edge pixels to the adjacent component whose member point
  // is nearest in 3D; unattached edge pixels stay EdgePt.
  std::vector<std::vector<PixelCoord>> members(n_comp);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (comp(r, c) >= 0) members[comp(r, c)].push_back({r, c});
    }
  }
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (img.seg(r, c) != pixel::kEdge) continue;
      int best = -1;
      Scalar best_d = 0;
      for (const auto& off : kNeighborOffsets) {
        const int nr = r + off[0];
        if (nr < 0 || nr >= rows) continue;
        const int nc = wrap_col(c + off[1], cols);
        if (comp(nr, nc) < 0) continue;
        const Scalar d = (img.point3(r, c) - img.point3(nr, nc)).norm();
        if (best < 0 || d < best_d) {
          best = comp(nr, nc);
          best_d = d;
        }
      }
      if (best >= 0) members[best].push_back({r, c});
    }
  }

  // Stage 3: size filter, stats, dense ids in first-seen order.
  SegmentSet set;
  set.frame_id = img.frame_id;
  for (int cid = 0; cid < n_comp; ++cid) {
    if (static_cast<int>(members[cid].size()) < cfg.min_pts) continue;
    Segment s;
    s.id = set.size();
    s.pixels = members[cid];
    std::sort(s.pixels.begin(), s.pixels.end(),
              [](const PixelCoord& a, const PixelCoord& b) { return a.r != b.r ? a.r < b.r : a.c < b.c; });
    s.point_count = static_cast<int>(s.pixels.size());
    Vec3 sum = Vec3::Zero();
    Scalar hsum = 0;
    std::map<int, int> votes;
    s.bbox = {rows, cols, -1, -1};
    for (const PixelCoord& p : s.pixels) {
      sum += img.point3(p.r, p.c);
      hsum += img.height_m(p.r, p.c);
      if (img.point_label(p.r, p.c) >= 0) ++votes[img.point_label(p.r, p.c)];
      s.bbox.r0 = std::min(s.bbox.r0, p.r);
      s.bbox.c0 = std::min(s.bbox.c0, p.c);
      s.bbox.r1 = std::max(s.bbox.r1, p.r);
      s.bbox.c1 = std::max(s.bbox.c1, p.c);
    }
    s.centroid = sum / s.point_count;
    s.centroid_range = s.centroid.norm();
    s.centroid_height = hsum / s.point_count;
    int best = kUnlabeled, best_n = 0;
    for (const auto& [label, n] : votes) {
      if (n > best_n) {  // map order resolves ties to the lowest class id
        best = label;
        best_n = n;
      }
    }
    s.majority_label = best;
    set.segments.push_back(std::move(s));
  }

  for (const Segment& s : set.segments) {
    for (const PixelCoord& p : s.pixels) img.seg(p.r, p.c) = s.id;
  }
  return set;
}

SegmentSet filter_segments(SegmentSet set, const SegmentationConfig& cfg) {
  std::vector<Segment> kept;
  for (Segment& s : set.segments) {
    if (s.centroid_range > cfg.max_centroid_range || s.centroid_height > cfg.max_centroid_height) continue;
    s.id = static_cast<int>(kept.size());
    kept.push_back(std::move(s));
  }
  set.segments = std::move(kept);
  return set;
}

void dump_segments(const SegmentSet& set, const std::string& path) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (out == nullptr) throw std::runtime_error("cannot write segment dump: " + path);
  std::fprintf(out, "# id point_count label bbox_rmin bbox_cmin bbox_rmax bbox_cmax cx cy cz\n");
  for (const Segment& s : set.segments) {
    std::fprintf(out, "%d %d %d %d %d %d %d %.6f %.6f %.6f\n", s.id, s.point_count, s.majority_label, s.bbox.r0,
                 s.bbox.c0, s.bbox.r1, s.bbox.c1, s.centroid.x(), s.centroid.y(), s.centroid.z());
  }
  if (std::fclose(out) != 0) throw std::runtime_error("write failed: " + path);
}

SegmentationResult run_segmentation(const PointFrame& frame, const ProjectionConfig& proj,
                                    const SegmentationConfig& cfg) {
  SegmentationResult res;
  res.image = project(frame, proj);
  res.ground = estimate_ground(res.image, cfg.ground);
  res.image = compute_heights(std::move(res.image), res.ground);
  res.image = coarse_segment(std::move(res.image), res.ground, cfg);
  res.image = extract_edges(std::move(res.image), cfg);
  res.segments = region_grow(res.image, cfg);
  res.segments = filter_segments(std::move(res.segments), cfg);
  return res;
}

}  // namespace segraph
