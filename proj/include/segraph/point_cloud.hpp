#pragma once

#include "segraph/common.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace segraph {

inline constexpr int kUnlabeled = -1;

/// One LiDAR return, sensor-centered Cartesian coordinates in meters.
struct Point {
  Scalar x = 0, y = 0, z = 0;
  Scalar intensity = 0;  // raw sensor value in [0, 255]
  int label = kUnlabeled;

  Scalar range() const { return std::sqrt(x * x + y * y + z * z); }
  Scalar azimuth() const { return std::atan2(y, x); }
  Scalar elevation() const { return std::atan2(z, std::sqrt(x * x + y * y)); }
};

struct PointFrame {
  int frame_id = 0;
  std::vector<Point> points;

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
};

/// Throws std::runtime_error if any coordinate is non-finite or an intensity
/// falls outside [0, 255].
void validate(const PointFrame& frame);

/// Text frame format: one `x y z intensity label` line per point, `#` comments,
/// label -1 for unlabeled. Both throw std::runtime_error on I/O failure;
/// read_xyzl also throws on malformed lines.
PointFrame read_xyzl(const std::string& path);
void write_xyzl(const PointFrame& frame, const std::string& path);

}  // namespace segraph
