#include "segraph/point_cloud.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace segraph {

void validate(const PointFrame& frame) {
  for (std::size_t i = 0; i < frame.points.size(); ++i) {
    const Point& p = frame.points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z) || !std::isfinite(p.intensity)) {
      throw std::runtime_error("frame " + std::to_string(frame.frame_id) + ": non-finite point at index " +
                               std::to_string(i));
    }
    if (p.intensity < 0.0 || p.intensity > 255.0) {
      throw std::runtime_error("frame " + std::to_string(frame.frame_id) + ": intensity out of [0,255] at index " +
                               std::to_string(i));
    }
  }
}

PointFrame read_xyzl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open frame file: " + path);
  PointFrame frame;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream ls(line);
    Point p;
    if (!(ls >> p.x >> p.y >> p.z >> p.intensity >> p.label)) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed point line");
    }
    frame.points.push_back(p);
  }
  validate(frame);
  return frame;
}

void write_xyzl(const PointFrame& frame, const std::string& path) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (out == nullptr) throw std::runtime_error("cannot write frame file: " + path);
  std::fprintf(out, "# x y z intensity label\n");
  for (const Point& p : frame.points) {
    std::fprintf(out, "%.6f %.6f %.6f %.3f %d\n", p.x, p.y, p.z, p.intensity, p.label);
  }
  if (std::fclose(out) != 0) throw std::runtime_error("write failed: " + path);
}

}  // namespace segraph
