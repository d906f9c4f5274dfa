#include "segraph/range_image.hpp"

#include <cmath>
#include <stdexcept>

#include "segraph/ground.hpp"

namespace segraph {

Scalar beam_elevation(const ProjectionConfig& cfg, int row) {
  return cfg.elev_max - (row + 0.5) * cfg.elev_span() / cfg.rows;
}

Scalar column_azimuth(const ProjectionConfig& cfg, int col) {
  return (col + 0.5) * 2.0 * kPi / cfg.cols - kPi;
}

int elevation_row(const ProjectionConfig& cfg, Scalar elev) {
  if (elev < cfg.elev_min || elev > cfg.elev_max) return -1;
  int row = static_cast<int>(std::floor(cfg.rows * (cfg.elev_max - elev) / cfg.elev_span()));
  if (row == cfg.rows) row = cfg.rows - 1;  // elev == elev_min lands on the last beam
  return row;
}

int azimuth_col(const ProjectionConfig& cfg, Scalar azimuth) {
  int col = static_cast<int>(std::floor(cfg.cols * (azimuth + kPi) / (2.0 * kPi)));
  if (col >= cfg.cols) col -= cfg.cols;  // azimuth == +pi wraps onto column 0
  if (col < 0) col = 0;
  return col;
}

RangeImage project(const PointFrame& frame, const ProjectionConfig& cfg) {
  RangeImage img;
  img.rows = cfg.rows;
  img.cols = cfg.cols;
  img.frame_id = frame.frame_id;
  img.range_m = ArrayXX::Zero(cfg.rows, cfg.cols);
  img.intensity = ArrayXX::Zero(cfg.rows, cfg.cols);
  img.height_m = ArrayXX::Zero(cfg.rows, cfg.cols);
  img.x_m = ArrayXX::Zero(cfg.rows, cfg.cols);
  img.y_m = ArrayXX::Zero(cfg.rows, cfg.cols);
  img.z_m = ArrayXX::Zero(cfg.rows, cfg.cols);
  img.point_index = ArrayXXi::Constant(cfg.rows, cfg.cols, -1);
  img.point_label = ArrayXXi::Constant(cfg.rows, cfg.cols, kUnlabeled);
  img.seg = ArrayXXi::Constant(cfg.rows, cfg.cols, pixel::kUnvalid);

  for (std::size_t i = 0; i < frame.points.size(); ++i) {
    const Point& p = frame.points[i];
    const int row = elevation_row(cfg, p.elevation());
    if (row < 0) {
      ++img.dropped_points;
      continue;
    }
    const int col = azimuth_col(cfg, p.azimuth());
    const Scalar range = p.range();
    if (img.point_index(row, col) >= 0) {
      ++img.collision_points;
      if (range >= img.range_m(row, col)) continue;  // keep-nearest
    }
    img.range_m(row, col) = range;
    img.intensity(row, col) = p.intensity;
    img.x_m(row, col) = p.x;
    img.y_m(row, col) = p.y;
    img.z_m(row, col) = p.z;
    img.point_index(row, col) = static_cast<int>(i);
    img.point_label(row, col) = p.label;
    img.seg(row, col) = pixel::kUnknown;
  }
  if (img.dropped_points > 0) {
    log_debug("projection dropped " + std::to_string(img.dropped_points) + " out-of-FOV points");
  }
  return img;
}

RangeImage compute_heights(RangeImage img, const GroundModel& ground) {
  if (!ground.initialized()) throw std::runtime_error("compute_heights: missing ground model");
  for (int r = 0; r < img.rows; ++r) {
    for (int c = 0; c < img.cols; ++c) {
      if (!img.valid(r, c)) continue;
      const Scalar h = img.z_m(r, c) - ground.elevation(img.x_m(r, c), img.y_m(r, c));
      img.height_m(r, c) = std::max(0.0, h);
    }
  }
  img.has_heights = true;
  return img;
}

nn::Tensor normalize_raw(const RangeImage& img) {
  if (!img.has_heights) throw std::runtime_error("normalize_raw: heights not computed");
  nn::Tensor t(3, img.rows, img.cols);
  for (int r = 0; r < img.rows; ++r) {
    for (int c = 0; c < img.cols; ++c) {
      if (!img.valid(r, c)) continue;
      t.at(0, r, c) = std::min(255.0, img.range_m(r, c) * (255.0 / kRangeNormFull));
      t.at(1, r, c) = img.intensity(r, c);
      t.at(2, r, c) = std::min(255.0, img.height_m(r, c) * (255.0 / kHeightNormFull));
    }
  }
  return t;
}

}  // namespace segraph
