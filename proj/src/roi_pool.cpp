#include "segraph/nn/roi_pool.hpp"

#include <stdexcept>

namespace segraph::nn {

namespace {

// Bin i covers [start, end) of extent; end is forced past start so thin
// extents replicate rather than produce empty bins.
inline void bin_bounds(int i, int bins, int extent, int* start, int* end) {
  *start = i * extent / bins;
  *end = std::max(*start + 1, (i + 1) * extent / bins);
}

}  // namespace

Vec roi_pool(const Tensor& map, const BBox& box, int bins_r, int bins_c, RoiCache* cache) {
  if (box.r0 > box.r1 || box.c0 > box.c1) throw std::runtime_error("roi_pool: empty bbox");
  if (box.r0 < 0 || box.c0 < 0 || box.r1 >= map.rows() || box.c1 >= map.cols()) {
    throw std::runtime_error("roi_pool: bbox outside the feature map");
  }
  const int channels = map.channels();
  Vec out(static_cast<Eigen::Index>(channels) * bins_r * bins_c);
  if (cache != nullptr) {
    cache->channels = channels;
    cache->argmax.assign(static_cast<std::size_t>(out.size()), 0);
  }
  Eigen::Index o = 0;
  for (int ch = 0; ch < channels; ++ch) {
    for (int br = 0; br < bins_r; ++br) {
      int r_start, r_end;
      bin_bounds(br, bins_r, box.height(), &r_start, &r_end);
      for (int bc = 0; bc < bins_c; ++bc) {
        int c_start, c_end;
        bin_bounds(bc, bins_c, box.width(), &c_start, &c_end);
        Scalar best = map.at(ch, box.r0 + r_start, box.c0 + c_start);
        int best_idx = (box.r0 + r_start) * map.cols() + box.c0 + c_start;
        for (int r = r_start; r < r_end; ++r) {
          for (int c = c_start; c < c_end; ++c) {
            const Scalar v = map.at(ch, box.r0 + r, box.c0 + c);
            if (v > best) {
              best = v;
              best_idx = (box.r0 + r) * map.cols() + box.c0 + c;
            }
          }
        }
        out(o) = best;
        if (cache != nullptr) cache->argmax[static_cast<std::size_t>(o)] = best_idx;
        ++o;
      }
    }
  }
  return out;
}

void roi_pool_backward(const RoiCache& cache, const Vec& gy, Tensor& gmap) {
  if (static_cast<std::size_t>(gy.size()) != cache.argmax.size()) {
    throw std::runtime_error("roi_pool_backward: gradient length mismatch");
  }
  const Eigen::Index per_channel = gy.size() / cache.channels;
  for (Eigen::Index o = 0; o < gy.size(); ++o) {
    const int ch = static_cast<int>(o / per_channel);
    gmap.data()(ch, cache.argmax[static_cast<std::size_t>(o)]) += gy(o);
  }
}

}  // namespace segraph::nn
