#pragma once

#include "segraph/nn/tensor.hpp"

#include <vector>

namespace segraph::nn {

struct RoiCache {
  std::vector<int> argmax;  // per output element: input spatial index
  int channels = 0;
};

/// Max-pools the bbox over a bins_r x bins_c grid per channel and flattens to
/// a fixed-length vector (channel-major, then bin row-major). Bins are
/// near-equal splits; boxes thinner than the grid replicate rows/columns so
/// every bin covers at least one pixel. Throws on an empty or out-of-bounds
/// bbox.
Vec roi_pool(const Tensor& map, const BBox& box, int bins_r, int bins_c, RoiCache* cache = nullptr);

/// Routes gradient to the argmax positions; accumulates into gmap.
void roi_pool_backward(const RoiCache& cache, const Vec& gy, Tensor& gmap);

}  // namespace segraph::nn
