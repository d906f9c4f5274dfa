#pragma once

#include "segraph/nn/layers.hpp"

namespace segraph::nn {

struct FeatureNetConfig {
  Scalar scale = 0.125;  // channel widths relative to the full-size net
  int roi_bins_r = 3, roi_bins_c = 3;
  int hidden_dim = 32;  // S, the node hidden state size

  /// Conv/deconv output widths; {64,64,128,256,256,256} at scale 1.
  std::vector<int> widths() const;
  int roi_len() const;  // out_channels * roi_bins_r * roi_bins_c
  int out_channels() const { return widths().back(); }
};

/// Fully convolutional feature extractor: two 3x3 convs, two conv+pool
/// stages, then two stride-2 deconvs back to the input resolution, batch-norm
/// and ReLU after every conv/deconv. Input must have H and W divisible by 4.
struct FeatureNet {
  FeatureNetConfig cfg;
  Conv2d c1, c2, c3, c4;
  Deconv2d d1, d2;
  BatchNorm bn1, bn2, bn3, bn4, bn5, bn6;
  Relu r1, r2, r3, r4, r5, r6;
  MaxPool2 m1, m2;

  void init(const FeatureNetConfig& config, Rng& rng);
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy);
  void set_training(bool training);
  void zero_grad();
  void collect(std::vector<ParamRef>& out);
};

}  // namespace segraph::nn
