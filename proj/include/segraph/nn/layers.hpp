#pragma once

#include "segraph/nn/tensor.hpp"

#include <string>
#include <vector>

namespace segraph::nn {

/// Flat view of one parameter (or state) tensor for SGD and checkpointing.
struct ParamRef {
  std::string name;
  Scalar* value = nullptr;
  Scalar* grad = nullptr;  // null for non-trainable state (batch-norm stats)
  std::vector<std::size_t> dims;
  bool trainable = true;

  std::size_t size() const {
    std::size_t n = 1;
    for (std::size_t d : dims) n *= d;
    return n;
  }
};

/// He-style uniform init, limit sqrt(6 / fan_in), deterministic element order.
void init_uniform(Mat& m, int fan_in, Rng& rng);

// ---------------------------------------------------------------------------
// Vector ops
// ---------------------------------------------------------------------------

Vec softmax(const Vec& logits);
/// y = softmax(z); returns dL/dz given dL/dy.
Vec softmax_backward(const Vec& y, const Vec& gy);

struct Dense {
  std::string name;
  Mat w;  // out x in
  Vec b;
  Mat gw;
  Vec gb;

  void init(int in, int out, const std::string& layer_name, Rng& rng);
  Vec forward(const Vec& x) const { return w * x + b; }
  /// Accumulates gw/gb; x must be the forward input.
  Vec backward(const Vec& gy, const Vec& x);
  void zero_grad();
  void collect(std::vector<ParamRef>& out);
  int in_dim() const { return static_cast<int>(w.cols()); }
  int out_dim() const { return static_cast<int>(w.rows()); }
};

struct MlpCache {
  std::vector<Vec> inputs;      // input of each dense layer
  std::vector<Vec> hidden_pre;  // pre-activation of each hidden layer
};

/// Dense stack with ReLU between layers and a linear output.
struct Mlp {
  std::vector<Dense> layers;

  /// widths = {in, hidden..., out}
  void init(const std::vector<int>& widths, const std::string& name, Rng& rng);
  Vec forward(const Vec& x, MlpCache& cache) const;
  Vec backward(const Vec& gy, const MlpCache& cache);
  void zero_grad();
  void collect(std::vector<ParamRef>& out);
  int in_dim() const { return layers.front().in_dim(); }
  int out_dim() const { return layers.back().out_dim(); }
};

// ---------------------------------------------------------------------------
// Image ops. All kernels are 3x3 with pad 1; pooling is 2x2 stride 2.
// Layers keep the caches of their last forward, so one instance runs one
// forward/backward pass at a time.
// ---------------------------------------------------------------------------

/// im2col for a 3x3 kernel with pad 1: data is (C x rows*cols), out becomes
/// (9C x orows*ocols) with orows = (rows-1)/stride + 1. Row block
/// (ky*3+kx)*C..+C holds the input shifted by (ky-1, kx-1).
void im2col3(const Mat& data, int rows, int cols, int stride, Mat& out);
/// Exact adjoint of im2col3: scatter-adds columns back into (C x rows*cols).
void col2im3(const Mat& cols_mat, int rows, int cols, int stride, Mat& out);

struct Conv2d {
  std::string name;
  int in_c = 0, out_c = 0;
  Mat w;  // out_c x in_c*9, column (ky*3+kx)*in_c + ci
  Vec b;
  Mat gw;
  Vec gb;
  Mat cols_cache_;
  int rows_ = 0, cols_ = 0;

  void init(int in_channels, int out_channels, const std::string& layer_name, Rng& rng);
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy);
  void zero_grad();
  void collect(std::vector<ParamRef>& out);
};

/// Transposed convolution, stride 2: doubles both spatial dimensions.
struct Deconv2d {
  std::string name;
  int in_c = 0, out_c = 0;
  Mat w;  // in_c x out_c*9 (adjoint-convolution layout)
  Vec b;
  Mat gw;
  Vec gb;
  Mat x_cache_;
  Mat gcols_;
  int rows_ = 0, cols_ = 0;

  void init(int in_channels, int out_channels, const std::string& layer_name, Rng& rng);
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy);
  void zero_grad();
  void collect(std::vector<ParamRef>& out);
};

struct MaxPool2 {
  std::vector<int> argmax_;  // per (channel, out pixel): input spatial index
  int in_rows_ = 0, in_cols_ = 0, channels_ = 0;

  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy);
};

/// Per-channel batch norm over the spatial extent (the batch is one map).
struct BatchNorm {
  std::string name;
  Vec gamma, beta, ggamma, gbeta;
  Vec run_mean, run_var;
  Scalar momentum = 0.1;
  Scalar eps = 1e-5;
  bool training = true;

  Mat xhat_;
  Vec invstd_;

  void init(int channels, const std::string& layer_name);
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy);
  void zero_grad();
  void collect(std::vector<ParamRef>& out);
};

struct Relu {
  Mat mask_;

  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy);
};

}  // namespace segraph::nn
