#include "segraph/nn/layers.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace segraph::nn {

void init_uniform(Mat& m, int fan_in, Rng& rng) {
  const Scalar limit = std::sqrt(6.0 / fan_in);
  Scalar* p = m.data();
  for (Eigen::Index i = 0; i < m.size(); ++i) p[i] = rng.uniform(-limit, limit);
}

Vec softmax(const Vec& logits) {
  const Scalar m = logits.maxCoeff();
  Vec e = (logits.array() - m).exp();
  return e / e.sum();
}

Vec softmax_backward(const Vec& y, const Vec& gy) {
  const Scalar dot = gy.dot(y);
  return (y.array() * (gy.array() - dot)).matrix();
}

// ---------------------------------------------------------------------------
// Dense / MLP
// ---------------------------------------------------------------------------

void Dense::init(int in, int out, const std::string& layer_name, Rng& rng) {
  name = layer_name;
  w.resize(out, in);
  init_uniform(w, in, rng);
  b = Vec::Zero(out);
  gw = Mat::Zero(out, in);
  gb = Vec::Zero(out);
}

Vec Dense::backward(const Vec& gy, const Vec& x) {
  gw.noalias() += gy * x.transpose();
  gb += gy;
  return w.transpose() * gy;
}

void Dense::zero_grad() {
  gw.setZero();
  gb.setZero();
}

void Dense::collect(std::vector<ParamRef>& out) {
  out.push_back({name + ".w", w.data(), gw.data(),
                 {static_cast<std::size_t>(w.rows()), static_cast<std::size_t>(w.cols())}, true});
  out.push_back({name + ".b", b.data(), gb.data(), {static_cast<std::size_t>(b.size())}, true});
}

void Mlp::init(const std::vector<int>& widths, const std::string& name, Rng& rng) {
  if (widths.size() < 2) throw std::runtime_error("mlp needs at least input and output widths");
  layers.resize(widths.size() - 1);
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    layers[i].init(widths[i], widths[i + 1], name + "." + std::to_string(i), rng);
  }
}

Vec Mlp::forward(const Vec& x, MlpCache& cache) const {
  cache.inputs.clear();
  cache.hidden_pre.clear();
  Vec cur = x;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    cache.inputs.push_back(cur);
    Vec z = layers[i].forward(cur);
    if (i + 1 < layers.size()) {
      cache.hidden_pre.push_back(z);
      cur = z.cwiseMax(0.0);
    } else {
      cur = std::move(z);
    }
  }
  return cur;
}

Vec Mlp::backward(const Vec& gy, const MlpCache& cache) {
  Vec g = gy;
  for (std::size_t i = layers.size(); i-- > 0;) {
    if (i + 1 < layers.size()) {
      g.array() *= (cache.hidden_pre[i].array() > 0.0).cast<Scalar>();
    }
    g = layers[i].backward(g, cache.inputs[i]);
  }
  return g;
}

void Mlp::zero_grad() {
  for (Dense& l : layers) l.zero_grad();
}

void Mlp::collect(std::vector<ParamRef>& out) {
  for (Dense& l : layers) l.collect(out);
}

// ---------------------------------------------------------------------------
// im2col / col2im
// ---------------------------------------------------------------------------

namespace {
inline int conv_out(int in, int stride) { return (in - 1) / stride + 1; }
}  // namespace

void im2col3(const Mat& data, int rows, int cols, int stride, Mat& out) {
  const int channels = static_cast<int>(data.rows());
  const int orows = conv_out(rows, stride);
  const int ocols = conv_out(cols, stride);
  out.setZero(9 * channels, static_cast<Eigen::Index>(orows) * ocols);
  for (int ky = 0; ky < 3; ++ky) {
    for (int kx = 0; kx < 3; ++kx) {
      const int base = (ky * 3 + kx) * channels;
      for (int orow = 0; orow < orows; ++orow) {
        const int ir = orow * stride + ky - 1;
        if (ir < 0 || ir >= rows) continue;
        // input column ic = oc*stride + kx - 1 must lie in [0, cols)
        int oc0 = 0;
        while (oc0 * stride + kx - 1 < 0) ++oc0;
        int oc1 = ocols;  // exclusive
        while (oc1 > oc0 && (oc1 - 1) * stride + kx - 1 >= cols) --oc1;
        const int len = oc1 - oc0;
        if (len <= 0) continue;
        const int ic0 = oc0 * stride + kx - 1;
        if (stride == 1) {
          out.block(base, static_cast<Eigen::Index>(orow) * ocols + oc0, channels, len) =
              data.middleCols(static_cast<Eigen::Index>(ir) * cols + ic0, len);
        } else {
          Eigen::Map<const Mat, 0, Eigen::OuterStride<>> src(
              data.data() + (static_cast<Eigen::Index>(ir) * cols + ic0) * channels, channels, len,
              Eigen::OuterStride<>(static_cast<Eigen::Index>(stride) * channels));
          out.block(base, static_cast<Eigen::Index>(orow) * ocols + oc0, channels, len) = src;
        }
      }
    }
  }
}

void col2im3(const Mat& cols_mat, int rows, int cols, int stride, Mat& out) {
  const int channels = static_cast<int>(cols_mat.rows()) / 9;
  const int orows = conv_out(rows, stride);
  const int ocols = conv_out(cols, stride);
  out.setZero(channels, static_cast<Eigen::Index>(rows) * cols);
  for (int ky = 0; ky < 3; ++ky) {
    for (int kx = 0; kx < 3; ++kx) {
      const int base = (ky * 3 + kx) * channels;
      for (int orow = 0; orow < orows; ++orow) {
        const int ir = orow * stride + ky - 1;
        if (ir < 0 || ir >= rows) continue;
        int oc0 = 0;
        while (oc0 * stride + kx - 1 < 0) ++oc0;
        int oc1 = ocols;
        while (oc1 > oc0 && (oc1 - 1) * stride + kx - 1 >= cols) --oc1;
        const int len = oc1 - oc0;
        if (len <= 0) continue;
        const int ic0 = oc0 * stride + kx - 1;
        if (stride == 1) {
          out.middleCols(static_cast<Eigen::Index>(ir) * cols + ic0, len) +=
              cols_mat.block(base, static_cast<Eigen::Index>(orow) * ocols + oc0, channels, len);
        } else {
          Eigen::Map<Mat, 0, Eigen::OuterStride<>> dst(
              out.data() + (static_cast<Eigen::Index>(ir) * cols + ic0) * channels, channels, len,
              Eigen::OuterStride<>(static_cast<Eigen::Index>(stride) * channels));
          dst += cols_mat.block(base, static_cast<Eigen::Index>(orow) * ocols + oc0, channels, len);
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Conv2d
// ---------------------------------------------------------------------------

void Conv2d::init(int in_channels, int out_channels, const std::string& layer_name, Rng& rng) {
  name = layer_name;
  in_c = in_channels;
  out_c = out_channels;
  w.resize(out_c, in_c * 9);
  init_uniform(w, in_c * 9, rng);
  b = Vec::Zero(out_c);
  gw = Mat::Zero(out_c, in_c * 9);
  gb = Vec::Zero(out_c);
}

Tensor Conv2d::forward(const Tensor& x) {
  if (x.channels() != in_c) throw std::runtime_error(name + ": channel mismatch");
  rows_ = x.rows();
  cols_ = x.cols();
  im2col3(x.data(), rows_, cols_, 1, cols_cache_);
  Mat y = w * cols_cache_;
  y.colwise() += b;
  return Tensor::from(std::move(y), rows_, cols_);
}

Tensor Conv2d::backward(const Tensor& gy) {
  gw.noalias() += gy.data() * cols_cache_.transpose();
  gb += gy.data().rowwise().sum();
  const Mat gcols = w.transpose() * gy.data();
  Mat gx;
  col2im3(gcols, rows_, cols_, 1, gx);
  return Tensor::from(std::move(gx), rows_, cols_);
}

void Conv2d::zero_grad() {
  gw.setZero();
  gb.setZero();
}

void Conv2d::collect(std::vector<ParamRef>& out) {
  out.push_back({name + ".w", w.data(), gw.data(),
                 {static_cast<std::size_t>(w.rows()), static_cast<std::size_t>(w.cols())}, true});
  out.push_back({name + ".b", b.data(), gb.data(), {static_cast<std::size_t>(b.size())}, true});
}

// ---------------------------------------------------------------------------
// Deconv2d
// ---------------------------------------------------------------------------

void Deconv2d::init(int in_channels, int out_channels, const std::string& layer_name, Rng& rng) {
  name = layer_name;
  in_c = in_channels;
  out_c = out_channels;
  w.resize(in_c, out_c * 9);
  init_uniform(w, in_c * 9, rng);
  b = Vec::Zero(out_c);
  gw = Mat::Zero(in_c, out_c * 9);
  gb = Vec::Zero(out_c);
}

Tensor Deconv2d::forward(const Tensor& x) {
  if (x.channels() != in_c) throw std::runtime_error(name + ": channel mismatch");
  rows_ = x.rows();
  cols_ = x.cols();
  x_cache_ = x.data();
  const Mat cols_y = w.transpose() * x.data();
  Mat y;
  col2im3(cols_y, 2 * rows_, 2 * cols_, 2, y);
  y.colwise() += b;
  return Tensor::from(std::move(y), 2 * rows_, 2 * cols_);
}

Tensor Deconv2d::backward(const Tensor& gy) {
  im2col3(gy.data(), 2 * rows_, 2 * cols_, 2, gcols_);
  gw.noalias() += x_cache_ * gcols_.transpose();
  gb += gy.data().rowwise().sum();
  Mat gx = w * gcols_;
  return Tensor::from(std::move(gx), rows_, cols_);
}

void Deconv2d::zero_grad() {
  gw.setZero();
  gb.setZero();
}

void Deconv2d::collect(std::vector<ParamRef>& out) {
  out.push_back({name + ".w", w.data(), gw.data(),
                 {static_cast<std::size_t>(w.rows()), static_cast<std::size_t>(w.cols())}, true});
  out.push_back({name + ".b", b.data(), gb.data(), {static_cast<std::size_t>(b.size())}, true});
}

// ---------------------------------------------------------------------------
// MaxPool2
// ---------------------------------------------------------------------------

Tensor MaxPool2::forward(const Tensor& x) {
  if (x.rows() % 2 != 0 || x.cols() % 2 != 0) {
    throw std::runtime_error("maxpool: spatial dims must be even, got " + std::to_string(x.rows()) + "x" +
                             std::to_string(x.cols()));
  }
  in_rows_ = x.rows();
  in_cols_ = x.cols();
  channels_ = x.channels();
  const int orows = in_rows_ / 2, ocols = in_cols_ / 2;
  Tensor y(channels_, orows, ocols);
  argmax_.assign(static_cast<std::size_t>(channels_) * orows * ocols, 0);
  for (int c = 0; c < channels_; ++c) {
    for (int orow = 0; orow < orows; ++orow) {
      for (int oc = 0; oc < ocols; ++oc) {
        Scalar best = -std::numeric_limits<Scalar>::infinity();
        int best_idx = 0;
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            const int idx = (2 * orow + dy) * in_cols_ + 2 * oc + dx;
            const Scalar v = x.data()(c, idx);
            if (v > best) {
              best = v;
              best_idx = idx;
            }
          }
        }
        y.data()(c, orow * ocols + oc) = best;
        argmax_[(static_cast<std::size_t>(c) * orows + orow) * ocols + oc] = best_idx;
      }
    }
  }
  return y;
}

Tensor MaxPool2::backward(const Tensor& gy) {
  Tensor gx(channels_, in_rows_, in_cols_);
  const int orows = in_rows_ / 2, ocols = in_cols_ / 2;
  for (int c = 0; c < channels_; ++c) {
    for (int op = 0; op < orows * ocols; ++op) {
      gx.data()(c, argmax_[static_cast<std::size_t>(c) * orows * ocols + op]) += gy.data()(c, op);
    }
  }
  return gx;
}

// ---------------------------------------------------------------------------
// BatchNorm
// ---------------------------------------------------------------------------

void BatchNorm::init(int channels, const std::string& layer_name) {
  name = layer_name;
  gamma = Vec::Ones(channels);
  beta = Vec::Zero(channels);
  ggamma = Vec::Zero(channels);
  gbeta = Vec::Zero(channels);
  run_mean = Vec::Zero(channels);
  run_var = Vec::Ones(channels);
}

Tensor BatchNorm::forward(const Tensor& x) {
  const int channels = x.channels();
  const Scalar n = static_cast<Scalar>(x.pixels());
  Tensor y(channels, x.rows(), x.cols());
  if (training) {
    xhat_.resize(channels, x.pixels());
    invstd_.resize(channels);
    for (int c = 0; c < channels; ++c) {
      const auto row = x.data().row(c);
      const Scalar mu = row.mean();
      const Scalar var = (row.array() - mu).square().sum() / n;
      const Scalar invstd = 1.0 / std::sqrt(var + eps);
      invstd_(c) = invstd;
      xhat_.row(c) = (row.array() - mu) * invstd;
      y.data().row(c) = gamma(c) * xhat_.row(c).array() + beta(c);
      run_mean(c) = (1.0 - momentum) * run_mean(c) + momentum * mu;
      run_var(c) = (1.0 - momentum) * run_var(c) + momentum * var;
    }
  } else {
    for (int c = 0; c < channels; ++c) {
      const Scalar invstd = 1.0 / std::sqrt(run_var(c) + eps);
      y.data().row(c) = gamma(c) * ((x.data().row(c).array() - run_mean(c)) * invstd) + beta(c);
    }
  }
  return y;
}

Tensor BatchNorm::backward(const Tensor& gy) {
  if (!training) throw std::runtime_error(name + ": backward requires training mode");
  const int channels = gy.channels();
  const Scalar n = static_cast<Scalar>(gy.pixels());
  Tensor gx(channels, gy.rows(), gy.cols());
  for (int c = 0; c < channels; ++c) {
    const auto g = gy.data().row(c).array();
    const auto xh = xhat_.row(c).array();
    ggamma(c) += (g * xh).sum();
    gbeta(c) += g.sum();
    const auto dxhat = g * gamma(c);
    const Scalar sum_d = dxhat.sum();
    const Scalar sum_dx = (dxhat * xh).sum();
    gx.data().row(c) = (invstd_(c) / n) * (n * dxhat - sum_d - xh * sum_dx);
  }
  return gx;
}

void BatchNorm::zero_grad() {
  ggamma.setZero();
  gbeta.setZero();
}

void BatchNorm::collect(std::vector<ParamRef>& out) {
  out.push_back({name + ".gamma", gamma.data(), ggamma.data(), {static_cast<std::size_t>(gamma.size())}, true});
  out.push_back({name + ".beta", beta.data(), gbeta.data(), {static_cast<std::size_t>(beta.size())}, true});
  out.push_back({name + ".run_mean", run_mean.data(), nullptr, {static_cast<std::size_t>(run_mean.size())}, false});
  out.push_back({name + ".run_var", run_var.data(), nullptr, {static_cast<std::size_t>(run_var.size())}, false});
}

// ---------------------------------------------------------------------------
// Relu
// ---------------------------------------------------------------------------

Tensor Relu::forward(const Tensor& x) {
  mask_ = (x.data().array() > 0.0).cast<Scalar>();
  return Tensor::from(x.data().cwiseProduct(mask_), x.rows(), x.cols());
}

Tensor Relu::backward(const Tensor& gy) {
  return Tensor::from(gy.data().cwiseProduct(mask_), gy.rows(), gy.cols());
}

}  // namespace segraph::nn
