#pragma once

#include "segraph/common.hpp"

namespace segraph::nn {

/// Dense C x H x W value container. Storage is one Eigen matrix with one row
/// per channel and row-major spatial layout (column index = r * W + c), which
/// keeps channel-wise reductions and the im2col GEMMs allocation-free.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int channels, int rows, int cols)
      : rows_(rows), cols_(cols), data_(Mat::Zero(channels, static_cast<Eigen::Index>(rows) * cols)) {}

  static Tensor from(Mat data, int rows, int cols) {
    Tensor t;
    t.rows_ = rows;
    t.cols_ = cols;
    t.data_ = std::move(data);
    return t;
  }

  int channels() const { return static_cast<int>(data_.rows()); }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int pixels() const { return rows_ * cols_; }

  Scalar& at(int c, int r, int col) { return data_(c, r * cols_ + col); }
  Scalar at(int c, int r, int col) const { return data_(c, r * cols_ + col); }

  Mat& data() { return data_; }
  const Mat& data() const { return data_; }

  bool same_shape(const Tensor& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_.rows() == o.data_.rows();
  }
  bool all_finite() const { return data_.allFinite(); }

 private:
  int rows_ = 0, cols_ = 0;
  Mat data_;
};

}  // namespace segraph::nn
