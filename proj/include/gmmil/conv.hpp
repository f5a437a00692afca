#pragma once

#include <Eigen/Core>

#include "gmmil/common.hpp"

namespace gmmil {

// 3x3 stride-2 convolution geometry with TensorFlow-style "same" padding
// (out = ceil(in/2), extra padding goes to the bottom/right). Activations
// are stored one image per row, pixel order (y, x, channel). Weights are
// (3*3*in_channels) x out_channels with patch order (ky, kx, channel).
struct ConvGeom {
  int in_h, in_w, in_c, out_c;
  static constexpr int kernel = 3;
  static constexpr int stride = 2;

  int out_h() const { return (in_h + stride - 1) / stride; }
  int out_w() const { return (in_w + stride - 1) / stride; }
  int in_size() const { return in_h * in_w * in_c; }
  int out_size() const { return out_h() * out_w() * out_c; }
  int patch_size() const { return kernel * kernel * in_c; }
  int pad() const {  // leading (top/left) padding; same formula per axis
    return ((out_h() - 1) * stride + kernel - in_h) / 2;
  }
};

// Y = im2col(X) * W, bias added per output channel.
Eigen::MatrixXd conv_forward(const Eigen::MatrixXd& x, const ConvGeom& g,
                             const Eigen::MatrixXd& w,
                             const Eigen::VectorXd& b);

// dX = col2im(dY * W^T). Also the forward pass of the transposed convolution.
Eigen::MatrixXd conv_backward_input(const Eigen::MatrixXd& dy,
                                    const ConvGeom& g,
                                    const Eigen::MatrixXd& w);

// dW = im2col(X)^T * dY; db = column sums of dY per channel.
void conv_backward_weights(const Eigen::MatrixXd& x, const Eigen::MatrixXd& dy,
                           const ConvGeom& g, Eigen::MatrixXd& dw,
                           Eigen::VectorXd& db);

}  // namespace gmmil
