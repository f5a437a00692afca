#include "gmmil/conv.hpp"

namespace gmmil {

namespace {

// (N*out_h*out_w) x (3*3*in_c), zero-padded patches
Eigen::MatrixXd im2col(const Eigen::MatrixXd& x, const ConvGeom& g) {
  const Eigen::Index n = x.rows();
  const int oh = g.out_h(), ow = g.out_w(), pad = g.pad();
  Eigen::MatrixXd cols =
      Eigen::MatrixXd::Zero(n * oh * ow, g.patch_size());
  for (Eigen::Index img = 0; img < n; ++img) {
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        const Eigen::Index row = (img * oh + oy) * ow + ox;
        for (int ky = 0; ky < ConvGeom::kernel; ++ky) {
          const int iy = oy * ConvGeom::stride - pad + ky;
          if (iy < 0 || iy >= g.in_h) continue;
          for (int kx = 0; kx < ConvGeom::kernel; ++kx) {
            const int ix = ox * ConvGeom::stride - pad + kx;
            if (ix < 0 || ix >= g.in_w) continue;
            cols.block(row, (ky * ConvGeom::kernel + kx) * g.in_c, 1, g.in_c) =
                x.block(img, (iy * g.in_w + ix) * g.in_c, 1, g.in_c);
          }
        }
      }
    }
  }
  return cols;
}

void col2im_add(const Eigen::MatrixXd& cols, const ConvGeom& g,
                Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  const int oh = g.out_h(), ow = g.out_w(), pad = g.pad();
  for (Eigen::Index img = 0; img < n; ++img) {
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        const Eigen::Index row = (img * oh + oy) * ow + ox;
        for (int ky = 0; ky < ConvGeom::kernel; ++ky) {
          const int iy = oy * ConvGeom::stride - pad + ky;
          if (iy < 0 || iy >= g.in_h) continue;
          for (int kx = 0; kx < ConvGeom::kernel; ++kx) {
            const int ix = ox * ConvGeom::stride - pad + kx;
            if (ix < 0 || ix >= g.in_w) continue;
            x.block(img, (iy * g.in_w + ix) * g.in_c, 1, g.in_c) +=
                cols.block(row, (ky * ConvGeom::kernel + kx) * g.in_c, 1,
                           g.in_c);
          }
        }
      }
    }
  }
}

void check_shapes(const ConvGeom& g, const Eigen::MatrixXd& w,
                  Eigen::Index in_cols, Eigen::Index expect_in) {
  if (w.rows() != g.patch_size() || w.cols() != g.out_c)
    throw ArgumentError("conv: weight shape mismatch");
  if (in_cols != expect_in) throw ArgumentError("conv: input shape mismatch");
}

}  // namespace

Eigen::MatrixXd conv_forward(const Eigen::MatrixXd& x, const ConvGeom& g,
                             const Eigen::MatrixXd& w,
                             const Eigen::VectorXd& b) {
  check_shapes(g, w, x.cols(), g.in_size());
  const Eigen::Index n = x.rows();
  const int p = g.out_h() * g.out_w();
  Eigen::MatrixXd ycol = im2col(x, g) * w;  // (n*p) x out_c
  Eigen::MatrixXd y(n, g.out_size());
  for (Eigen::Index img = 0; img < n; ++img)
    for (int pos = 0; pos < p; ++pos)
      y.block(img, pos * g.out_c, 1, g.out_c) =
          ycol.row(img * p + pos) + b.transpose();
  return y;
}

Eigen::MatrixXd conv_backward_input(const Eigen::MatrixXd& dy,
                                    const ConvGeom& g,
                                    const Eigen::MatrixXd& w) {
  check_shapes(g, w, dy.cols(), g.out_size());
  const Eigen::Index n = dy.rows();
  const int p = g.out_h() * g.out_w();
  Eigen::MatrixXd dycol(n * p, g.out_c);
  for (Eigen::Index img = 0; img < n; ++img)
    for (int pos = 0; pos < p; ++pos)
      dycol.row(img * p + pos) = dy.block(img, pos * g.out_c, 1, g.out_c);
  Eigen::MatrixXd cols = dycol * w.transpose();
  Eigen::MatrixXd dx = Eigen::MatrixXd::Zero(n, g.in_size());
  col2im_add(cols, g, dx);
  return dx;
}

void conv_backward_weights(const Eigen::MatrixXd& x, const Eigen::MatrixXd& dy,
                           const ConvGeom& g, Eigen::MatrixXd& dw,
                           Eigen::VectorXd& db) {
  if (x.cols() != g.in_size() || dy.cols() != g.out_size())
    throw ArgumentError("conv: input shape mismatch");
  dw.resize(g.patch_size(), g.out_c);
  const Eigen::Index n = x.rows();
  const int p = g.out_h() * g.out_w();
  Eigen::MatrixXd dycol(n * p, g.out_c);
  for (Eigen::Index img = 0; img < n; ++img)
    for (int pos = 0; pos < p; ++pos)
      dycol.row(img * p + pos) = dy.block(img, pos * g.out_c, 1, g.out_c);
  dw.noalias() = im2col(x, g).transpose() * dycol;
  db = dycol.colwise().sum();
}

}  // namespace gmmil
