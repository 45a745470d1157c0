#include "pdfevent/layers.hpp"

#include <cmath>

#include "pdfevent/error.hpp"

namespace pdfevent::nn {

namespace {

using RowMajorMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using RowMajorMutMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

void check_conv(const Matrix& x, std::span<const double> weight, const ConvShape& shape) {
  if (shape.kernel_size % 2 == 0) throw Error(ErrorCode::ShapeMismatch, "conv kernel size must be odd");
  if (static_cast<std::size_t>(x.rows()) != shape.in_channels) {
    throw Error(ErrorCode::ShapeMismatch, "conv input has " + std::to_string(x.rows()) + " channels, expected " +
                                              std::to_string(shape.in_channels));
  }
  if (weight.size() != shape.weight_count()) throw Error(ErrorCode::ShapeMismatch, "conv weight size");
}

Matrix zero_pad(const Matrix& x, Eigen::Index pad) {
  Matrix padded = Matrix::Zero(x.rows(), x.cols() + 2 * pad);
  padded.middleCols(pad, x.cols()) = x;
  return padded;
}

}  // namespace

Matrix conv1d_forward(const Matrix& x, std::span<const double> weight, std::span<const double> bias,
                      const ConvShape& shape) {
  check_conv(x, weight, shape);
  if (bias.size() != shape.out_channels) throw Error(ErrorCode::ShapeMismatch, "conv bias size");
  const auto pad = static_cast<Eigen::Index>(shape.kernel_size / 2);
  const auto cout = static_cast<Eigen::Index>(shape.out_channels);
  const auto cin = static_cast<Eigen::Index>(shape.in_channels);
  const Matrix padded = zero_pad(x, pad);
  const Eigen::Map<const Eigen::VectorXd> b(bias.data(), cout);
  Matrix y = b.replicate(1, x.cols());
  for (std::size_t k = 0; k < shape.kernel_size; ++k) {
    const RowMajorMap w(weight.data() + k * shape.out_channels * shape.in_channels, cout, cin);
    y.noalias() += w * padded.middleCols(static_cast<Eigen::Index>(k), x.cols());
  }
  return y;
}

Matrix conv1d_backward(const Matrix& x, std::span<const double> weight, const Matrix& dy, const ConvShape& shape,
                       std::span<double> dweight, std::span<double> dbias) {
  check_conv(x, weight, shape);
  if (dy.rows() != static_cast<Eigen::Index>(shape.out_channels) || dy.cols() != x.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "conv output gradient shape");
  }
  const auto pad = static_cast<Eigen::Index>(shape.kernel_size / 2);
  const auto cout = static_cast<Eigen::Index>(shape.out_channels);
  const auto cin = static_cast<Eigen::Index>(shape.in_channels);
  const Matrix padded = zero_pad(x, pad);
  Matrix dpadded = Matrix::Zero(padded.rows(), padded.cols());
  for (std::size_t k = 0; k < shape.kernel_size; ++k) {
    const std::size_t offset = k * shape.out_channels * shape.in_channels;
    const RowMajorMap w(weight.data() + offset, cout, cin);
    RowMajorMutMap dw(dweight.data() + offset, cout, cin);
    const auto tap = static_cast<Eigen::Index>(k);
    dw.noalias() += dy * padded.middleCols(tap, x.cols()).transpose();
    dpadded.middleCols(tap, x.cols()).noalias() += w.transpose() * dy;
  }
  Eigen::Map<Eigen::VectorXd> db(dbias.data(), cout);
  db += dy.rowwise().sum();
  return dpadded.middleCols(pad, x.cols());
}

Matrix relu_forward(const Matrix& pre) { return pre.cwiseMax(0.0); }

Matrix relu_backward(const Matrix& pre, const Matrix& dy) {
  return (pre.array() > 0.0).select(dy, 0.0);
}

PoolOutput maxpool2_forward(const Matrix& x) {
  if (x.cols() % 2 != 0) throw Error(ErrorCode::ShapeMismatch, "max pooling needs an even length");
  PoolOutput out;
  const Eigen::Index half = x.cols() / 2;
  out.y.resize(x.rows(), half);
  out.took_right.resize(static_cast<std::size_t>(x.rows() * half));
  for (Eigen::Index t = 0; t < half; ++t) {
    for (Eigen::Index c = 0; c < x.rows(); ++c) {
      const double left = x(c, 2 * t);
      const double right = x(c, 2 * t + 1);
      const bool take_right = right > left;
      out.y(c, t) = take_right ? right : left;
      out.took_right[static_cast<std::size_t>(t * x.rows() + c)] = take_right ? 1 : 0;
    }
  }
  return out;
}

Matrix maxpool2_backward(const PoolOutput& pooled, const Matrix& dy) {
  Matrix dx = Matrix::Zero(dy.rows(), dy.cols() * 2);
  for (Eigen::Index t = 0; t < dy.cols(); ++t) {
    for (Eigen::Index c = 0; c < dy.rows(); ++c) {
      const bool right = pooled.took_right[static_cast<std::size_t>(t * dy.rows() + c)] != 0;
      dx(c, 2 * t + (right ? 1 : 0)) = dy(c, t);
    }
  }
  return dx;
}

Matrix upsample2_forward(const Matrix& x) {
  Matrix y(x.rows(), x.cols() * 2);
  for (Eigen::Index t = 0; t < x.cols(); ++t) {
    y.col(2 * t) = x.col(t);
    y.col(2 * t + 1) = x.col(t);
  }
  return y;
}

Matrix upsample2_backward(const Matrix& dy) {
  Matrix dx(dy.rows(), dy.cols() / 2);
  for (Eigen::Index t = 0; t < dx.cols(); ++t) dx.col(t) = dy.col(2 * t) + dy.col(2 * t + 1);
  return dx;
}

Matrix concat_channels(const Matrix& top, const Matrix& bottom) {
  if (top.cols() != bottom.cols()) throw Error(ErrorCode::ShapeMismatch, "concat length mismatch");
  Matrix out(top.rows() + bottom.rows(), top.cols());
  out.topRows(top.rows()) = top;
  out.bottomRows(bottom.rows()) = bottom;
  return out;
}

void split_channels(const Matrix& d, std::size_t top_rows, Matrix& dtop, Matrix& dbottom) {
  const auto rows = static_cast<Eigen::Index>(top_rows);
  dtop = d.topRows(rows);
  dbottom = d.bottomRows(d.rows() - rows);
}

Matrix softmax_columns(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.cols(); ++t) {
    const double peak = logits.col(t).maxCoeff();
    const Eigen::VectorXd e = (logits.col(t).array() - peak).exp();
    out.col(t) = e / e.sum();
  }
  return out;
}

double softmax_cross_entropy_sum(const Matrix& logits, std::span<const double> labels, Matrix* dlogits,
                                 double scale) {
  if (labels.size() != static_cast<std::size_t>(logits.cols())) {
    throw Error(ErrorCode::ShapeMismatch, "label count differs from sequence length");
  }
  if (dlogits) dlogits->resize(logits.rows(), logits.cols());
  double total = 0.0;
  for (Eigen::Index t = 0; t < logits.cols(); ++t) {
    const double peak = logits.col(t).maxCoeff();
    const Eigen::ArrayXd shifted = logits.col(t).array() - peak;
    const double log_norm = std::log(shifted.exp().sum());
    const auto label = static_cast<Eigen::Index>(labels[static_cast<std::size_t>(t)]);
    if (label < 0 || label >= logits.rows()) throw Error(ErrorCode::ShapeMismatch, "label out of class range");
    total += log_norm - shifted(label);
    if (dlogits) {
      Eigen::ArrayXd p = (shifted - log_norm).exp();
      p(label) -= 1.0;
      dlogits->col(t) = scale * p.matrix();
    }
  }
  return total;
}

double squared_error_sum(const Matrix& pred, const Matrix& target, Matrix* dpred, double scale) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "prediction and target shapes differ");
  }
  const Matrix diff = pred - target;
  if (dpred) *dpred = (2.0 * scale) * diff;
  return diff.squaredNorm();
}

}  // namespace pdfevent::nn
