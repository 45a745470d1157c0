#pragma once

// Forward/backward primitives for 1-D feature maps stored as
// (channels x time) column-major matrices.

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pdfevent::nn {

using Matrix = Eigen::MatrixXd;

/// Convolution weights are laid out as [kernel][out][in], row-major, so
/// each kernel tap is a contiguous (out x in) block.
struct ConvShape {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel_size = 1;

  std::size_t weight_count() const noexcept { return kernel_size * out_channels * in_channels; }
};

/// "Same" convolution with zero padding; odd kernel sizes only.
Matrix conv1d_forward(const Matrix& x, std::span<const double> weight, std::span<const double> bias,
                      const ConvShape& shape);

/// Adds the parameter gradients into `dweight`/`dbias` and returns dL/dx.
Matrix conv1d_backward(const Matrix& x, std::span<const double> weight, const Matrix& dy, const ConvShape& shape,
                       std::span<double> dweight, std::span<double> dbias);

Matrix relu_forward(const Matrix& pre);
Matrix relu_backward(const Matrix& pre, const Matrix& dy);

struct PoolOutput {
  Matrix y;
  // 1 where the right element of the pair won; ties go left.
  std::vector<std::uint8_t> took_right;
};

/// Non-overlapping max pooling by 2 along time; input length must be even.
PoolOutput maxpool2_forward(const Matrix& x);
Matrix maxpool2_backward(const PoolOutput& pooled, const Matrix& dy);

/// Nearest-neighbour upsampling by 2 along time.
Matrix upsample2_forward(const Matrix& x);
Matrix upsample2_backward(const Matrix& dy);

Matrix concat_channels(const Matrix& top, const Matrix& bottom);
/// Splits a gradient of a concatenation back into its two parts.
void split_channels(const Matrix& d, std::size_t top_rows, Matrix& dtop, Matrix& dbottom);

/// Per-column softmax.
Matrix softmax_columns(const Matrix& logits);

/// Sum over columns of -log softmax(logits)[label]. If `dlogits` is given,
/// it receives scale * (softmax - onehot).
double softmax_cross_entropy_sum(const Matrix& logits, std::span<const double> labels, Matrix* dlogits, double scale);

/// Sum of squared differences. If `dpred` is given, it receives
/// scale * 2 * (pred - target).
double squared_error_sum(const Matrix& pred, const Matrix& target, Matrix* dpred, double scale);

}  // namespace pdfevent::nn
