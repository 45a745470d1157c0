#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pdfevent/layers.hpp"

namespace pdfevent::model {

using nn::Matrix;

enum class OutMode { regression_2ch, regression_1ch, segmentation_2class };

std::string_view to_string(OutMode mode) noexcept;
OutMode out_mode_from_string(std::string_view name);
std::size_t output_channels(OutMode mode) noexcept;

/// UNet-lite topology. Each encoder level halves the time axis, so inputs are
/// edge-padded to a multiple of 2^levels and outputs cropped back.
struct ModelConfig {
  std::size_t in_channels = 1;
  std::vector<std::size_t> hidden{16, 32, 64};
  std::size_t kernel_size = 5;
  OutMode out_mode = OutMode::regression_2ch;
  std::uint64_t seed = 0;
};

void validate(const ModelConfig& config);

struct Tensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> values;
};

/// Flat, ordered set of named tensors. Gradients and optimizer moments use
/// the same layout as the parameters they belong to.
struct Parameters {
  std::vector<Tensor> tensors;

  const Tensor& at(std::string_view name) const;
  Tensor& at(std::string_view name);
  std::size_t scalar_count() const noexcept;
  Parameters zeros_like() const;
  void scale(double factor);
  void add_scaled(const Parameters& other, double factor);
  double squared_norm() const;
  bool all_finite() const;
};

/// Seeded initialisation; weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)),
/// biases zero.
Parameters init_parameters(const ModelConfig& config);
Parameters zero_parameters(const ModelConfig& config);

/// Batch forward pass. Regression modes return linear outputs, segmentation
/// returns per-step class probabilities (rows sum to one per column).
std::vector<Matrix> forward(const Parameters& params, const std::vector<Matrix>& inputs, const ModelConfig& config);

/// Regression: mean squared error over every step and channel of the batch.
/// Segmentation: mean per-step cross-entropy; `targets[i]` is a 1 x T row of
/// class labels and `predictions[i]` holds class probabilities.
double loss(const std::vector<Matrix>& predictions, const std::vector<Matrix>& targets, OutMode mode);

struct LossAndGradient {
  double loss = 0.0;
  Parameters gradient;
};

/// Exact gradient of `loss(forward(params, inputs), targets)`.
LossAndGradient gradients(const Parameters& params, const std::vector<Matrix>& inputs,
                          const std::vector<Matrix>& targets, const ModelConfig& config);

}  // namespace pdfevent::model
