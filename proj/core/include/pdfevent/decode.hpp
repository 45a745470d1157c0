#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pdfevent/types.hpp"

namespace pdfevent::decode {

struct DecodeParams {
  double mu = 0.5;                    // class threshold, threshold-crossing decoder only
  std::optional<double> sigma;        // smoothing std in steps, nullopt = no smoothing
  std::size_t alpha = 1;              // window half-width and minimum peak distance
  std::optional<double> min_height;   // optional floor on peak height
};

void validate(const DecodeParams& params);

enum class Decoder { regression, seg_threshold, seg_peaks };

std::string_view to_string(Decoder decoder) noexcept;
Decoder decoder_from_string(std::string_view name);

/// Peaks of one smoothed regression channel, scored by the raw channel value.
std::vector<ScoredStep> decode_regression_channel(std::span<const double> y, const DecodeParams& params);

/// Regression decoding of onset and offset density channels.
ScoredEvents decode_regression(std::span<const double> y_on, std::span<const double> y_off,
                               const DecodeParams& params);

/// Threshold crossings of the smoothed class probability, scored by |I(t)|.
ScoredEvents decode_seg_threshold(std::span<const double> y, const DecodeParams& params);

/// Peaks of +I (onsets) and -I (offsets) of the smoothed class probability.
/// `params.mu` is ignored.
ScoredEvents decode_seg_peaks(std::span<const double> y, const DecodeParams& params);

}  // namespace pdfevent::decode
