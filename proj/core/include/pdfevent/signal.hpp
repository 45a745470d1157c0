#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace pdfevent::signal {

struct SmoothingParams {
  // Kernel standard deviation in steps; nullopt leaves the input untouched.
  std::optional<double> sigma;
  // Kernel radius in standard deviations.
  double truncate = 4.0;
};

/// Normalized discrete Gaussian of radius ceil(truncate * sigma), length 2r+1.
std::vector<double> gaussian_kernel(double sigma, double truncate);

/// Gaussian smoothing with reflect ("abc|cba") boundary extension.
///
/// Kernels wider than twice the input are folded onto the 2N-periodic
/// reflected extension so the cost stays O(N^2) for very large sigma.
std::vector<double> gaussian_smooth(std::span<const double> x, const SmoothingParams& params);

struct Peak {
  std::size_t index = 0;
  double height = 0.0;
  double prominence = 0.0;

  friend bool operator==(const Peak&, const Peak&) = default;
};

struct PeakOptions {
  std::size_t min_distance = 1;
  std::optional<double> min_height;
};

/// Strict local maxima of `x`, ordered by index.
///
/// Flat tops count as one peak located at floor((first + last) / 2).
/// Candidates below `min_height` are dropped, then candidates are visited by
/// descending height (lower index first on equal height) and any remaining
/// candidate closer than `min_distance` to a kept peak is discarded.
/// Prominence is the height above the higher of the two lowest points met
/// when walking left and right until terrain rises above the peak (or the
/// sequence ends).
std::vector<Peak> find_peaks(std::span<const double> x, const PeakOptions& options = {});

/// Antisymmetric sliding-window difference:
///   I[t] = mean(x[t+1 .. t+alpha]) - mean(x[t-alpha .. t-1])
/// with edge-value padding. Positive where the signal steps up.
std::vector<double> window_convolve(std::span<const double> x, std::size_t alpha);

}  // namespace pdfevent::signal
