#include "pdfevent/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pdfevent/error.hpp"

namespace pdfevent::signal {

namespace {

void require_finite(std::span<const double> x) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      throw Error(ErrorCode::NonFiniteInput, "non-finite sample at index " + std::to_string(i));
    }
  }
}

// Maps an arbitrary integer position onto [0, n) under "abc|cba" reflection.
std::size_t reflect_index(std::ptrdiff_t i, std::ptrdiff_t n) {
  const std::ptrdiff_t period = 2 * n;
  std::ptrdiff_t m = i % period;
  if (m < 0) m += period;
  return static_cast<std::size_t>(m < n ? m : period - 1 - m);
}

}  // namespace

std::vector<double> gaussian_kernel(double sigma, double truncate) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidSpec, "sigma must be finite and non-negative");
  }
  if (!(truncate > 0.0)) {
    throw Error(ErrorCode::InvalidSpec, "truncate must be positive");
  }
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(truncate * sigma));
  if (radius == 0) return {1.0};
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  const double denom = 2.0 * sigma * sigma;
  for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
    kernel[static_cast<std::size_t>(k + radius)] = std::exp(-static_cast<double>(k * k) / denom);
  }
  const double sum = std::accumulate(kernel.begin(), kernel.end(), 0.0);
  for (auto& v : kernel) v /= sum;
  return kernel;
}

std::vector<double> gaussian_smooth(std::span<const double> x, const SmoothingParams& params) {
  require_finite(x);
  if (!params.sigma || x.empty()) return {x.begin(), x.end()};

  const auto kernel = gaussian_kernel(*params.sigma, params.truncate);
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const auto radius = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  std::vector<double> out(x.size(), 0.0);

  if (radius >= n) {
    // Fold the kernel modulo the reflection period 2n.
    const std::ptrdiff_t period = 2 * n;
    std::vector<double> folded(static_cast<std::size_t>(period), 0.0);
    for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
      std::ptrdiff_t m = k % period;
      if (m < 0) m += period;
      folded[static_cast<std::size_t>(m)] += kernel[static_cast<std::size_t>(k + radius)];
    }
    for (std::ptrdiff_t t = 0; t < n; ++t) {
      double acc = 0.0;
      for (std::ptrdiff_t m = 0; m < period; ++m) {
        acc += folded[static_cast<std::size_t>(m)] * x[reflect_index(t + m, n)];
      }
      out[static_cast<std::size_t>(t)] = acc;
    }
    return out;
  }

  std::vector<double> padded(static_cast<std::size_t>(n + 2 * radius));
  for (std::ptrdiff_t i = -radius; i < n + radius; ++i) {
    padded[static_cast<std::size_t>(i + radius)] = x[reflect_index(i, n)];
  }
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    const double* window = padded.data() + t;
    double acc = 0.0;
    for (std::size_t k = 0; k < kernel.size(); ++k) acc += window[k] * kernel[k];
    out[static_cast<std::size_t>(t)] = acc;
  }
  return out;
}

std::vector<Peak> find_peaks(std::span<const double> x, const PeakOptions& options) {
  require_finite(x);
  if (options.min_distance < 1) {
    throw Error(ErrorCode::InvalidRange, "min_distance must be at least 1");
  }
  const std::size_t n = x.size();
  std::vector<std::size_t> candidates;

  // Local maxima, flat tops collapsed onto their midpoint.
  std::size_t i = 1;
  while (n >= 3 && i + 1 < n) {
    if (x[i - 1] < x[i]) {
      std::size_t ahead = i + 1;
      while (ahead + 1 < n && x[ahead] == x[i]) ++ahead;
      if (x[ahead] < x[i]) {
        const std::size_t last = ahead - 1;
        candidates.push_back((i + last) / 2);
        i = ahead;
        continue;
      }
    }
    ++i;
  }

  if (options.min_height) {
    std::erase_if(candidates, [&](std::size_t c) { return x[c] < *options.min_height; });
  }

  if (options.min_distance > 1 && candidates.size() > 1) {
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return x[candidates[a]] > x[candidates[b]];
    });
    std::vector<bool> keep(candidates.size(), true);
    const auto distance = static_cast<std::ptrdiff_t>(options.min_distance);
    for (std::size_t idx : order) {
      if (!keep[idx]) continue;
      const auto here = static_cast<std::ptrdiff_t>(candidates[idx]);
      for (std::size_t j = idx; j-- > 0;) {
        if (here - static_cast<std::ptrdiff_t>(candidates[j]) >= distance) break;
        keep[j] = false;
      }
      for (std::size_t j = idx + 1; j < candidates.size(); ++j) {
        if (static_cast<std::ptrdiff_t>(candidates[j]) - here >= distance) break;
        keep[j] = false;
      }
    }
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      if (keep[j]) kept.push_back(candidates[j]);
    }
    candidates = std::move(kept);
  }

  std::vector<Peak> peaks;
  peaks.reserve(candidates.size());
  for (std::size_t c : candidates) {
    const double height = x[c];
    double left_min = height;
    for (std::size_t j = c; j-- > 0 && x[j] <= height;) left_min = std::min(left_min, x[j]);
    double right_min = height;
    for (std::size_t j = c + 1; j < n && x[j] <= height; ++j) right_min = std::min(right_min, x[j]);
    peaks.push_back({c, height, height - std::max(left_min, right_min)});
  }
  return peaks;
}

std::vector<double> window_convolve(std::span<const double> x, std::size_t alpha) {
  require_finite(x);
  if (alpha < 1) throw Error(ErrorCode::InvalidRange, "alpha must be at least 1");
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  if (n == 0) return {};
  const auto a = static_cast<std::ptrdiff_t>(alpha);
  auto at = [&](std::ptrdiff_t i) { return x[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, n - 1))]; };

  // Both windows are summed in the same order so constants cancel exactly
  // and negating the input negates the output bit for bit.
  std::vector<double> out(x.size());
  const double scale = 1.0 / static_cast<double>(alpha);
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    double after = 0.0;
    double before = 0.0;
    for (std::ptrdiff_t k = 1; k <= a; ++k) {
      after += at(t + k);
      before += at(t - k);
    }
    out[static_cast<std::size_t>(t)] = (after - before) * scale;
  }
  return out;
}

}  // namespace pdfevent::signal
