#include "pdfevent/decode.hpp"

#include <cmath>

#include "pdfevent/error.hpp"
#include "pdfevent/signal.hpp"

namespace pdfevent::decode {

void validate(const DecodeParams& params) {
  if (!(params.mu >= 0.0 && params.mu <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "mu must lie in [0, 1]");
  }
  if (params.alpha < 1) throw Error(ErrorCode::InvalidConfig, "alpha must be at least 1");
  if (params.sigma && !(*params.sigma >= 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "sigma must be non-negative");
  }
}

std::string_view to_string(Decoder decoder) noexcept {
  switch (decoder) {
    case Decoder::regression: return "regression";
    case Decoder::seg_threshold: return "seg_threshold";
    case Decoder::seg_peaks: return "seg_peaks";
  }
  return "unknown";
}

Decoder decoder_from_string(std::string_view name) {
  if (name == "regression") return Decoder::regression;
  if (name == "seg_threshold" || name == "method1") return Decoder::seg_threshold;
  if (name == "seg_peaks" || name == "method2") return Decoder::seg_peaks;
  throw Error(ErrorCode::InvalidConfig, "unknown decoder '" + std::string(name) + "'");
}

namespace {

std::vector<double> smooth(std::span<const double> y, const DecodeParams& params) {
  return signal::gaussian_smooth(y, {params.sigma, 4.0});
}

std::vector<ScoredStep> peaks_scored_by(std::span<const double> search, std::span<const double> score_source,
                                        const DecodeParams& params, bool absolute) {
  const auto peaks = signal::find_peaks(search, {params.alpha, params.min_height});
  std::vector<ScoredStep> out;
  out.reserve(peaks.size());
  for (const auto& p : peaks) {
    const double s = score_source[p.index];
    out.push_back({static_cast<Step>(p.index), absolute ? std::abs(s) : s});
  }
  return out;
}

void require_probabilities(std::span<const double> y) {
  for (std::size_t t = 0; t < y.size(); ++t) {
    if (!std::isfinite(y[t])) {
      throw Error(ErrorCode::NonFiniteInput, "non-finite probability at step " + std::to_string(t));
    }
    if (y[t] < 0.0 || y[t] > 1.0) {
      throw Error(ErrorCode::InvalidProbability, "probability outside [0,1] at step " + std::to_string(t));
    }
  }
}

}  // namespace

std::vector<ScoredStep> decode_regression_channel(std::span<const double> y, const DecodeParams& params) {
  validate(params);
  const auto smoothed = smooth(y, params);
  // Peaks come from the smoothed channel, scores from the raw one.
  return peaks_scored_by(smoothed, y, params, false);
}

ScoredEvents decode_regression(std::span<const double> y_on, std::span<const double> y_off,
                               const DecodeParams& params) {
  if (y_on.size() != y_off.size()) {
    throw Error(ErrorCode::LengthMismatch, "onset and offset channels differ in length");
  }
  ScoredEvents out;
  out.onsets = decode_regression_channel(y_on, params);
  out.offsets = decode_regression_channel(y_off, params);
  return out;
}

ScoredEvents decode_seg_threshold(std::span<const double> y, const DecodeParams& params) {
  validate(params);
  require_probabilities(y);
  const auto smoothed = smooth(y, params);
  const auto density = signal::window_convolve(smoothed, params.alpha);
  ScoredEvents out;
  const double mu = params.mu;
  for (std::size_t t = 1; t < smoothed.size(); ++t) {
    if (smoothed[t - 1] < mu && smoothed[t] > mu) {
      out.onsets.push_back({static_cast<Step>(t), std::abs(density[t])});
    } else if (smoothed[t - 1] > mu && smoothed[t] < mu) {
      out.offsets.push_back({static_cast<Step>(t), std::abs(density[t])});
    }
  }
  return out;
}

ScoredEvents decode_seg_peaks(std::span<const double> y, const DecodeParams& params) {
  validate(params);
  require_probabilities(y);
  const auto smoothed = smooth(y, params);
  const auto density = signal::window_convolve(smoothed, params.alpha);
  std::vector<double> negated(density.size());
  for (std::size_t t = 0; t < density.size(); ++t) negated[t] = -density[t];
  ScoredEvents out;
  out.onsets = peaks_scored_by(density, density, params, true);
  out.offsets = peaks_scored_by(negated, density, params, true);
  return out;
}

}  // namespace pdfevent::decode
