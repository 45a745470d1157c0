#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "pdfevent/types.hpp"

namespace pdfevent::targets {

enum class PdfKind { hard, gaussian, edap };

std::string_view to_string(PdfKind kind) noexcept;
PdfKind pdf_kind_from_string(std::string_view name);

/// Shape and normalization constants of a regression target density.
struct PdfSpec {
  PdfKind kind = PdfKind::gaussian;
  double sigma = 1.0;              // gaussian only, in steps
  std::vector<Step> thresholds;    // edap only, ascending, in steps
  std::size_t day_length = 1;      // expected steps per event
  std::size_t width = 1;           // odd kernel support, in steps
};

/// Throws InvalidSpec if the spec is inconsistent (even width, kernel wider
/// than its support, support longer than the day length, ...).
void validate(const PdfSpec& spec);

/// Smallest legal odd width for the spec's kind and shape parameters.
std::size_t minimum_width(const PdfSpec& spec);

/// Centered, unit-peak kernel of length `spec.width`.
std::vector<double> make_kernel(const PdfSpec& spec);

/// gamma = sqrt(sum(kernel^2) / day_length). Dividing a target by gamma makes
/// the MSE of an all-zero prediction about 1 when one event occurs per day.
double kernel_gamma(std::span<const double> kernel, std::size_t day_length);

/// Rendered training target. Regression channels are already divided by
/// `gamma`; segmentation targets carry gamma = 1.
struct TargetSeries {
  std::vector<std::vector<double>> channels;
  double gamma = 1.0;
};

/// Two channels (onset, offset) for interval events.
TargetSeries encode_regression(const EventSet& events, std::size_t num_steps, const PdfSpec& spec);

/// One channel for point events (change points treated as onsets).
TargetSeries encode_cpd(const EventSet& events, std::size_t num_steps, const PdfSpec& spec);

/// One binary channel: 1 inside [onset, offset), 0 elsewhere.
TargetSeries encode_segmentation(const EventSet& events, std::size_t num_steps);

/// Linear decay of the target sigma across training epochs.
double sigma_schedule(std::size_t epoch, std::size_t total_epochs, double sigma_start, double sigma_end);

}  // namespace pdfevent::targets
