#include "pdfevent/targets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "pdfevent/error.hpp"

namespace pdfevent::targets {

std::string_view to_string(PdfKind kind) noexcept {
  switch (kind) {
    case PdfKind::hard: return "hard";
    case PdfKind::gaussian: return "gaussian";
    case PdfKind::edap: return "edap";
  }
  return "unknown";
}

PdfKind pdf_kind_from_string(std::string_view name) {
  if (name == "hard") return PdfKind::hard;
  if (name == "gaussian") return PdfKind::gaussian;
  if (name == "edap") return PdfKind::edap;
  throw Error(ErrorCode::InvalidSpec, "unknown pdf kind '" + std::string(name) + "'");
}

std::size_t minimum_width(const PdfSpec& spec) {
  switch (spec.kind) {
    case PdfKind::hard:
      return 1;
    case PdfKind::gaussian:
      return 2 * static_cast<std::size_t>(std::ceil(4.0 * spec.sigma)) + 1;
    case PdfKind::edap:
      return spec.thresholds.empty() ? 1 : 2 * static_cast<std::size_t>(spec.thresholds.back()) + 1;
  }
  return 1;
}

void validate(const PdfSpec& spec) {
  if (spec.width % 2 == 0) {
    throw Error(ErrorCode::InvalidSpec, "kernel width must be odd");
  }
  if (spec.kind == PdfKind::gaussian && !(spec.sigma > 0.0 && std::isfinite(spec.sigma))) {
    throw Error(ErrorCode::InvalidSpec, "gaussian sigma must be positive");
  }
  if (spec.kind == PdfKind::edap) {
    if (spec.thresholds.empty()) {
      throw Error(ErrorCode::InvalidSpec, "edap kernel needs at least one threshold");
    }
    for (std::size_t i = 0; i < spec.thresholds.size(); ++i) {
      if (spec.thresholds[i] <= 0 || (i > 0 && spec.thresholds[i] <= spec.thresholds[i - 1])) {
        throw Error(ErrorCode::InvalidSpec, "edap thresholds must be positive and strictly ascending");
      }
    }
  }
  if (spec.width < minimum_width(spec)) {
    throw Error(ErrorCode::InvalidSpec,
                "width " + std::to_string(spec.width) + " below minimum " + std::to_string(minimum_width(spec)));
  }
  if (spec.day_length < spec.width) {
    throw Error(ErrorCode::InvalidSpec, "day length must be at least the kernel width");
  }
}

std::vector<double> make_kernel(const PdfSpec& spec) {
  validate(spec);
  const auto half = static_cast<Step>(spec.width / 2);
  std::vector<double> kernel(spec.width, 0.0);
  for (Step t = -half; t <= half; ++t) {
    double value = 0.0;
    switch (spec.kind) {
      case PdfKind::hard:
        value = t == 0 ? 1.0 : 0.0;
        break;
      case PdfKind::gaussian: {
        const auto d = static_cast<double>(t);
        value = std::exp(-(d * d) / (2.0 * spec.sigma * spec.sigma));
        break;
      }
      case PdfKind::edap: {
        const auto inside = std::count_if(spec.thresholds.begin(), spec.thresholds.end(),
                                          [&](Step tau) { return std::abs(t) <= tau; });
        value = static_cast<double>(inside) / static_cast<double>(spec.thresholds.size());
        break;
      }
    }
    kernel[static_cast<std::size_t>(t + half)] = value;
  }
  return kernel;
}

double kernel_gamma(std::span<const double> kernel, std::size_t day_length) {
  if (day_length == 0) throw Error(ErrorCode::InvalidSpec, "day length must be positive");
  double energy = 0.0;
  for (double v : kernel) energy += v * v;
  if (!(energy > 0.0)) throw Error(ErrorCode::ZeroKernel, "kernel has no energy");
  return std::sqrt(energy / static_cast<double>(day_length));
}

namespace {

void stamp(std::vector<double>& channel, Step center, std::span<const double> kernel) {
  const auto half = static_cast<Step>(kernel.size() / 2);
  const auto n = static_cast<Step>(channel.size());
  const Step from = std::max<Step>(0, center - half);
  const Step to = std::min<Step>(n - 1, center + half);
  for (Step t = from; t <= to; ++t) {
    channel[static_cast<std::size_t>(t)] += kernel[static_cast<std::size_t>(t - center + half)];
  }
}

void scale(std::vector<double>& channel, double gamma) {
  for (auto& v : channel) v /= gamma;
}

}  // namespace

TargetSeries encode_regression(const EventSet& events, std::size_t num_steps, const PdfSpec& spec) {
  if (events.kind != EventKind::interval) {
    throw Error(ErrorCode::InvalidEvents, "regression targets need interval events");
  }
  validate_events(events, num_steps);
  const auto kernel = make_kernel(spec);
  TargetSeries out;
  out.gamma = kernel_gamma(kernel, spec.day_length);
  out.channels.assign(2, std::vector<double>(num_steps, 0.0));
  for (const auto& e : events.intervals) {
    stamp(out.channels[0], e.onset, kernel);
    stamp(out.channels[1], e.offset, kernel);
  }
  for (auto& c : out.channels) scale(c, out.gamma);
  return out;
}

TargetSeries encode_cpd(const EventSet& events, std::size_t num_steps, const PdfSpec& spec) {
  if (events.kind != EventKind::point) {
    throw Error(ErrorCode::InvalidEvents, "change-point targets need point events");
  }
  validate_events(events, num_steps);
  const auto kernel = make_kernel(spec);
  TargetSeries out;
  out.gamma = kernel_gamma(kernel, spec.day_length);
  out.channels.assign(1, std::vector<double>(num_steps, 0.0));
  for (const auto& p : events.points) stamp(out.channels[0], p.step, kernel);
  scale(out.channels[0], out.gamma);
  return out;
}

TargetSeries encode_segmentation(const EventSet& events, std::size_t num_steps) {
  validate_events(events, num_steps);
  const auto labels = derive_state_labels(events, num_steps);
  TargetSeries out;
  out.channels.emplace_back(labels.begin(), labels.end());
  return out;
}

double sigma_schedule(std::size_t epoch, std::size_t total_epochs, double sigma_start, double sigma_end) {
  if (total_epochs == 0 || epoch > total_epochs) {
    throw Error(ErrorCode::InvalidRange, "epoch must lie in [0, total_epochs] with total_epochs > 0");
  }
  if (!(sigma_end > 0.0) || sigma_start < sigma_end) {
    throw Error(ErrorCode::InvalidRange, "need sigma_start >= sigma_end > 0");
  }
  const double fraction = static_cast<double>(epoch) / static_cast<double>(total_epochs);
  return sigma_start + (sigma_end - sigma_start) * fraction;
}

}  // namespace pdfevent::targets
