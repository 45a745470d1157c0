#pragma once

#include <string>
#include <vector>

#include "pdfevent/data.hpp"
#include "pdfevent/experiment.hpp"

namespace pdfevent::bench {

inline constexpr std::size_t kFactor = 4;

inline data::SynthConfig synth_config() {
  data::SynthConfig c;
  c.num_series = 64;
  c.length = 4096;
  c.mean_event_duration = 600;
  c.mean_gap = 900;
  c.noise_std = 1.0;
  c.signal_shift = 1.0;
  c.drift_std = 0.02;
  c.seed = 20240601;
  return c;
}

// Interval events on the downsampled time axis.
inline experiment::Dataset interval_dataset() {
  experiment::Dataset out;
  for (const auto& raw : data::synth_generate(synth_config())) {
    auto ds = data::downsample(raw.series, kFactor, raw.events);
    out.series.push_back(std::move(ds.series));
    out.events.push_back(std::move(ds.events));
  }
  return out;
}

// Same series with every state transition as a point event.
inline experiment::Dataset point_dataset() {
  auto out = interval_dataset();
  for (auto& e : out.events) e = data::change_points(e);
  return out;
}

inline experiment::ExperimentConfig base_config() {
  experiment::ExperimentConfig c;
  c.model.hidden = {8, 16, 32};
  c.model.kernel_size = 5;
  c.model.seed = 7;
  c.train.epochs = 20;
  c.train.batch_size = 4;
  c.train.learning_rate = 1e-3;
  c.train.grad_clip_norm = 0.1;
  c.train.seed = 11;
  c.decode.alpha = 12;
  c.metric.tolerances = {1, 2, 3, 5, 7, 10, 15, 20};
  c.folds = 4;
  return c;
}

inline targets::PdfSpec gaussian_pdf(double sigma) {
  targets::PdfSpec pdf;
  pdf.kind = targets::PdfKind::gaussian;
  pdf.sigma = sigma;
  pdf.width = targets::minimum_width(pdf);
  pdf.day_length = (600 + 900) / kFactor;
  return pdf;
}

inline experiment::ExperimentConfig regression_config() {
  auto c = base_config();
  c.objective = experiment::Objective::regression;
  c.decoder = decode::Decoder::regression;
  c.pdf = gaussian_pdf(3.0);
  return c;
}

inline experiment::ExperimentConfig segmentation_config() {
  auto c = base_config();
  c.objective = experiment::Objective::segmentation;
  c.decoder = decode::Decoder::seg_threshold;
  return c;
}

inline experiment::ExperimentConfig cpd_config() {
  auto c = base_config();
  c.objective = experiment::Objective::cpd;
  c.decoder = decode::Decoder::regression;
  c.pdf = gaussian_pdf(3.0);
  c.pdf.day_length /= 2;
  c.metric.classes = {"point"};
  return c;
}

}  // namespace pdfevent::bench
