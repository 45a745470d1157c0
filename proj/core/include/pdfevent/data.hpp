#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pdfevent/types.hpp"

namespace pdfevent::data {

/// Two-state latent process observed through a mean-shift channel ("signal")
/// and a variance channel ("activity").
struct SynthConfig {
  std::size_t num_series = 8;
  std::size_t length = 4096;
  std::size_t mean_event_duration = 500;
  std::size_t mean_gap = 500;
  double noise_std = 1.0;
  double signal_shift = 1.0;
  double drift_std = 0.0;
  double step_seconds = 1.0;
  std::uint64_t seed = 0;
};

void validate(const SynthConfig& config);

struct LabeledSeries {
  TimeSeries series;
  EventSet events;
};

/// Deterministic in `config.seed`; series i depends only on (seed, i).
/// Durations are mean/2 plus a geometric tail, so they stay near their means.
/// A run still open at the end of the series is not reported as an event and
/// its steps are observed as out-of-event.
std::vector<LabeledSeries> synth_generate(const SynthConfig& config);

/// Every state transition of an interval set, as point events.
EventSet change_points(const EventSet& intervals);

/// Window statistics over non-overlapping windows of `factor` steps. Each
/// continuous channel c becomes c_mean, c_std (population), c_max, c_min;
/// channels listed in `categorical` keep the last value of each window.
/// A trailing partial window is dropped and event steps map to t / factor.
/// Events that collapse to zero length or leave the shortened range are
/// dropped.
LabeledSeries downsample(const TimeSeries& series, std::size_t factor, const EventSet& events,
                         std::span<const std::string> categorical = {});

/// Per-channel z-scoring (population std, floored at 1e-8).
TimeSeries standardize(const TimeSeries& series);

// ---- CSV files -------------------------------------------------------------
// Series: header "step,<channel>...", one row per step, steps 0..T-1.
// Events: header "series_id,event,step,score", event in {onset, offset, point},
//         score may be empty.

TimeSeries load_series(const std::filesystem::path& path, double step_seconds = 1.0);
void save_series(const std::filesystem::path& path, const TimeSeries& series);

/// Ground-truth events grouped per series in order of first appearance.
std::vector<EventSet> load_events(const std::filesystem::path& path);
void save_event_sets(const std::filesystem::path& path, std::span<const EventSet> events);

std::vector<ScoredEvents> load_scored_events(const std::filesystem::path& path);
/// With `as_points`, onsets are written with event label "point".
void save_events(const std::filesystem::path& path, std::span<const ScoredEvents> events, bool as_points = false);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

}  // namespace pdfevent::data
