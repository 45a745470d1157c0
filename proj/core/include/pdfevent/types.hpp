#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pdfevent {

// Time index in (possibly downsampled) step units.
using Step = std::int64_t;

struct Channel {
  std::string name;
  std::vector<double> values;
};

/// Multichannel, uniformly sampled signal. All channels share one length.
struct TimeSeries {
  std::string series_id;
  std::vector<Channel> channels;
  double step_seconds = 1.0;

  std::size_t num_steps() const noexcept {
    return channels.empty() ? 0 : channels.front().values.size();
  }
  const Channel* find_channel(const std::string& name) const noexcept;
};

enum class EventKind { interval, point };

/// Half-open interval [onset, offset) in steps.
struct IntervalEvent {
  Step onset = 0;
  Step offset = 0;
  std::optional<double> score;

  friend bool operator==(const IntervalEvent&, const IntervalEvent&) = default;
};

struct PointEvent {
  Step step = 0;
  std::optional<double> score;

  friend bool operator==(const PointEvent&, const PointEvent&) = default;
};

/// Ground-truth (or predicted) events of one series. Only the vector that
/// matches `kind` may be non-empty.
struct EventSet {
  std::string series_id;
  EventKind kind = EventKind::interval;
  std::vector<IntervalEvent> intervals;
  std::vector<PointEvent> points;

  std::size_t size() const noexcept {
    return kind == EventKind::interval ? intervals.size() : points.size();
  }
  std::vector<Step> onset_steps() const;
  std::vector<Step> offset_steps() const;
};

struct ScoredStep {
  Step step = 0;
  double score = 0.0;

  friend bool operator==(const ScoredStep&, const ScoredStep&) = default;
};

/// Decoder output: scored onset and offset candidates, each sorted by step.
/// Point-event (change-point) decoders fill only `onsets`.
struct ScoredEvents {
  std::string series_id;
  std::vector<ScoredStep> onsets;
  std::vector<ScoredStep> offsets;
};

// Throws pdfevent::Error naming the first violated invariant
// (EmptySeries, LengthMismatch, DuplicateChannel, InvalidStepSize, NonFiniteValue).
void validate_series(const TimeSeries& series);

// Checks ordering, range and overlap of an event set against a series of
// `num_steps` steps. Interval events need onset < offset < num_steps.
void validate_events(const EventSet& events, std::size_t num_steps);

void validate_scored_events(const ScoredEvents& events, std::size_t num_steps);

/// Per-step in-event labels using the half-open [onset, offset) rule.
/// An offset equal to `num_steps` is accepted here (event runs to the end).
std::vector<std::uint8_t> derive_state_labels(const EventSet& events, std::size_t num_steps);

/// Inverse of derive_state_labels: each maximal run of ones becomes an
/// interval. A run that reaches the final step gets offset = labels.size().
EventSet events_from_labels(const std::vector<std::uint8_t>& labels, std::string series_id = {});

}  // namespace pdfevent
