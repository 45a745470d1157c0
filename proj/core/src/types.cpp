#include "pdfevent/types.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "pdfevent/error.hpp"

namespace pdfevent {

const Channel* TimeSeries::find_channel(const std::string& name) const noexcept {
  auto it = std::find_if(channels.begin(), channels.end(),
                         [&](const Channel& c) { return c.name == name; });
  return it == channels.end() ? nullptr : &*it;
}

std::vector<Step> EventSet::onset_steps() const {
  std::vector<Step> out;
  if (kind == EventKind::interval) {
    out.reserve(intervals.size());
    for (const auto& e : intervals) out.push_back(e.onset);
  } else {
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.step);
  }
  return out;
}

std::vector<Step> EventSet::offset_steps() const {
  std::vector<Step> out;
  if (kind == EventKind::interval) {
    out.reserve(intervals.size());
    for (const auto& e : intervals) out.push_back(e.offset);
  }
  return out;
}

void validate_series(const TimeSeries& series) {
  if (series.channels.empty() || series.channels.front().values.empty()) {
    throw Error(ErrorCode::EmptySeries, "series '" + series.series_id + "' has no samples");
  }
  const std::size_t length = series.channels.front().values.size();
  std::unordered_set<std::string> names;
  for (const auto& channel : series.channels) {
    if (channel.values.size() != length) {
      throw Error(ErrorCode::LengthMismatch,
                  "channel '" + channel.name + "' has " + std::to_string(channel.values.size()) +
                      " samples, expected " + std::to_string(length));
    }
    if (!names.insert(channel.name).second) {
      throw Error(ErrorCode::DuplicateChannel, "channel name '" + channel.name + "' repeated");
    }
  }
  if (!(series.step_seconds > 0.0) || !std::isfinite(series.step_seconds)) {
    throw Error(ErrorCode::InvalidStepSize, "step_seconds must be positive");
  }
  for (const auto& channel : series.channels) {
    for (std::size_t t = 0; t < length; ++t) {
      if (!std::isfinite(channel.values[t])) {
        throw Error(ErrorCode::NonFiniteValue,
                    "channel '" + channel.name + "' step " + std::to_string(t));
      }
    }
  }
}

void validate_events(const EventSet& events, std::size_t num_steps) {
  const auto limit = static_cast<Step>(num_steps);
  if (events.kind == EventKind::interval) {
    if (!events.points.empty()) {
      throw Error(ErrorCode::InvalidEvents, "interval event set carries point events");
    }
    Step previous_offset = 0;
    for (std::size_t i = 0; i < events.intervals.size(); ++i) {
      const auto& e = events.intervals[i];
      if (e.onset < 0 || e.offset >= limit) {
        throw Error(ErrorCode::EventOutOfRange,
                    "interval [" + std::to_string(e.onset) + ", " + std::to_string(e.offset) +
                        ") outside [0, " + std::to_string(num_steps) + ")");
      }
      if (e.offset <= e.onset) {
        throw Error(ErrorCode::InvalidEvents,
                    "interval at " + std::to_string(e.onset) + " has non-positive duration");
      }
      if (i > 0 && e.onset < previous_offset) {
        throw Error(ErrorCode::InvalidEvents,
                    "intervals unsorted or overlapping at onset " + std::to_string(e.onset));
      }
      if (e.score && !std::isfinite(*e.score)) {
        throw Error(ErrorCode::NonFiniteValue, "non-finite event score");
      }
      previous_offset = e.offset;
    }
  } else {
    if (!events.intervals.empty()) {
      throw Error(ErrorCode::InvalidEvents, "point event set carries intervals");
    }
    for (std::size_t i = 0; i < events.points.size(); ++i) {
      const auto& p = events.points[i];
      if (p.step < 0 || p.step >= limit) {
        throw Error(ErrorCode::EventOutOfRange, "point " + std::to_string(p.step) + " out of range");
      }
      if (i > 0 && p.step < events.points[i - 1].step) {
        throw Error(ErrorCode::InvalidEvents, "points unsorted at " + std::to_string(p.step));
      }
      if (p.score && !std::isfinite(*p.score)) {
        throw Error(ErrorCode::NonFiniteValue, "non-finite event score");
      }
    }
  }
}

namespace {

void check_scored(const std::vector<ScoredStep>& list, Step limit, const char* what) {
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (!std::isfinite(list[i].score)) {
      throw Error(ErrorCode::NonFiniteValue, std::string(what) + " score not finite");
    }
    if (list[i].step < 0 || list[i].step >= limit) {
      throw Error(ErrorCode::EventOutOfRange, std::string(what) + " step out of range");
    }
    if (i > 0 && list[i].step < list[i - 1].step) {
      throw Error(ErrorCode::InvalidEvents, std::string(what) + " steps unsorted");
    }
  }
}

}  // namespace

void validate_scored_events(const ScoredEvents& events, std::size_t num_steps) {
  check_scored(events.onsets, static_cast<Step>(num_steps), "onset");
  check_scored(events.offsets, static_cast<Step>(num_steps), "offset");
}

std::vector<std::uint8_t> derive_state_labels(const EventSet& events, std::size_t num_steps) {
  if (events.kind != EventKind::interval) {
    throw Error(ErrorCode::InvalidEvents, "state labels need interval events");
  }
  std::vector<std::uint8_t> labels(num_steps, 0);
  const auto limit = static_cast<Step>(num_steps);
  for (const auto& e : events.intervals) {
    if (e.onset < 0 || e.offset > limit || e.onset > e.offset) {
      throw Error(ErrorCode::EventOutOfRange,
                  "interval [" + std::to_string(e.onset) + ", " + std::to_string(e.offset) +
                      ") outside [0, " + std::to_string(num_steps) + "]");
    }
    std::fill(labels.begin() + e.onset, labels.begin() + e.offset, std::uint8_t{1});
  }
  return labels;
}

EventSet events_from_labels(const std::vector<std::uint8_t>& labels, std::string series_id) {
  EventSet out;
  out.series_id = std::move(series_id);
  out.kind = EventKind::interval;
  Step open = -1;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    const bool on = labels[t] != 0;
    if (on && open < 0) {
      open = static_cast<Step>(t);
    } else if (!on && open >= 0) {
      out.intervals.push_back({open, static_cast<Step>(t), std::nullopt});
      open = -1;
    }
  }
  if (open >= 0) out.intervals.push_back({open, static_cast<Step>(labels.size()), std::nullopt});
  return out;
}

}  // namespace pdfevent
