#include "pdfevent/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "pdfevent/error.hpp"

namespace pdfevent::data {

void validate(const SynthConfig& config) {
  if (config.num_series == 0) throw Error(ErrorCode::InvalidConfig, "num_series must be positive");
  if (config.mean_event_duration < 1 || config.mean_gap < 1) {
    throw Error(ErrorCode::InvalidConfig, "mean durations and gaps must be at least 1");
  }
  if (config.length < config.mean_event_duration + config.mean_gap) {
    throw Error(ErrorCode::InvalidConfig, "length must cover one mean event plus one mean gap");
  }
  if (!(config.noise_std >= 0.0) || !(config.drift_std >= 0.0) || !std::isfinite(config.signal_shift)) {
    throw Error(ErrorCode::InvalidConfig, "noise and drift must be non-negative and finite");
  }
  if (!(config.step_seconds > 0.0)) throw Error(ErrorCode::InvalidConfig, "step_seconds must be positive");
}

namespace {

std::size_t draw_duration(std::mt19937_64& rng, std::size_t mean) {
  const std::size_t floor_part = mean / 2;
  const std::size_t tail_mean = mean - floor_part;  // >= 1
  std::geometric_distribution<std::size_t> tail(1.0 / static_cast<double>(tail_mean));
  return floor_part + 1 + tail(rng);
}

std::string series_name(std::size_t index) {
  std::string digits = std::to_string(index);
  if (digits.size() < 3) digits.insert(0, 3 - digits.size(), '0');
  return "series_" + digits;
}

}  // namespace

std::vector<LabeledSeries> synth_generate(const SynthConfig& config) {
  validate(config);
  std::vector<LabeledSeries> out;
  out.reserve(config.num_series);
  for (std::size_t s = 0; s < config.num_series; ++s) {
    std::seed_seq seq{static_cast<std::uint64_t>(config.seed), static_cast<std::uint64_t>(s)};
    std::mt19937_64 rng(seq);

    std::vector<std::uint8_t> state(config.length, 0);
    std::size_t t = 0;
    bool in_event = false;
    while (t < config.length) {
      const std::size_t run = draw_duration(rng, in_event ? config.mean_event_duration : config.mean_gap);
      const std::size_t end = std::min(config.length, t + run);
      if (in_event && end < config.length) std::fill(state.begin() + t, state.begin() + end, std::uint8_t{1});
      t = end;
      in_event = !in_event;
    }

    std::normal_distribution<double> unit(0.0, 1.0);
    Channel signal{"signal", std::vector<double>(config.length)};
    Channel activity{"activity", std::vector<double>(config.length)};
    double drift = 0.0;
    for (std::size_t i = 0; i < config.length; ++i) {
      const double on = state[i];
      const double noise = unit(rng);
      const double step = unit(rng);
      const double spread = unit(rng);
      drift += config.drift_std * step;
      signal.values[i] = on * config.signal_shift + config.noise_std * noise + drift;
      activity.values[i] = config.noise_std * (1.0 + on) * spread;
    }

    LabeledSeries item;
    item.series.series_id = series_name(s);
    item.series.step_seconds = config.step_seconds;
    item.series.channels = {std::move(signal), std::move(activity)};
    item.events = events_from_labels(state, item.series.series_id);
    out.push_back(std::move(item));
  }
  return out;
}

EventSet change_points(const EventSet& intervals) {
  EventSet out;
  out.series_id = intervals.series_id;
  out.kind = EventKind::point;
  for (const auto& e : intervals.intervals) {
    out.points.push_back({e.onset, std::nullopt});
    out.points.push_back({e.offset, std::nullopt});
  }
  return out;
}

LabeledSeries downsample(const TimeSeries& series, std::size_t factor, const EventSet& events,
                         std::span<const std::string> categorical) {
  if (factor < 1) throw Error(ErrorCode::InvalidFactor, "downsampling factor must be at least 1");
  validate_series(series);
  const std::size_t length = series.num_steps();
  if (length < factor) throw Error(ErrorCode::InvalidFactor, "series shorter than one window");
  const std::size_t out_length = length / factor;

  LabeledSeries out;
  out.series.series_id = series.series_id;
  out.series.step_seconds = series.step_seconds * static_cast<double>(factor);
  for (const auto& channel : series.channels) {
    const bool is_categorical = std::find(categorical.begin(), categorical.end(), channel.name) != categorical.end();
    if (is_categorical) {
      Channel last{channel.name, std::vector<double>(out_length)};
      for (std::size_t w = 0; w < out_length; ++w) last.values[w] = channel.values[w * factor + factor - 1];
      out.series.channels.push_back(std::move(last));
      continue;
    }
    Channel mean{channel.name + "_mean", std::vector<double>(out_length)};
    Channel sd{channel.name + "_std", std::vector<double>(out_length)};
    Channel hi{channel.name + "_max", std::vector<double>(out_length)};
    Channel lo{channel.name + "_min", std::vector<double>(out_length)};
    for (std::size_t w = 0; w < out_length; ++w) {
      const auto first = channel.values.begin() + static_cast<std::ptrdiff_t>(w * factor);
      const auto last = first + static_cast<std::ptrdiff_t>(factor);
      double sum = 0.0;
      for (auto it = first; it != last; ++it) sum += *it;
      const double m = sum / static_cast<double>(factor);
      double squares = 0.0;
      for (auto it = first; it != last; ++it) squares += (*it - m) * (*it - m);
      mean.values[w] = m;
      sd.values[w] = std::sqrt(squares / static_cast<double>(factor));
      hi.values[w] = *std::max_element(first, last);
      lo.values[w] = *std::min_element(first, last);
    }
    out.series.channels.push_back(std::move(mean));
    out.series.channels.push_back(std::move(sd));
    out.series.channels.push_back(std::move(hi));
    out.series.channels.push_back(std::move(lo));
  }

  const auto d = static_cast<Step>(factor);
  const auto limit = static_cast<Step>(out_length);
  out.events.series_id = events.series_id;
  out.events.kind = events.kind;
  for (const auto& e : events.intervals) {
    const Step onset = e.onset / d;
    const Step offset = e.offset / d;
    if (offset >= limit || onset >= offset) continue;
    out.events.intervals.push_back({onset, offset, e.score});
  }
  for (const auto& p : events.points) {
    const Step step = p.step / d;
    if (step >= limit) continue;
    if (!out.events.points.empty() && out.events.points.back().step == step) continue;
    out.events.points.push_back({step, p.score});
  }
  return out;
}

TimeSeries standardize(const TimeSeries& series) {
  TimeSeries out = series;
  for (auto& channel : out.channels) {
    if (channel.values.empty()) continue;
    double sum = 0.0;
    for (double v : channel.values) sum += v;
    const double mean = sum / static_cast<double>(channel.values.size());
    double squares = 0.0;
    for (double v : channel.values) squares += (v - mean) * (v - mean);
    const double sd = std::max(1e-8, std::sqrt(squares / static_cast<double>(channel.values.size())));
    for (auto& v : channel.values) v = (v - mean) / sd;
  }
  return out;
}

// ---- CSV -------------------------------------------------------------------

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  return out;
}

bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

double parse_double(const std::string& field, std::size_t line, std::size_t column) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto result = std::from_chars(begin, end, value);
  if (field.empty() || result.ec != std::errc{} || result.ptr != end) {
    throw ParseError(line, column, "expected a number, found '" + field + "'");
  }
  return value;
}

Step parse_step(const std::string& field, std::size_t line, std::size_t column) {
  Step value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto result = std::from_chars(begin, end, value);
  if (field.empty() || result.ec != std::errc{} || result.ptr != end) {
    throw ParseError(line, column, "expected an integer step, found '" + field + "'");
  }
  return value;
}

void expect_header(const std::vector<std::string>& got, const std::vector<std::string>& want) {
  for (std::size_t i = 0; i < want.size(); ++i) {
    if (i >= got.size() || got[i] != want[i]) {
      throw ParseError(1, i + 1, "expected column '" + want[i] + "'");
    }
  }
  if (got.size() != want.size()) throw ParseError(1, want.size() + 1, "unexpected extra column");
}

struct EventRow {
  std::string series_id;
  std::string event;
  Step step;
  std::optional<double> score;
};

std::vector<EventRow> read_event_rows(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!read_line(in, line)) throw ParseError(1, 1, "missing header");
  expect_header(split_fields(line), {"series_id", "event", "step", "score"});
  std::vector<EventRow> rows;
  std::size_t line_number = 1;
  while (read_line(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 4) throw ParseError(line_number, std::min<std::size_t>(fields.size(), 4) + 1, "expected 4 fields");
    if (fields[1] != "onset" && fields[1] != "offset" && fields[1] != "point") {
      throw ParseError(line_number, 2, "unknown event label '" + fields[1] + "'");
    }
    EventRow row{fields[0], fields[1], parse_step(fields[2], line_number, 3), std::nullopt};
    if (!fields[3].empty()) row.score = parse_double(fields[3], line_number, 4);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

TimeSeries load_series(const std::filesystem::path& path, double step_seconds) {
  auto in = open_input(path);
  std::string line;
  if (!read_line(in, line)) throw ParseError(1, 1, "missing header");
  const auto header = split_fields(line);
  if (header.empty() || header[0] != "step") throw ParseError(1, 1, "first column must be 'step'");
  if (header.size() < 2) throw ParseError(1, 2, "no channel columns");

  TimeSeries series;
  series.series_id = path.stem().string();
  series.step_seconds = step_seconds;
  for (std::size_t c = 1; c < header.size(); ++c) series.channels.push_back({header[c], {}});

  std::size_t line_number = 1;
  Step expected_step = 0;
  while (read_line(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw ParseError(line_number, std::min(fields.size(), header.size()) + 1,
                       "expected " + std::to_string(header.size()) + " fields");
    }
    if (parse_step(fields[0], line_number, 1) != expected_step) {
      throw ParseError(line_number, 1, "steps must run 0, 1, 2, ...");
    }
    ++expected_step;
    for (std::size_t c = 1; c < fields.size(); ++c) {
      series.channels[c - 1].values.push_back(parse_double(fields[c], line_number, c + 1));
    }
  }
  validate_series(series);
  return series;
}

void save_series(const std::filesystem::path& path, const TimeSeries& series) {
  validate_series(series);
  auto out = open_output(path);
  out << "step";
  for (const auto& c : series.channels) out << ',' << c.name;
  out << '\n';
  for (std::size_t t = 0; t < series.num_steps(); ++t) {
    out << t;
    for (const auto& c : series.channels) out << ',' << format_double(c.values[t]);
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

std::vector<EventSet> load_events(const std::filesystem::path& path) {
  const auto rows = read_event_rows(path);
  std::vector<std::string> order;
  std::map<std::string, std::vector<const EventRow*>> grouped;
  for (const auto& row : rows) {
    if (!grouped.contains(row.series_id)) order.push_back(row.series_id);
    grouped[row.series_id].push_back(&row);
  }
  std::vector<EventSet> out;
  for (const auto& id : order) {
    EventSet set;
    set.series_id = id;
    std::vector<const EventRow*> onsets;
    std::vector<const EventRow*> offsets;
    for (const auto* row : grouped[id]) {
      if (row->event == "point") {
        set.points.push_back({row->step, row->score});
      } else {
        (row->event == "onset" ? onsets : offsets).push_back(row);
      }
    }
    if (!set.points.empty() && (!onsets.empty() || !offsets.empty())) {
      throw Error(ErrorCode::InvalidEvents, "series '" + id + "' mixes point and interval events");
    }
    if (!set.points.empty()) {
      set.kind = EventKind::point;
      std::stable_sort(set.points.begin(), set.points.end(),
                       [](const PointEvent& a, const PointEvent& b) { return a.step < b.step; });
    } else {
      if (onsets.size() != offsets.size()) {
        throw Error(ErrorCode::InvalidEvents, "series '" + id + "' has unpaired onsets/offsets");
      }
      auto by_step = [](const EventRow* a, const EventRow* b) { return a->step < b->step; };
      std::stable_sort(onsets.begin(), onsets.end(), by_step);
      std::stable_sort(offsets.begin(), offsets.end(), by_step);
      for (std::size_t i = 0; i < onsets.size(); ++i) {
        set.intervals.push_back({onsets[i]->step, offsets[i]->step, onsets[i]->score});
      }
    }
    out.push_back(std::move(set));
  }
  return out;
}

void save_event_sets(const std::filesystem::path& path, std::span<const EventSet> events) {
  auto out = open_output(path);
  out << "series_id,event,step,score\n";
  auto score_text = [](const std::optional<double>& s) { return s ? format_double(*s) : std::string(); };
  for (const auto& set : events) {
    for (const auto& e : set.intervals) {
      out << set.series_id << ",onset," << e.onset << ',' << score_text(e.score) << '\n';
      out << set.series_id << ",offset," << e.offset << ',' << score_text(e.score) << '\n';
    }
    for (const auto& p : set.points) out << set.series_id << ",point," << p.step << ',' << score_text(p.score) << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

std::vector<ScoredEvents> load_scored_events(const std::filesystem::path& path) {
  const auto rows = read_event_rows(path);
  std::vector<ScoredEvents> out;
  std::map<std::string, std::size_t> index;
  for (const auto& row : rows) {
    auto [it, inserted] = index.try_emplace(row.series_id, out.size());
    if (inserted) out.push_back({row.series_id, {}, {}});
    auto& target = row.event == "offset" ? out[it->second].offsets : out[it->second].onsets;
    target.push_back({row.step, row.score.value_or(1.0)});
  }
  for (auto& s : out) {
    auto by_step = [](const ScoredStep& a, const ScoredStep& b) { return a.step < b.step; };
    std::stable_sort(s.onsets.begin(), s.onsets.end(), by_step);
    std::stable_sort(s.offsets.begin(), s.offsets.end(), by_step);
  }
  return out;
}

void save_events(const std::filesystem::path& path, std::span<const ScoredEvents> events, bool as_points) {
  auto out = open_output(path);
  out << "series_id,event,step,score\n";
  for (const auto& s : events) {
    for (const auto& e : s.onsets) {
      out << s.series_id << ',' << (as_points ? "point" : "onset") << ',' << e.step << ',' << format_double(e.score)
          << '\n';
    }
    for (const auto& e : s.offsets) out << s.series_id << ",offset," << e.step << ',' << format_double(e.score) << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

}  // namespace pdfevent::data
