#include "pdfevent_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace pdfevent::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& message) {
  throw Error(ErrorCode::InvalidConfig, where + ": " + message);
}

void check_keys(const json& node, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!node.is_object()) fail(where, "expected an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : node.items()) {
    if (!keys.contains(key)) fail(where, "unknown key '" + key + "'");
  }
}

template <typename T>
T get(const json& node, const char* key, const std::string& where, T fallback) {
  if (!node.contains(key) || node.at(key).is_null()) return fallback;
  try {
    return node.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(where + "." + key, e.what());
  }
}

std::size_t get_count(const json& node, const char* key, const std::string& where, std::size_t fallback) {
  if (!node.contains(key)) return fallback;
  const auto& v = node.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) fail(where + "." + key, "expected a nonnegative integer");
  return v.get<std::size_t>();
}

std::optional<double> get_optional_real(const json& node, const char* key, const std::string& where,
                                        std::optional<double> fallback) {
  if (!node.contains(key)) return fallback;
  const auto& v = node.at(key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_number()) fail(where + "." + key, "expected a number or null");
  return v.get<double>();
}

data::SynthConfig parse_synth(const json& node) {
  const std::string where = "data.synth";
  check_keys(node, where,
             {"num_series", "length", "mean_event_duration", "mean_gap", "noise_std", "signal_shift", "drift_std",
              "step_seconds"});
  data::SynthConfig c;
  c.num_series = get_count(node, "num_series", where, c.num_series);
  c.length = get_count(node, "length", where, c.length);
  c.mean_event_duration = get_count(node, "mean_event_duration", where, c.mean_event_duration);
  c.mean_gap = get_count(node, "mean_gap", where, c.mean_gap);
  c.noise_std = get<double>(node, "noise_std", where, c.noise_std);
  c.signal_shift = get<double>(node, "signal_shift", where, c.signal_shift);
  c.drift_std = get<double>(node, "drift_std", where, c.drift_std);
  c.step_seconds = get<double>(node, "step_seconds", where, c.step_seconds);
  data::validate(c);
  return c;
}

DataSource parse_data(const json& node, const std::filesystem::path& base_dir) {
  const std::string where = "data";
  check_keys(node, where, {"synth", "series", "events", "step_seconds", "downsample", "categorical", "change_points"});
  DataSource d;
  if (node.contains("synth")) d.synth = parse_synth(node.at("synth"));
  for (const auto& p : get<std::vector<std::string>>(node, "series", where, {})) d.series.push_back(base_dir / p);
  if (node.contains("events")) d.events = base_dir / get<std::string>(node, "events", where, "");
  d.step_seconds = get<double>(node, "step_seconds", where, d.step_seconds);
  d.downsample = get_count(node, "downsample", where, d.downsample);
  d.categorical = get<std::vector<std::string>>(node, "categorical", where, {});
  d.change_points = get<bool>(node, "change_points", where, false);
  if (d.synth.has_value() == !d.series.empty()) fail(where, "give exactly one of 'synth' or 'series'");
  if (!d.series.empty() && !d.events) fail(where, "'series' needs an 'events' file");
  if (d.downsample == 0) fail(where + ".downsample", "must be at least 1");
  if (!(d.step_seconds > 0.0)) fail(where + ".step_seconds", "must be positive");
  return d;
}

targets::PdfSpec parse_pdf(const json& node) {
  const std::string where = "pdf";
  check_keys(node, where, {"kind", "sigma", "thresholds", "day_length", "width"});
  targets::PdfSpec p;
  p.kind = targets::pdf_kind_from_string(get<std::string>(node, "kind", where, "gaussian"));
  p.sigma = get<double>(node, "sigma", where, p.sigma);
  p.thresholds = get<std::vector<Step>>(node, "thresholds", where, {});
  p.width = get_count(node, "width", where, targets::minimum_width(p));
  p.day_length = get_count(node, "day_length", where, 0);
  if (p.day_length == 0) fail(where + ".day_length", "required and positive");
  return p;
}

model::ModelConfig parse_model(const json& node) {
  const std::string where = "model";
  check_keys(node, where, {"hidden", "kernel_size"});
  model::ModelConfig m;
  m.hidden = get<std::vector<std::size_t>>(node, "hidden", where, m.hidden);
  m.kernel_size = get_count(node, "kernel_size", where, m.kernel_size);
  return m;
}

train::TrainConfig parse_train(const json& node) {
  const std::string where = "train";
  check_keys(node, where, {"epochs", "batch_size", "learning_rate", "grad_clip_norm", "sigma_decay"});
  train::TrainConfig t;
  t.epochs = get_count(node, "epochs", where, t.epochs);
  t.batch_size = get_count(node, "batch_size", where, t.batch_size);
  t.learning_rate = get<double>(node, "learning_rate", where, t.learning_rate);
  t.grad_clip_norm = get<double>(node, "grad_clip_norm", where, t.grad_clip_norm);
  if (node.contains("sigma_decay") && !node.at("sigma_decay").is_null()) {
    const auto& s = node.at("sigma_decay");
    check_keys(s, where + ".sigma_decay", {"start", "end"});
    t.sigma_decay = train::SigmaDecay{get<double>(s, "start", where + ".sigma_decay", 1.0),
                                      get<double>(s, "end", where + ".sigma_decay", 1.0)};
  }
  return t;
}

decode::DecodeParams parse_decode(const json& node) {
  const std::string where = "decode";
  check_keys(node, where, {"mu", "sigma", "alpha", "min_height"});
  decode::DecodeParams d;
  d.mu = get<double>(node, "mu", where, d.mu);
  d.sigma = get_optional_real(node, "sigma", where, d.sigma);
  d.alpha = get_count(node, "alpha", where, d.alpha);
  d.min_height = get_optional_real(node, "min_height", where, d.min_height);
  return d;
}

std::vector<std::optional<double>> parse_sigma_list(const json& node, const std::string& where) {
  if (!node.is_array()) fail(where, "expected an array");
  std::vector<std::optional<double>> out;
  for (const auto& v : node) {
    if (v.is_null()) {
      out.emplace_back(std::nullopt);
    } else if (v.is_number()) {
      out.emplace_back(v.get<double>());
    } else {
      fail(where, "entries must be numbers or null");
    }
  }
  return out;
}

double effective_step_seconds(const DataSource& d) {
  const double base = d.synth ? d.synth->step_seconds : d.step_seconds;
  return base * static_cast<double>(d.downsample);
}

}  // namespace

std::vector<Step> tolerances_in_steps(const std::vector<double>& values, const std::string& unit,
                                      double step_seconds) {
  double seconds_per_unit = 0.0;
  if (unit == "steps") {
    seconds_per_unit = step_seconds;
  } else if (unit == "seconds") {
    seconds_per_unit = 1.0;
  } else if (unit == "minutes") {
    seconds_per_unit = 60.0;
  } else {
    fail("metric.tolerance_unit", "expected steps, seconds or minutes");
  }
  std::vector<Step> out;
  for (double v : values) {
    const double steps = std::round(v * seconds_per_unit / step_seconds);
    if (!(steps >= 1.0)) fail("metric.tolerances", "every tolerance must be at least one step");
    out.push_back(static_cast<Step>(steps));
  }
  return out;
}

AppConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  check_keys(doc, "config",
             {"seed", "data", "objective", "pdf", "model", "train", "decoder", "decode", "metric", "folds", "jobs",
              "grid"});
  AppConfig c;
  auto& e = c.experiment;
  if (!doc.contains("data")) fail("config", "missing 'data'");
  c.data = parse_data(doc.at("data"), base_dir);
  e.objective = experiment::objective_from_string(get<std::string>(doc, "objective", "config", "regression"));
  if (e.objective != experiment::Objective::segmentation) {
    if (!doc.contains("pdf")) fail("config", "missing 'pdf'");
    e.pdf = parse_pdf(doc.at("pdf"));
  }
  if (doc.contains("model")) e.model = parse_model(doc.at("model"));
  if (doc.contains("train")) e.train = parse_train(doc.at("train"));
  const std::string default_decoder =
      e.objective == experiment::Objective::segmentation ? "seg_threshold" : "regression";
  e.decoder = decode::decoder_from_string(get<std::string>(doc, "decoder", "config", default_decoder));
  if (doc.contains("decode")) e.decode = parse_decode(doc.at("decode"));

  e.metric.classes = e.objective == experiment::Objective::cpd ? std::vector<std::string>{"point"}
                                                               : std::vector<std::string>{"onset", "offset"};
  if (doc.contains("metric")) {
    const auto& m = doc.at("metric");
    check_keys(m, "metric", {"tolerances", "tolerance_unit", "classes"});
    const auto unit = get<std::string>(m, "tolerance_unit", "metric", "steps");
    const auto values = get<std::vector<double>>(m, "tolerances", "metric", {});
    if (values.empty()) fail("metric.tolerances", "required and nonempty");
    e.metric.tolerances = tolerances_in_steps(values, unit, effective_step_seconds(c.data));
    e.metric.classes = get<std::vector<std::string>>(m, "classes", "metric", e.metric.classes);
  }
  e.folds = get_count(doc, "folds", "config", e.folds);
  e.jobs = get_count(doc, "jobs", "config", e.jobs);
  if (doc.contains("grid")) {
    const auto& g = doc.at("grid");
    check_keys(g, "grid", {"mu", "sigma"});
    if (g.contains("mu")) e.grid.mu = get<std::vector<double>>(g, "mu", "grid", {});
    if (g.contains("sigma")) e.grid.sigma = parse_sigma_list(g.at("sigma"), "grid.sigma");
  }
  apply_seed(c, get<std::uint64_t>(doc, "seed", "config", 0));

  try {
    experiment::validate(e);
  } catch (const Error& err) {
    if (exit_code_for(err.code()) == 2) throw;
    throw Error(ErrorCode::InvalidConfig, err.what());
  }
  return c;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

void apply_seed(AppConfig& config, std::uint64_t seed) {
  config.seed = seed;
  if (config.data.synth) config.data.synth->seed = seed;
  config.experiment.model.seed = seed + 1;
  config.experiment.train.seed = seed + 2;
}

experiment::Dataset load_dataset(const DataSource& source) {
  experiment::Dataset raw;
  if (source.synth) {
    for (auto& item : data::synth_generate(*source.synth)) {
      raw.series.push_back(std::move(item.series));
      raw.events.push_back(std::move(item.events));
    }
  } else {
    const auto truth = data::load_events(*source.events);
    for (const auto& path : source.series) {
      auto series = data::load_series(path, source.step_seconds);
      EventSet events;
      events.series_id = series.series_id;
      for (const auto& t : truth) {
        if (t.series_id == series.series_id) events = t;
      }
      validate_events(events, series.num_steps());
      raw.series.push_back(std::move(series));
      raw.events.push_back(std::move(events));
    }
  }

  experiment::Dataset out;
  for (std::size_t i = 0; i < raw.series.size(); ++i) {
    if (source.downsample > 1) {
      auto ds = data::downsample(raw.series[i], source.downsample, raw.events[i], source.categorical);
      out.series.push_back(std::move(ds.series));
      out.events.push_back(std::move(ds.events));
    } else {
      out.series.push_back(std::move(raw.series[i]));
      out.events.push_back(std::move(raw.events[i]));
    }
    if (source.change_points && out.events.back().kind == EventKind::interval) {
      out.events.back() = data::change_points(out.events.back());
    }
  }
  return out;
}

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidSpec:
    case ErrorCode::InvalidRange:
    case ErrorCode::InvalidFactor:
    case ErrorCode::EmptyGrid:
    case ErrorCode::ZeroKernel:
      return 2;
    case ErrorCode::NonFiniteParameters:
    case ErrorCode::NonFiniteGradient:
    case ErrorCode::DivergedLoss:
      return 4;
    default:
      return 3;
  }
}

}  // namespace pdfevent::cli
