#include "pdfevent_cli/app.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "pdfevent/checkpoint.hpp"
#include "pdfevent/data.hpp"
#include "pdfevent/error.hpp"
#include "pdfevent/experiment.hpp"
#include "pdfevent/metric.hpp"
#include "pdfevent_cli/config.hpp"

namespace pdfevent::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kOutDirEnv = "PDFEVENT_OUT_DIR";
constexpr const char* kDefaultOutDir = "pdfevent-out";

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::string out_dir;
  std::string checkpoint_path;
  std::string predictions_path;
  std::string truth_path;
  std::optional<Step> prf_tolerance;
  bool no_validation = false;
};

fs::path output_dir(const Options& opts) {
  fs::path dir = opts.out_dir;
  if (dir.empty()) {
    const char* env = std::getenv(kOutDirEnv);
    dir = env != nullptr && *env != '\0' ? fs::path(env) : fs::path(kDefaultOutDir);
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create '" + dir.string() + "': " + ec.message());
  return dir;
}

std::ofstream open_file(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  return out;
}

AppConfig resolve_config(const Options& opts) {
  if (opts.config_path.empty()) throw Error(ErrorCode::InvalidConfig, "--config is required");
  AppConfig config = load_config(opts.config_path);
  if (opts.seed) apply_seed(config, *opts.seed);
  if (opts.jobs) {
    if (*opts.jobs == 0) throw Error(ErrorCode::InvalidConfig, "--jobs must be at least 1");
    config.experiment.jobs = *opts.jobs;
  }
  return config;
}

bool point_output(const experiment::ExperimentConfig& config) {
  return config.objective == experiment::Objective::cpd;
}

model::ModelConfig model_config_for(const experiment::ExperimentConfig& config, const experiment::Dataset& dataset) {
  model::ModelConfig m = config.model;
  m.in_channels = dataset.series.front().channels.size();
  m.out_mode = experiment::out_mode_for(config.objective);
  return m;
}

void write_report(const fs::path& path, const metric::EdapReport& report, std::ostream& out) {
  auto file = open_file(path);
  file << "class,tolerance,ap\n";
  for (const auto& cell : report.cells) {
    file << cell.event_class << ',' << cell.tolerance << ',' << (cell.ap ? data::format_double(*cell.ap) : "") << '\n';
  }
  file << "mean,," << data::format_double(report.score) << '\n';
  out << "edap " << data::format_double(report.score) << '\n';
}

void write_trace(std::ostream& file, const std::vector<train::EpochRecord>& trace, const std::string& prefix) {
  for (const auto& r : trace) {
    file << prefix << r.epoch << ',' << data::format_double(r.loss) << ','
         << (r.validation_score ? data::format_double(*r.validation_score) : "") << '\n';
  }
}

TimeSeries prediction_as_series(const experiment::Prediction& p, experiment::Objective objective) {
  TimeSeries s;
  s.series_id = p.series_id;
  std::vector<std::string> names;
  switch (objective) {
    case experiment::Objective::regression: names = {"onset", "offset"}; break;
    case experiment::Objective::segmentation: names = {"in_event"}; break;
    case experiment::Objective::cpd: names = {"point"}; break;
  }
  for (std::size_t c = 0; c < p.channels.size(); ++c) {
    s.channels.push_back({c < names.size() ? names[c] : "y" + std::to_string(c), p.channels[c]});
  }
  return s;
}

void save_predictions(const fs::path& dir, const std::vector<experiment::Prediction>& predictions,
                      experiment::Objective objective) {
  fs::create_directories(dir);
  for (const auto& p : predictions) data::save_series(dir / (p.series_id + ".csv"), prediction_as_series(p, objective));
}

std::vector<experiment::Prediction> load_predictions(const fs::path& dir, const experiment::Dataset& dataset) {
  std::vector<experiment::Prediction> out;
  for (const auto& s : dataset.series) {
    const auto loaded = data::load_series(dir / (s.series_id + ".csv"));
    if (loaded.num_steps() != s.num_steps()) {
      throw Error(ErrorCode::LengthMismatch, "prediction for '" + s.series_id + "' has the wrong length");
    }
    experiment::Prediction p;
    p.series_id = s.series_id;
    for (const auto& c : loaded.channels) p.channels.push_back(c.values);
    out.push_back(std::move(p));
  }
  return out;
}

// Scored predictions aligned with `truth` by series id.
std::vector<ScoredEvents> align(const std::vector<ScoredEvents>& predictions, const std::vector<EventSet>& truth) {
  std::map<std::string, const ScoredEvents*> by_id;
  for (const auto& p : predictions) by_id[p.series_id] = &p;
  std::vector<ScoredEvents> out;
  for (const auto& t : truth) {
    const auto it = by_id.find(t.series_id);
    out.push_back(it != by_id.end() ? *it->second : ScoredEvents{t.series_id, {}, {}});
  }
  return out;
}

int cmd_synth(const Options& opts, std::ostream& out) {
  const auto config = resolve_config(opts);
  const auto dataset = load_dataset(config.data);
  const auto dir = output_dir(opts);
  fs::create_directories(dir / "series");
  for (const auto& s : dataset.series) data::save_series(dir / "series" / (s.series_id + ".csv"), s);
  data::save_event_sets(dir / "events.csv", dataset.events);
  std::size_t count = 0;
  for (const auto& e : dataset.events) count += e.size();
  out << "series " << dataset.series.size() << " events " << count << '\n';
  return 0;
}

int cmd_encode(const Options& opts, std::ostream& out) {
  const auto config = resolve_config(opts);
  const auto dataset = load_dataset(config.data);
  const auto dir = output_dir(opts) / "targets";
  fs::create_directories(dir);
  for (std::size_t i = 0; i < dataset.series.size(); ++i) {
    const auto target = experiment::to_target(dataset.events[i], dataset.series[i].num_steps(),
                                              config.experiment.objective, config.experiment.pdf);
    experiment::Prediction p;
    p.series_id = dataset.series[i].series_id;
    for (Eigen::Index c = 0; c < target.rows(); ++c) {
      p.channels.emplace_back(target.row(c).begin(), target.row(c).end());
    }
    data::save_series(dir / (p.series_id + ".csv"), prediction_as_series(p, config.experiment.objective));
  }
  if (config.experiment.objective != experiment::Objective::segmentation) {
    const auto kernel = targets::make_kernel(config.experiment.pdf);
    out << "gamma " << data::format_double(targets::kernel_gamma(kernel, config.experiment.pdf.day_length)) << '\n';
  }
  out << "encoded " << dataset.series.size() << '\n';
  return 0;
}

int cmd_train(const Options& opts, std::ostream& out) {
  const auto config = resolve_config(opts);
  const auto dataset = load_dataset(config.data);
  if (dataset.series.empty()) throw Error(ErrorCode::TooFewSeries, "dataset is empty");
  experiment::Dataset train_set;
  experiment::Dataset validation_set;
  if (opts.no_validation) {
    train_set = dataset;
  } else {
    const auto folds = experiment::partition_folds(dataset.series.size(), config.experiment.folds);
    for (std::size_t k = 0; k < folds.size(); ++k) {
      auto& target = k + 1 == folds.size() ? validation_set : train_set;
      for (auto i : folds[k]) {
        target.series.push_back(dataset.series[i]);
        target.events.push_back(dataset.events[i]);
      }
    }
  }
  const auto result = experiment::fit(train_set, validation_set, config.experiment);
  const auto dir = output_dir(opts);
  checkpoint::save(dir / "model.ckpt", {model_config_for(config.experiment, dataset), result.params});
  auto trace = open_file(dir / "trace.csv");
  trace << "epoch,loss,val_edap\n";
  write_trace(trace, result.trace, "");
  out << "best_epoch " << result.best_epoch << '\n';
  return 0;
}

int cmd_decode(const Options& opts, std::ostream& out) {
  const auto config = resolve_config(opts);
  if (opts.checkpoint_path.empty()) throw Error(ErrorCode::InvalidConfig, "--checkpoint is required");
  const auto dataset = load_dataset(config.data);
  const auto ckpt = checkpoint::load(opts.checkpoint_path);
  const auto predictions = experiment::predict(ckpt.params, ckpt.config, dataset.series);
  const auto decoded = experiment::decode_all(predictions, config.experiment.decoder, config.experiment.decode);
  const auto dir = output_dir(opts);
  save_predictions(dir / "predictions", predictions, config.experiment.objective);
  data::save_events(dir / "events.csv", decoded, point_output(config.experiment));
  std::size_t count = 0;
  for (const auto& d : decoded) count += d.onsets.size() + d.offsets.size();
  out << "decoded " << count << '\n';
  return 0;
}

int cmd_eval(const Options& opts, std::ostream& out) {
  const auto config = resolve_config(opts);
  if (opts.predictions_path.empty()) throw Error(ErrorCode::InvalidConfig, "--predictions is required");
  std::vector<EventSet> truth = opts.truth_path.empty() ? load_dataset(config.data).events
                                                        : data::load_events(opts.truth_path);
  const auto predictions = align(data::load_scored_events(opts.predictions_path), truth);
  const auto report = metric::edap_report(predictions, truth, config.experiment.metric);
  write_report(output_dir(opts) / "report.csv", report, out);
  if (opts.prf_tolerance) {
    std::vector<std::vector<ScoredStep>> preds;
    std::vector<std::vector<Step>> steps;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      preds.push_back(predictions[i].onsets);
      steps.push_back(truth[i].onset_steps());
    }
    const auto prf = metric::prf_pooled(preds, steps, *opts.prf_tolerance);
    out << "precision " << data::format_double(prf.precision) << " recall " << data::format_double(prf.recall)
        << " f1 " << data::format_double(prf.f1) << '\n';
  }
  return 0;
}

void write_cv_outputs(const fs::path& dir, const experiment::CvResult& cv, const AppConfig& config) {
  auto folds = open_file(dir / "folds.csv");
  folds << "fold,held_out,best_epoch,edap\n";
  auto trace = open_file(dir / "trace.csv");
  trace << "fold,epoch,loss,val_edap\n";
  for (const auto& f : cv.folds) {
    folds << f.fold << ',' << f.held_out.size() << ',' << f.best_epoch << ',' << data::format_double(f.edap) << '\n';
    write_trace(trace, f.trace, std::to_string(f.fold) + ",");
  }
  save_predictions(dir / "predictions", cv.predictions, config.experiment.objective);
  data::save_events(dir / "events.csv", cv.decoded, point_output(config.experiment));
}

int cmd_cv(const Options& opts, std::ostream& out) {
  const auto config = resolve_config(opts);
  const auto dataset = load_dataset(config.data);
  const auto cv = experiment::run_cv(dataset, config.experiment);
  const auto dir = output_dir(opts);
  write_cv_outputs(dir, cv, config);
  write_report(dir / "report.csv", metric::edap_report(cv.decoded, dataset.events, config.experiment.metric), out);
  return 0;
}

int cmd_grid(const Options& opts, std::ostream& out) {
  const auto config = resolve_config(opts);
  const auto& e = config.experiment;
  const auto dataset = load_dataset(config.data);
  const auto dir = output_dir(opts);
  std::vector<experiment::Prediction> predictions;
  if (opts.predictions_path.empty()) {
    const auto cv = experiment::run_cv(dataset, e);
    write_cv_outputs(dir, cv, config);
    predictions = cv.predictions;
  } else {
    predictions = load_predictions(opts.predictions_path, dataset);
  }
  const auto grid = experiment::grid_search(predictions, dataset.events, e.grid, e.decoder, e.decode, e.metric);
  auto table = open_file(dir / "grid.csv");
  table << "mu,sigma,edap\n";
  for (const auto& cell : grid.table) {
    table << data::format_double(cell.mu) << ',' << (cell.sigma ? data::format_double(*cell.sigma) : "none") << ','
          << data::format_double(cell.score) << '\n';
  }
  const double untuned = experiment::score_predictions(predictions, dataset.events, e.decoder, e.decode, e.metric);
  decode::DecodeParams best = e.decode;
  best.mu = grid.best.mu;
  best.sigma = grid.best.sigma;
  const auto decoded = experiment::decode_all(predictions, e.decoder, best);
  out << "default " << data::format_double(untuned) << '\n';
  out << "best mu " << data::format_double(grid.best.mu) << " sigma "
      << (grid.best.sigma ? data::format_double(*grid.best.sigma) : "none") << '\n';
  write_report(dir / "report.csv", metric::edap_report(decoded, dataset.events, e.metric), out);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Event detection by probability-density regression", "pdfevent"};
  app.require_subcommand(1);
  Options opts;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "Experiment config (JSON)")->required();
    sub->add_option("--seed", opts.seed, "Override the master seed");
    sub->add_option("--jobs", opts.jobs, "Maximum parallel folds");
    sub->add_option("--out", opts.out_dir, std::string("Output directory (default $") + kOutDirEnv + " or " +
                                               kDefaultOutDir + ")");
  };
  auto* synth = app.add_subcommand("synth", "Write the configured dataset as CSV files");
  auto* encode = app.add_subcommand("encode", "Render training targets");
  auto* train = app.add_subcommand("train", "Train a model and write a checkpoint");
  auto* decode = app.add_subcommand("decode", "Predict and decode events with a checkpoint");
  auto* eval = app.add_subcommand("eval", "Score decoded events against ground truth");
  auto* cv = app.add_subcommand("cv", "k-fold cross-validation with pooled scoring");
  auto* grid = app.add_subcommand("grid", "Grid search over decoding parameters");
  for (auto* sub : {synth, encode, train, decode, eval, cv, grid}) add_common(sub);
  train->add_flag("--no-validation", opts.no_validation, "Train on every series and keep the last epoch");
  decode->add_option("--checkpoint", opts.checkpoint_path, "Checkpoint written by 'train'")->required();
  eval->add_option("--predictions", opts.predictions_path, "Events CSV with scores")->required();
  eval->add_option("--truth", opts.truth_path, "Ground-truth events CSV (default: the configured dataset)");
  eval->add_option("--prf-tolerance", opts.prf_tolerance, "Also report precision/recall/F1 at this tolerance");
  grid->add_option("--predictions", opts.predictions_path, "Directory of raw predictions from 'cv'");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return 2;
  }

  try {
    if (*synth) return cmd_synth(opts, out);
    if (*encode) return cmd_encode(opts, out);
    if (*train) return cmd_train(opts, out);
    if (*decode) return cmd_decode(opts, out);
    if (*eval) return cmd_eval(opts, out);
    if (*cv) return cmd_cv(opts, out);
    if (*grid) return cmd_grid(opts, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}

}  // namespace pdfevent::cli
