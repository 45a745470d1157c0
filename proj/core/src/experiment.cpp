#include "pdfevent/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "pdfevent/data.hpp"
#include "pdfevent/error.hpp"

namespace pdfevent::experiment {

std::string_view to_string(Objective objective) noexcept {
  switch (objective) {
    case Objective::regression: return "regression";
    case Objective::segmentation: return "segmentation";
    case Objective::cpd: return "cpd";
  }
  return "unknown";
}

Objective objective_from_string(std::string_view name) {
  if (name == "regression") return Objective::regression;
  if (name == "segmentation") return Objective::segmentation;
  if (name == "cpd") return Objective::cpd;
  throw Error(ErrorCode::InvalidConfig, "unknown objective '" + std::string(name) + "'");
}

model::OutMode out_mode_for(Objective objective) noexcept {
  switch (objective) {
    case Objective::regression: return model::OutMode::regression_2ch;
    case Objective::segmentation: return model::OutMode::segmentation_2class;
    case Objective::cpd: return model::OutMode::regression_1ch;
  }
  return model::OutMode::regression_2ch;
}

Grid default_grid() {
  Grid grid;
  for (int i = 0; i <= 10; ++i) grid.mu.push_back(static_cast<double>(i) / 10.0);
  grid.sigma = {std::nullopt, 1.0, 10.0, 100.0, 1000.0};
  return grid;
}

void validate(const ExperimentConfig& config) {
  if (config.objective != Objective::segmentation) targets::validate(config.pdf);
  train::validate(config.train);
  decode::validate(config.decode);
  metric::validate(config.metric);
  if (config.folds < 2) throw Error(ErrorCode::InvalidConfig, "cross-validation needs at least 2 folds");
  if (config.jobs < 1) throw Error(ErrorCode::InvalidConfig, "jobs must be at least 1");
  const bool segmentation_decoder = config.decoder != decode::Decoder::regression;
  if (segmentation_decoder != (config.objective == Objective::segmentation)) {
    throw Error(ErrorCode::InvalidConfig, "decoder '" + std::string(decode::to_string(config.decoder)) +
                                              "' does not fit objective '" + std::string(to_string(config.objective)) +
                                              "'");
  }
}

Matrix to_input(const TimeSeries& series) {
  validate_series(series);
  const TimeSeries z = data::standardize(series);
  Matrix x(static_cast<Eigen::Index>(z.channels.size()), static_cast<Eigen::Index>(z.num_steps()));
  for (std::size_t c = 0; c < z.channels.size(); ++c) {
    for (std::size_t t = 0; t < z.num_steps(); ++t) {
      x(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(t)) = z.channels[c].values[t];
    }
  }
  return x;
}

Matrix to_target(const EventSet& events, std::size_t num_steps, Objective objective, const targets::PdfSpec& pdf) {
  targets::TargetSeries target;
  switch (objective) {
    case Objective::regression: target = targets::encode_regression(events, num_steps, pdf); break;
    case Objective::segmentation: target = targets::encode_segmentation(events, num_steps); break;
    case Objective::cpd: target = targets::encode_cpd(events, num_steps, pdf); break;
  }
  Matrix m(static_cast<Eigen::Index>(target.channels.size()), static_cast<Eigen::Index>(num_steps));
  for (std::size_t c = 0; c < target.channels.size(); ++c) {
    for (std::size_t t = 0; t < num_steps; ++t) {
      m(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(t)) = target.channels[c][t];
    }
  }
  return m;
}

std::vector<Prediction> predict(const model::Parameters& params, const model::ModelConfig& config,
                                const std::vector<TimeSeries>& series) {
  std::vector<Prediction> out;
  out.reserve(series.size());
  for (const auto& s : series) {
    const auto outputs = model::forward(params, {to_input(s)}, config);
    const Matrix& y = outputs.front();
    Prediction p;
    p.series_id = s.series_id;
    if (config.out_mode == model::OutMode::segmentation_2class) {
      p.channels.emplace_back(static_cast<std::size_t>(y.cols()));
      for (Eigen::Index t = 0; t < y.cols(); ++t) {
        p.channels[0][static_cast<std::size_t>(t)] = std::clamp(y(1, t), 0.0, 1.0);
      }
    } else {
      for (Eigen::Index c = 0; c < y.rows(); ++c) {
        p.channels.emplace_back(static_cast<std::size_t>(y.cols()));
        for (Eigen::Index t = 0; t < y.cols(); ++t) p.channels.back()[static_cast<std::size_t>(t)] = y(c, t);
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

ScoredEvents decode_prediction(const Prediction& prediction, decode::Decoder decoder,
                               const decode::DecodeParams& params) {
  if (prediction.channels.empty()) throw Error(ErrorCode::ShapeMismatch, "prediction has no channels");
  ScoredEvents out;
  switch (decoder) {
    case decode::Decoder::regression:
      if (prediction.channels.size() >= 2) {
        out = decode::decode_regression(prediction.channels[0], prediction.channels[1], params);
      } else {
        out.onsets = decode::decode_regression_channel(prediction.channels[0], params);
      }
      break;
    case decode::Decoder::seg_threshold: out = decode::decode_seg_threshold(prediction.channels[0], params); break;
    case decode::Decoder::seg_peaks: out = decode::decode_seg_peaks(prediction.channels[0], params); break;
  }
  out.series_id = prediction.series_id;
  return out;
}

std::vector<ScoredEvents> decode_all(const std::vector<Prediction>& predictions, decode::Decoder decoder,
                                     const decode::DecodeParams& params) {
  std::vector<ScoredEvents> out;
  out.reserve(predictions.size());
  for (const auto& p : predictions) out.push_back(decode_prediction(p, decoder, params));
  return out;
}

double score_predictions(const std::vector<Prediction>& predictions, const std::vector<EventSet>& truth,
                         decode::Decoder decoder, const decode::DecodeParams& params,
                         const metric::EdapConfig& metric) {
  const auto decoded = decode_all(predictions, decoder, params);
  try {
    return metric::edap(decoded, truth, metric);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::EmptyTruth) return 0.0;
    throw;
  }
}

std::vector<std::vector<std::size_t>> partition_folds(std::size_t num_series, std::size_t folds) {
  if (folds < 2) throw Error(ErrorCode::InvalidConfig, "need at least 2 folds");
  if (num_series < folds) {
    throw Error(ErrorCode::TooFewSeries,
                std::to_string(num_series) + " series cannot fill " + std::to_string(folds) + " folds");
  }
  std::vector<std::vector<std::size_t>> out(folds);
  for (std::size_t i = 0; i < num_series; ++i) out[i % folds].push_back(i);
  return out;
}

namespace {

Dataset subset(const Dataset& dataset, const std::vector<std::size_t>& indices) {
  Dataset out;
  for (auto i : indices) {
    out.series.push_back(dataset.series[i]);
    out.events.push_back(dataset.events[i]);
  }
  return out;
}

targets::PdfSpec pdf_for_epoch(const ExperimentConfig& config, std::size_t epoch) {
  targets::PdfSpec pdf = config.pdf;
  if (!config.train.sigma_decay || pdf.kind != targets::PdfKind::gaussian) return pdf;
  const std::size_t last = std::max<std::size_t>(1, config.train.epochs - 1);
  pdf.sigma = targets::sigma_schedule(std::min(epoch, last), last, config.train.sigma_decay->sigma_start,
                                      config.train.sigma_decay->sigma_end);
  pdf.width = std::max(pdf.width, targets::minimum_width(pdf));
  pdf.day_length = std::max(pdf.day_length, pdf.width);
  return pdf;
}

}  // namespace

train::TrainResult fit(const Dataset& train_set, const Dataset& validation_set, const ExperimentConfig& config) {
  if (train_set.series.empty()) throw Error(ErrorCode::TooFewSeries, "empty training set");
  std::vector<Matrix> inputs;
  inputs.reserve(train_set.series.size());
  for (const auto& s : train_set.series) inputs.push_back(to_input(s));

  model::ModelConfig model_config = config.model;
  model_config.in_channels = static_cast<std::size_t>(inputs.front().rows());
  model_config.out_mode = out_mode_for(config.objective);

  std::vector<Matrix> fixed_targets;
  auto build_targets = [&](std::size_t epoch) {
    std::vector<Matrix> out;
    const auto pdf = pdf_for_epoch(config, epoch);
    for (std::size_t i = 0; i < train_set.series.size(); ++i) {
      out.push_back(to_target(train_set.events[i], train_set.series[i].num_steps(), config.objective, pdf));
    }
    return out;
  };
  const bool adaptive = config.train.sigma_decay.has_value() && config.objective != Objective::segmentation;
  if (!adaptive) fixed_targets = build_targets(0);
  const train::TargetProvider provider = [&](std::size_t epoch) {
    return adaptive ? build_targets(epoch) : fixed_targets;
  };

  train::Validator validator;
  if (!validation_set.series.empty()) {
    validator = [&](const model::Parameters& params) {
      const auto predictions = predict(params, model_config, validation_set.series);
      return score_predictions(predictions, validation_set.events, config.decoder, config.decode, config.metric);
    };
  }
  return train::train(inputs, provider, model_config, config.train, validator);
}

CvResult run_cv(const Dataset& dataset, const ExperimentConfig& config) {
  validate(config);
  if (dataset.series.size() != dataset.events.size()) {
    throw Error(ErrorCode::ShapeMismatch, "series and event lists differ in length");
  }
  const auto folds = partition_folds(dataset.series.size(), config.folds);

  struct FoldOutput {
    FoldReport report;
    std::vector<Prediction> predictions;
  };
  auto run_fold = [&](std::size_t k) {
    std::vector<std::size_t> train_indices;
    for (std::size_t j = 0; j < folds.size(); ++j) {
      if (j != k) train_indices.insert(train_indices.end(), folds[j].begin(), folds[j].end());
    }
    std::sort(train_indices.begin(), train_indices.end());
    const Dataset train_set = subset(dataset, train_indices);
    const Dataset held_out = subset(dataset, folds[k]);

    auto result = fit(train_set, held_out, config);
    model::ModelConfig model_config = config.model;
    model_config.in_channels = static_cast<std::size_t>(to_input(held_out.series.front()).rows());
    model_config.out_mode = out_mode_for(config.objective);

    FoldOutput out;
    out.predictions = predict(result.params, model_config, held_out.series);
    out.report.fold = k;
    for (const auto& s : held_out.series) out.report.held_out.push_back(s.series_id);
    out.report.best_epoch = result.best_epoch;
    out.report.trace = std::move(result.trace);
    out.report.edap = score_predictions(out.predictions, held_out.events, config.decoder, config.decode, config.metric);
    return out;
  };

  std::vector<FoldOutput> outputs(folds.size());
  if (config.jobs <= 1) {
    for (std::size_t k = 0; k < folds.size(); ++k) outputs[k] = run_fold(k);
  } else {
    for (std::size_t start = 0; start < folds.size(); start += config.jobs) {
      std::vector<std::future<FoldOutput>> pending;
      for (std::size_t k = start; k < std::min(folds.size(), start + config.jobs); ++k) {
        pending.push_back(std::async(std::launch::async, run_fold, k));
      }
      for (std::size_t i = 0; i < pending.size(); ++i) outputs[start + i] = pending[i].get();
    }
  }

  CvResult result;
  result.predictions.resize(dataset.series.size());
  for (std::size_t k = 0; k < folds.size(); ++k) {
    for (std::size_t i = 0; i < folds[k].size(); ++i) {
      result.predictions[folds[k][i]] = std::move(outputs[k].predictions[i]);
    }
    result.folds.push_back(std::move(outputs[k].report));
  }
  result.decoded = decode_all(result.predictions, config.decoder, config.decode);
  result.pooled_edap = metric::edap(result.decoded, dataset.events, config.metric);
  return result;
}

GridResult grid_search(const Grid& grid, decode::Decoder decoder, const decode::DecodeParams& base,
                       const CellScorer& scorer) {
  const bool uses_mu = decoder == decode::Decoder::seg_threshold;
  if (grid.sigma.empty() || (uses_mu && grid.mu.empty())) throw Error(ErrorCode::EmptyGrid, "empty search grid");

  std::vector<std::optional<double>> sigmas = grid.sigma;
  std::stable_sort(sigmas.begin(), sigmas.end(), [](const auto& a, const auto& b) {
    if (!a || !b) return !a && b.has_value();
    return *a < *b;
  });
  std::vector<double> mus = uses_mu ? grid.mu : std::vector<double>{base.mu};
  std::stable_sort(mus.begin(), mus.end());

  GridResult result;
  bool have_best = false;
  for (const auto& sigma : sigmas) {
    for (double mu : mus) {
      decode::DecodeParams params = base;
      params.mu = mu;
      params.sigma = sigma;
      const GridCell cell{mu, sigma, scorer(params)};
      result.table.push_back(cell);
      if (!have_best || cell.score > result.best.score) {
        result.best = cell;
        have_best = true;
      }
    }
  }
  return result;
}

GridResult grid_search(const std::vector<Prediction>& predictions, const std::vector<EventSet>& truth,
                       const Grid& grid, decode::Decoder decoder, const decode::DecodeParams& base,
                       const metric::EdapConfig& metric) {
  return grid_search(grid, decoder, base, [&](const decode::DecodeParams& params) {
    return score_predictions(predictions, truth, decoder, params, metric);
  });
}

}  // namespace pdfevent::experiment
