#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pdfevent/decode.hpp"
#include "pdfevent/metric.hpp"
#include "pdfevent/model.hpp"
#include "pdfevent/targets.hpp"
#include "pdfevent/train.hpp"
#include "pdfevent/types.hpp"

namespace pdfevent::experiment {

using model::Matrix;

/// What the network is trained to output.
///   regression   - onset/offset densities (2 channels, MSE)
///   segmentation - in-event class probability (softmax, cross-entropy)
///   cpd          - change-point density (1 channel, MSE) from point events
enum class Objective { regression, segmentation, cpd };

std::string_view to_string(Objective objective) noexcept;
Objective objective_from_string(std::string_view name);
model::OutMode out_mode_for(Objective objective) noexcept;

/// Decode hyper-parameter grid. A nullopt sigma means "no smoothing".
struct Grid {
  std::vector<double> mu;
  std::vector<std::optional<double>> sigma;
};

/// mu in {0, 0.1, ..., 1}, sigma in {none, 1, 10, 100, 1000}.
Grid default_grid();

struct ExperimentConfig {
  Objective objective = Objective::regression;
  targets::PdfSpec pdf;
  model::ModelConfig model;   // in_channels is taken from the data
  train::TrainConfig train;
  decode::Decoder decoder = decode::Decoder::regression;
  decode::DecodeParams decode;  // operating point used for validation
  metric::EdapConfig metric;
  std::size_t folds = 4;
  std::size_t jobs = 1;
  Grid grid = default_grid();
};

void validate(const ExperimentConfig& config);

/// Series paired with their ground truth, index-aligned.
struct Dataset {
  std::vector<TimeSeries> series;
  std::vector<EventSet> events;
};

/// Network input: per-channel z-scored series as a (channels x T) matrix.
Matrix to_input(const TimeSeries& series);

/// Training target for one series. Regression/cpd targets are gamma-scaled
/// densities; segmentation targets are a 1 x T row of 0/1 labels.
Matrix to_target(const EventSet& events, std::size_t num_steps, Objective objective, const targets::PdfSpec& pdf);

/// Raw model output for one series. Segmentation keeps only the in-event
/// class probability.
struct Prediction {
  std::string series_id;
  std::vector<std::vector<double>> channels;
};

std::vector<Prediction> predict(const model::Parameters& params, const model::ModelConfig& config,
                                const std::vector<TimeSeries>& series);

ScoredEvents decode_prediction(const Prediction& prediction, decode::Decoder decoder,
                               const decode::DecodeParams& params);
std::vector<ScoredEvents> decode_all(const std::vector<Prediction>& predictions, decode::Decoder decoder,
                                     const decode::DecodeParams& params);

/// Round-robin assignment of series (in dataset order) to `folds` folds.
std::vector<std::vector<std::size_t>> partition_folds(std::size_t num_series, std::size_t folds);

/// Trains on `train_set`, choosing the epoch with the best EDAP on
/// `validation_set` at the configured operating point.
train::TrainResult fit(const Dataset& train_set, const Dataset& validation_set, const ExperimentConfig& config);

struct FoldReport {
  std::size_t fold = 0;
  std::vector<std::string> held_out;
  std::size_t best_epoch = 0;
  std::vector<train::EpochRecord> trace;
  double edap = 0.0;
};

struct CvResult {
  std::vector<FoldReport> folds;
  std::vector<Prediction> predictions;  // dataset order, each from its held-out fold
  std::vector<ScoredEvents> decoded;    // at the configured operating point
  double pooled_edap = 0.0;
};

/// k-fold cross-validation; held-out predictions of all folds are pooled and
/// scored once.
CvResult run_cv(const Dataset& dataset, const ExperimentConfig& config);

struct GridCell {
  double mu = 0.5;
  std::optional<double> sigma;
  double score = 0.0;
};

struct GridResult {
  GridCell best;
  std::vector<GridCell> table;
};

using CellScorer = std::function<double(const decode::DecodeParams&)>;

/// Exhaustive search; ties go to the smaller sigma (none first), then the
/// smaller mu. The regression decoder ignores mu, so only sigma is searched
/// and `base.mu` is reported.
GridResult grid_search(const Grid& grid, decode::Decoder decoder, const decode::DecodeParams& base,
                       const CellScorer& scorer);

GridResult grid_search(const std::vector<Prediction>& predictions, const std::vector<EventSet>& truth,
                       const Grid& grid, decode::Decoder decoder, const decode::DecodeParams& base,
                       const metric::EdapConfig& metric);

/// EDAP of predictions decoded at `params`; 0 when nothing is scorable.
double score_predictions(const std::vector<Prediction>& predictions, const std::vector<EventSet>& truth,
                         decode::Decoder decoder, const decode::DecodeParams& params,
                         const metric::EdapConfig& metric);

}  // namespace pdfevent::experiment
