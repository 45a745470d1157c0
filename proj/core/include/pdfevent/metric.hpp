#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdfevent/types.hpp"

namespace pdfevent::metric {

/// Tolerance thresholds (in steps) and the event classes to score.
/// Recognised classes: "onset", "offset" (interval truth) and "point"
/// (point truth; predictions are read from ScoredEvents::onsets).
struct EdapConfig {
  std::vector<Step> tolerances;
  std::vector<std::string> classes{"onset", "offset"};
};

void validate(const EdapConfig& config);

/// One prediction after ranking, with its match outcome.
struct RankedPrediction {
  Step step = 0;
  double score = 0.0;
  bool true_positive = false;
  std::optional<std::size_t> matched_truth;  // index into the truth list
};

struct MatchResult {
  std::vector<RankedPrediction> ranked;  // descending score, ties by ascending step
  std::size_t num_truth = 0;
  std::size_t unmatched_truth = 0;

  std::size_t true_positives() const noexcept;
  std::vector<bool> flags() const;
};

/// Greedy assignment: predictions in rank order take the nearest unmatched
/// truth within `tolerance` (earlier truth on distance ties).
MatchResult match_events(std::span<const ScoredStep> predictions, std::span<const Step> truth, Step tolerance);

/// Non-interpolated AP over a ranked TP/FP list:
///   sum of precision at each TP / num_truth.
/// Returns nullopt when there is neither truth nor any prediction, and 0 when
/// predictions exist without truth.
std::optional<double> average_precision(const std::vector<bool>& flags, std::size_t num_truth);

struct EdapCell {
  std::string event_class;
  Step tolerance = 0;
  std::optional<double> ap;  // nullopt: excluded from the mean
};

struct EdapReport {
  std::vector<EdapCell> cells;
  double score = 0.0;
};

/// Pools all series per (class, tolerance), computes AP and averages the
/// defined cells. `predictions[i]` and `truth[i]` must describe the same
/// series. Throws EmptyTruth if no cell is defined.
EdapReport edap_report(std::span<const ScoredEvents> predictions, std::span<const EventSet> truth,
                       const EdapConfig& config);

double edap(std::span<const ScoredEvents> predictions, std::span<const EventSet> truth, const EdapConfig& config);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t num_truth = 0;
};

/// Tolerance-matched precision/recall/F1. With no predictions, precision is
/// 1 if there is also no truth, otherwise 0.
PrecisionRecall prf_at_tolerance(std::span<const ScoredStep> predictions, std::span<const Step> truth, Step tolerance);

/// Same counts pooled over several series.
PrecisionRecall prf_pooled(std::span<const std::vector<ScoredStep>> predictions,
                           std::span<const std::vector<Step>> truth, Step tolerance);

}  // namespace pdfevent::metric
