#include "pdfevent/metric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pdfevent/error.hpp"

namespace pdfevent::metric {

void validate(const EdapConfig& config) {
  if (config.tolerances.empty()) throw Error(ErrorCode::InvalidConfig, "no tolerances configured");
  for (std::size_t i = 0; i < config.tolerances.size(); ++i) {
    if (config.tolerances[i] <= 0 || (i > 0 && config.tolerances[i] <= config.tolerances[i - 1])) {
      throw Error(ErrorCode::InvalidConfig, "tolerances must be positive, distinct and ascending");
    }
  }
  if (config.classes.empty()) throw Error(ErrorCode::InvalidConfig, "no event classes configured");
  for (const auto& c : config.classes) {
    if (c != "onset" && c != "offset" && c != "point") {
      throw Error(ErrorCode::InvalidConfig, "unknown event class '" + c + "'");
    }
  }
}

std::size_t MatchResult::true_positives() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(ranked.begin(), ranked.end(), [](const RankedPrediction& p) { return p.true_positive; }));
}

std::vector<bool> MatchResult::flags() const {
  std::vector<bool> out;
  out.reserve(ranked.size());
  for (const auto& p : ranked) out.push_back(p.true_positive);
  return out;
}

MatchResult match_events(std::span<const ScoredStep> predictions, std::span<const Step> truth, Step tolerance) {
  MatchResult result;
  result.num_truth = truth.size();
  result.ranked.reserve(predictions.size());
  for (const auto& p : predictions) {
    if (!std::isfinite(p.score)) throw Error(ErrorCode::NonFiniteValue, "prediction score not finite");
    result.ranked.push_back({p.step, p.score, false, std::nullopt});
  }
  std::stable_sort(result.ranked.begin(), result.ranked.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.step < b.step;
  });

  // Truth sorted by step with original indices, so the nearest candidates
  // can be found by binary search.
  std::vector<std::size_t> order(truth.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return truth[a] < truth[b]; });
  std::vector<Step> sorted(truth.size());
  for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = truth[order[i]];
  std::vector<bool> taken(truth.size(), false);

  for (auto& p : result.ranked) {
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), p.step - tolerance) - sorted.begin();
    std::optional<std::size_t> best;
    Step best_distance = 0;
    for (auto j = static_cast<std::size_t>(lo); j < sorted.size() && sorted[j] <= p.step + tolerance; ++j) {
      if (taken[j]) continue;
      const Step distance = std::abs(sorted[j] - p.step);
      if (!best || distance < best_distance) {
        best = j;
        best_distance = distance;
      }
    }
    if (best) {
      taken[*best] = true;
      p.true_positive = true;
      p.matched_truth = order[*best];
    }
  }
  result.unmatched_truth = static_cast<std::size_t>(std::count(taken.begin(), taken.end(), false));
  return result;
}

std::optional<double> average_precision(const std::vector<bool>& flags, std::size_t num_truth) {
  if (num_truth == 0) {
    if (flags.empty()) return std::nullopt;
    return 0.0;
  }
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (flags[i]) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(num_truth);
}

namespace {

std::vector<Step> truth_for(const EventSet& truth, const std::string& event_class) {
  if (event_class == "offset") return truth.offset_steps();
  if (event_class == "point") {
    return truth.kind == EventKind::point ? truth.onset_steps() : std::vector<Step>{};
  }
  return truth.kind == EventKind::interval ? truth.onset_steps() : std::vector<Step>{};
}

const std::vector<ScoredStep>& predictions_for(const ScoredEvents& pred, const std::string& event_class) {
  return event_class == "offset" ? pred.offsets : pred.onsets;
}

struct PooledHit {
  double score;
  std::size_t series;
  Step step;
  bool tp;
};

}  // namespace

EdapReport edap_report(std::span<const ScoredEvents> predictions, std::span<const EventSet> truth,
                       const EdapConfig& config) {
  validate(config);
  if (predictions.size() != truth.size()) {
    throw Error(ErrorCode::ShapeMismatch, "predictions and truth cover different numbers of series");
  }
  for (std::size_t s = 0; s < truth.size(); ++s) {
    if (!predictions[s].series_id.empty() && !truth[s].series_id.empty() &&
        predictions[s].series_id != truth[s].series_id) {
      throw Error(ErrorCode::ShapeMismatch,
                  "series mismatch: '" + predictions[s].series_id + "' vs '" + truth[s].series_id + "'");
    }
  }

  EdapReport report;
  double sum = 0.0;
  std::size_t defined = 0;
  for (const auto& event_class : config.classes) {
    std::vector<std::vector<Step>> truth_steps;
    truth_steps.reserve(truth.size());
    std::size_t total_truth = 0;
    for (const auto& t : truth) {
      truth_steps.push_back(truth_for(t, event_class));
      total_truth += truth_steps.back().size();
    }
    for (Step tolerance : config.tolerances) {
      std::vector<PooledHit> pooled;
      for (std::size_t s = 0; s < truth.size(); ++s) {
        const auto match = match_events(predictions_for(predictions[s], event_class), truth_steps[s], tolerance);
        for (const auto& r : match.ranked) pooled.push_back({r.score, s, r.step, r.true_positive});
      }
      std::stable_sort(pooled.begin(), pooled.end(), [](const PooledHit& a, const PooledHit& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.series != b.series) return a.series < b.series;
        return a.step < b.step;
      });
      std::vector<bool> flags;
      flags.reserve(pooled.size());
      for (const auto& h : pooled) flags.push_back(h.tp);
      const auto ap = average_precision(flags, total_truth);
      report.cells.push_back({event_class, tolerance, ap});
      if (ap) {
        sum += *ap;
        ++defined;
      }
    }
  }
  if (defined == 0) throw Error(ErrorCode::EmptyTruth, "no ground-truth events and no predictions to score");
  report.score = sum / static_cast<double>(defined);
  return report;
}

double edap(std::span<const ScoredEvents> predictions, std::span<const EventSet> truth, const EdapConfig& config) {
  return edap_report(predictions, truth, config).score;
}

namespace {

PrecisionRecall finish(std::size_t tp, std::size_t fp, std::size_t num_truth) {
  PrecisionRecall out;
  out.true_positives = tp;
  out.false_positives = fp;
  out.num_truth = num_truth;
  const std::size_t predicted = tp + fp;
  if (predicted == 0) {
    out.precision = num_truth == 0 ? 1.0 : 0.0;
  } else {
    out.precision = static_cast<double>(tp) / static_cast<double>(predicted);
  }
  out.recall = num_truth == 0 ? (predicted == 0 ? 1.0 : 0.0) : static_cast<double>(tp) / static_cast<double>(num_truth);
  const double denom = out.precision + out.recall;
  out.f1 = denom > 0.0 ? 2.0 * out.precision * out.recall / denom : 0.0;
  return out;
}

}  // namespace

PrecisionRecall prf_at_tolerance(std::span<const ScoredStep> predictions, std::span<const Step> truth, Step tolerance) {
  const auto match = match_events(predictions, truth, tolerance);
  const std::size_t tp = match.true_positives();
  return finish(tp, match.ranked.size() - tp, truth.size());
}

PrecisionRecall prf_pooled(std::span<const std::vector<ScoredStep>> predictions,
                           std::span<const std::vector<Step>> truth, Step tolerance) {
  if (predictions.size() != truth.size()) {
    throw Error(ErrorCode::ShapeMismatch, "predictions and truth cover different numbers of series");
  }
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t num_truth = 0;
  for (std::size_t s = 0; s < truth.size(); ++s) {
    const auto match = match_events(predictions[s], truth[s], tolerance);
    const std::size_t hits = match.true_positives();
    tp += hits;
    fp += match.ranked.size() - hits;
    num_truth += truth[s].size();
  }
  return finish(tp, fp, num_truth);
}

}  // namespace pdfevent::metric
