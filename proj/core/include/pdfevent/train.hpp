#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pdfevent/model.hpp"

namespace pdfevent::train {

using model::Matrix;
using model::Parameters;

struct SigmaDecay {
  double sigma_start = 1.0;
  double sigma_end = 1.0;
};

struct TrainConfig {
  std::size_t epochs = 20;
  std::size_t batch_size = 8;
  double learning_rate = 1e-3;
  double grad_clip_norm = 0.1;
  std::optional<SigmaDecay> sigma_decay;  // consumed by the target provider
  std::uint64_t seed = 0;                 // batch shuffling
};

void validate(const TrainConfig& config);

/// Cosine decay without restarts: base * (1 + cos(pi * step / total)) / 2.
double cosine_learning_rate(std::size_t step, std::size_t total_steps, double base_rate);

/// Rescales `gradient` in place so its global L2 norm is at most `max_norm`.
/// Returns the norm before clipping.
double clip_global_norm(Parameters& gradient, double max_norm);

class Adam {
 public:
  explicit Adam(const Parameters& like, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);

  void step(Parameters& params, const Parameters& gradient, double learning_rate);
  std::size_t steps_taken() const noexcept { return t_; }

 private:
  Parameters m_;
  Parameters v_;
  double beta1_;
  double beta2_;
  double epsilon_;
  std::size_t t_ = 0;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;
  std::optional<double> validation_score;
};

struct TrainResult {
  Parameters params;  // from the best validation epoch (last epoch without a validator)
  std::size_t best_epoch = 0;
  std::vector<EpochRecord> trace;
};

/// Targets for a given epoch; called once per epoch so adaptive (decaying)
/// targets can be rebuilt.
using TargetProvider = std::function<std::vector<Matrix>(std::size_t epoch)>;
/// Higher is better.
using Validator = std::function<double(const Parameters&)>;

/// Mini-batch Adam with global-norm clipping and per-step cosine decay.
/// Throws DivergedLoss if a batch loss becomes non-finite.
TrainResult train(const std::vector<Matrix>& inputs, const TargetProvider& targets,
                  const model::ModelConfig& model_config, const TrainConfig& config,
                  const Validator& validator = {});

}  // namespace pdfevent::train
