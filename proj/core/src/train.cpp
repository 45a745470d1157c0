#include "pdfevent/train.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "pdfevent/error.hpp"

namespace pdfevent::train {

void validate(const TrainConfig& config) {
  if (config.epochs == 0) throw Error(ErrorCode::InvalidConfig, "epochs must be positive");
  if (config.batch_size == 0) throw Error(ErrorCode::InvalidConfig, "batch_size must be positive");
  if (!(config.learning_rate > 0.0)) throw Error(ErrorCode::InvalidConfig, "learning_rate must be positive");
  if (!(config.grad_clip_norm > 0.0)) throw Error(ErrorCode::InvalidConfig, "grad_clip_norm must be positive");
  if (config.sigma_decay &&
      !(config.sigma_decay->sigma_end > 0.0 && config.sigma_decay->sigma_start >= config.sigma_decay->sigma_end)) {
    throw Error(ErrorCode::InvalidConfig, "sigma decay needs sigma_start >= sigma_end > 0");
  }
}

double cosine_learning_rate(std::size_t step, std::size_t total_steps, double base_rate) {
  if (total_steps == 0) return base_rate;
  const double progress = std::min(1.0, static_cast<double>(step) / static_cast<double>(total_steps));
  return base_rate * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

double clip_global_norm(Parameters& gradient, double max_norm) {
  const double norm = std::sqrt(gradient.squared_norm());
  if (norm > max_norm && norm > 0.0) gradient.scale(max_norm / norm);
  return norm;
}

Adam::Adam(const Parameters& like, double beta1, double beta2, double epsilon)
    : m_(like.zeros_like()), v_(like.zeros_like()), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}

void Adam::step(Parameters& params, const Parameters& gradient, double learning_rate) {
  ++t_;
  const double correction1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double correction2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.tensors.size(); ++i) {
    auto& p = params.tensors[i].values;
    const auto& g = gradient.tensors[i].values;
    auto& m = m_.tensors[i].values;
    auto& v = v_.tensors[i].values;
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = beta1_ * m[j] + (1.0 - beta1_) * g[j];
      v[j] = beta2_ * v[j] + (1.0 - beta2_) * g[j] * g[j];
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      p[j] -= learning_rate * m_hat / (std::sqrt(v_hat) + epsilon_);
    }
  }
}

TrainResult train(const std::vector<Matrix>& inputs, const TargetProvider& targets,
                  const model::ModelConfig& model_config, const TrainConfig& config, const Validator& validator) {
  validate(config);
  model::validate(model_config);
  if (inputs.empty()) throw Error(ErrorCode::TooFewSeries, "training set is empty");

  Parameters params = model::init_parameters(model_config);
  Adam optimizer(params);
  std::mt19937_64 rng(config.seed);

  const std::size_t batches_per_epoch = (inputs.size() + config.batch_size - 1) / config.batch_size;
  const std::size_t total_steps = batches_per_epoch * config.epochs;
  std::size_t global_step = 0;

  TrainResult result;
  std::optional<double> best_score;
  std::vector<std::size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const std::vector<Matrix> epoch_targets = targets(epoch);
    if (epoch_targets.size() != inputs.size()) {
      throw Error(ErrorCode::ShapeMismatch, "target provider returned a different number of series");
    }
    std::shuffle(order.begin(), order.end(), rng);

    double loss_sum = 0.0;
    for (std::size_t b = 0; b < batches_per_epoch; ++b) {
      const std::size_t begin = b * config.batch_size;
      const std::size_t end = std::min(inputs.size(), begin + config.batch_size);
      std::vector<Matrix> batch_inputs;
      std::vector<Matrix> batch_targets;
      for (std::size_t i = begin; i < end; ++i) {
        batch_inputs.push_back(inputs[order[i]]);
        batch_targets.push_back(epoch_targets[order[i]]);
      }
      model::LossAndGradient step;
      try {
        step = model::gradients(params, batch_inputs, batch_targets, model_config);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NonFiniteGradient) throw;
        throw Error(ErrorCode::DivergedLoss, "gradient diverged at epoch " + std::to_string(epoch));
      }
      auto& [batch_loss, gradient] = step;
      if (!std::isfinite(batch_loss)) {
        throw Error(ErrorCode::DivergedLoss, "loss diverged at epoch " + std::to_string(epoch));
      }
      clip_global_norm(gradient, config.grad_clip_norm);
      optimizer.step(params, gradient, cosine_learning_rate(global_step, total_steps, config.learning_rate));
      ++global_step;
      loss_sum += batch_loss;
    }
    if (!params.all_finite()) {
      throw Error(ErrorCode::DivergedLoss, "parameters became non-finite at epoch " + std::to_string(epoch));
    }

    EpochRecord record{epoch, loss_sum / static_cast<double>(batches_per_epoch), std::nullopt};
    if (validator) {
      record.validation_score = validator(params);
      if (!best_score || *record.validation_score > *best_score) {
        best_score = record.validation_score;
        result.params = params;
        result.best_epoch = epoch;
      }
    } else {
      result.params = params;
      result.best_epoch = epoch;
    }
    result.trace.push_back(record);
  }
  return result;
}

}  // namespace pdfevent::train
