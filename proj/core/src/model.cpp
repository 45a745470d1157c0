#include "pdfevent/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pdfevent/error.hpp"

namespace pdfevent::model {

std::string_view to_string(OutMode mode) noexcept {
  switch (mode) {
    case OutMode::regression_2ch: return "regression_2ch";
    case OutMode::regression_1ch: return "regression_1ch";
    case OutMode::segmentation_2class: return "segmentation_2class";
  }
  return "unknown";
}

OutMode out_mode_from_string(std::string_view name) {
  if (name == "regression_2ch") return OutMode::regression_2ch;
  if (name == "regression_1ch") return OutMode::regression_1ch;
  if (name == "segmentation_2class") return OutMode::segmentation_2class;
  throw Error(ErrorCode::InvalidConfig, "unknown output mode '" + std::string(name) + "'");
}

std::size_t output_channels(OutMode mode) noexcept { return mode == OutMode::regression_1ch ? 1 : 2; }

void validate(const ModelConfig& config) {
  if (config.in_channels == 0) throw Error(ErrorCode::InvalidConfig, "in_channels must be positive");
  if (config.hidden.empty()) throw Error(ErrorCode::InvalidConfig, "need at least one encoder level");
  if (std::any_of(config.hidden.begin(), config.hidden.end(), [](std::size_t h) { return h == 0; })) {
    throw Error(ErrorCode::InvalidConfig, "hidden channel counts must be positive");
  }
  if (config.kernel_size % 2 == 0) throw Error(ErrorCode::InvalidConfig, "kernel_size must be odd");
}

const Tensor& Parameters::at(std::string_view name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return t;
  }
  throw Error(ErrorCode::ShapeMismatch, "no parameter named '" + std::string(name) + "'");
}

Tensor& Parameters::at(std::string_view name) {
  return const_cast<Tensor&>(static_cast<const Parameters&>(*this).at(name));
}

std::size_t Parameters::scalar_count() const noexcept {
  std::size_t n = 0;
  for (const auto& t : tensors) n += t.values.size();
  return n;
}

Parameters Parameters::zeros_like() const {
  Parameters out = *this;
  for (auto& t : out.tensors) std::fill(t.values.begin(), t.values.end(), 0.0);
  return out;
}

void Parameters::scale(double factor) {
  for (auto& t : tensors) {
    for (auto& v : t.values) v *= factor;
  }
}

void Parameters::add_scaled(const Parameters& other, double factor) {
  if (other.tensors.size() != tensors.size()) throw Error(ErrorCode::ShapeMismatch, "parameter sets differ");
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    auto& dst = tensors[i].values;
    const auto& src = other.tensors[i].values;
    if (dst.size() != src.size()) throw Error(ErrorCode::ShapeMismatch, "tensor '" + tensors[i].name + "' size");
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += factor * src[j];
  }
}

double Parameters::squared_norm() const {
  double sum = 0.0;
  for (const auto& t : tensors) {
    for (double v : t.values) sum += v * v;
  }
  return sum;
}

bool Parameters::all_finite() const {
  for (const auto& t : tensors) {
    for (double v : t.values) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

namespace {

// Conv layers in tensor order: encoder levels, bottleneck, decoder levels
// (shallowest first), head. Each contributes a weight and a bias tensor.
struct LayerSpec {
  std::string name;
  nn::ConvShape shape;
};

std::vector<LayerSpec> layer_specs(const ModelConfig& config) {
  const std::size_t levels = config.hidden.size();
  const std::size_t k = config.kernel_size;
  std::vector<LayerSpec> specs;
  std::size_t in = config.in_channels;
  for (std::size_t l = 0; l < levels; ++l) {
    specs.push_back({"enc" + std::to_string(l), {in, config.hidden[l], k}});
    in = config.hidden[l];
  }
  specs.push_back({"bottleneck", {in, in, k}});
  for (std::size_t l = 0; l < levels; ++l) {
    const std::size_t from_below = l + 1 < levels ? config.hidden[l + 1] : config.hidden.back();
    specs.push_back({"dec" + std::to_string(l), {from_below + config.hidden[l], config.hidden[l], k}});
  }
  specs.push_back({"head", {config.hidden.front(), output_channels(config.out_mode), 1}});
  return specs;
}

Parameters allocate(const ModelConfig& config) {
  validate(config);
  Parameters params;
  for (const auto& spec : layer_specs(config)) {
    params.tensors.push_back({spec.name + ".weight",
                              {spec.shape.kernel_size, spec.shape.out_channels, spec.shape.in_channels},
                              std::vector<double>(spec.shape.weight_count(), 0.0)});
    params.tensors.push_back({spec.name + ".bias", {spec.shape.out_channels},
                              std::vector<double>(spec.shape.out_channels, 0.0)});
  }
  return params;
}

void check_parameters(const Parameters& params, const ModelConfig& config) {
  const auto specs = layer_specs(config);
  if (params.tensors.size() != 2 * specs.size()) {
    throw Error(ErrorCode::ShapeMismatch, "parameter count does not match the model configuration");
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (params.tensors[2 * i].values.size() != specs[i].shape.weight_count() ||
        params.tensors[2 * i + 1].values.size() != specs[i].shape.out_channels) {
      throw Error(ErrorCode::ShapeMismatch, "tensor shapes do not match layer '" + specs[i].name + "'");
    }
  }
  if (!params.all_finite()) throw Error(ErrorCode::NonFiniteParameters, "parameters contain NaN or Inf");
}

struct ConvCache {
  Matrix input;
  Matrix pre;
};

struct ForwardCache {
  std::vector<ConvCache> encoder;
  std::vector<nn::PoolOutput> pools;
  ConvCache bottleneck;
  std::vector<ConvCache> decoder;
  std::vector<Eigen::Index> skip_rows;  // channels coming from below in each decoder concat
  Matrix head_input;
  Eigen::Index original_length = 0;
};

class UNet {
 public:
  UNet(const Parameters& params, const ModelConfig& config)
      : params_(params), config_(config), specs_(layer_specs(config)), levels_(config.hidden.size()) {}

  // Head output before any activation, cropped to the input length.
  Matrix forward(const Matrix& x, ForwardCache* cache) const {
    if (static_cast<std::size_t>(x.rows()) != config_.in_channels) {
      throw Error(ErrorCode::ShapeMismatch, "input has " + std::to_string(x.rows()) + " channels, model expects " +
                                                std::to_string(config_.in_channels));
    }
    if (x.cols() == 0) throw Error(ErrorCode::ShapeMismatch, "empty input sequence");
    const Eigen::Index multiple = Eigen::Index{1} << levels_;
    const Eigen::Index padded_length = (x.cols() + multiple - 1) / multiple * multiple;
    Matrix current(x.rows(), padded_length);
    current.leftCols(x.cols()) = x;
    for (Eigen::Index t = x.cols(); t < padded_length; ++t) current.col(t) = x.col(x.cols() - 1);

    std::vector<Matrix> skips;
    ForwardCache local;
    ForwardCache& c = cache ? *cache : local;
    c = ForwardCache{};
    c.original_length = x.cols();

    for (std::size_t l = 0; l < levels_; ++l) {
      ConvCache layer{current, conv(l, current)};
      const Matrix activated = nn::relu_forward(layer.pre);
      skips.push_back(activated);
      auto pooled = nn::maxpool2_forward(activated);
      current = pooled.y;
      c.encoder.push_back(std::move(layer));
      c.pools.push_back(std::move(pooled));
    }
    c.bottleneck = {current, conv(levels_, current)};
    current = nn::relu_forward(c.bottleneck.pre);

    c.decoder.resize(levels_);
    c.skip_rows.resize(levels_);
    for (std::size_t l = levels_; l-- > 0;) {
      const Matrix up = nn::upsample2_forward(current);
      c.skip_rows[l] = up.rows();
      Matrix joined = nn::concat_channels(up, skips[l]);
      Matrix pre = conv(levels_ + 1 + l, joined);
      current = nn::relu_forward(pre);
      c.decoder[l] = {std::move(joined), std::move(pre)};
    }
    c.head_input = current;
    const Matrix out = conv(2 * levels_ + 1, current);
    return out.leftCols(x.cols());
  }

  // Accumulates parameter gradients from dL/d(head output).
  void backward(const ForwardCache& c, const Matrix& dout, Parameters& grad) const {
    Matrix dhead = Matrix::Zero(dout.rows(), c.head_input.cols());
    dhead.leftCols(c.original_length) = dout;
    Matrix dcurrent = conv_backward(2 * levels_ + 1, c.head_input, dhead, grad);

    std::vector<Matrix> dskips(levels_);
    for (std::size_t l = 0; l < levels_; ++l) {
      const auto& layer = c.decoder[l];
      const Matrix dpre = nn::relu_backward(layer.pre, dcurrent);
      const Matrix djoined = conv_backward(levels_ + 1 + l, layer.input, dpre, grad);
      Matrix dup;
      nn::split_channels(djoined, static_cast<std::size_t>(c.skip_rows[l]), dup, dskips[l]);
      dcurrent = nn::upsample2_backward(dup);
    }
    {
      const Matrix dpre = nn::relu_backward(c.bottleneck.pre, dcurrent);
      dcurrent = conv_backward(levels_, c.bottleneck.input, dpre, grad);
    }
    for (std::size_t l = levels_; l-- > 0;) {
      Matrix dactivated = nn::maxpool2_backward(c.pools[l], dcurrent);
      dactivated += dskips[l];
      const Matrix dpre = nn::relu_backward(c.encoder[l].pre, dactivated);
      dcurrent = conv_backward(l, c.encoder[l].input, dpre, grad);
    }
  }

 private:
  Matrix conv(std::size_t layer, const Matrix& x) const {
    return nn::conv1d_forward(x, params_.tensors[2 * layer].values, params_.tensors[2 * layer + 1].values,
                              specs_[layer].shape);
  }

  Matrix conv_backward(std::size_t layer, const Matrix& x, const Matrix& dy, Parameters& grad) const {
    return nn::conv1d_backward(x, params_.tensors[2 * layer].values, dy, specs_[layer].shape,
                               grad.tensors[2 * layer].values, grad.tensors[2 * layer + 1].values);
  }

  const Parameters& params_;
  const ModelConfig& config_;
  std::vector<LayerSpec> specs_;
  std::size_t levels_;
};

bool is_segmentation(OutMode mode) { return mode == OutMode::segmentation_2class; }

void check_batch(const std::vector<Matrix>& predictions, const std::vector<Matrix>& targets) {
  if (predictions.size() != targets.size()) throw Error(ErrorCode::ShapeMismatch, "batch sizes differ");
  if (predictions.empty()) throw Error(ErrorCode::ShapeMismatch, "empty batch");
}

std::span<const double> label_row(const Matrix& target, Eigen::Index expected_length) {
  if (target.rows() != 1 || target.cols() != expected_length) {
    throw Error(ErrorCode::ShapeMismatch, "segmentation target must be a 1 x T label row");
  }
  return {target.data(), static_cast<std::size_t>(target.cols())};
}

}  // namespace

Parameters zero_parameters(const ModelConfig& config) { return allocate(config); }

Parameters init_parameters(const ModelConfig& config) {
  Parameters params = allocate(config);
  std::mt19937_64 rng(config.seed);
  for (auto& t : params.tensors) {
    if (t.shape.size() != 3) continue;  // biases stay zero
    const double fan_in = static_cast<double>(t.shape[0] * t.shape[2]);
    const double bound = 1.0 / std::sqrt(fan_in);
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& v : t.values) v = dist(rng);
  }
  return params;
}

std::vector<Matrix> forward(const Parameters& params, const std::vector<Matrix>& inputs, const ModelConfig& config) {
  validate(config);
  check_parameters(params, config);
  const UNet net(params, config);
  std::vector<Matrix> outputs;
  outputs.reserve(inputs.size());
  for (const auto& x : inputs) {
    Matrix raw = net.forward(x, nullptr);
    outputs.push_back(is_segmentation(config.out_mode) ? nn::softmax_columns(raw) : std::move(raw));
  }
  return outputs;
}

double loss(const std::vector<Matrix>& predictions, const std::vector<Matrix>& targets, OutMode mode) {
  check_batch(predictions, targets);
  double total = 0.0;
  double count = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const Matrix& p = predictions[i];
    if (is_segmentation(mode)) {
      const auto labels = label_row(targets[i], p.cols());
      for (Eigen::Index t = 0; t < p.cols(); ++t) {
        const auto label = static_cast<Eigen::Index>(labels[static_cast<std::size_t>(t)]);
        total -= std::log(std::max(p(label, t), 1e-300));
      }
      count += static_cast<double>(p.cols());
    } else {
      total += nn::squared_error_sum(p, targets[i], nullptr, 0.0);
      count += static_cast<double>(p.size());
    }
  }
  return total / count;
}

LossAndGradient gradients(const Parameters& params, const std::vector<Matrix>& inputs,
                          const std::vector<Matrix>& targets, const ModelConfig& config) {
  validate(config);
  check_parameters(params, config);
  check_batch(inputs, targets);
  const bool segmentation = is_segmentation(config.out_mode);
  const std::size_t channels = output_channels(config.out_mode);

  double count = 0.0;
  for (const auto& x : inputs) {
    count += static_cast<double>(x.cols()) * (segmentation ? 1.0 : static_cast<double>(channels));
  }
  const double scale = 1.0 / count;

  const UNet net(params, config);
  LossAndGradient result;
  result.gradient = params.zeros_like();
  ForwardCache cache;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const Matrix raw = net.forward(inputs[i], &cache);
    Matrix dout;
    if (segmentation) {
      result.loss += scale * nn::softmax_cross_entropy_sum(raw, label_row(targets[i], raw.cols()), &dout, scale);
    } else {
      result.loss += scale * nn::squared_error_sum(raw, targets[i], &dout, scale);
    }
    net.backward(cache, dout, result.gradient);
  }
  if (!result.gradient.all_finite() || !std::isfinite(result.loss)) {
    throw Error(ErrorCode::NonFiniteGradient, "loss or gradient is not finite");
  }
  return result;
}

}  // namespace pdfevent::model
