#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdfevent/data.hpp"
#include "pdfevent/error.hpp"
#include "pdfevent/experiment.hpp"

namespace pdfevent::cli {

/// Where the series and ground truth come from. Either `synth` is set or
/// `series` lists CSV files (with `events` holding their ground truth).
struct DataSource {
  std::optional<data::SynthConfig> synth;
  std::vector<std::filesystem::path> series;
  std::optional<std::filesystem::path> events;
  double step_seconds = 1.0;
  std::size_t downsample = 1;
  std::vector<std::string> categorical;
  bool change_points = false;  // replace intervals by their transitions
};

struct AppConfig {
  std::uint64_t seed = 0;
  DataSource data;
  experiment::ExperimentConfig experiment;
};

/// Builds a config from a parsed document. Relative paths are resolved
/// against `base_dir`. Unknown keys are rejected. Throws InvalidConfig.
AppConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

/// Reads and parses a JSON config file.
AppConfig load_config(const std::filesystem::path& path);

/// Sets the master seed; synthesis, initialisation and shuffling derive their
/// seeds from it.
void apply_seed(AppConfig& config, std::uint64_t seed);

/// Loads or synthesises the dataset, then downsamples and converts events as
/// configured.
experiment::Dataset load_dataset(const DataSource& source);

/// Tolerances in steps of the (downsampled) series.
std::vector<Step> tolerances_in_steps(const std::vector<double>& values, const std::string& unit,
                                      double step_seconds);

/// 2 for configuration errors, 3 for data errors, 4 for numeric divergence.
int exit_code_for(ErrorCode code) noexcept;

}  // namespace pdfevent::cli
