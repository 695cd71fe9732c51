#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "feast/network.hpp"
#include "feast/sizing.hpp"
#include "feast/surface.hpp"
#include "feast/synth.hpp"

namespace feast {

struct DatasetConfig {
  std::string kind = "synth";  // synth | nmnist
  std::string path;            // N-MNIST root holding Train/ and Test/
  std::size_t train_count = 10'000;
  std::size_t test_count = 2'000;
};

struct SynthConfig {
  std::uint16_t width = 32;
  std::uint16_t height = 32;
  std::string shapes = "square@90, triangle@90, cross@90, tee@90";
  double velocity_min = 1000.0;
  double velocity_max = 3000.0;
  Timestamp duration_us = 1'000'000;
  double noise_rate = 0.5;
  Timestamp gap_us = 20'000;
  double direction_jitter_deg = 10.0;
  double offset_jitter = 0.5;
  Timestamp lead_us = 10'000;
  std::size_t train_per_class = 60;
  std::size_t test_per_class = 30;
  std::uint64_t seed = 1;
};

struct FeastConfig {
  std::string channels = "on";  // on | off | both
  FeastParams params;
  std::size_t epochs = 1;
  std::uint64_t seed = 1;
};

struct ClassifyConfig {
  std::string type = "linear";  // linear | elm
  std::string input = "pooled";  // pooled | timebins
  std::size_t hidden = 1000;
  double lambda = 1e-3;
  Timestamp window_us = 3000;  // 0 pools each recording into one vector
  Timestamp bin_us = 1000;
  std::size_t bins = 316;
  std::uint64_t seed = 1;
};

struct MonitorConfig {
  std::size_t period = 100;
  std::size_t window_k = 50;
  double epsilon_rel = 0.1;
};

struct SizingConfig {
  NoiseCriterion criterion;
  std::string sizes = "10,25,50,100";
  std::size_t trials = 5;
  double target_min = 2.0;
  double target_max = 4.0;
};

/// Every tunable of an experiment. Text form: one `key = value` per line,
/// `#` starts a comment, keys are dotted section paths (e.g. feast.eta).
struct ExperimentConfig {
  DatasetConfig dataset;
  SynthConfig synth;
  SurfaceParams surface;
  FeastConfig feast;
  ClassifyConfig classify;
  MonitorConfig monitor;
  SizingConfig sizing;

  /// Parses text on top of the defaults. Throws ConfigError(key, ...).
  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::filesystem::path& path);

  /// Sets one key from its text form. Throws ConfigError.
  void set(std::string_view key, std::string_view value);
  /// Checks cross-field constraints and module preconditions. Throws ConfigError.
  void validate() const;

  /// All keys in a fixed order, `key = value` per line.
  std::string canonical() const;
  /// FNV-1a 64 of canonical(), as 16 hex digits.
  std::string hash() const;

  std::vector<ShapeSpec> shape_list() const;
  std::vector<std::size_t> size_list() const;
  SynthParams synth_params() const;
};

/// Documented keys with their default values, in canonical order.
std::vector<std::pair<std::string, std::string>> config_defaults();

std::string fnv1a_hex(std::string_view bytes);

}  // namespace feast
