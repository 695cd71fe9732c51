#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "feast/classify.hpp"
#include "feast/config.hpp"
#include "feast/dataset.hpp"
#include "feast/extractor.hpp"
#include "feast/sizing.hpp"

namespace feast {

/// Untrained extractor with freshly initialised networks on the configured
/// channels. This is also the random-feature baseline.
FeatureExtractor make_extractor(const ExperimentConfig& config);

struct TrainOutcome {
  FeatureExtractor extractor;
  std::array<std::optional<MonitorLog>, 2> logs;
  std::uint64_t events = 0;
  std::uint64_t misses = 0;
};

/// Trains on the first `max_recordings` training recordings (all by
/// default) for feast.epochs passes.
TrainOutcome run_train(const ExperimentConfig& config, const Dataset& dataset,
                       std::size_t max_recordings = static_cast<std::size_t>(-1));

std::vector<std::vector<FeatureEvent>> infer_recordings(const FeatureExtractor& extractor,
                                                        std::span<const Recording> recordings);

struct EvalOutcome {
  Evaluation per_frame;
  Evaluation per_recording;
  std::optional<double> gini;  // of inference feature counts over the test split
  std::vector<std::uint64_t> test_counts;
  std::size_t train_samples = 0;
  std::size_t test_samples = 0;
};

/// Infers feature events for both splits, builds classifier inputs per
/// classify.input, trains the classifier on the train split and scores the
/// test split per frame and per recording (majority vote).
EvalOutcome run_evaluate(const ExperimentConfig& config, const Dataset& dataset,
                         const FeatureExtractor& extractor);

SizeSweepResult run_size_sweep(const ExperimentConfig& config, const Dataset& dataset);

struct GiniStudyRow {
  std::size_t index = 0;
  std::string config_hash;
  int roi_w = 0;
  std::size_t n_features = 0;
  double delta_dec = 0.0;
  double delta_inc = 0.0;
  double eta = 0.0;
  double tau_us = 0.0;
  std::size_t train_recordings = 0;
  double gini = 0.0;
  double accuracy = 0.0;
};

/// Draws `n` random feature-extraction configurations around `base`
/// (ROI size, threshold steps, learning rate, decay constant and training
/// set size; the network size stays at the base value), trains and
/// evaluates each, and reports (Gini, accuracy) per config.
std::vector<GiniStudyRow> run_gini_study(const ExperimentConfig& base, const Dataset& dataset,
                                         std::size_t n, std::uint64_t seed);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace feast
