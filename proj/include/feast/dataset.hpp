#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "feast/config.hpp"
#include "feast/events.hpp"

namespace feast {

/// A labelled recording, loaded on demand (or held in memory after
/// materialize()).
struct Recording {
  std::string id;
  int label = 0;
  std::function<EventStream()> loader;
  std::shared_ptr<const EventStream> cache;

  std::shared_ptr<const EventStream> get() const {
    return cache ? cache : std::make_shared<const EventStream>(loader());
  }
};

struct Dataset {
  std::vector<Recording> train;
  std::vector<Recording> test;
  int n_classes = 0;
};

/// One class per entry of synth.shapes; each recording is a single sweep
/// with its own seed, classes interleaved.
Dataset make_synth_dataset(const ExperimentConfig& config);

/// <root>/Train/<digit>/*.bin and <root>/Test/<digit>/*.bin, taking the
/// first `train_count` / `test_count` files round-robin over the digits in
/// file-name order.
Dataset load_nmnist_dataset(const std::filesystem::path& root, std::size_t train_count,
                            std::size_t test_count);

Dataset load_dataset(const ExperimentConfig& config);

/// Loads every recording into memory.
void materialize(Dataset& dataset);

}  // namespace feast
