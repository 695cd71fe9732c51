#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "feast/classify.hpp"
#include "feast/extractor.hpp"
#include "feast/monitor.hpp"
#include "feast/surface.hpp"

namespace feast {

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

/// Trained extractor as JSON: surface parameters plus, per channel, the
/// network parameters, thresholds and row-major weights.
std::string features_to_json(const FeatureExtractor& extractor, const std::string& config_hash);
FeatureExtractor features_from_json(const std::string& text);
void save_features(const std::filesystem::path& path, const FeatureExtractor& extractor,
                   const std::string& config_hash);
FeatureExtractor load_features(const std::filesystem::path& path);

void write_monitor_csv(std::ostream& os, const MonitorLog& log, const std::string& config_hash);

struct LabelledEvents {
  std::string recording;
  int label = 0;
  std::span<const FeatureEvent> events;
};
void write_feature_events_csv(std::ostream& os, std::span<const LabelledEvents> recordings);

/// x,y,value rows of a sampled surface.
void write_frame_csv(std::ostream& os, const Frame& frame);

/// feature,row,col,weight rows of every feature's roi_w x roi_w grid.
void write_weights_csv(std::ostream& os, const FeastNetwork& net);

/// One feature as a roi_w x roi_w comma-separated grid, one line per row.
void write_feature_grid_csv(std::ostream& os, const FeastNetwork& net, std::size_t feature);

std::string evaluation_to_json(const Evaluation& per_frame, const Evaluation& per_recording,
                               const std::string& config_hash);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace feast
