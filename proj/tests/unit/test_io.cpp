#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "feast/error.hpp"
#include "feast/io.hpp"

using namespace feast;

namespace {

FeatureExtractor sample_extractor() {
  FeastParams p;
  p.n_features = 3;
  p.roi_w = 3;
  p.eta = 0.01;
  return FeatureExtractor({2500.0, 3, Kernel::FixedWindow}, init_network(p, 1), init_network(p, 2));
}

}  // namespace

TEST(Io, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -0.0}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Io, FeaturesRoundTripExactly) {
  const FeatureExtractor a = sample_extractor();
  const std::string text = features_to_json(a, "abc");
  const FeatureExtractor b = features_from_json(text);
  EXPECT_EQ(features_to_json(b, "abc"), text);
  EXPECT_EQ(b.surface().kernel, Kernel::FixedWindow);
  for (Channel c : {Channel::On, Channel::Off}) {
    ASSERT_TRUE(b.has(c));
    EXPECT_TRUE(std::equal(a.network(c).weights().begin(), a.network(c).weights().end(),
                           b.network(c).weights().begin()));
  }
  EXPECT_NE(text.find("\"config_hash\": \"abc\""), std::string::npos);
}

TEST(Io, FeaturesFileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "feast_io_test.json";
  save_features(path, sample_extractor(), "h");
  EXPECT_EQ(features_to_json(load_features(path), "h"), features_to_json(sample_extractor(), "h"));
  std::filesystem::remove(path);
  EXPECT_THROW(load_features(path), Error);
}

TEST(Io, MalformedFeaturesRejected) {
  EXPECT_THROW(features_from_json("{"), MalformedStreamError);
  EXPECT_THROW(features_from_json(R"({"format":"other","version":1})"), MalformedStreamError);
  std::string text = features_to_json(sample_extractor(), "h");
  text.replace(text.find("\"n_features\": 3"), 15, "\"n_features\": 4");
  EXPECT_THROW(features_from_json(text), ShapeMismatchError);
}

TEST(Io, MonitorCsvLayout) {
  MonitorLog log;
  log.samples.push_back({100, 0.5, 0.25, 0.02, 1.5});
  std::ostringstream os;
  write_monitor_csv(os, log, "deadbeef");
  EXPECT_EQ(os.str(),
            "# config_hash=deadbeef period=100\n"
            "event_index,d_weights,d_thresholds,missed_rate,spike_rate_std\n"
            "100,0.5,0.25,0.02,1.5\n");
}

TEST(Io, FeatureGridCsv) {
  FeastParams p;
  p.n_features = 1;
  p.roi_w = 3;
  std::vector<double> w(9, 0.0);
  w[4] = 1.0;
  const FeastNetwork net(p, w, {0.1});
  std::ostringstream os;
  write_feature_grid_csv(os, net, 0);
  EXPECT_EQ(os.str(), "0,0,0\n0,1,0\n0,0,0\n");
  EXPECT_THROW(write_feature_grid_csv(os, net, 1), OutOfRangeError);
  std::ostringstream all;
  write_weights_csv(all, net);
  EXPECT_NE(all.str().find("0,1,1,1\n"), std::string::npos);
}

TEST(Io, FeatureEventsAndFrames) {
  const std::vector<FeatureEvent> ev{{2, 10, Channel::On}, {0, 12, Channel::Off}};
  const LabelledEvents rows[] = {{"r0", 1, ev}};
  std::ostringstream os;
  write_feature_events_csv(os, rows);
  EXPECT_EQ(os.str(), "recording,label,channel,feature,t\nr0,1,on,2,10\nr0,1,off,0,12\n");
  Frame f{2, 1, {0.0, 1.0}};
  std::ostringstream fs;
  write_frame_csv(fs, f);
  EXPECT_EQ(fs.str(), "x,y,value\n0,0,0\n1,0,1\n");
}
