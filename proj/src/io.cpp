#include "feast/io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "feast/error.hpp"

namespace feast {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

const char* channel_name(Channel c) { return c == Channel::On ? "on" : "off"; }

const char* kernel_name(Kernel k) { return k == Kernel::Exponential ? "exponential" : "fixed"; }

Kernel kernel_from(const std::string& s) {
  if (s == "exponential") return Kernel::Exponential;
  if (s == "fixed") return Kernel::FixedWindow;
  throw MalformedStreamError("features: unknown kernel '" + s + "'");
}

}  // namespace

std::string features_to_json(const FeatureExtractor& ex, const std::string& config_hash) {
  json j;
  j["format"] = "feast-features";
  j["version"] = 1;
  j["config_hash"] = config_hash;
  const auto& s = ex.surface();
  j["surface"] = {{"tau_us", s.tau_us}, {"roi_w", s.roi_w}, {"kernel", kernel_name(s.kernel)}};
  json nets = json::array();
  for (Channel c : {Channel::On, Channel::Off}) {
    if (!ex.has(c)) continue;
    const auto& net = ex.network(c);
    const auto& p = net.params();
    json n;
    n["channel"] = channel_name(c);
    n["n_features"] = net.size();
    n["roi_w"] = p.roi_w;
    n["params"] = {{"delta_inc", p.delta_inc},
                   {"delta_dec", p.delta_dec},
                   {"eta", p.eta},
                   {"init_threshold_max", p.init_threshold_max}};
    n["thresholds"] = std::vector<double>(net.thresholds().begin(), net.thresholds().end());
    n["weights"] = std::vector<double>(net.weights().begin(), net.weights().end());
    nets.push_back(std::move(n));
  }
  j["networks"] = std::move(nets);
  return j.dump(1);
}

FeatureExtractor features_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw MalformedStreamError(std::string("features: ") + e.what());
  }
  try {
    if (j.at("format") != "feast-features") throw MalformedStreamError("features: wrong format tag");
    if (j.at("version") != 1) throw MalformedStreamError("features: unsupported version");
    SurfaceParams s;
    s.tau_us = j.at("surface").at("tau_us").get<double>();
    s.roi_w = j.at("surface").at("roi_w").get<int>();
    s.kernel = kernel_from(j.at("surface").at("kernel").get<std::string>());
    std::optional<FeastNetwork> nets[2];
    for (const auto& n : j.at("networks")) {
      const std::string ch = n.at("channel").get<std::string>();
      if (ch != "on" && ch != "off") throw MalformedStreamError("features: bad channel '" + ch + "'");
      FeastParams p;
      p.n_features = n.at("n_features").get<std::size_t>();
      p.roi_w = n.at("roi_w").get<int>();
      const auto& pj = n.at("params");
      p.delta_inc = pj.at("delta_inc").get<double>();
      p.delta_dec = pj.at("delta_dec").get<double>();
      p.eta = pj.at("eta").get<double>();
      p.init_threshold_max = pj.value("init_threshold_max", 1.0);
      auto w = n.at("weights").get<std::vector<double>>();
      auto th = n.at("thresholds").get<std::vector<double>>();
      if (w.size() != p.n_features * p.dim() || th.size() != p.n_features) {
        throw ShapeMismatchError("features: weight/threshold sizes disagree with n_features");
      }
      nets[ch == "on" ? 0 : 1].emplace(p, std::move(w), std::move(th));
    }
    return FeatureExtractor(s, std::move(nets[0]), std::move(nets[1]));
  } catch (const json::exception& e) {
    throw MalformedStreamError(std::string("features: ") + e.what());
  }
}

void save_features(const std::filesystem::path& path, const FeatureExtractor& ex,
                   const std::string& config_hash) {
  write_text_file(path, features_to_json(ex, config_hash));
}

FeatureExtractor load_features(const std::filesystem::path& path) {
  return features_from_json(read_text_file(path));
}

void write_monitor_csv(std::ostream& os, const MonitorLog& log, const std::string& config_hash) {
  os << "# config_hash=" << config_hash << " period=" << log.period << '\n';
  os << "event_index,d_weights,d_thresholds,missed_rate,spike_rate_std\n";
  for (const auto& s : log.samples) {
    os << s.event_index << ',' << format_double(s.d_weights) << ','
       << format_double(s.d_thresholds) << ',' << format_double(s.missed_rate) << ','
       << format_double(s.spike_rate_std) << '\n';
  }
}

void write_feature_events_csv(std::ostream& os, std::span<const LabelledEvents> recs) {
  os << "recording,label,channel,feature,t\n";
  for (const auto& r : recs) {
    for (const auto& e : r.events) {
      os << r.recording << ',' << r.label << ',' << channel_name(e.channel) << ',' << e.feature
         << ',' << e.t << '\n';
    }
  }
}

void write_frame_csv(std::ostream& os, const Frame& f) {
  os << "x,y,value\n";
  for (int y = 0; y < f.height; ++y) {
    for (int x = 0; x < f.width; ++x) os << x << ',' << y << ',' << format_double(f.at(x, y)) << '\n';
  }
}

void write_weights_csv(std::ostream& os, const FeastNetwork& net) {
  const int w = net.params().roi_w;
  os << "feature,row,col,weight\n";
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto row = net.weights(i);
    for (int r = 0; r < w; ++r) {
      for (int c = 0; c < w; ++c) {
        os << i << ',' << r << ',' << c << ',' << format_double(row[std::size_t(r * w + c)]) << '\n';
      }
    }
  }
}

void write_feature_grid_csv(std::ostream& os, const FeastNetwork& net, std::size_t feature) {
  if (feature >= net.size()) throw OutOfRangeError("feature index out of range");
  const int w = net.params().roi_w;
  const auto row = net.weights(feature);
  for (int r = 0; r < w; ++r) {
    for (int c = 0; c < w; ++c) {
      if (c) os << ',';
      os << format_double(row[std::size_t(r * w + c)]);
    }
    os << '\n';
  }
}

namespace {

json evaluation_json(const Evaluation& e) {
  return {{"accuracy", e.accuracy},
          {"n_classes", e.n_classes},
          {"confusion", e.confusion},
          {"precision", e.precision},
          {"recall", e.recall}};
}

}  // namespace

std::string evaluation_to_json(const Evaluation& per_frame, const Evaluation& per_recording,
                               const std::string& config_hash) {
  json j;
  j["config_hash"] = config_hash;
  j["per_frame"] = evaluation_json(per_frame);
  j["per_recording"] = evaluation_json(per_recording);
  return j.dump(1);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path.string() + "' for writing");
  os << text;
  if (!os) throw Error("write failed for '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace feast
