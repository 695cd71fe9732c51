// feast: command-line front end for training, monitoring, inference,
// evaluation and the sizing / Gini studies.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "feast/config.hpp"
#include "feast/dataset.hpp"
#include "feast/error.hpp"
#include "feast/experiment.hpp"
#include "feast/io.hpp"
#include "feast/nmnist.hpp"
#include "feast/synth.hpp"

namespace fs = std::filesystem;
using namespace feast;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "key = value config file");
  cmd->add_option("--set", c.overrides, "override a config key (key=value), repeatable");
  cmd->add_option("--seed", c.seed, "master seed: sets feast.seed, synth.seed and classify.seed");
  cmd->add_option("--out", c.out, "output path (stdout or . when omitted)");
}

ExperimentConfig build_config(const Common& c) {
  ExperimentConfig cfg = c.config_path.empty() ? ExperimentConfig{} : ExperimentConfig::load(c.config_path);
  for (const auto& kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError(kv, "expected key=value");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (c.seed) {
    cfg.feast.seed = *c.seed;
    cfg.synth.seed = *c.seed;
    cfg.classify.seed = *c.seed;
  }
  cfg.validate();
  return cfg;
}

// Writes to the file named by `out`, or stdout when it is empty.
void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
}

fs::path out_dir(const std::string& out) {
  fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
  fs::create_directories(dir);
  return dir;
}

std::string monitor_text(const TrainOutcome& t, const ExperimentConfig& cfg, Channel c) {
  std::ostringstream os;
  const auto& log = *t.logs[static_cast<std::size_t>(c)];
  write_monitor_csv(os, log, cfg.hash());
  return os.str();
}

int cmd_train(const Common& c, bool untrained) {
  const auto cfg = build_config(c);
  const fs::path dir = out_dir(c.out);
  if (untrained) {
    save_features(dir / "features.json", make_extractor(cfg), cfg.hash());
    return 0;
  }
  Dataset ds = load_dataset(cfg);
  const TrainOutcome t = run_train(cfg, ds);
  save_features(dir / "features.json", t.extractor, cfg.hash());
  for (Channel ch : {Channel::On, Channel::Off}) {
    if (!t.logs[static_cast<std::size_t>(ch)]) continue;
    write_text_file(dir / (ch == Channel::On ? "monitor_on.csv" : "monitor_off.csv"),
                    monitor_text(t, cfg, ch));
  }
  return 0;
}

int cmd_monitor(const Common& c) {
  const auto cfg = build_config(c);
  Dataset ds = load_dataset(cfg);
  const TrainOutcome t = run_train(cfg, ds);
  const Channel ch = t.logs[0] ? Channel::On : Channel::Off;
  std::string text = monitor_text(t, cfg, ch);
  const auto conv = detect_convergence(*t.logs[static_cast<std::size_t>(ch)], cfg.monitor.window_k,
                                       cfg.monitor.epsilon_rel);
  std::cerr << "convergence: "
            << (conv ? "sample " + std::to_string(conv->sample) + " event " +
                           std::to_string(conv->event_index)
                     : std::string("not reached"))
            << '\n';
  emit(c.out, text);
  return 0;
}

int cmd_infer(const Common& c, const std::string& features, const std::string& split) {
  const auto cfg = build_config(c);
  const FeatureExtractor ex = load_features(features);
  Dataset ds = load_dataset(cfg);
  const auto& recs = split == "train" ? ds.train : ds.test;
  const auto events = infer_recordings(ex, recs);
  std::vector<LabelledEvents> rows;
  for (std::size_t i = 0; i < recs.size(); ++i) rows.push_back({recs[i].id, recs[i].label, events[i]});
  std::ostringstream os;
  os << "# config_hash=" << cfg.hash() << '\n';
  write_feature_events_csv(os, rows);
  emit(c.out, os.str());
  return 0;
}

int cmd_evaluate(const Common& c, const std::string& features) {
  const auto cfg = build_config(c);
  Dataset ds = load_dataset(cfg);
  materialize(ds);
  const FeatureExtractor ex = features.empty() ? run_train(cfg, ds).extractor : load_features(features);
  const EvalOutcome ev = run_evaluate(cfg, ds, ex);
  auto j = nlohmann::json::parse(evaluation_to_json(ev.per_frame, ev.per_recording, cfg.hash()));
  j["gini"] = ev.gini ? nlohmann::json(*ev.gini) : nlohmann::json(nullptr);
  j["test_counts"] = ev.test_counts;
  j["train_samples"] = ev.train_samples;
  j["test_samples"] = ev.test_samples;
  emit(c.out, j.dump(1) + "\n");
  return 0;
}

int cmd_size_sweep(Common c, const std::string& sizes, std::optional<std::size_t> trials) {
  if (!sizes.empty()) c.overrides.push_back("sizing.sizes=" + sizes);
  if (trials) c.overrides.push_back("sizing.trials=" + std::to_string(*trials));
  const auto cfg = build_config(c);
  Dataset ds = load_dataset(cfg);
  materialize(ds);
  const SizeSweepResult r = run_size_sweep(cfg, ds);
  std::ostringstream os;
  os << "# config_hash=" << cfg.hash() << " chosen=" << r.chosen << " flag=" << to_string(r.flag)
     << '\n';
  os << "size,mean_noise,min_noise,max_noise,chosen\n";
  for (const auto& s : r.sizes) {
    os << s.size << ',' << format_double(s.mean_noise) << ',' << s.min_noise << ',' << s.max_noise
       << ',' << (s.size == r.chosen ? 1 : 0) << '\n';
  }
  emit(c.out, os.str());
  return 0;
}

int cmd_gini_study(const Common& c, std::size_t n, std::uint64_t study_seed) {
  const auto cfg = build_config(c);
  Dataset ds = load_dataset(cfg);
  materialize(ds);
  const auto rows = run_gini_study(cfg, ds, n, study_seed);
  std::vector<double> g, a;
  std::ostringstream os;
  os << "# config_hash=" << cfg.hash() << " study_seed=" << study_seed << '\n';
  os << "index,config_hash,roi_w,n_features,delta_dec,delta_inc,eta,tau_us,train_recordings,gini,"
        "accuracy\n";
  for (const auto& r : rows) {
    os << r.index << ',' << r.config_hash << ',' << r.roi_w << ',' << r.n_features << ','
       << format_double(r.delta_dec) << ',' << format_double(r.delta_inc) << ','
       << format_double(r.eta) << ',' << format_double(r.tau_us) << ',' << r.train_recordings << ','
       << format_double(r.gini) << ',' << format_double(r.accuracy) << '\n';
    g.push_back(r.gini);
    a.push_back(r.accuracy);
  }
  if (rows.size() >= 2) std::cerr << "spearman(gini, accuracy) = " << spearman(g, a) << '\n';
  emit(c.out, os.str());
  return 0;
}

EventStream read_stream(const std::string& input, const ExperimentConfig& cfg) {
  if (!input.empty()) return read_nmnist_file(input);
  return synth_pattern_stream(cfg.synth_params());
}

int cmd_dump_surface(const Common& c, const std::string& input, Timestamp at,
                     const std::string& channel) {
  const auto cfg = build_config(c);
  const EventStream s = read_stream(input, cfg);
  SurfaceState st(s.width, s.height);
  for (const auto& e : s.events) {
    if (e.t > at) break;
    st.update(e);
  }
  const Channel ch = channel == "off" ? Channel::Off : Channel::On;
  const Frame f = cfg.surface.kernel == Kernel::Exponential
                      ? sample_exponential(st, ch, at, cfg.surface.tau_us)
                      : sample_fixed_window(st, ch, at, cfg.surface.tau_us);
  std::ostringstream os;
  write_frame_csv(os, f);
  emit(c.out, os.str());
  return 0;
}

int cmd_dump_features(const Common& c, const std::string& features) {
  const FeatureExtractor ex = load_features(features);
  const fs::path dir = out_dir(c.out);
  for (Channel ch : {Channel::On, Channel::Off}) {
    if (!ex.has(ch)) continue;
    const auto& net = ex.network(ch);
    const std::string tag = ch == Channel::On ? "on" : "off";
    for (std::size_t i = 0; i < net.size(); ++i) {
      std::ostringstream os;
      write_feature_grid_csv(os, net, i);
      write_text_file(dir / ("feature_" + tag + "_" + std::to_string(i) + ".csv"), os.str());
    }
    std::ostringstream all;
    write_weights_csv(all, net);
    write_text_file(dir / ("weights_" + tag + ".csv"), all.str());
  }
  return 0;
}

int cmd_synth(const Common& c) {
  const auto cfg = build_config(c);
  const EventStream s = synth_pattern_stream(cfg.synth_params());
  if (c.out.empty()) throw ParameterError("synth: --out is required");
  write_nmnist_file(c.out, s);
  return 0;
}

int cmd_defaults() {
  for (const auto& [k, v] : config_defaults()) std::cout << k << " = " << v << '\n';
  return 0;
}

std::string json_error(const char* type, const std::string& message, const std::string& key = {}) {
  nlohmann::json j{{"error", type}, {"message", message}};
  if (!key.empty()) j["key"] = key;
  return j.dump();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FEAST event-based feature extraction"};
  app.require_subcommand(1);

  Common common;
  bool untrained = false;
  std::string features, split = "test", input, channel = "on", sizes;
  std::optional<std::size_t> trials;
  std::size_t n_configs = 30;
  std::uint64_t study_seed = 1;
  Timestamp at = 0;

  auto* train = app.add_subcommand("train", "train feature networks; writes features.json and monitor CSVs");
  add_common(train, common);
  train->add_flag("--untrained", untrained, "write randomly initialised features without training");

  auto* monitor = app.add_subcommand("monitor", "train and emit the convergence-signal CSV");
  add_common(monitor, common);

  auto* infer = app.add_subcommand("infer", "feature events for a dataset split");
  add_common(infer, common);
  infer->add_option("--features", features, "feature file")->required();
  infer->add_option("--split", split, "train | test")->check(CLI::IsMember({"train", "test"}));

  auto* evaluate = app.add_subcommand("evaluate", "classification accuracy, confusion and Gini as JSON");
  add_common(evaluate, common);
  evaluate->add_option("--features", features, "feature file (trains from the config when omitted)");

  auto* sweep = app.add_subcommand("size-sweep", "noise-feature count per network size");
  add_common(sweep, common);
  sweep->add_option("--sizes", sizes, "comma-separated candidate sizes");
  sweep->add_option("--trials", trials, "trials per size");

  auto* study = app.add_subcommand("gini-study", "Gini and accuracy over random configurations");
  add_common(study, common);
  study->add_option("--configs", n_configs, "number of random configurations");
  study->add_option("--study-seed", study_seed, "seed of the configuration sampler");

  auto* dump_surface = app.add_subcommand("dump-surface", "sampled time surface as CSV");
  add_common(dump_surface, common);
  dump_surface->add_option("--input", input, "N-MNIST .bin file (synthetic stream when omitted)");
  dump_surface->add_option("--at", at, "sample time, us")->required();
  dump_surface->add_option("--channel", channel, "on | off")->check(CLI::IsMember({"on", "off"}));

  auto* dump_features = app.add_subcommand("dump-features", "one CSV grid per feature");
  add_common(dump_features, common);
  dump_features->add_option("--features", features, "feature file")->required();

  auto* synth = app.add_subcommand("synth", "write the configured synthetic stream in N-MNIST format");
  add_common(synth, common);

  auto* defaults = app.add_subcommand("defaults", "print every config key with its default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << json_error("usage", e.what()) << '\n';
    return 2;
  }

  try {
    if (*train) return cmd_train(common, untrained);
    if (*monitor) return cmd_monitor(common);
    if (*infer) return cmd_infer(common, features, split);
    if (*evaluate) return cmd_evaluate(common, features);
    if (*sweep) return cmd_size_sweep(common, sizes, trials);
    if (*study) return cmd_gini_study(common, n_configs, study_seed);
    if (*dump_surface) return cmd_dump_surface(common, input, at, channel);
    if (*dump_features) return cmd_dump_features(common, features);
    if (*synth) return cmd_synth(common);
    if (*defaults) return cmd_defaults();
  } catch (const ConfigError& e) {
    std::cerr << json_error("config", e.what(), e.key()) << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << json_error("runtime", e.what()) << '\n';
    return 1;
  }
  return 0;
}
