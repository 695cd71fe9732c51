#include "feast/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "feast/error.hpp"

namespace feast {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(std::string(key), "cannot parse '" + std::string(v) + "' as a number");
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}
template <typename T>
std::string fmt_int(T v) {
  return std::to_string(v);
}

std::string to_string(Kernel k) { return k == Kernel::Exponential ? "exponential" : "fixed"; }

struct Field {
  const char* key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, std::string_view key, std::string_view)> set;
};

#define FEAST_FIELD_DOUBLE(KEY, EXPR)                                                        \
  Field {                                                                                    \
    KEY, [](const ExperimentConfig& c) { return fmt(c.EXPR); },                               \
        [](ExperimentConfig& c, std::string_view k, std::string_view v) {                    \
          c.EXPR = parse_number<double>(k, v);                                               \
        }                                                                                    \
  }
#define FEAST_FIELD_INT(KEY, EXPR)                                                           \
  Field {                                                                                    \
    KEY, [](const ExperimentConfig& c) { return fmt_int(c.EXPR); },                           \
        [](ExperimentConfig& c, std::string_view k, std::string_view v) {                    \
          c.EXPR = parse_number<std::remove_reference_t<decltype(c.EXPR)>>(k, v);            \
        }                                                                                    \
  }
#define FEAST_FIELD_STRING(KEY, EXPR)                                                        \
  Field {                                                                                    \
    KEY, [](const ExperimentConfig& c) { return c.EXPR; },                                    \
        [](ExperimentConfig& c, std::string_view, std::string_view v) { c.EXPR = std::string(v); } \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      FEAST_FIELD_STRING("dataset.kind", dataset.kind),
      FEAST_FIELD_STRING("dataset.path", dataset.path),
      FEAST_FIELD_INT("dataset.train_count", dataset.train_count),
      FEAST_FIELD_INT("dataset.test_count", dataset.test_count),
      FEAST_FIELD_INT("synth.width", synth.width),
      FEAST_FIELD_INT("synth.height", synth.height),
      FEAST_FIELD_STRING("synth.shapes", synth.shapes),
      FEAST_FIELD_DOUBLE("synth.velocity_min", synth.velocity_min),
      FEAST_FIELD_DOUBLE("synth.velocity_max", synth.velocity_max),
      FEAST_FIELD_INT("synth.duration_us", synth.duration_us),
      FEAST_FIELD_DOUBLE("synth.noise_rate", synth.noise_rate),
      FEAST_FIELD_INT("synth.gap_us", synth.gap_us),
      FEAST_FIELD_DOUBLE("synth.direction_jitter_deg", synth.direction_jitter_deg),
      FEAST_FIELD_DOUBLE("synth.offset_jitter", synth.offset_jitter),
      FEAST_FIELD_INT("synth.lead_us", synth.lead_us),
      FEAST_FIELD_INT("synth.train_per_class", synth.train_per_class),
      FEAST_FIELD_INT("synth.test_per_class", synth.test_per_class),
      FEAST_FIELD_INT("synth.seed", synth.seed),
      FEAST_FIELD_DOUBLE("surface.tau_us", surface.tau_us),
      Field{"surface.kernel", [](const ExperimentConfig& c) { return to_string(c.surface.kernel); },
            [](ExperimentConfig& c, std::string_view k, std::string_view v) {
              if (v == "exponential") c.surface.kernel = Kernel::Exponential;
              else if (v == "fixed") c.surface.kernel = Kernel::FixedWindow;
              else throw ConfigError(std::string(k), "expected exponential or fixed");
            }},
      FEAST_FIELD_INT("surface.roi_w", surface.roi_w),
      FEAST_FIELD_STRING("feast.channels", feast.channels),
      FEAST_FIELD_INT("feast.n_features", feast.params.n_features),
      FEAST_FIELD_DOUBLE("feast.delta_dec", feast.params.delta_dec),
      FEAST_FIELD_DOUBLE("feast.delta_inc", feast.params.delta_inc),
      FEAST_FIELD_DOUBLE("feast.eta", feast.params.eta),
      FEAST_FIELD_DOUBLE("feast.init_threshold_max", feast.params.init_threshold_max),
      FEAST_FIELD_INT("feast.epochs", feast.epochs),
      FEAST_FIELD_INT("feast.seed", feast.seed),
      FEAST_FIELD_STRING("classify.type", classify.type),
      FEAST_FIELD_STRING("classify.input", classify.input),
      FEAST_FIELD_INT("classify.hidden", classify.hidden),
      FEAST_FIELD_DOUBLE("classify.lambda", classify.lambda),
      FEAST_FIELD_INT("classify.window_us", classify.window_us),
      FEAST_FIELD_INT("classify.bin_us", classify.bin_us),
      FEAST_FIELD_INT("classify.bins", classify.bins),
      FEAST_FIELD_INT("classify.seed", classify.seed),
      FEAST_FIELD_INT("monitor.period", monitor.period),
      FEAST_FIELD_INT("monitor.window_k", monitor.window_k),
      FEAST_FIELD_DOUBLE("monitor.epsilon_rel", monitor.epsilon_rel),
      FEAST_FIELD_DOUBLE("sizing.center_energy_frac", sizing.criterion.center_energy_frac),
      FEAST_FIELD_STRING("sizing.sizes", sizing.sizes),
      FEAST_FIELD_INT("sizing.trials", sizing.trials),
      FEAST_FIELD_DOUBLE("sizing.target_min", sizing.target_min),
      FEAST_FIELD_DOUBLE("sizing.target_max", sizing.target_max),
  };
  return table;
}

#undef FEAST_FIELD_DOUBLE
#undef FEAST_FIELD_INT
#undef FEAST_FIELD_STRING

void require(bool ok, const char* key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

}  // namespace

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  for (const auto& f : fields()) {
    if (key == f.key) {
      f.set(*this, key, trim(value));
      return;
    }
  }
  throw ConfigError(std::string(key), "unknown key");
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig c;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
    }
    c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void ExperimentConfig::validate() const {
  require(dataset.kind == "synth" || dataset.kind == "nmnist", "dataset.kind",
          "expected synth or nmnist");
  if (dataset.kind == "nmnist") {
    require(!dataset.path.empty(), "dataset.path", "required for nmnist");
    require(std::filesystem::is_directory(dataset.path), "dataset.path",
            "directory does not exist: " + dataset.path);
  }
  try {
    shape_list();
  } catch (const Error& e) {
    throw ConfigError("synth.shapes", e.what());
  }
  require(synth.width > 0 && synth.height > 0, "synth.width", "sensor must be non-empty");
  require(synth.velocity_min > 0.0, "synth.velocity_min", "must be positive");
  require(synth.velocity_max >= synth.velocity_min, "synth.velocity_max",
          "must be at least velocity_min");
  require(synth.noise_rate >= 0.0, "synth.noise_rate", "must be non-negative");
  require(synth.duration_us > 0, "synth.duration_us", "must be positive");
  require(surface.tau_us > 0.0, "surface.tau_us", "must be positive");
  require(surface.roi_w > 0 && surface.roi_w % 2 == 1, "surface.roi_w", "must be odd and positive");
  require(feast.channels == "on" || feast.channels == "off" || feast.channels == "both",
          "feast.channels", "expected on, off or both");
  require(feast.params.n_features >= 1, "feast.n_features", "must be at least 1");
  require(feast.params.delta_dec > 0.0, "feast.delta_dec", "must be positive");
  require(feast.params.delta_inc > 0.0, "feast.delta_inc", "must be positive");
  require(feast.params.eta > 0.0 && feast.params.eta < 1.0, "feast.eta", "must lie in (0, 1)");
  require(feast.params.init_threshold_max >= 0.0 && feast.params.init_threshold_max <= 2.0,
          "feast.init_threshold_max", "must lie in [0, 2]");
  require(feast.epochs >= 1, "feast.epochs", "must be at least 1");
  require(classify.type == "linear" || classify.type == "elm", "classify.type",
          "expected linear or elm");
  require(classify.input == "pooled" || classify.input == "timebins", "classify.input",
          "expected pooled or timebins");
  require(!(classify.input == "timebins" && classify.type == "linear"), "classify.input",
          "timebins input requires classify.type = elm");
  require(classify.hidden >= 1, "classify.hidden", "must be at least 1");
  require(classify.lambda > 0.0, "classify.lambda", "must be positive");
  require(classify.window_us >= 0, "classify.window_us", "must be non-negative");
  require(classify.bin_us > 0, "classify.bin_us", "must be positive");
  require(classify.bins >= 1, "classify.bins", "must be at least 1");
  require(monitor.period >= 1, "monitor.period", "must be at least 1");
  require(monitor.window_k >= 2, "monitor.window_k", "must be at least 2");
  require(monitor.epsilon_rel > 0.0, "monitor.epsilon_rel", "must be positive");
  require(sizing.criterion.center_energy_frac > 0.0 && sizing.criterion.center_energy_frac < 1.0,
          "sizing.center_energy_frac", "must lie in (0, 1)");
  const auto sizes = size_list();
  require(!sizes.empty(), "sizing.sizes", "needs at least one size");
  require(std::is_sorted(sizes.begin(), sizes.end()) && sizes.front() >= 1, "sizing.sizes",
          "must be positive and ascending");
  require(sizing.trials >= 1, "sizing.trials", "must be at least 1");
  require(sizing.target_min <= sizing.target_max, "sizing.target_max",
          "must be at least target_min");
}

std::string ExperimentConfig::canonical() const {
  std::string out;
  for (const auto& f : fields()) {
    out += f.key;
    out += " = ";
    out += f.get(*this);
    out += '\n';
  }
  return out;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(canonical()); }

std::vector<ShapeSpec> ExperimentConfig::shape_list() const { return parse_shape_list(synth.shapes); }

std::vector<std::size_t> ExperimentConfig::size_list() const {
  std::vector<std::size_t> out;
  std::string_view s = sizing.sizes;
  while (!trim(s).empty()) {
    const auto comma = s.find(',');
    out.push_back(parse_number<std::size_t>("sizing.sizes", trim(s.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

SynthParams ExperimentConfig::synth_params() const {
  SynthParams p;
  p.width = synth.width;
  p.height = synth.height;
  p.shapes = shape_list();
  p.velocity_min = synth.velocity_min;
  p.velocity_max = synth.velocity_max;
  p.duration_us = synth.duration_us;
  p.noise_rate_hz = synth.noise_rate;
  p.gap_us = synth.gap_us;
  p.direction_jitter_deg = synth.direction_jitter_deg;
  p.offset_jitter = synth.offset_jitter;
  p.seed = synth.seed;
  return p;
}

std::vector<std::pair<std::string, std::string>> config_defaults() {
  const ExperimentConfig c;
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.key, f.get(c));
  return out;
}

}  // namespace feast
