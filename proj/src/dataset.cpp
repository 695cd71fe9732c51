#include "feast/dataset.hpp"

#include <algorithm>

#include "feast/error.hpp"
#include "feast/nmnist.hpp"
#include "feast/synth.hpp"

namespace feast {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::vector<Recording> synth_split(const ExperimentConfig& config, std::size_t per_class,
                                   std::uint64_t split) {
  const SynthParams base = config.synth_params();
  const Timestamp lead = config.synth.lead_us;
  std::vector<Recording> out;
  for (std::size_t i = 0; i < per_class; ++i) {
    for (std::size_t c = 0; c < base.shapes.size(); ++c) {
      SynthParams p = base;
      p.seed = mix(mix(mix(base.seed) ^ split) ^ (c * 0x100000001ull + i));
      Recording r;
      r.id = (split == 0 ? "train/" : "test/") + std::to_string(c) + "/" + std::to_string(i);
      r.label = static_cast<int>(c);
      r.loader = [p, c, lead] { return synth_single_sweep(p, c, lead).stream; };
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<Recording> nmnist_split(const std::filesystem::path& dir, std::size_t count) {
  std::vector<std::vector<std::filesystem::path>> per_digit(10);
  for (int d = 0; d < 10; ++d) {
    const auto sub = dir / std::to_string(d);
    if (!std::filesystem::is_directory(sub)) continue;
    for (const auto& entry : std::filesystem::directory_iterator(sub)) {
      if (entry.path().extension() == ".bin") per_digit[d].push_back(entry.path());
    }
    std::sort(per_digit[d].begin(), per_digit[d].end());
  }
  std::vector<Recording> out;
  for (std::size_t i = 0; out.size() < count; ++i) {
    bool any = false;
    for (int d = 0; d < 10 && out.size() < count; ++d) {
      if (i >= per_digit[d].size()) continue;
      any = true;
      Recording r;
      const auto path = per_digit[d][i];
      r.id = path.string();
      r.label = d;
      r.loader = [path] { return read_nmnist_file(path); };
      out.push_back(std::move(r));
    }
    if (!any) break;
  }
  return out;
}

}  // namespace

Dataset make_synth_dataset(const ExperimentConfig& config) {
  Dataset ds;
  ds.n_classes = static_cast<int>(config.shape_list().size());
  if (ds.n_classes == 0) throw ConfigError("synth.shapes", "a dataset needs at least one shape");
  ds.train = synth_split(config, config.synth.train_per_class, 0);
  ds.test = synth_split(config, config.synth.test_per_class, 1);
  return ds;
}

Dataset load_nmnist_dataset(const std::filesystem::path& root, std::size_t train_count,
                            std::size_t test_count) {
  if (!std::filesystem::is_directory(root / "Train") || !std::filesystem::is_directory(root / "Test")) {
    throw Error("N-MNIST root " + root.string() + " must contain Train/ and Test/");
  }
  Dataset ds;
  ds.n_classes = 10;
  ds.train = nmnist_split(root / "Train", train_count);
  ds.test = nmnist_split(root / "Test", test_count);
  return ds;
}

Dataset load_dataset(const ExperimentConfig& config) {
  if (config.dataset.kind == "nmnist") {
    return load_nmnist_dataset(config.dataset.path, config.dataset.train_count,
                               config.dataset.test_count);
  }
  return make_synth_dataset(config);
}

void materialize(Dataset& dataset) {
  for (auto* split : {&dataset.train, &dataset.test}) {
    for (auto& r : *split) {
      if (!r.cache) r.cache = std::make_shared<const EventStream>(r.loader());
    }
  }
}

}  // namespace feast
