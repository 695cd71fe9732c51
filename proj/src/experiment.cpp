#include "feast/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "feast/error.hpp"

namespace feast {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

FeastParams feast_params(const ExperimentConfig& c) {
  FeastParams p = c.feast.params;
  p.roi_w = c.surface.roi_w;
  return p;
}

bool wants(const ExperimentConfig& c, Channel ch) {
  const auto& s = c.feast.channels;
  return s == "both" || (ch == Channel::On ? s == "on" : s == "off");
}

struct Samples {
  Eigen::MatrixXd X;
  std::vector<int> y;
  std::vector<std::size_t> recording;
};

Samples pooled_samples(const ExperimentConfig& c, const FeatureLayout& layout,
                       std::span<const Recording> recs,
                       const std::vector<std::vector<FeatureEvent>>& events) {
  std::vector<PooledVector> all;
  for (std::size_t r = 0; r < recs.size(); ++r) {
    const auto stream = recs[r].get();
    const Timestamp end = std::max<Timestamp>(stream->end_time(), 1);
    const Timestamp window = c.classify.window_us > 0 ? c.classify.window_us : end;
    auto v = pool_window(events[r], layout, window, 0, end, recs[r].label, r);
    std::move(v.begin(), v.end(), std::back_inserter(all));
  }
  Samples s;
  s.X.resize(static_cast<Eigen::Index>(all.size()), static_cast<Eigen::Index>(layout.total()));
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t f = 0; f < layout.total(); ++f) {
      s.X(Eigen::Index(i), Eigen::Index(f)) = all[i].counts[f];
    }
    s.y.push_back(all[i].label);
    s.recording.push_back(all[i].recording);
  }
  return s;
}

std::vector<double> flatten(const TimeBinMatrix& m, double gain) {
  std::vector<double> x(m.counts.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = gain * m.counts[i];
  return x;
}

std::vector<int> vote_per_recording(std::span<const int> frame_pred,
                                    std::span<const std::size_t> frame_rec,
                                    std::size_t n_recordings) {
  std::vector<std::vector<int>> per(n_recordings);
  for (std::size_t i = 0; i < frame_pred.size(); ++i) per[frame_rec[i]].push_back(frame_pred[i]);
  std::vector<int> out(n_recordings, 0);
  for (std::size_t r = 0; r < n_recordings; ++r) {
    if (!per[r].empty()) out[r] = majority_vote(per[r]);
  }
  return out;
}

std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

}  // namespace

FeatureExtractor make_extractor(const ExperimentConfig& c) {
  const FeastParams p = feast_params(c);
  std::optional<FeastNetwork> on, off;
  if (wants(c, Channel::On)) on = init_network(p, mix(c.feast.seed));
  if (wants(c, Channel::Off)) off = init_network(p, mix(c.feast.seed ^ 0x4F4646ull));
  return FeatureExtractor(c.surface, std::move(on), std::move(off));
}

TrainOutcome run_train(const ExperimentConfig& c, const Dataset& ds, std::size_t max_recordings) {
  TrainOutcome out{make_extractor(c), {}, 0, 0};
  Trainer trainer(out.extractor, c.monitor.period);
  const std::size_t n = std::min(max_recordings, ds.train.size());
  for (std::size_t epoch = 0; epoch < c.feast.epochs; ++epoch) {
    for (std::size_t r = 0; r < n; ++r) trainer.train(*ds.train[r].get());
  }
  for (Channel ch : {Channel::On, Channel::Off}) {
    if (!out.extractor.has(ch)) continue;
    const auto& m = trainer.monitor(ch);
    out.logs[static_cast<std::size_t>(ch)] = m.log();
    out.events += m.events();
    out.misses += m.misses();
  }
  return out;
}

std::vector<std::vector<FeatureEvent>> infer_recordings(const FeatureExtractor& ex,
                                                        std::span<const Recording> recs) {
  std::vector<std::vector<FeatureEvent>> out;
  out.reserve(recs.size());
  for (const auto& r : recs) out.push_back(infer_stream(ex, *r.get()));
  return out;
}

EvalOutcome run_evaluate(const ExperimentConfig& c, const Dataset& ds, const FeatureExtractor& ex) {
  if (ds.train.empty() || ds.test.empty()) throw Error("evaluate: dataset split is empty");
  const FeatureLayout layout = ex.layout();
  const auto train_events = infer_recordings(ex, ds.train);
  const auto test_events = infer_recordings(ex, ds.test);
  const int K = ds.n_classes;

  EvalOutcome out;
  std::vector<std::uint64_t> counts(layout.total(), 0);
  for (const auto& ev : test_events) {
    const auto cnt = feature_counts(ev, layout);
    for (std::size_t i = 0; i < cnt.size(); ++i) counts[i] += cnt[i];
  }
  out.test_counts = counts;
  if (std::any_of(counts.begin(), counts.end(), [](auto v) { return v > 0; })) {
    out.gini = gini(std::span<const std::uint64_t>(counts));
  }

  std::vector<int> frame_pred, frame_label;
  std::vector<std::size_t> frame_rec;
  std::vector<int> rec_label;
  for (const auto& r : ds.test) rec_label.push_back(r.label);
  const std::uint64_t order_seed = mix(c.classify.seed ^ 0x5EEDull);

  if (c.classify.input == "pooled") {
    const Samples train = pooled_samples(c, layout, ds.train, train_events);
    const Samples test = pooled_samples(c, layout, ds.test, test_events);
    const Standardizer st = Standardizer::fit(train.X);
    const Eigen::MatrixXd Xtr = st.apply(train.X);
    const Eigen::MatrixXd Xte = st.apply(test.X);
    out.train_samples = train.y.size();
    out.test_samples = test.y.size();
    if (c.classify.type == "linear") {
      const LinearModel m = linear_train(Xtr, train.y, K, c.classify.lambda);
      for (Eigen::Index i = 0; i < Xte.rows(); ++i) {
        const Eigen::VectorXd x = Xte.row(i).transpose();
        frame_pred.push_back(linear_predict(m, std::span<const double>(x.data(), std::size_t(x.size()))));
      }
    } else {
      ElmModel m(std::size_t(Xtr.cols()), c.classify.hidden, K, c.classify.seed, c.classify.lambda);
      for (std::size_t i : shuffled_order(train.y.size(), order_seed)) {
        const Eigen::VectorXd x = Xtr.row(Eigen::Index(i)).transpose();
        m.update(std::span<const double>(x.data(), std::size_t(x.size())), train.y[i]);
      }
      for (Eigen::Index i = 0; i < Xte.rows(); ++i) {
        const Eigen::VectorXd x = Xte.row(i).transpose();
        frame_pred.push_back(m.predict(std::span<const double>(x.data(), std::size_t(x.size()))));
      }
    }
    frame_label = test.y;
    frame_rec = test.recording;
  } else {
    // One time-bin sample per recording, fed to the ELM.
    const std::size_t dim = layout.total() * c.classify.bins;
    double sq = 0.0;
    for (const auto& ev : train_events) {
      const auto m = time_bin_matrix(ev, layout, c.classify.bin_us, c.classify.bins);
      for (auto v : m.counts) sq += double(v) * double(v);
    }
    const double mean_sq = sq / double(train_events.size());
    const double gain = mean_sq > 0.0 ? 1.0 / std::sqrt(mean_sq) : 1.0;
    ElmModel m(dim, c.classify.hidden, K, c.classify.seed, c.classify.lambda);
    for (std::size_t i : shuffled_order(ds.train.size(), order_seed)) {
      const auto x = flatten(time_bin_matrix(train_events[i], layout, c.classify.bin_us, c.classify.bins), gain);
      m.update(x, ds.train[i].label);
    }
    for (std::size_t r = 0; r < ds.test.size(); ++r) {
      const auto x = flatten(time_bin_matrix(test_events[r], layout, c.classify.bin_us, c.classify.bins), gain);
      frame_pred.push_back(m.predict(x));
      frame_label.push_back(ds.test[r].label);
      frame_rec.push_back(r);
    }
    out.train_samples = ds.train.size();
    out.test_samples = ds.test.size();
  }

  out.per_frame = evaluate(frame_pred, frame_label, K);
  out.per_recording = evaluate(vote_per_recording(frame_pred, frame_rec, ds.test.size()), rec_label, K);
  return out;
}

SizeSweepResult run_size_sweep(const ExperimentConfig& c, const Dataset& ds) {
  SizeSweepParams p;
  p.candidates = c.size_list();
  p.target_min = c.sizing.target_min;
  p.target_max = c.sizing.target_max;
  p.trials = c.sizing.trials;
  p.seed = c.feast.seed;
  p.feast = feast_params(c);
  p.surface = c.surface;
  p.channel = c.feast.channels == "off" ? Channel::Off : Channel::On;
  p.criterion = c.sizing.criterion;
  std::vector<EventStream> streams;
  for (const auto& r : ds.train) streams.push_back(*r.get());
  return size_sweep(streams, p);
}

std::vector<GiniStudyRow> run_gini_study(const ExperimentConfig& base, const Dataset& ds,
                                         std::size_t n, std::uint64_t seed) {
  std::vector<GiniStudyRow> rows;
  for (std::size_t i = 0; i < n; ++i) {
    std::mt19937_64 rng(mix(seed ^ mix(i + 1)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto log_uniform = [&](double lo, double hi) {
      return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * unit(rng));
    };
    ExperimentConfig c = base;
    static constexpr int kRoi[] = {3, 5, 7, 9, 11};
    c.surface.roi_w = kRoi[std::uniform_int_distribution<int>(0, 4)(rng)];
    c.feast.params.delta_dec = log_uniform(1e-4, 1e-2);
    c.feast.params.delta_inc = c.feast.params.delta_dec * log_uniform(1.0, 10.0);
    c.feast.params.eta = log_uniform(1e-4, 5e-2);
    c.surface.tau_us = log_uniform(500.0, 50'000.0);
    c.feast.seed = mix(seed + 7919 * (i + 1));
    const std::size_t n_train = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(log_uniform(0.02, 1.0) * double(ds.train.size()))));

    const TrainOutcome trained = run_train(c, ds, n_train);
    const EvalOutcome ev = run_evaluate(c, ds, trained.extractor);

    GiniStudyRow row;
    row.index = i;
    row.config_hash = c.hash();
    row.roi_w = c.surface.roi_w;
    row.n_features = c.feast.params.n_features;
    row.delta_dec = c.feast.params.delta_dec;
    row.delta_inc = c.feast.params.delta_inc;
    row.eta = c.feast.params.eta;
    row.tau_us = c.surface.tau_us;
    row.train_recordings = n_train;
    row.gini = ev.gini.value_or(1.0);
    row.accuracy = ev.per_frame.accuracy;
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (double(i) + double(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ParameterError("spearman: need two equal-length samples of size >= 2");
  }
  const auto rx = ranks(x), ry = ranks(y);
  const double n = double(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace feast
