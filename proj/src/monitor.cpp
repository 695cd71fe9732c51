#include "feast/monitor.hpp"

#include <cmath>
#include <string>

#include "feast/error.hpp"

namespace feast {

NetworkSnapshot NetworkSnapshot::of(const FeastNetwork& net) {
  return {std::vector<double>(net.weights().begin(), net.weights().end()),
          std::vector<double>(net.thresholds().begin(), net.thresholds().end())};
}

MonitorSample sample_signals(const NetworkSnapshot& previous, const FeastNetwork& current,
                             std::span<const std::uint64_t> window_wins,
                             std::uint64_t window_misses, std::size_t period,
                             std::uint64_t event_index) {
  if (period == 0) throw ParameterError("monitor period must be positive");
  const auto w = current.weights();
  const auto t = current.thresholds();
  if (previous.weights.size() != w.size() || previous.thresholds.size() != t.size() ||
      window_wins.size() != current.size()) {
    throw ShapeMismatchError("monitor snapshot does not match the network shape");
  }
  MonitorSample s;
  s.event_index = event_index;
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double d = w[i] - previous.weights[i];
    acc += d * d;
  }
  s.d_weights = std::sqrt(acc);
  acc = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double d = t[i] - previous.thresholds[i];
    acc += d * d;
  }
  s.d_thresholds = std::sqrt(acc);
  s.missed_rate = double(window_misses) / double(period);

  double mean = 0.0;
  for (auto c : window_wins) mean += double(c);
  mean /= double(window_wins.size());
  double var = 0.0;
  for (auto c : window_wins) var += (double(c) - mean) * (double(c) - mean);
  s.spike_rate_std = std::sqrt(var / double(window_wins.size()));
  return s;
}

MonitorRecorder::MonitorRecorder(const FeastNetwork& net, std::size_t period)
    : snapshot_(NetworkSnapshot::of(net)), window_wins_(net.size(), 0) {
  if (period == 0) throw ParameterError("monitor period must be positive");
  log_.period = period;
}

void MonitorRecorder::record(const MatchResult& m, const FeastNetwork& net) {
  ++events_;
  if (m.win) {
    ++window_wins_[m.feature];
  } else {
    ++window_misses_;
    ++misses_;
  }
  if (events_ % log_.period != 0) return;
  log_.samples.push_back(
      sample_signals(snapshot_, net, window_wins_, window_misses_, log_.period, events_));
  snapshot_ = NetworkSnapshot::of(net);
  std::fill(window_wins_.begin(), window_wins_.end(), 0);
  window_misses_ = 0;
}

double gini(std::span<const double> counts) {
  double total = 0.0;
  for (double x : counts) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw ParameterError("gini: counts must be finite and non-negative");
    }
    total += x;
  }
  if (!(total > 0.0)) throw UndefinedInputError("gini: all counts are zero");
  double pairs = 0.0;
  for (double xi : counts) {
    for (double xj : counts) pairs += std::abs(xi - xj);
  }
  return pairs / (2.0 * double(counts.size()) * total);
}

double gini(std::span<const std::uint64_t> counts) {
  std::vector<double> v(counts.begin(), counts.end());
  return gini(std::span<const double>(v));
}

namespace {

bool stable(const std::vector<MonitorSample>& s, std::size_t begin, std::size_t k,
            double MonitorSample::*field, double eps) {
  const std::size_t half = k / 2;
  double first = 0.0, second = 0.0;
  for (std::size_t i = 0; i < half; ++i) first += s[begin + i].*field;
  for (std::size_t i = half; i < k; ++i) second += s[begin + i].*field;
  const double mean = (first + second) / double(k);
  if (mean == 0.0) return true;
  first /= double(half);
  second /= double(k - half);
  return std::abs(second - first) < eps * std::abs(mean);
}

}  // namespace

std::optional<ConvergencePoint> detect_convergence(const MonitorLog& log, std::size_t window_k,
                                                   double epsilon_rel) {
  if (window_k < 2) throw ParameterError("convergence window must span at least 2 samples");
  const auto& s = log.samples;
  if (s.size() < window_k) return std::nullopt;
  for (std::size_t begin = 0; begin + window_k <= s.size(); ++begin) {
    if (stable(s, begin, window_k, &MonitorSample::d_weights, epsilon_rel) &&
        stable(s, begin, window_k, &MonitorSample::d_thresholds, epsilon_rel) &&
        stable(s, begin, window_k, &MonitorSample::missed_rate, epsilon_rel)) {
      const std::size_t last = begin + window_k - 1;
      return ConvergencePoint{last + 1, s[last].event_index};
    }
  }
  return std::nullopt;
}

}  // namespace feast
