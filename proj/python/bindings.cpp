#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "feast/classify.hpp"
#include "feast/config.hpp"
#include "feast/dataset.hpp"
#include "feast/error.hpp"
#include "feast/experiment.hpp"
#include "feast/extractor.hpp"
#include "feast/io.hpp"
#include "feast/monitor.hpp"
#include "feast/network.hpp"
#include "feast/nmnist.hpp"
#include "feast/sizing.hpp"
#include "feast/surface.hpp"
#include "feast/synth.hpp"

namespace py = pybind11;
using namespace feast;

namespace {

template <class T>
py::array_t<T> to_array(std::span<const T> v) {
  py::array_t<T> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

template <class T>
std::vector<T> to_vector(const py::array_t<T, py::array::c_style | py::array::forcecast>& a) {
  return {a.data(), a.data() + a.size()};
}

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

EventStream stream_from_arrays(py::array_t<std::int64_t, py::array::forcecast> x,
                               py::array_t<std::int64_t, py::array::forcecast> y,
                               py::array_t<std::int64_t, py::array::forcecast> p,
                               py::array_t<std::int64_t, py::array::forcecast> t, int width,
                               int height) {
  const auto n = x.size();
  if (y.size() != n || p.size() != n || t.size() != n) {
    throw ShapeMismatchError("x, y, p and t must have the same length");
  }
  if (width < 1 || height < 1 || width > 65535 || height > 65535) {
    throw ParameterError("width and height must lie in [1, 65535]");
  }
  EventStream s{std::uint16_t(width), std::uint16_t(height), {}};
  s.events.reserve(static_cast<std::size_t>(n));
  auto xs = x.unchecked<1>(), ys = y.unchecked<1>(), ps = p.unchecked<1>(), ts = t.unchecked<1>();
  for (py::ssize_t i = 0; i < n; ++i) {
    if (xs(i) < 0 || xs(i) >= width || ys(i) < 0 || ys(i) >= height) {
      throw OutOfRangeError("event " + std::to_string(i) + " lies outside the sensor");
    }
    if (i > 0 && ts(i) < ts(i - 1)) {
      throw TimeRegressionError("timestamps must be non-decreasing (event " + std::to_string(i) + ")");
    }
    s.events.push_back({std::uint16_t(xs(i)), std::uint16_t(ys(i)),
                        ps(i) > 0 ? Polarity::On : Polarity::Off, ts(i)});
  }
  return s;
}

py::dict stream_arrays(const EventStream& s) {
  const auto n = static_cast<py::ssize_t>(s.size());
  py::array_t<std::uint16_t> x(n), y(n);
  py::array_t<std::int8_t> p(n);
  py::array_t<std::int64_t> t(n);
  for (py::ssize_t i = 0; i < n; ++i) {
    const Event& e = s.events[static_cast<std::size_t>(i)];
    x.mutable_at(i) = e.x;
    y.mutable_at(i) = e.y;
    p.mutable_at(i) = static_cast<std::int8_t>(e.p);
    t.mutable_at(i) = e.t;
  }
  py::dict d;
  d["x"] = x;
  d["y"] = y;
  d["p"] = p;
  d["t"] = t;
  return d;
}

py::dict feature_event_arrays(std::span<const FeatureEvent> events) {
  const auto n = static_cast<py::ssize_t>(events.size());
  py::array_t<std::uint32_t> f(n);
  py::array_t<std::int64_t> t(n);
  py::array_t<std::uint8_t> c(n);
  for (py::ssize_t i = 0; i < n; ++i) {
    const FeatureEvent& e = events[static_cast<std::size_t>(i)];
    f.mutable_at(i) = e.feature;
    t.mutable_at(i) = e.t;
    c.mutable_at(i) = static_cast<std::uint8_t>(e.channel);
  }
  py::dict d;
  d["feature"] = f;
  d["t"] = t;
  d["channel"] = c;
  return d;
}

py::dict monitor_arrays(const MonitorLog& log) {
  const auto n = static_cast<py::ssize_t>(log.samples.size());
  py::array_t<std::uint64_t> idx(n);
  py::array_t<double> dw(n), dt(n), miss(n), sd(n);
  for (py::ssize_t i = 0; i < n; ++i) {
    const MonitorSample& s = log.samples[static_cast<std::size_t>(i)];
    idx.mutable_at(i) = s.event_index;
    dw.mutable_at(i) = s.d_weights;
    dt.mutable_at(i) = s.d_thresholds;
    miss.mutable_at(i) = s.missed_rate;
    sd.mutable_at(i) = s.spike_rate_std;
  }
  py::dict d;
  d["event_index"] = idx;
  d["d_weights"] = dw;
  d["d_thresholds"] = dt;
  d["missed_rate"] = miss;
  d["spike_rate_std"] = sd;
  return d;
}

py::array_t<double> weight_matrix(const FeastNetwork& net) {
  py::array_t<double> out({static_cast<py::ssize_t>(net.size()), static_cast<py::ssize_t>(net.dim())});
  std::copy(net.weights().begin(), net.weights().end(), out.mutable_data());
  return out;
}

py::array_t<double> frame_array(const Frame& f) {
  py::array_t<double> out({static_cast<py::ssize_t>(f.height), static_cast<py::ssize_t>(f.width)});
  std::copy(f.values.begin(), f.values.end(), out.mutable_data());
  return out;
}

py::array_t<double> eigen_matrix(const Eigen::MatrixXd& m) {
  py::array_t<double> out({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.mutable_at(r, c) = m(r, c);
  }
  return out;
}

py::dict evaluation_dict(const Evaluation& e) {
  py::dict d;
  d["accuracy"] = e.accuracy;
  d["n_classes"] = e.n_classes;
  d["confusion"] = e.confusion;
  d["precision"] = e.precision;
  d["recall"] = e.recall;
  return d;
}

std::optional<MonitorLog> log_of(const std::array<std::optional<MonitorLog>, 2>& logs, Channel c) {
  return logs[static_cast<std::size_t>(c)];
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "FEAST event-based feature extraction";

  auto base = py::register_exception<Error>(m, "FeastError", PyExc_RuntimeError);
  py::register_exception<MalformedStreamError>(m, "MalformedStreamError", base.ptr());
  py::register_exception<OutOfRangeError>(m, "OutOfRangeError", base.ptr());
  py::register_exception<TimeRegressionError>(m, "TimeRegressionError", base.ptr());
  py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
  py::register_exception<ShapeMismatchError>(m, "ShapeMismatchError", base.ptr());
  py::register_exception<UndefinedInputError>(m, "UndefinedInputError", base.ptr());
  py::register_exception<InvariantError>(m, "InvariantError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::enum_<Polarity>(m, "Polarity").value("ON", Polarity::On).value("OFF", Polarity::Off);
  py::enum_<Channel>(m, "Channel").value("ON", Channel::On).value("OFF", Channel::Off);
  py::enum_<Kernel>(m, "Kernel")
      .value("EXPONENTIAL", Kernel::Exponential)
      .value("FIXED_WINDOW", Kernel::FixedWindow);

  py::class_<Event>(m, "Event")
      .def(py::init([](int x, int y, Polarity p, Timestamp t) {
             return Event{std::uint16_t(x), std::uint16_t(y), p, t};
           }),
           py::arg("x"), py::arg("y"), py::arg("p"), py::arg("t"))
      .def_readwrite("x", &Event::x)
      .def_readwrite("y", &Event::y)
      .def_readwrite("p", &Event::p)
      .def_readwrite("t", &Event::t)
      .def(py::self == py::self)
      .def("__repr__", [](const Event& e) {
        return "Event(x=" + std::to_string(e.x) + ", y=" + std::to_string(e.y) +
               ", p=" + (e.p == Polarity::On ? "ON" : "OFF") + ", t=" + std::to_string(e.t) + ")";
      });

  py::class_<EventStream>(m, "EventStream")
      .def(py::init([](int w, int h) { return EventStream{std::uint16_t(w), std::uint16_t(h), {}}; }),
           py::arg("width"), py::arg("height"))
      .def_static("from_arrays", &stream_from_arrays, py::arg("x"), py::arg("y"), py::arg("p"),
                  py::arg("t"), py::arg("width"), py::arg("height"))
      .def_readonly("width", &EventStream::width)
      .def_readonly("height", &EventStream::height)
      .def_readwrite("events", &EventStream::events)
      .def("arrays", &stream_arrays, "Columns x, y, p, t as numpy arrays.")
      .def("end_time", &EventStream::end_time)
      .def("is_time_sorted", &EventStream::is_time_sorted)
      .def("__len__", &EventStream::size)
      .def(py::self == py::self);

  m.def("merge_streams", [](const std::vector<EventStream>& s) { return merge_streams(s); });

  m.def("decode_nmnist", [](py::bytes b) {
    const std::string s = b;
    return decode_nmnist(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
  });
  m.def("encode_nmnist", [](const EventStream& s) {
    const auto bytes = encode_nmnist(s);
    return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  });
  m.def("read_nmnist_file", &read_nmnist_file);
  m.def("write_nmnist_file", &write_nmnist_file);

  m.def(
      "synth_patterns",
      [](const std::string& shapes, int width, int height, double velocity_min, double velocity_max,
         Timestamp duration_us, double noise_rate_hz, Timestamp gap_us, double direction_jitter_deg,
         double offset_jitter, std::uint64_t seed) {
        SynthParams p;
        p.width = std::uint16_t(width);
        p.height = std::uint16_t(height);
        p.shapes = parse_shape_list(shapes);
        p.velocity_min = velocity_min;
        p.velocity_max = velocity_max;
        p.duration_us = duration_us;
        p.noise_rate_hz = noise_rate_hz;
        p.gap_us = gap_us;
        p.direction_jitter_deg = direction_jitter_deg;
        p.offset_jitter = offset_jitter;
        p.seed = seed;
        return synth_pattern_stream(p);
      },
      py::arg("shapes"), py::arg("width") = 32, py::arg("height") = 32,
      py::arg("velocity_min") = 1000.0, py::arg("velocity_max") = 3000.0,
      py::arg("duration_us") = 1'000'000, py::arg("noise_rate_hz") = 0.0, py::arg("gap_us") = 20'000,
      py::arg("direction_jitter_deg") = 0.0, py::arg("offset_jitter") = 0.0, py::arg("seed") = 0,
      "Sweeps of moving shapes, e.g. shapes=\"bar@0, square@90\".");
  m.def("synth_noise", &synth_noise, py::arg("width"), py::arg("height"), py::arg("duration_us"),
        py::arg("rate_hz"), py::arg("seed") = 0);

  py::class_<SurfaceParams>(m, "SurfaceParams")
      .def(py::init([](double tau_us, int roi_w, Kernel k) {
             SurfaceParams p{tau_us, roi_w, k};
             p.validate();
             return p;
           }),
           py::arg("tau_us") = 10'000.0, py::arg("roi_w") = 11, py::arg("kernel") = Kernel::Exponential)
      .def_readwrite("tau_us", &SurfaceParams::tau_us)
      .def_readwrite("roi_w", &SurfaceParams::roi_w)
      .def_readwrite("kernel", &SurfaceParams::kernel);

  py::class_<SurfaceState>(m, "SurfaceState")
      .def(py::init<std::uint16_t, std::uint16_t>(), py::arg("width"), py::arg("height"))
      .def("update", &SurfaceState::update)
      .def("reset", &SurfaceState::reset)
      .def("last_t", [](const SurfaceState& s, Channel c) {
        py::array_t<std::int64_t> out({static_cast<py::ssize_t>(s.height()), static_cast<py::ssize_t>(s.width())});
        const auto v = s.channel(c);
        std::copy(v.begin(), v.end(), out.mutable_data());
        return out;
      })
      .def("sample", [](const SurfaceState& s, Channel c, Timestamp t, double tau_us, Kernel k) {
             return frame_array(k == Kernel::Exponential ? sample_exponential(s, c, t, tau_us)
                                                         : sample_fixed_window(s, c, t, tau_us));
           },
           py::arg("channel"), py::arg("t"), py::arg("tau_us") = 10'000.0,
           py::arg("kernel") = Kernel::Exponential)
      .def("descriptor", [](const SurfaceState& s, const Event& e, const SurfaceParams& p) {
             return to_array<double>(extract_descriptor(s, e, p).values);
           },
           "Unit-norm ROI descriptor for an event already applied with update().");

  py::class_<FeastParams>(m, "FeastParams")
      .def(py::init([](std::size_t n, int roi_w, double eta, double delta_inc, double delta_dec,
                       double init_threshold_max) {
             FeastParams p{delta_inc, delta_dec, eta, n, roi_w, init_threshold_max};
             p.validate();
             return p;
           }),
           py::arg("n_features") = 25, py::arg("roi_w") = 11, py::arg("eta") = 0.001,
           py::arg("delta_inc") = 0.003, py::arg("delta_dec") = 0.001,
           py::arg("init_threshold_max") = 1.0)
      .def_readwrite("n_features", &FeastParams::n_features)
      .def_readwrite("roi_w", &FeastParams::roi_w)
      .def_readwrite("eta", &FeastParams::eta)
      .def_readwrite("delta_inc", &FeastParams::delta_inc)
      .def_readwrite("delta_dec", &FeastParams::delta_dec)
      .def_readwrite("init_threshold_max", &FeastParams::init_threshold_max)
      .def_property_readonly("dim", &FeastParams::dim);

  py::class_<MatchResult>(m, "MatchResult")
      .def_readonly("win", &MatchResult::win)
      .def_readonly("feature", &MatchResult::feature)
      .def_readonly("distance", &MatchResult::distance)
      .def("__repr__", [](const MatchResult& r) {
        return r.win ? "MatchResult(win, feature=" + std::to_string(r.feature) + ", distance=" +
                           format_double(r.distance) + ")"
                     : std::string("MatchResult(miss)");
      });

  m.def("cosine_distance", [](DoubleArray a, DoubleArray b) {
    return cosine_distance(to_vector(a), to_vector(b));
  });

  py::class_<FeastNetwork>(m, "FeastNetwork")
      .def(py::init([](const FeastParams& p, DoubleArray w, DoubleArray t) {
             return FeastNetwork(p, to_vector(w), to_vector(t));
           }),
           py::arg("params"), py::arg("weights"), py::arg("thresholds"))
      .def_property_readonly("params", &FeastNetwork::params)
      .def_property_readonly("weights", &weight_matrix)
      .def_property_readonly("thresholds", [](const FeastNetwork& n) { return to_array(n.thresholds()); })
      .def_property_readonly("win_counts", [](const FeastNetwork& n) { return to_array(n.win_counts()); })
      .def("match", [](const FeastNetwork& n, DoubleArray d) { return n.match(to_vector(d)); })
      .def("train_step", [](FeastNetwork& n, DoubleArray d) { return n.train_step(to_vector(d)); })
      .def("nearest", [](const FeastNetwork& n, DoubleArray d) { return n.nearest(to_vector(d)); })
      .def("set_threshold", &FeastNetwork::set_threshold)
      .def("set_weights", [](FeastNetwork& n, std::size_t i, DoubleArray w) { n.set_weights(i, to_vector(w)); })
      .def("reset_win_counts", &FeastNetwork::reset_win_counts)
      .def("__len__", &FeastNetwork::size);
  m.def("init_network", &init_network, py::arg("params"), py::arg("seed") = 0);

  py::class_<FeatureExtractor>(m, "FeatureExtractor")
      .def(py::init<SurfaceParams, std::optional<FeastNetwork>, std::optional<FeastNetwork>>(),
           py::arg("surface"), py::arg("on"), py::arg("off") = std::nullopt)
      .def_property_readonly("surface", &FeatureExtractor::surface)
      .def("has", &FeatureExtractor::has)
      .def("network", py::overload_cast<Channel>(&FeatureExtractor::network),
           py::return_value_policy::reference_internal)
      .def("to_json", [](const FeatureExtractor& e, const std::string& hash) {
        return features_to_json(e, hash);
      }, py::arg("config_hash") = "")
      .def_static("from_json", &features_from_json)
      .def("save", [](const FeatureExtractor& e, const std::filesystem::path& p, const std::string& h) {
        save_features(p, e, h);
      }, py::arg("path"), py::arg("config_hash") = "")
      .def_static("load", &load_features);

  m.def(
      "train_stream",
      [](FeatureExtractor& ex, const EventStream& s, std::size_t period) {
        TrainResult r = train_stream(ex, s, period);
        py::dict logs;
        for (Channel c : {Channel::On, Channel::Off}) {
          if (auto log = log_of(r.logs, c)) logs[c == Channel::On ? "on" : "off"] = monitor_arrays(*log);
        }
        return py::make_tuple(feature_event_arrays(r.events), logs);
      },
      py::arg("extractor"), py::arg("stream"), py::arg("monitor_period") = kDefaultMonitorPeriod,
      "Online training pass. Returns (feature events, monitor signals per channel).");
  m.def(
      "infer_stream",
      [](const FeatureExtractor& ex, const EventStream& s) {
        return feature_event_arrays(infer_stream(ex, s));
      },
      py::arg("extractor"), py::arg("stream"));

  m.def("gini", [](DoubleArray x) { return gini(std::span<const double>(to_vector(x))); });
  m.def(
      "detect_convergence",
      [](py::array_t<std::uint64_t, py::array::forcecast> event_index, DoubleArray d_weights,
         DoubleArray d_thresholds, DoubleArray missed_rate, std::size_t period, std::size_t window_k,
         double epsilon_rel) -> std::optional<std::uint64_t> {
        MonitorLog log{period, {}};
        const auto n = static_cast<std::size_t>(event_index.size());
        if (std::size_t(d_weights.size()) != n || std::size_t(d_thresholds.size()) != n ||
            std::size_t(missed_rate.size()) != n) {
          throw ShapeMismatchError("monitor columns must have the same length");
        }
        for (std::size_t i = 0; i < n; ++i) {
          log.samples.push_back({event_index.at(i), d_weights.at(i), d_thresholds.at(i), missed_rate.at(i), 0.0});
        }
        const auto c = detect_convergence(log, window_k, epsilon_rel);
        if (!c) return std::nullopt;
        return c->event_index;
      },
      py::arg("event_index"), py::arg("d_weights"), py::arg("d_thresholds"), py::arg("missed_rate"),
      py::arg("period") = kDefaultMonitorPeriod, py::arg("window_k") = 50, py::arg("epsilon_rel") = 0.1,
      "Event index at which the monitor signals plateau, or None.");

  m.def("is_noise_feature", [](DoubleArray w, int roi_w, double frac) {
    return is_noise_feature(to_vector(w), roi_w, NoiseCriterion{frac});
  }, py::arg("weights"), py::arg("roi_w"), py::arg("center_energy_frac") = 0.8);
  m.def("count_noise_features", [](const FeastNetwork& n, double frac) {
    return count_noise_features(n, NoiseCriterion{frac});
  }, py::arg("network"), py::arg("center_energy_frac") = 0.8);

  py::class_<ElmModel>(m, "ElmModel")
      .def(py::init<std::size_t, std::size_t, int, std::uint64_t, double>(), py::arg("input_dim"),
           py::arg("hidden"), py::arg("classes"), py::arg("seed") = 0, py::arg("lambda_") = 1e-3)
      .def("update", [](ElmModel& e, DoubleArray x, int y) { e.update(to_vector(x), y); })
      .def("predict", [](const ElmModel& e, DoubleArray x) { return e.predict(to_vector(x)); })
      .def("hidden_activation", [](const ElmModel& e, DoubleArray x) {
        const Eigen::VectorXd h = e.hidden_activation(to_vector(x));
        return to_array<double>(std::span<const double>(h.data(), std::size_t(h.size())));
      })
      .def_property_readonly("output_weights", [](const ElmModel& e) { return eigen_matrix(e.output_weights()); });

  m.def("evaluate", [](const std::vector<int>& pred, const std::vector<int>& labels, int n) {
    return evaluation_dict(evaluate(pred, labels, n));
  });

  py::class_<ExperimentConfig>(m, "Config")
      .def(py::init<>())
      .def_static("parse", &ExperimentConfig::parse)
      .def_static("load", &ExperimentConfig::load)
      .def("set", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
        c.set(k, v);
        return &c;
      }, py::return_value_policy::reference)
      .def("validate", &ExperimentConfig::validate)
      .def("canonical", &ExperimentConfig::canonical)
      .def("hash", &ExperimentConfig::hash);
  m.def("config_defaults", &config_defaults);

  py::class_<Dataset>(m, "Dataset")
      .def_property_readonly("n_train", [](const Dataset& d) { return d.train.size(); })
      .def_property_readonly("n_test", [](const Dataset& d) { return d.test.size(); })
      .def_readonly("n_classes", &Dataset::n_classes)
      .def("train_labels", [](const Dataset& d) {
        std::vector<int> v;
        for (const auto& r : d.train) v.push_back(r.label);
        return v;
      })
      .def("recording", [](const Dataset& d, const std::string& split, std::size_t i) {
        const auto& v = split == "test" ? d.test : d.train;
        if (i >= v.size()) throw OutOfRangeError("recording index out of range");
        return *v[i].get();
      }, py::arg("split"), py::arg("index"));
  m.def("load_dataset", [](const ExperimentConfig& c) {
    Dataset d = load_dataset(c);
    materialize(d);
    return d;
  });

  m.def("make_extractor", &make_extractor, "Freshly initialised extractor; the random baseline.");
  m.def(
      "run_train",
      [](const ExperimentConfig& c, const Dataset& d) {
        TrainOutcome t = run_train(c, d);
        py::dict out;
        out["events"] = t.events;
        out["misses"] = t.misses;
        for (Channel ch : {Channel::On, Channel::Off}) {
          if (auto log = log_of(t.logs, ch)) out[ch == Channel::On ? "monitor_on" : "monitor_off"] = monitor_arrays(*log);
        }
        return py::make_tuple(std::move(t.extractor), out);
      },
      "Returns (trained extractor, statistics).");
  m.def("run_evaluate", [](const ExperimentConfig& c, const Dataset& d, const FeatureExtractor& ex) {
    const EvalOutcome e = run_evaluate(c, d, ex);
    py::dict out;
    out["per_frame"] = evaluation_dict(e.per_frame);
    out["per_recording"] = evaluation_dict(e.per_recording);
    out["gini"] = e.gini;
    out["test_counts"] = e.test_counts;
    out["train_samples"] = e.train_samples;
    out["test_samples"] = e.test_samples;
    return out;
  });
  m.def("run_gini_study", [](const ExperimentConfig& c, const Dataset& d, std::size_t n, std::uint64_t seed) {
    py::list rows;
    for (const auto& r : run_gini_study(c, d, n, seed)) {
      py::dict row;
      row["config_hash"] = r.config_hash;
      row["roi_w"] = r.roi_w;
      row["n_features"] = r.n_features;
      row["delta_dec"] = r.delta_dec;
      row["delta_inc"] = r.delta_inc;
      row["eta"] = r.eta;
      row["tau_us"] = r.tau_us;
      row["train_recordings"] = r.train_recordings;
      row["gini"] = r.gini;
      row["accuracy"] = r.accuracy;
      rows.append(row);
    }
    return rows;
  }, py::arg("config"), py::arg("dataset"), py::arg("n") = 30, py::arg("seed") = 0);
  m.def("spearman", [](const std::vector<double>& x, const std::vector<double>& y) { return spearman(x, y); });
}
