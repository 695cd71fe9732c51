#include <gtest/gtest.h>

#include "feast/error.hpp"
#include "feast/experiment.hpp"
#include "feast/io.hpp"

using namespace feast;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.synth.train_per_class = 8;
  c.synth.test_per_class = 4;
  c.synth.shapes = "bar@0, bar@90";
  c.surface.roi_w = 5;
  c.feast.params.n_features = 6;
  return c;
}

}  // namespace

TEST(Dataset, SynthSplitsAreBalancedAndDeterministic) {
  const auto c = small_config();
  const Dataset a = make_synth_dataset(c), b = make_synth_dataset(c);
  EXPECT_EQ(a.n_classes, 2);
  ASSERT_EQ(a.train.size(), 16u);
  ASSERT_EQ(a.test.size(), 8u);
  int ones = 0;
  for (const auto& r : a.train) ones += r.label;
  EXPECT_EQ(ones, 8);
  for (std::size_t i = 0; i < a.train.size(); ++i) {
    EXPECT_EQ(*a.train[i].get(), *b.train[i].get());
    EXPECT_FALSE(a.train[i].get()->empty());
  }
  EXPECT_NE(*a.train[0].get(), *a.train[2].get());
}

TEST(Dataset, MissingNmnistRoot) {
  EXPECT_THROW(load_nmnist_dataset("/nonexistent/nmnist", 10, 10), Error);
}

TEST(Experiment, TrainIsDeterministic) {
  const auto c = small_config();
  const Dataset ds = make_synth_dataset(c);
  const auto a = run_train(c, ds), b = run_train(c, ds);
  EXPECT_EQ(features_to_json(a.extractor, c.hash()), features_to_json(b.extractor, c.hash()));
  EXPECT_GT(a.events, 0u);
  ASSERT_TRUE(a.logs[0]);
  EXPECT_FALSE(a.logs[1]);
}

TEST(Experiment, EvaluateLinearAndElm) {
  auto c = small_config();
  Dataset ds = make_synth_dataset(c);
  materialize(ds);
  const auto trained = run_train(c, ds);
  const EvalOutcome lin = run_evaluate(c, ds, trained.extractor);
  EXPECT_GT(lin.per_recording.accuracy, 0.5);
  ASSERT_TRUE(lin.gini);
  EXPECT_GE(*lin.gini, 0.0);
  EXPECT_LT(*lin.gini, 1.0);

  c.classify.type = "elm";
  c.classify.hidden = 50;
  EXPECT_GT(run_evaluate(c, ds, trained.extractor).per_recording.accuracy, 0.5);
  c.classify.input = "timebins";
  c.classify.bins = 40;
  const EvalOutcome tb = run_evaluate(c, ds, trained.extractor);
  EXPECT_EQ(tb.test_samples, ds.test.size());
}

TEST(Experiment, UntrainedExtractorIsRandomBaseline) {
  const auto c = small_config();
  const Dataset ds = make_synth_dataset(c);
  const FeatureExtractor ex = make_extractor(c);
  const FeatureExtractor again = make_extractor(c);
  EXPECT_EQ(features_to_json(ex, ""), features_to_json(again, ""));
  EXPECT_EQ(ex.network(Channel::On).params().roi_w, c.surface.roi_w);
}

TEST(Experiment, GiniStudyRows) {
  auto c = small_config();
  c.synth.train_per_class = 4;
  c.synth.test_per_class = 2;
  Dataset ds = make_synth_dataset(c);
  materialize(ds);
  const auto rows = run_gini_study(c, ds, 3, 5);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NE(rows[0].config_hash, rows[1].config_hash);
  const auto again = run_gini_study(c, ds, 3, 5);
  EXPECT_EQ(again[2].gini, rows[2].gini);
  EXPECT_EQ(again[2].accuracy, rows[2].accuracy);
}

TEST(Spearman, KnownValues) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> up{2, 4, 6, 8, 10}, down{9, 7, 5, 3, 1};
  EXPECT_NEAR(spearman(x, up), 1.0, 1e-15);
  EXPECT_NEAR(spearman(x, down), -1.0, 1e-15);
  // Ties take average ranks: ranks of {1,1,2} are {1.5,1.5,3}.
  const std::vector<double> a{1, 1, 2}, b{1, 2, 3};
  EXPECT_NEAR(spearman(a, b), 0.8660254037844386, 1e-12);
  EXPECT_THROW(spearman(std::vector<double>{1}, std::vector<double>{1}), ParameterError);
}
