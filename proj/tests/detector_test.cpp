#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "biocrypt/detector.hpp"
#include "biocrypt/synthetic.hpp"
#include "fixture_model.hpp"

using namespace biocrypt;

namespace {

HogDescriptor vec(std::vector<double> v) { return HogDescriptor{std::move(v)}; }

// Exhaustive grid search of the regularized hinge objective for the two-point
// problem x = +e1 (y = +1), x = -e1 (y = -1). The second weight is pinned at 0
// since it multiplies a zero feature and only adds regularization.
struct GridOptimum {
  double w1, b, objective;
};

GridOptimum grid_search(double lambda) {
  GridOptimum best{0, 0, std::numeric_limits<double>::infinity()};
  for (int i = 0; i <= 3000; ++i) {
    const double w1 = i * 0.001;
    for (int j = -1000; j <= 1000; ++j) {
      const double b = j * 0.001;
      const double obj = 0.5 * lambda * (w1 * w1 + b * b) +
                         0.5 * (std::max(0.0, 1.0 - (w1 + b)) + std::max(0.0, 1.0 - (w1 - b)));
      if (obj < best.objective) best = {w1, b, obj};
    }
  }
  return best;
}

std::vector<TrainingSample> two_points() {
  return {{vec({1.0, 0.0}), +1}, {vec({-1.0, 0.0}), -1}};
}

}  // namespace

TEST(TrainSvm, TwoPointProblemReachesGridOptimum) {
  const auto samples = two_points();
  const auto model = train_svm(samples, 0.01, 100, 1);
  EXPECT_EQ(training_accuracy(model, samples), 1.0);
  EXPECT_GT(score(model, samples[0].descriptor), 0.0);
  EXPECT_LT(score(model, samples[1].descriptor), 0.0);

  const auto opt = grid_search(0.01);
  EXPECT_NEAR(opt.w1, 1.0, 1e-9);
  EXPECT_NEAR(opt.b, 0.0, 1e-9);
  const double obj = svm_objective(model.weights, model.bias, 0.01, samples);
  EXPECT_LE(obj - opt.objective, 0.05) << "trained objective " << obj << " vs grid " << opt.objective;
}

TEST(TrainSvm, TwoPointProblemConvergesWithMoreEpochs) {
  const auto samples = two_points();
  const auto opt = grid_search(0.01);
  const auto model = train_svm(samples, 0.01, 10000, 1);
  EXPECT_LE(svm_objective(model.weights, model.bias, 0.01, samples) - opt.objective, 1e-3);
  EXPECT_NEAR(model.weights[0], opt.w1, 0.05);
  EXPECT_NEAR(model.bias, opt.b, 0.01);
}

TEST(TrainSvm, RejectsDegenerateInputs) {
  auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::invalid_argument;
  };
  std::vector<TrainingSample> positives{{vec({1.0}), +1}, {vec({2.0}), +1}};
  EXPECT_EQ(code([&] { train_svm(positives, 0.01, 5, 1); }), Errc::single_class);
  EXPECT_EQ(code([&] { train_svm(std::vector<TrainingSample>{}, 0.01, 5, 1); }), Errc::empty_input);
  std::vector<TrainingSample> ragged{{vec({1.0, 0.0}), +1}, {vec({-1.0}), -1}};
  EXPECT_EQ(code([&] { train_svm(ragged, 0.01, 5, 1); }), Errc::dimension_mismatch);
}

TEST(TrainSvm, SameSeedGivesBitIdenticalModels) {
  const auto& samples = fixtures::training_samples();
  auto a = train_svm(samples, kDefaultLambda, 3, 99);
  auto b = train_svm(samples, kDefaultLambda, 3, 99);
  EXPECT_EQ(a, b);
  EXPECT_EQ(save_model(a), save_model(b));
  auto c = train_svm(samples, kDefaultLambda, 3, 100);
  EXPECT_NE(a.weights, c.weights);
}

TEST(TrainSvm, FixtureSetIsSeparated) {
  EXPECT_EQ(training_accuracy(fixtures::model(), fixtures::training_samples()), 1.0);
  EXPECT_EQ(fixtures::model().dimension(), kDescriptorLength);
}

TEST(TrainSvm, AveragedObjectiveDecreasesOverTraining) {
  TrainingTrace trace;
  train_svm(fixtures::training_samples(), kDefaultLambda, 10, kDefaultTrainSeed, &trace);
  ASSERT_EQ(trace.objective.size(), 10u);
  int increases = 0;
  for (std::size_t i = 1; i < trace.objective.size(); ++i) increases += trace.objective[i] > trace.objective[i - 1];
  EXPECT_LT(trace.objective.back(), trace.objective.front());
  EXPECT_LE(increases, 2);
}

TEST(Score, Examples) {
  LinearSvmModel zero{std::vector<double>(4, 0.0), 0.7};
  EXPECT_DOUBLE_EQ(score(zero, vec({5, -3, 2, 1})), 0.7);

  LinearSvmModel m{{1, 2, 0, 0}, -1.0};
  EXPECT_DOUBLE_EQ(score(m, vec({3, 0.5, 0, 0})), 3.0);
  EXPECT_THROW(score(m, vec({1, 2, 3})), Error);
}

TEST(Score, IsAffineInTheDescriptor) {
  SplitMix64 rng(4);
  LinearSvmModel m{std::vector<double>(32), 0.25};
  for (auto& w : m.weights) w = rng.uniform() * 2 - 1;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> d1(32), d2(32), mix(32);
    const double a = rng.uniform() * 4 - 2, b = rng.uniform() * 4 - 2;
    for (std::size_t i = 0; i < 32; ++i) {
      d1[i] = rng.uniform();
      d2[i] = rng.uniform();
      mix[i] = a * d1[i] + b * d2[i];
    }
    const double s1 = score(m, vec(d1)) - m.bias, s2 = score(m, vec(d2)) - m.bias;
    EXPECT_NEAR(score(m, vec(mix)), a * s1 + b * s2 + m.bias, 1e-12);
  }
}

TEST(ModelFile, RoundTripsAndRejectsCorruption) {
  const auto& m = fixtures::model();
  auto raw = save_model(m);
  EXPECT_EQ(raw.size(), 4 + 2 + 4 + 8 * m.dimension() + 8 + 8 + 4 + 8);
  EXPECT_EQ(load_model(raw), m);

  auto bad = raw;
  bad[0] = 'X';
  EXPECT_THROW(load_model(bad), Error);
  auto truncated = Bytes(raw.begin(), raw.end() - 3);
  EXPECT_THROW(load_model(truncated), Error);
}

TEST(Iou, Examples) {
  Detection a{0, 0, 10, 0}, b{5, 5, 10, 0}, far{50, 50, 10, 0};
  EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
  EXPECT_DOUBLE_EQ(iou(a, far), 0.0);
  EXPECT_DOUBLE_EQ(iou(a, b), 25.0 / 175.0);
  EXPECT_DOUBLE_EQ(iou(a, b), iou(b, a));
  EXPECT_DOUBLE_EQ(iou(a, Detection{10, 0, 10, 0}), 0.0);
}

TEST(Nms, Examples) {
  EXPECT_TRUE(nms({}, 0.3).empty());

  auto kept = nms({{0, 0, 10, 0.4}, {0, 0, 10, 0.9}}, 0.3);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].score, 0.9);

  kept = nms({{5, 5, 10, 0.9}, {0, 0, 10, 1.0}}, 0.2);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].score, 1.0);
  EXPECT_EQ(kept[1].score, 0.9);
  EXPECT_EQ(nms({{5, 5, 10, 0.9}, {0, 0, 10, 1.0}}, 0.1).size(), 1u);
}

TEST(Nms, TiesBreakOnSmallerYThenX) {
  auto kept = nms({{3, 1, 10, 0.5}, {1, 2, 10, 0.5}, {2, 1, 10, 0.5}}, 0.0);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0], (Detection{2, 1, 10, 0.5}));
}

TEST(Nms, OutputIsNonOverlappingSubsetContainingTheBest) {
  SplitMix64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Detection> dets(1 + rng.below(30));
    for (auto& d : dets)
      d = {static_cast<int>(rng.below(100)), static_cast<int>(rng.below(100)), 5 + static_cast<int>(rng.below(40)),
           rng.uniform()};
    const double thr = rng.uniform();
    auto kept = nms(dets, thr);
    for (const auto& k : kept) EXPECT_NE(std::find(dets.begin(), dets.end(), k), dets.end());
    for (std::size_t i = 0; i < kept.size(); ++i)
      for (std::size_t j = i + 1; j < kept.size(); ++j) EXPECT_LE(iou(kept[i], kept[j]), thr);
    auto best = *std::min_element(dets.begin(), dets.end(), detection_order);
    ASSERT_FALSE(kept.empty());
    EXPECT_EQ(kept.front(), best);
  }
}

TEST(DetectFaces, NegativeBiasModelFindsNothing) {
  LinearSvmModel m{std::vector<double>(kDescriptorLength, 0.0), -1.0};
  EXPECT_TRUE(detect_faces(GrayImage(128, 96, std::uint8_t{128}), m, 0.0, 0.3).empty());
}

TEST(DetectFaces, InfiniteThresholdFindsNothing) {
  auto scene = synthetic::detection_scenes().front();
  EXPECT_TRUE(detect_faces(scene.image, fixtures::model(), std::numeric_limits<double>::infinity(), 0.3).empty());
}

TEST(DetectFaces, RejectsImagesBelowWindow) {
  EXPECT_THROW(detect_faces(GrayImage(63, 200), fixtures::model()), Error);
}

TEST(DetectFaces, FindsEachFixtureFaceOnce) {
  for (const auto& s : synthetic::detection_scenes()) {
    auto dets = detect_faces(s.image, fixtures::model());
    ASSERT_EQ(dets.size(), 1u) << "person " << s.person_id;
    EXPECT_GE(iou(dets[0], s.truth), 0.5);
    EXPECT_GE(dets[0].x, 0);
    EXPECT_GE(dets[0].y, 0);
    EXPECT_LE(dets[0].x + dets[0].side, s.image.width());
    EXPECT_LE(dets[0].y + dets[0].side, s.image.height());
    EXPECT_GT(dets[0].score, 0.0);
  }
}

TEST(DetectFaces, ParallelScanEqualsSerialScan) {
  for (const auto& s : synthetic::detection_scenes()) {
    DetectOptions serial;
    serial.threshold = -5.0;  // keep plenty of candidates in play
    DetectOptions parallel = serial;
    parallel.threads = 4;
    EXPECT_EQ(detect_faces(s.image, fixtures::model(), serial), detect_faces(s.image, fixtures::model(), parallel));
  }
}

TEST(DetectFaces, BoxesStayInsideImageAtEveryScale) {
  DetectOptions opt;
  opt.threshold = -std::numeric_limits<double>::infinity();
  opt.iou_threshold = 1.0;
  auto img = synthetic::background(157, 131, 3);
  for (const auto& d : detect_faces(img, fixtures::model(), opt)) {
    EXPECT_GE(d.x, 0);
    EXPECT_GE(d.y, 0);
    EXPECT_LE(d.x + d.side, img.width());
    EXPECT_LE(d.y + d.side, img.height());
  }
}
