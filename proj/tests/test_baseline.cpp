#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "geosep/baseline.hpp"
#include "geosep/error.hpp"
#include "test_util.hpp"

using namespace geosep;
using testutil::make;

TEST(Centroid, MeansPerClass) {
  const auto ds = make(2, {0, 0, 2, 0, 5, 5}, {1, 1, 0});
  const auto m = fit_centroid(ds);
  EXPECT_EQ(m.classes, (std::vector<Label>{0, 1}));
  EXPECT_EQ(m.centroids, (std::vector<double>{5, 5, 1, 0}));

  // Row order does not matter.
  const auto perm = make(2, {5, 5, 2, 0, 0, 0}, {0, 1, 1});
  EXPECT_EQ(fit_centroid(perm).centroids, m.centroids);
}

TEST(Centroid, PredictionsAndConfidence) {
  const auto ds = make(1, {0, 2}, {3, 7});
  const auto m = fit_centroid(ds);
  const std::vector<float> at0{0}, mid{1};
  EXPECT_EQ(predict_centroid(m, at0).predicted_label, 3u);
  const auto tie = predict_centroid(m, mid);
  EXPECT_EQ(tie.predicted_label, 3u);  // lowest class id wins the tie
  EXPECT_DOUBLE_EQ(*tie.model_confidence, 0.5);

  // Distances 0 and ln 4 * tau give confidence 1 / (1 + 1/4) = 0.8.
  for (double tau : {0.5, 1.0, 3.0}) {
    const double gap = std::log(4.0) * tau;
    const auto m2 = fit_centroid(make(1, {0, static_cast<float>(2 * gap)}, {0, 1}), tau);
    const std::vector<float> x{static_cast<float>(-0.0)};
    const auto p = predict_centroid(m2, x);
    EXPECT_EQ(p.predicted_label, 0u);
    // float storage of the centroid limits the precision
    EXPECT_NEAR(*p.model_confidence, 1.0 / (1.0 + std::exp(-2 * gap / tau)), 1e-6);
  }
}

TEST(Centroid, ProbabilitiesSumToOneAndScaleWithTemperature) {
  std::mt19937_64 gen(71);
  const auto ds = testutil::random_two_class(gen, 40, 3);
  const auto m1 = fit_centroid(ds, 1.0);
  const auto m2 = fit_centroid(ds, 2.0);
  for (int i = 0; i < 20; ++i) {
    const auto x = testutil::random_point(gen, 3, 2.0f);
    const auto p = centroid_probabilities(m1, x);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
    EXPECT_NEAR(*predict_centroid(m1, x).model_confidence, *std::max_element(p.begin(), p.end()), 1e-12);
    // Doubling distances and temperature together leaves the softmax unchanged.
    std::vector<float> x2(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) x2[k] = x[k];
    auto scaled = m2;
    for (auto& c : scaled.centroids) c *= 2;
    for (auto& v : x2) v *= 2;
    const auto q = centroid_probabilities(scaled, x2);
    for (std::size_t k = 0; k < p.size(); ++k) EXPECT_NEAR(p[k], q[k], 1e-9);
  }
}

TEST(Knn, Votes) {
  const auto ds = make(1, {0, 1, 2, 10, 11}, {0, 0, 1, 1, 1});
  const std::vector<float> x{0.4f};
  const auto p1 = predict_knn(ds, x, 1);
  EXPECT_EQ(p1.predicted_label, 0u);
  EXPECT_DOUBLE_EQ(*p1.model_confidence, 1.0);
  const std::vector<float> y{1.6f};
  const auto p3 = predict_knn(ds, y, 3);
  EXPECT_EQ(p3.predicted_label, 0u);
  EXPECT_NEAR(*p3.model_confidence, 2.0 / 3.0, 1e-15);
  const auto p5 = predict_knn(ds, x, 5);
  EXPECT_EQ(p5.predicted_label, 1u);
  EXPECT_DOUBLE_EQ(*p5.model_confidence, 0.6);
  for (std::size_t r = 0; r < ds.rows(); ++r) EXPECT_EQ(predict_knn(ds, ds.row(r), 1).predicted_label, ds.label(r));
}

TEST(Knn, Errors) {
  const auto ds = make(1, {0, 1, 2}, {0, 0, 1});
  const std::vector<float> x{0};
  for (std::size_t k : {2u, 0u, 5u}) {
    try {
      predict_knn(ds, x, k);
      FAIL() << k;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ParameterError);
    }
  }
}

TEST(PredictAll, IndicesAndKinds) {
  std::mt19937_64 gen(72);
  const auto train = testutil::random_two_class(gen, 30, 2);
  const auto queries = testutil::random_two_class(gen, 9, 2);
  for (auto kind : {ModelKind::Centroid, ModelKind::Knn}) {
    ModelOptions opts;
    opts.kind = kind;
    opts.k = 3;
    const auto a = predict_all(train, queries, opts);
    opts.workers = 3;
    EXPECT_EQ(predict_all(train, queries, opts), a);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].index, i);
    EXPECT_EQ(parse_model_kind(to_string(kind)), kind);
  }
  EXPECT_THROW(parse_model_kind("svm"), Error);
}
