#include <gtest/gtest.h>

#include "geosep/separation.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace geosep;

namespace {

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::NumericError;
}

// Train rows with label 0 = F (predicted class), 1 = F-bar.
Dataset two_sets(std::size_t d, const std::vector<std::vector<float>>& same,
                 const std::vector<std::vector<float>>& other) {
  std::vector<float> f;
  std::vector<Label> l;
  for (const auto& r : same) {
    f.insert(f.end(), r.begin(), r.end());
    l.push_back(0);
  }
  for (const auto& r : other) {
    f.insert(f.end(), r.begin(), r.end());
    l.push_back(1);
  }
  return {d, f, l};
}

SeparationScore exact_of(const std::vector<float>& x, const Dataset& train, Label lbl = 0) {
  return exact_separation(x, train, partition(train, lbl));
}

SeparationScore fast_of(const std::vector<float>& x, const Dataset& train, MetricKind m, Label lbl = 0) {
  return fast_separation(x, train, partition(train, lbl), m);
}

}  // namespace

TEST(Partition, Examples) {
  const auto ds = testutil::make(1, {0, 1, 2}, {0, 0, 1});
  const auto p = partition(ds, 0);
  EXPECT_EQ(p.same_class.size(), 2u);
  EXPECT_EQ(p.other_class.size(), 1u);
  EXPECT_EQ(code_of([&] { partition(ds, 7); }), ErrorCode::EmptyClassSet);
  const auto all0 = testutil::make(1, {0, 1}, {0, 0});
  EXPECT_EQ(code_of([&] { partition(all0, 0); }), ErrorCode::EmptyComplement);
}

TEST(FastSeparation, Examples) {
  const std::vector<float> x{0};
  auto s = fast_of(x, two_sets(1, {{1}}, {{3}}), MetricKind::L2);
  EXPECT_EQ(s.value, 1.0);
  EXPECT_TRUE(s.is_safe);
  s = fast_of(x, two_sets(1, {{3}}, {{1}}), MetricKind::L2);
  EXPECT_EQ(s.value, -1.0);
  EXPECT_FALSE(s.is_safe);
  s = fast_of(x, two_sets(1, {{2}}, {{-2}}), MetricKind::L2);
  EXPECT_EQ(s.value, 0.0);
  EXPECT_FALSE(s.is_safe);
}

TEST(FastSeparation, FusedScanAgreesWithPartitionedForm) {
  std::mt19937_64 gen(31);
  for (int it = 0; it < 300; ++it) {
    const auto train = testutil::random_two_class(gen, 30, 4);
    const auto x = testutil::random_point(gen, 4);
    for (auto m : {MetricKind::L1, MetricKind::L2, MetricKind::Linf}) {
      const auto a = fast_of(x, train, m, static_cast<Label>(it % 2));
      const auto b = fast_separation(x, train, static_cast<Label>(it % 2), m);
      EXPECT_DOUBLE_EQ(a.value, b.value);
      EXPECT_EQ(a.is_safe, b.is_safe);
      EXPECT_EQ(a.value, (a.d_other - a.d_same) / 2.0);
      EXPECT_EQ(a.is_safe, a.value > 0);
    }
  }
}

TEST(PairwiseZone, Examples) {
  const std::vector<double> x{0}, n{1}, f{5};
  EXPECT_DOUBLE_EQ(pairwise_zone(std::span<const double>(x), n, f), 3.0);
  const std::vector<double> x2{0, 0}, n2{0, 1}, f2{2, 0};
  // Line 4x - 2y - 3 = 0; distance from the origin is 3 / sqrt(20).
  EXPECT_NEAR(pairwise_zone(std::span<const double>(x2), n2, f2), 3.0 / std::sqrt(20.0), 1e-15);
  EXPECT_NEAR(pairwise_zone(std::span<const double>(x2), n2, f2), 0.67082, 1e-5);
  EXPECT_EQ(code_of([&] { pairwise_zone(std::span<const double>(x2), n2, n2); }), ErrorCode::DegenerateTriple);
  EXPECT_EQ(code_of([&] { pairwise_zone(std::span<const double>(x2), f2, n2); }), ErrorCode::OrderingError);
  const std::vector<double> bad{0, 0, 0};
  EXPECT_EQ(code_of([&] { pairwise_zone(std::span<const double>(bad), n2, f2); }), ErrorCode::DimensionError);
}

TEST(PairwiseZone, MatchesBisectorProjection) {
  std::mt19937_64 gen(32);
  std::normal_distribution<double> nd;
  int checked = 0;
  for (int it = 0; it < 2000; ++it) {
    const std::size_t d = 1 + it % 10;
    oracle::Vec x(d), a(d), b(d);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = nd(gen);
      a[i] = nd(gen);
      b[i] = nd(gen);
    }
    if (oracle::dist(x, a, MetricKind::L2) > oracle::dist(x, b, MetricKind::L2)) std::swap(a, b);
    if (!(oracle::dist(x, a, MetricKind::L2) < oracle::dist(x, b, MetricKind::L2))) continue;
    EXPECT_NEAR(pairwise_zone(std::span<const double>(x), a, b), oracle::bisector_projection(x, a, b), 1e-9);
    ++checked;
  }
  EXPECT_GT(checked, 1900);
}

TEST(ExactSeparation, Examples) {
  const std::vector<float> x{0, 0};
  auto s = exact_of(x, two_sets(2, {{1, 0}}, {{3, 0}}));
  EXPECT_NEAR(s.value, 2.0, 1e-12);
  EXPECT_TRUE(s.is_safe);
  s = exact_of(x, two_sets(2, {{3, 0}}, {{1, 0}}));
  EXPECT_NEAR(s.value, -2.0, 1e-12);
  EXPECT_FALSE(s.is_safe);
  s = exact_of(x, two_sets(2, {{0, 1}}, {{2, 0}}));
  EXPECT_NEAR(s.value, 3.0 / std::sqrt(20.0), 1e-12);
  s = exact_of(x, two_sets(2, {{1, 0}}, {{-1, 0}}));
  EXPECT_EQ(s.value, 0.0);
  EXPECT_FALSE(s.is_safe);
}

TEST(ExactSeparation, ZoneCanExceedTheMinMaxBisectorBound) {
  // The nearest violating point is the Voronoi vertex (0, 1.75), farther
  // than either bisector line taken alone.
  const auto train = two_sets(2, {{-1, 1}, {1, 1}}, {{0, 3}});
  const std::vector<float> x{0, 0};
  const auto p = partition(train, 0);
  EXPECT_NEAR(bisector_bound(x, train, p.same_class, p.other_class), 7.0 / (2.0 * std::sqrt(5.0)), 1e-12);
  EXPECT_NEAR(exact_of(x, train).value, 1.75, 1e-9);
}

TEST(ExactSeparation, QueryOnATrainingRow) {
  const auto train = two_sets(2, {{0, 0}, {1, 1}}, {{2, 0}});
  const auto s = exact_of({0, 0}, train);
  EXPECT_TRUE(s.is_safe);
  EXPECT_EQ(s.d_same, 0.0);
  EXPECT_NEAR(s.value, oracle::polygon_zone_2d({0, 0}, {{0, 0}, {1, 1}}, {{2, 0}}), 1e-9);
}

TEST(ExactSeparation, MatchesVoronoiPolygonOracle) {
  std::mt19937_64 gen(33);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  int safe = 0, dangerous = 0;
  for (int it = 0; it < 300; ++it) {
    const std::size_t n = 2 + it % 20;
    std::vector<float> f(2 * n);
    std::vector<Label> l(n);
    for (auto& v : f) v = u(gen);
    for (std::size_t i = 0; i < n; ++i) l[i] = static_cast<Label>(i % 2);
    const Dataset train(2, f, l);
    const std::vector<float> x{u(gen), u(gen)};
    const auto s = exact_of(x, train);
    std::vector<oracle::P2> same, other;
    for (std::size_t i = 0; i < n; ++i) (l[i] == 0 ? same : other).push_back({f[2 * i], f[2 * i + 1]});
    const oracle::P2 px{x[0], x[1]};
    double expected;
    if (s.is_safe) {
      expected = oracle::polygon_zone_2d(px, same, other);
      ++safe;
    } else {
      expected = -oracle::polygon_zone_2d(px, other, same);
      ++dangerous;
    }
    EXPECT_NEAR(s.value, expected, 1e-7 * std::max(1.0, std::abs(expected))) << "instance " << it;
  }
  EXPECT_GT(safe, 50);
  EXPECT_GT(dangerous, 50);
}

TEST(ExactSeparation, DominatesFastAndBisectorBound) {
  std::mt19937_64 gen(34);
  for (int it = 0; it < 200; ++it) {
    const std::size_t d = it % 3 == 0 ? 2 : (it % 3 == 1 ? 3 : 10);
    const auto train = testutil::random_two_class(gen, 10 + it % 60, d);
    const auto x = testutil::random_point(gen, d);
    const auto p = partition(train, 0);
    const auto e = exact_separation(x, train, p);
    const auto f = fast_separation(x, train, p, MetricKind::L2);
    EXPECT_EQ(e.is_safe, f.is_safe);
    EXPECT_LE(std::abs(f.value), std::abs(e.value) + 1e-9);
    EXPECT_LE(std::abs(e.value - f.value), (f.d_same + f.d_other) / 2.0 + 1e-9);
    if (e.is_safe) EXPECT_GE(e.value + 1e-9, bisector_bound(x, train, p.same_class, p.other_class));
  }
}

TEST(ExactSeparation, CollinearTightnessFixture) {
  // x = 0, same-class row at s - eps, other-class row at s: the gap to the
  // approximation bound is eps/2, below 1e-9.
  const float s = 0x1p-6f;
  const float eps = 0x1p-30f;
  ASSERT_EQ(static_cast<double>(s - eps), 0x1p-6 - 0x1p-30);
  const auto train = two_sets(1, {{s - eps}}, {{s}});
  const std::vector<float> x{0};
  const auto e = exact_of(x, train);
  const auto f = fast_of(x, train, MetricKind::L2);
  const double bound = (f.d_same + f.d_other) / 2.0;
  EXPECT_LE(std::abs(e.value - f.value), bound + 1e-9);
  EXPECT_LT(bound - std::abs(e.value - f.value), 1e-9);
}

TEST(BatchSeparation, OrderErrorsAndWorkerInvariance) {
  const auto train = two_sets(2, {{1, 0}}, {{3, 0}});
  const auto queries = testutil::make(2, {0, 0, 4, 0}, {0, 1});
  std::vector<PredictionRecord> preds = {{1, 0, std::nullopt}, {0, 0, 0.9}};
  const auto rows = batch_separation(queries, preds, train, {});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].index, 1u);
  EXPECT_DOUBLE_EQ(rows[0].score->value, -1.0);  // d_same 3, d_other 1
  EXPECT_FALSE(rows[0].correct);
  EXPECT_DOUBLE_EQ(rows[1].score->value, 1.0);
  EXPECT_TRUE(rows[1].correct);

  EXPECT_TRUE(batch_separation(queries, {}, train, {}).empty());

  std::vector<PredictionRecord> bad = {{2, 0, std::nullopt}};
  EXPECT_EQ(code_of([&] { batch_separation(queries, bad, train, {}); }), ErrorCode::IndexError);
  EXPECT_EQ(code_of([&] { batch_separation(queries, preds, train, {SeparationMode::Exact, MetricKind::L1, 1}); }),
            ErrorCode::ConfigError);

  std::vector<PredictionRecord> missing = {{0, 9, std::nullopt}, {1, 0, std::nullopt}};
  const auto partial = batch_separation(queries, missing, train, {});
  EXPECT_FALSE(partial[0].score);
  EXPECT_NE(partial[0].error.find("EmptyClassSet"), std::string::npos);
  EXPECT_TRUE(partial[1].score);

  std::mt19937_64 gen(35);
  const auto big = testutil::random_two_class(gen, 200, 6);
  const auto q = testutil::random_two_class(gen, 300, 6);
  std::vector<PredictionRecord> qp(q.rows());
  for (std::size_t i = 0; i < qp.size(); ++i) qp[i] = {i, static_cast<Label>((i / 3) % 2), std::nullopt};
  for (auto mode : {SeparationMode::Fast, SeparationMode::Exact}) {
    const auto one = batch_separation(q, qp, big, {mode, MetricKind::L2, 1});
    const auto many = batch_separation(q, qp, big, {mode, MetricKind::L2, 7});
    EXPECT_EQ(format_scores(one, MetricKind::L2), format_scores(many, MetricKind::L2));
  }
}

TEST(BatchSeparation, FastNeverExceedsExactOnGaussianQueries) {
  std::mt19937_64 gen(36);
  const auto train = testutil::random_two_class(gen, 120, 3);
  const auto q = testutil::random_two_class(gen, 500, 3);
  std::vector<PredictionRecord> preds(q.rows());
  for (std::size_t i = 0; i < preds.size(); ++i) preds[i] = {i, q.label(i), std::nullopt};
  const auto fast = batch_separation(q, preds, train, {SeparationMode::Fast, MetricKind::L2, 2});
  const auto exact = batch_separation(q, preds, train, {SeparationMode::Exact, MetricKind::L2, 2});
  for (std::size_t i = 0; i < preds.size(); ++i) {
    EXPECT_LE(std::abs(fast[i].score->value), std::abs(exact[i].score->value) + 1e-9);
    EXPECT_EQ(fast[i].score->is_safe, exact[i].score->is_safe);
  }
}

TEST(ScoreFile, RoundTripAndHeader) {
  std::vector<ScoreRow> rows(2);
  rows[0].index = 4;
  rows[0].predicted_label = 1;
  rows[0].true_label = 1;
  rows[0].correct = true;
  rows[0].score = SeparationScore{0.25, SeparationMode::Fast, 0.5, 1.0, true};
  rows[1].index = 5;
  rows[1].error = "EmptyClassSet: x";
  const auto text = format_scores(rows, MetricKind::L1);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "index,predicted_label,true_label,correct,separation,is_safe,d_same,d_other,mode,metric");
  const auto back = parse_scores(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].index, 4u);
  EXPECT_TRUE(back[0].correct);
  ASSERT_TRUE(back[0].score);
  EXPECT_EQ(back[0].score->value, 0.25);
  EXPECT_EQ(back[0].score->d_other, 1.0);
  EXPECT_FALSE(back[1].score);
  EXPECT_EQ(format_scores(back, MetricKind::L1), text);
}
