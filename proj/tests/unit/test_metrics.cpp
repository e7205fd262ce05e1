#include <gtest/gtest.h>

#include <algorithm>

#include "serlab/common/error.hpp"
#include "serlab/common/rng.hpp"
#include "serlab/losses/losses.hpp"
#include "serlab/metrics/classification.hpp"
#include "serlab/metrics/regression.hpp"
#include "serlab/metrics/report.hpp"

using namespace serlab;
using namespace serlab::metrics;

namespace {

Emotion e(char code) { return *parse_emotion_code(std::string(1, code)); }

std::vector<Emotion> random_labels(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<Emotion> v(n);
  for (auto& x : v) x = emotion_from_index(rng.below(k));
  return v;
}

}  // namespace

TEST(Emotion, Codes) {
  std::string codes;
  for (Emotion x : kAllEmotions) codes += emotion_code(x);
  EXPECT_EQ(codes, "ACDFHNSU");
  EXPECT_EQ(parse_emotion_name("hAPPiness"), Emotion::kHappiness);
  EXPECT_FALSE(parse_emotion_code("X").has_value());
  EXPECT_FALSE(parse_emotion_name("joy").has_value());
}

TEST(Classification, Perfect) {
  Rng rng(1);
  auto truth = random_labels(rng, 50, 8);
  ClassificationMetrics m = classification_metrics(truth, truth);
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.f1_macro, 1.0);
  EXPECT_EQ(m.f1_micro, 1.0);
}

TEST(Classification, HandExample) {
  std::vector<Emotion> truth{e('A'), e('A'), e('C'), e('C')}, pred{e('A'), e('C'), e('C'), e('C')};
  ClassificationMetrics m = classification_metrics(pred, truth);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.75);
  EXPECT_NEAR(m.f1[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(m.f1[1], 0.8, 1e-15);
  EXPECT_FALSE(m.present[2]);
  EXPECT_NEAR(m.f1_macro, (2.0 / 3.0 + 0.8) / 2.0, 1e-15);
  EXPECT_THROW(classification_metrics(std::span(pred).first(3), truth), ValidationError);
}

TEST(Classification, MicroEqualsAccuracyAndConfusionSums) {
  for (std::uint64_t s = 0; s < 300; ++s) {
    Rng rng(s);
    std::size_t n = 1 + rng.below(200), k = 2 + rng.below(7);
    auto truth = random_labels(rng, n, k), pred = random_labels(rng, n, k);
    ClassificationMetrics m = classification_metrics(pred, truth);
    ASSERT_EQ(m.f1_micro, m.accuracy);
    std::size_t total = 0;
    for (std::size_t c = 0; c < 8; ++c) {
      std::size_t row = 0;
      for (std::size_t j = 0; j < 8; ++j) row += m.confusion[c][j];
      EXPECT_EQ(row, static_cast<std::size_t>(std::count(truth.begin(), truth.end(), emotion_from_index(c))));
      total += row;
    }
    EXPECT_EQ(total, n);
  }
}

TEST(Attributes, Examples) {
  std::vector<AttributeVector> truth{{2, 3, 4}, {5, 1, 2}, {6, 6, 7}, {3, 4, 1}};
  AttributeMetrics m = attribute_metrics(truth, truth);
  EXPECT_NEAR(m.valence, 1.0, 1e-12);
  EXPECT_NEAR(m.average, 1.0, 1e-12);
  AttributeVector mean{4, 3.5, 3.5};
  std::vector<AttributeVector> flat(4, mean);
  AttributeMetrics z = attribute_metrics(flat, truth);
  EXPECT_NEAR(z.arousal, 0.0, 1e-12);
  EXPECT_NEAR(z.valence, 0.0, 1e-12);
  EXPECT_NEAR(z.dominance, 0.0, 1e-12);
  EXPECT_EQ(format3((0.653 + 0.670 + 0.604) / 3.0), "0.642");
}

TEST(Bins, SingleFullBinEqualsGlobal) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng rng(s);
    std::vector<double> t(40), p(40);
    for (std::size_t i = 0; i < 40; ++i) {
      t[i] = rng.uniform(1, 7);
      p[i] = t[i] + rng.normal();
    }
    t[0] = 7.0;
    std::vector<double> edges{1, 7};
    auto bins = binned_ccc(p, t, edges);
    ASSERT_EQ(bins.size(), 1u);
    EXPECT_EQ(bins[0].count, 40u);
    EXPECT_EQ(*bins[0].ccc, losses::ccc(p, t));
  }
}

TEST(Bins, ThreeBinsPerfectAndRangeRestriction) {
  Rng rng(2024);
  std::vector<double> t(10000), p(10000);
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = rng.uniform(1, 7);
    p[i] = t[i] + 0.5 * rng.normal();
  }
  std::vector<double> edges{1, 3, 5, 7};
  auto perfect = binned_ccc(t, t, edges);
  ASSERT_EQ(perfect.size(), 3u);
  for (const auto& b : perfect) EXPECT_NEAR(*b.ccc, 1.0, 1e-12);
  EXPECT_EQ(perfect[0].label(), "[1, 3)");
  EXPECT_EQ(perfect[2].label(), "[5, 7]");
  double overall = losses::ccc(p, t);
  for (const auto& b : binned_ccc(p, t, edges)) EXPECT_LT(*b.ccc, overall);
}

TEST(Bins, InsufficientAndDegenerate) {
  std::vector<double> t{1.5, 4, 4, 6.5, 7}, p{1, 4, 4, 6, 6.8};
  std::vector<double> edges{1, 3, 5, 7};
  auto bins = binned_ccc(p, t, edges);
  EXPECT_EQ(bins[0].status, "insufficient");
  EXPECT_FALSE(bins[0].ccc.has_value());
  EXPECT_EQ(bins[1].status, "degenerate");
  EXPECT_EQ(bins[2].status, "ok");
  EXPECT_EQ(bins[2].count, 2u);
  std::vector<double> bad{1, 1, 7};
  EXPECT_THROW(binned_ccc(p, t, bad), ValidationError);
}

TEST(Stats, Examples) {
  std::vector<double> a{2, 2, 2}, b{1, 3};
  EXPECT_EQ(prediction_stats(a).mean, 2.0);
  EXPECT_EQ(prediction_stats(a).std, 0.0);
  EXPECT_EQ(prediction_stats(b).mean, 2.0);
  EXPECT_EQ(prediction_stats(b).std, 1.0);
  EXPECT_EQ(prediction_stats(b).format(), "2.00±1.00");
  Rng rng(4);
  for (int s = 0; s < 50; ++s) {
    std::vector<double> x(20), y(20);
    double c = rng.uniform(-3, 3);
    for (std::size_t i = 0; i < 20; ++i) {
      x[i] = rng.uniform(1, 7);
      y[i] = x[i] + c;
    }
    EXPECT_NEAR(prediction_stats(y).mean, prediction_stats(x).mean + c, 1e-12);
    EXPECT_NEAR(prediction_stats(y).std, prediction_stats(x).std, 1e-12);
  }
}

TEST(Compare, Examples) {
  std::vector<double> truth{1, 2, 3, 4};
  std::vector<Emotion> em{e('A'), e('A'), e('H'), e('S')};
  std::vector<double> same{1.5, 2, 2, 5};
  ModelComparison none = compare_models(same, same, truth, em);
  EXPECT_TRUE(none.improved.empty());
  for (double s : none.improved_shares) EXPECT_EQ(s, 0.0);
  EXPECT_DOUBLE_EQ(none.full_shares[0], 0.5);
  std::vector<double> off{2, 3, 4, 5};
  ModelComparison all = compare_models(truth, off, truth, em);
  EXPECT_EQ(all.improved.size(), 4u);
  EXPECT_EQ(all.improved_shares, all.full_shares);
  // SE_A = [0.25, 1, 1, 0], SE_B = [1, 1, 0.25, 1].
  std::vector<double> a{1.5, 3, 4, 4}, b{2, 1, 3.5, 5};
  ModelComparison hand = compare_models(a, b, truth, em);
  EXPECT_EQ(hand.improved, (std::vector<std::size_t>{0, 3}));
  EXPECT_EQ(hand.ties, 1u);
  EXPECT_EQ(hand.improved_counts[0], 1u);
  EXPECT_EQ(hand.improved_counts[6], 1u);
}

TEST(Compare, AntiSymmetric) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng rng(s);
    std::size_t n = 30;
    std::vector<double> t(n), a(n), b(n);
    std::vector<Emotion> em = random_labels(rng, n, 8);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = std::round(rng.uniform(1, 7));
      a[i] = std::round(rng.uniform(1, 7));
      b[i] = std::round(rng.uniform(1, 7));
    }
    auto ab = compare_models(a, b, t, em), ba = compare_models(b, a, t, em);
    EXPECT_EQ(ab.ties, ba.ties);
    EXPECT_EQ(ab.improved.size() + ba.improved.size() + ab.ties, n);
    for (std::size_t i : ab.improved) EXPECT_EQ(std::count(ba.improved.begin(), ba.improved.end(), i), 0);
  }
}

TEST(Report, CsvAndJson) {
  std::vector<Emotion> truth{e('A'), e('C'), e('N')};
  std::vector<AttributeVector> at{{2, 3, 4}, {5, 1, 2}, {6, 6, 7}};
  MetricsReport r = make_report(classification_metrics(truth, truth), attribute_metrics(at, at));
  EXPECT_EQ(r.csv_row(), "1.000,1.000,1.000,1.000,1.000,1.000,1.000");
  MetricsReport only = make_report(std::nullopt, attribute_metrics(at, at));
  EXPECT_EQ(only.csv_row(), ",,,1.000,1.000,1.000,1.000");
  auto j = r.to_json();
  EXPECT_EQ(j["csv_header"], kReportCsvHeader);
  EXPECT_TRUE(j.contains("classification"));
  EXPECT_EQ(format3(-0.0001), "0.000");
  EXPECT_EQ(format3(0.6049), "0.605");
}
