#include <gtest/gtest.h>

#include <random>

#include "cyberchar/error.hpp"
#include "cyberchar/metrics.hpp"
#include "cyberchar/random.hpp"

using namespace cyberchar;

namespace {

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InvariantViolation;
}

// Probability that a random positive outscores a random negative, ties counted half.
double pairwise_auc(const std::vector<std::uint8_t>& y, const std::vector<double>& s) {
    double wins = 0, pairs = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!y[i]) continue;
        for (std::size_t j = 0; j < y.size(); ++j) {
            if (y[j]) continue;
            pairs += 1;
            wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
        }
    }
    return wins / pairs;
}

}  // namespace

TEST(Metrics, BinaryFormulas) {
    const MetricsReport m = metrics(ConfusionMatrix::binary(8, 2, 4, 86));
    EXPECT_DOUBLE_EQ(m.accuracy, 94.0 / 100.0);
    EXPECT_DOUBLE_EQ(m.precision, 8.0 / 12.0);
    EXPECT_DOUBLE_EQ(m.recall, 8.0 / 10.0);
    EXPECT_DOUBLE_EQ(m.f1, 16.0 / 22.0);
}

TEST(Metrics, DegenerateCases) {
    const MetricsReport none = metrics(ConfusionMatrix::binary(0, 5, 0, 20));
    EXPECT_EQ(none.precision, 0.0);
    EXPECT_EQ(none.recall, 0.0);
    EXPECT_EQ(none.f1, 0.0);
    const MetricsReport no_pos = metrics(ConfusionMatrix::binary(0, 0, 3, 7));
    EXPECT_EQ(no_pos.recall, 0.0);
    EXPECT_DOUBLE_EQ(no_pos.accuracy, 0.7);
}

TEST(Metrics, ConfusionLayout) {
    const std::vector<int> t{0, 0, 1, 1, 2, 2, 2};
    const std::vector<int> p{0, 1, 1, 1, 2, 0, 2};
    const ConfusionMatrix cm = confusion(t, p, 3);
    EXPECT_EQ(cm.at(0, 0), 1u);
    EXPECT_EQ(cm.at(0, 1), 1u);
    EXPECT_EQ(cm.at(2, 0), 1u);
    EXPECT_EQ(cm.at(2, 2), 2u);
    EXPECT_EQ(cm.total(), 7u);
    EXPECT_EQ(cm.trace(), 5u);
    EXPECT_EQ(cm.row_total(2), 3u);
    EXPECT_DOUBLE_EQ(accuracy(cm), 5.0 / 7.0);
    const std::vector<std::uint8_t> yt{1, 1, 0, 0, 1}, yp{1, 0, 1, 0, 1};
    const ConfusionMatrix b = confusion(std::span<const std::uint8_t>(yt), std::span<const std::uint8_t>(yp));
    EXPECT_EQ(b, ConfusionMatrix::binary(2, 1, 1, 1));
    EXPECT_EQ(code_of([] { confusion(std::vector<int>{0, 3}, std::vector<int>{0, 0}, 3); }), ErrorCode::LabelOutOfRange);
}

TEST(Roc, MatchesPairwiseAucWithTies) {
    Rng rng(61);
    std::uniform_int_distribution<int> level(0, 6);
    std::uniform_real_distribution<double> u(0, 1);
    for (int inst = 0; inst < 30; ++inst) {
        std::vector<std::uint8_t> y;
        std::vector<double> s;
        for (int i = 0; i < 60; ++i) {
            const std::uint8_t yi = u(rng) < 0.4 ? 1 : 0;
            y.push_back(yi);
            s.push_back(level(rng) / 6.0 + (yi ? 0.1 : 0.0));
        }
        y[0] = 0;
        y[1] = 1;
        const RocCurve c = roc(y, s);
        EXPECT_NEAR(c.auc, pairwise_auc(y, s), 1e-12);
        EXPECT_EQ(c.points.front().fpr, 0.0);
        EXPECT_EQ(c.points.front().tpr, 0.0);
        EXPECT_EQ(c.points.back().fpr, 1.0);
        EXPECT_EQ(c.points.back().tpr, 1.0);
        for (std::size_t k = 1; k < c.points.size(); ++k) {
            EXPECT_GE(c.points[k].fpr, c.points[k - 1].fpr);
            EXPECT_GE(c.points[k].tpr, c.points[k - 1].tpr);
        }
    }
}

TEST(Roc, ExtremesAndSingleClass) {
    const std::vector<std::uint8_t> y{0, 0, 1, 1};
    EXPECT_DOUBLE_EQ(roc(y, std::vector<double>{0.1, 0.2, 0.8, 0.9}).auc, 1.0);
    EXPECT_DOUBLE_EQ(roc(y, std::vector<double>{0.9, 0.8, 0.2, 0.1}).auc, 0.0);
    EXPECT_DOUBLE_EQ(roc(y, std::vector<double>{0.5, 0.5, 0.5, 0.5}).auc, 0.5);
    EXPECT_EQ(code_of([] { roc(std::vector<std::uint8_t>{1, 1}, std::vector<double>{0.1, 0.2}); }),
              ErrorCode::UndefinedAuc);
}
