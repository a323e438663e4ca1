#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cyberchar/error.hpp"
#include "cyberchar/ml.hpp"
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

struct Data {
    Matrix X;
    std::vector<std::uint8_t> y;
};

// Labels from a random axis-aligned rule plus label noise; features on a coarse grid
// so ties and duplicate rows occur.
Data random_instance(Rng& rng, std::size_t n, std::size_t f) {
    std::uniform_int_distribution<int> grid(0, 9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Data d{Matrix(n, f), {}};
    bool has[2] = {false, false};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < f; ++k) d.X(i, k) = grid(rng) * 0.5;
        std::uint8_t y = (d.X(i, 0) + d.X(i, f - 1) > 4.5) ? 1 : 0;
        if (u(rng) < 0.15) y = 1 - y;
        d.y.push_back(y);
        has[y] = true;
    }
    if (!has[0]) d.y[0] = 0;
    if (!has[1]) d.y[1] = 1;
    return d;
}

Data two_gaussians(Rng& rng, std::size_t n_per_class, std::vector<double> mu1, std::vector<double> sd1) {
    const std::size_t F = mu1.size();
    std::normal_distribution<double> g(0.0, 1.0);
    Data d{Matrix(2 * n_per_class, F), {}};
    for (std::size_t i = 0; i < 2 * n_per_class; ++i) {
        const bool pos = i >= n_per_class;
        for (std::size_t k = 0; k < F; ++k) d.X(i, k) = pos ? mu1[k] + sd1[k] * g(rng) : g(rng);
        d.y.push_back(pos ? 1 : 0);
    }
    return d;
}

double normal_logpdf(double x, double mu, double sd) {
    const double z = (x - mu) / sd;
    return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::acos(-1.0));
}

Hyperparams hp_for(Algorithm a, std::uint64_t seed = 1) {
    Hyperparams hp;
    hp.algorithm = a;
    hp.seed = seed;
    hp.forest.n_trees = 15;
    return hp;
}

}  // namespace

TEST(Oracle, SingleTreeForestEqualsDecisionTree) {
    Rng rng(2023);
    std::uniform_int_distribution<std::size_t> n_d(8, 80), f_d(1, 6);
    for (int inst = 0; inst < 20; ++inst) {
        const Data d = random_instance(rng, n_d(rng), f_d(rng));
        Hyperparams dt = hp_for(Algorithm::DecisionTree, static_cast<std::uint64_t>(inst));
        Hyperparams rf = hp_for(Algorithm::RandomForest, static_cast<std::uint64_t>(inst) + 100);
        rf.forest.n_trees = 1;
        rf.forest.bootstrap = false;
        rf.forest.bag_fraction = 1.0;
        rf.forest.features_per_split = FeatureSubset::All;
        const TrainedModel a = fit(dt, d.X, d.y);
        const TrainedModel b = fit(rf, d.X, d.y);
        EXPECT_EQ(std::get<DecisionTreeModel>(a.params()), std::get<ForestModel>(b.params()).trees.at(0));
        const Data probe = random_instance(rng, 200, d.X.cols());
        EXPECT_EQ(a.predict(probe.X), b.predict(probe.X)) << "instance " << inst;
        EXPECT_EQ(a.predict(d.X), b.predict(d.X));
    }
}

TEST(Oracle, LogisticGradientMatchesCentralDifferences) {
    Rng rng(77);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> n_d(5, 40), f_d(1, 8);
    for (int inst = 0; inst < 10; ++inst) {
        const std::size_t n = n_d(rng), F = f_d(rng);
        Matrix X(n, F);
        std::vector<std::uint8_t> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < F; ++k) X(i, k) = g(rng);
            y[i] = g(rng) > 0 ? 1 : 0;
        }
        LinearModel m;
        m.weights.resize(F);
        for (auto& w : m.weights) w = g(rng);
        m.bias = g(rng);
        const double lambda = 0.05;
        const auto grad = logistic_gradient(m, X, y, lambda);
        const double h = 1e-6;
        for (std::size_t k = 0; k <= F; ++k) {
            LinearModel plus = m, minus = m;
            double& p = k < F ? plus.weights[k] : plus.bias;
            double& q = k < F ? minus.weights[k] : minus.bias;
            p += h;
            q -= h;
            const double numeric = (logistic_loss(plus, X, y, lambda) - logistic_loss(minus, X, y, lambda)) / (2 * h);
            const double rel = std::fabs(numeric - grad[k]) / std::max(1.0, std::fabs(numeric));
            EXPECT_LE(rel, 1e-5) << "instance " << inst << " coord " << k;
        }
    }
}

TEST(Oracle, NaiveBayesMatchesClosedFormPosterior) {
    Rng rng(31);
    const std::vector<double> mu1{2.0, -1.0}, sd1{1.0, 2.0};
    const Data d = two_gaussians(rng, 20000, mu1, sd1);
    const TrainedModel m = fit(hp_for(Algorithm::NaiveBayes), d.X, d.y);
    double worst = 0.0;
    for (double x0 = -2.0; x0 <= 4.0; x0 += 0.25) {
        for (double x1 = -4.0; x1 <= 3.0; x1 += 0.5) {
            const double l1 = normal_logpdf(x0, mu1[0], sd1[0]) + normal_logpdf(x1, mu1[1], sd1[1]);
            const double l0 = normal_logpdf(x0, 0, 1) + normal_logpdf(x1, 0, 1);
            const double posterior = 1.0 / (1.0 + std::exp(l0 - l1));
            const double x[] = {x0, x1};
            worst = std::max(worst, std::fabs(m.score_one(x) - posterior));
        }
    }
    EXPECT_LE(worst, 0.05);
}

TEST(Oracle, DepthOneTreeFindsBestGiniStump) {
    Rng rng(8);
    for (int inst = 0; inst < 10; ++inst) {
        const Data d = random_instance(rng, 40, 3);
        Hyperparams hp = hp_for(Algorithm::DecisionTree);
        hp.tree.max_depth = 1;
        const TrainedModel m = fit(hp, d.X, d.y);
        const auto& tree = std::get<DecisionTreeModel>(m.params());
        // Brute force: weighted Gini of every feature/threshold between distinct values.
        auto gini = [](double p, double n) { return n == 0 ? 0.0 : 2.0 * p / n * (1.0 - p / n) * n; };
        double best = 1e300;
        for (std::size_t f = 0; f < 3; ++f) {
            for (std::size_t i = 0; i < d.X.rows(); ++i) {
                const double thr = d.X(i, f);
                double nl = 0, pl = 0, nr = 0, pr = 0;
                for (std::size_t r = 0; r < d.X.rows(); ++r) {
                    if (d.X(r, f) < thr) { nl += 1; pl += d.y[r]; } else { nr += 1; pr += d.y[r]; }
                }
                if (nl == 0 || nr == 0) continue;
                best = std::min(best, gini(pl, nl) + gini(pr, nr));
            }
        }
        ASSERT_EQ(tree.nodes.size(), 3u);
        const TreeNode& root = tree.nodes[0];
        double nl = 0, pl = 0, nr = 0, pr = 0;
        for (std::size_t r = 0; r < d.X.rows(); ++r) {
            if (d.X(r, static_cast<std::size_t>(root.feature)) < root.threshold) { nl += 1; pl += d.y[r]; }
            else { nr += 1; pr += d.y[r]; }
        }
        EXPECT_NEAR(gini(pl, nl) + gini(pr, nr), best, 1e-12);
    }
}

TEST(Models, AllAlgorithmsLearnSeparableData) {
    Rng rng(12);
    const Data d = two_gaussians(rng, 300, {4.0, 4.0}, {1.0, 1.0});
    for (Algorithm a : kAllAlgorithms) {
        const TrainedModel m = fit(hp_for(a), d.X, d.y);
        const auto pred = m.predict(d.X);
        std::size_t ok = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) ok += pred[i] == d.y[i];
        EXPECT_GT(static_cast<double>(ok) / static_cast<double>(pred.size()), 0.97) << to_string(a);
        for (double s : m.predict_score(d.X)) {
            EXPECT_GE(s, 0.0);
            EXPECT_LE(s, 1.0);
        }
    }
}

TEST(Models, SerializationRoundTripIsExact) {
    Rng rng(44);
    const Data d = two_gaussians(rng, 150, {1.0, 0.5, -0.5}, {1.0, 2.0, 0.5});
    const Data probe = two_gaussians(rng, 200, {1.0, 0.5, -0.5}, {1.0, 2.0, 0.5});
    for (Algorithm a : kAllAlgorithms) {
        const TrainedModel m = fit(hp_for(a, 9), d.X, d.y);
        const std::string text = serialize_model(m);
        const TrainedModel back = deserialize_model(text);
        EXPECT_EQ(back, m) << to_string(a);
        EXPECT_EQ(back.predict_score(probe.X), m.predict_score(probe.X)) << to_string(a);
        EXPECT_EQ(serialize_model(back), text);
    }
    EXPECT_EQ(code_of([] { deserialize_model("not a model"); }), ErrorCode::FormatError);
}

TEST(Models, ForestIsDeterministicAcrossThreadCounts) {
    Rng rng(3);
    const Data d = random_instance(rng, 300, 5);
    Hyperparams hp = hp_for(Algorithm::RandomForest, 5);
    hp.forest.n_trees = 24;
    const TrainedModel serial = fit(hp, d.X, d.y);
    hp.forest.n_jobs = 4;
    const TrainedModel parallel = fit(hp, d.X, d.y);
    EXPECT_EQ(std::get<ForestModel>(serial.params()), std::get<ForestModel>(parallel.params()));
    hp.seed = 6;
    EXPECT_NE(std::get<ForestModel>(serial.params()), std::get<ForestModel>(fit(hp, d.X, d.y).params()));
}

TEST(Models, FeatureSubsetResolution) {
    ForestParams p;
    EXPECT_EQ(resolve_features_per_split(p, 100), 10u);
    p.features_per_split = FeatureSubset::Log2;
    EXPECT_EQ(resolve_features_per_split(p, 64), 6u);
    p.features_per_split = FeatureSubset::All;
    EXPECT_EQ(resolve_features_per_split(p, 64), 64u);
    p.features_per_split = FeatureSubset::Fixed;
    p.fixed_features = 7;
    EXPECT_EQ(resolve_features_per_split(p, 64), 7u);
}

TEST(Models, TrainingDataGuards) {
    Matrix X(4, 2, 1.0);
    EXPECT_EQ(code_of([&] { fit(hp_for(Algorithm::DecisionTree), X, {1, 1, 1, 1}); }), ErrorCode::SingleClass);
    EXPECT_EQ(code_of([&] { fit(hp_for(Algorithm::DecisionTree), X, {1, 0, 1}); }), ErrorCode::DimensionMismatch);
    EXPECT_EQ(code_of([&] { fit(hp_for(Algorithm::DecisionTree), X, {1, 0, 2, 0}); }), ErrorCode::LabelOutOfRange);
    X(0, 0) = std::nan("");
    EXPECT_EQ(code_of([&] { fit(hp_for(Algorithm::NaiveBayes), X, {1, 0, 1, 0}); }), ErrorCode::NaNFeature);
    const TrainedModel m = fit(hp_for(Algorithm::LogisticRegression), Matrix(4, 2, 0.5), {1, 0, 1, 0});
    const double short_x[] = {1.0};
    EXPECT_EQ(code_of([&] { m.score_one(short_x); }), ErrorCode::DimensionMismatch);
    EXPECT_EQ(parse_algorithm("random_forest"), Algorithm::RandomForest);
    EXPECT_EQ(code_of([] { parse_algorithm("xgboost"); }), ErrorCode::ConfigError);
}

TEST(Models, IdenticalRowsWithMixedLabelsStopSplitting) {
    Matrix X(6, 1, 3.0);
    const TrainedModel m = fit(hp_for(Algorithm::DecisionTree), X, {1, 0, 1, 0, 1, 1});
    const auto& t = std::get<DecisionTreeModel>(m.params());
    EXPECT_EQ(t.nodes.size(), 1u);
    const double x[] = {3.0};
    EXPECT_NEAR(m.score_one(x), 4.0 / 6.0, 1e-15);
}

TEST(Models, TreesIgnoreMonotoneFeatureTransforms) {
    // Split thresholds move with the transform, but the training-row partition does not.
    Rng rng(90);
    for (int inst = 0; inst < 10; ++inst) {
        const Data d = random_instance(rng, 60, 4);
        Matrix T = d.X;
        for (double& v : T.data()) v = std::exp(0.7 * v) - 3.0;
        for (Algorithm a : {Algorithm::DecisionTree, Algorithm::RandomForest}) {
            const Hyperparams hp = hp_for(a, static_cast<std::uint64_t>(inst));
            EXPECT_EQ(fit(hp, d.X, d.y).predict(d.X), fit(hp, T, d.y).predict(T)) << to_string(a) << " " << inst;
        }
    }
}
