#include "cyberchar/ml.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "cyberchar/error.hpp"
#include "cyberchar/random.hpp"

namespace cyberchar {

std::string_view to_string(Algorithm a) noexcept {
    switch (a) {
        case Algorithm::DecisionTree: return "decision_tree";
        case Algorithm::RandomForest: return "random_forest";
        case Algorithm::LogisticRegression: return "logistic_regression";
        case Algorithm::LinearSvm: return "linear_svm";
        case Algorithm::NaiveBayes: return "naive_bayes";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view text) {
    for (Algorithm a : kAllAlgorithms) {
        if (to_string(a) == text) return a;
    }
    if (text == "dt") return Algorithm::DecisionTree;
    if (text == "rf") return Algorithm::RandomForest;
    if (text == "lr") return Algorithm::LogisticRegression;
    if (text == "svm") return Algorithm::LinearSvm;
    if (text == "nb") return Algorithm::NaiveBayes;
    fail(ErrorCode::ConfigError, "unknown algorithm '" + std::string(text) + "'");
}

std::string_view to_string(FeatureSubset f) noexcept {
    switch (f) {
        case FeatureSubset::All: return "all";
        case FeatureSubset::Sqrt: return "sqrt";
        case FeatureSubset::Log2: return "log2";
        case FeatureSubset::Fixed: return "fixed";
    }
    return "?";
}

FeatureSubset parse_feature_subset(std::string_view text) {
    if (text == "all") return FeatureSubset::All;
    if (text == "sqrt") return FeatureSubset::Sqrt;
    if (text == "log2") return FeatureSubset::Log2;
    if (text == "fixed") return FeatureSubset::Fixed;
    fail(ErrorCode::ConfigError, "unknown features_per_split '" + std::string(text) + "'");
}

void Hyperparams::validate() const {
    require(tree.min_samples_split >= 2, ErrorCode::ConfigError, "min_samples_split must be at least 2");
    require(forest.n_trees >= 1, ErrorCode::ConfigError, "n_trees must be at least 1");
    require(forest.bag_fraction > 0.0 && forest.bag_fraction <= 1.0, ErrorCode::ConfigError,
            "bag_fraction must lie in (0, 1]");
    require(forest.features_per_split != FeatureSubset::Fixed || forest.fixed_features >= 1,
            ErrorCode::ConfigError, "fixed features_per_split needs fixed_features >= 1");
    require(forest.n_jobs >= 1, ErrorCode::ConfigError, "n_jobs must be at least 1");
    require(linear.epochs >= 1, ErrorCode::ConfigError, "epochs must be at least 1");
    require(linear.learning_rate > 0.0 && linear.decay >= 0.0 && linear.l2_lambda >= 0.0,
            ErrorCode::ConfigError, "linear learning rate must be positive, decay and lambda non-negative");
    require(nb.variance_floor > 0.0, ErrorCode::ConfigError, "variance_floor must be positive");
}

double sigmoid(double z) noexcept {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// ---------------------------------------------------------------- trees

double DecisionTreeModel::score(std::span<const double> x) const noexcept {
    std::int32_t k = 0;
    while (nodes[static_cast<std::size_t>(k)].feature >= 0) {
        const TreeNode& n = nodes[static_cast<std::size_t>(k)];
        k = x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(k)].value;
}

std::size_t DecisionTreeModel::depth() const {
    if (nodes.empty()) return 0;
    std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 0}};
    std::size_t best = 0;
    while (!stack.empty()) {
        auto [k, d] = stack.back();
        stack.pop_back();
        best = std::max(best, d);
        const TreeNode& n = nodes[static_cast<std::size_t>(k)];
        if (n.feature >= 0) {
            stack.emplace_back(n.left, d + 1);
            stack.emplace_back(n.right, d + 1);
        }
    }
    return best;
}

std::size_t DecisionTreeModel::leaves() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

namespace {

struct ValueLabel {
    double v;
    std::uint8_t y;
};

class TreeBuilder {
public:
    TreeBuilder(const Matrix& X, const std::vector<std::uint8_t>& y, const TreeParams& p,
                std::size_t mtry, std::uint64_t seed)
        : X_(X), y_(y), p_(p), mtry_(std::min(mtry, X.cols())), rng_(seed) {}

    DecisionTreeModel build(std::vector<std::uint32_t> rows) {
        rows_ = std::move(rows);
        buf_.resize(rows_.size());
        grow(0, rows_.size(), 0);
        return std::move(model_);
    }

private:
    struct Split {
        std::int32_t feature = -1;
        double threshold = 0.0;
        double score = -1.0;
    };

    // Larger is better: sum over children of (p^2 + q^2) / n, i.e. minimal weighted Gini.
    void scan_feature(std::size_t f, std::size_t lo, std::size_t hi, std::size_t pos_total, Split& best) {
        const std::size_t n = hi - lo;
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint32_t r = rows_[lo + i];
            buf_[i] = {X_(r, f), y_[r]};
        }
        std::sort(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(n),
                  [](const ValueLabel& a, const ValueLabel& b) { return a.v < b.v; });
        if (buf_[0].v == buf_[n - 1].v) return;
        std::size_t pl = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            pl += buf_[i].y;
            if (!(buf_[i].v < buf_[i + 1].v)) continue;
            const double nl = static_cast<double>(i + 1);
            const double nr = static_cast<double>(n - i - 1);
            const double pld = static_cast<double>(pl);
            const double prd = static_cast<double>(pos_total - pl);
            const double s = (pld * pld + (nl - pld) * (nl - pld)) / nl +
                             (prd * prd + (nr - prd) * (nr - prd)) / nr;
            if (s > best.score) {
                double thr = 0.5 * (buf_[i].v + buf_[i + 1].v);
                if (!(buf_[i].v < thr) || !(thr <= buf_[i + 1].v)) thr = buf_[i + 1].v;
                best = {static_cast<std::int32_t>(f), thr, s};
            }
        }
    }

    std::int32_t grow(std::size_t lo, std::size_t hi, std::size_t depth) {
        const std::size_t n = hi - lo;
        std::size_t pos = 0;
        for (std::size_t i = lo; i < hi; ++i) pos += y_[rows_[i]];
        const auto id = static_cast<std::int32_t>(model_.nodes.size());
        TreeNode node;
        node.value = static_cast<double>(pos) / static_cast<double>(n);
        node.samples = static_cast<std::uint32_t>(n);
        model_.nodes.push_back(node);

        const bool pure = pos == 0 || pos == n;
        const bool depth_cap = p_.max_depth > 0 && depth >= p_.max_depth;
        if (pure || depth_cap || n < p_.min_samples_split) return id;

        Split best;
        const std::size_t F = X_.cols();
        if (mtry_ >= F) {
            for (std::size_t f = 0; f < F; ++f) scan_feature(f, lo, hi, pos, best);
        } else {
            for (std::size_t f : sample_without_replacement(F, mtry_, rng_)) scan_feature(f, lo, hi, pos, best);
            // Every sampled feature was constant here: widen to all features.
            if (best.feature < 0) {
                for (std::size_t f = 0; f < F; ++f) scan_feature(f, lo, hi, pos, best);
            }
        }
        if (best.feature < 0) return id;  // identical feature vectors with mixed labels

        const auto f = static_cast<std::size_t>(best.feature);
        const double thr = best.threshold;
        auto mid = std::stable_partition(rows_.begin() + static_cast<std::ptrdiff_t>(lo),
                                         rows_.begin() + static_cast<std::ptrdiff_t>(hi),
                                         [&](std::uint32_t r) { return X_(r, f) < thr; });
        const auto split_at = static_cast<std::size_t>(mid - rows_.begin());
        const std::int32_t left = grow(lo, split_at, depth + 1);
        const std::int32_t right = grow(split_at, hi, depth + 1);
        TreeNode& me = model_.nodes[static_cast<std::size_t>(id)];
        me.feature = best.feature;
        me.threshold = thr;
        me.left = left;
        me.right = right;
        return id;
    }

    const Matrix& X_;
    const std::vector<std::uint8_t>& y_;
    TreeParams p_;
    std::size_t mtry_;
    Rng rng_;
    std::vector<std::uint32_t> rows_;
    std::vector<ValueLabel> buf_;
    DecisionTreeModel model_;
};

void check_training_data(const Matrix& X, const std::vector<std::uint8_t>& y) {
    require(X.rows() == y.size(), ErrorCode::DimensionMismatch,
            "feature rows (" + std::to_string(X.rows()) + ") differ from labels (" +
                std::to_string(y.size()) + ")");
    require(X.cols() > 0, ErrorCode::DimensionMismatch, "training data has no features");
    bool has0 = false, has1 = false;
    for (auto v : y) {
        require(v <= 1, ErrorCode::LabelOutOfRange, "labels must be 0 or 1");
        (v ? has1 : has0) = true;
    }
    require(has0 && has1, ErrorCode::SingleClass, "training labels contain a single class");
    for (double v : X.data()) require(!std::isnan(v), ErrorCode::NaNFeature, "training features contain NaN");
}

}  // namespace

DecisionTreeModel fit_tree(const Matrix& X, const std::vector<std::uint8_t>& y,
                           const std::vector<std::uint32_t>& rows, const TreeParams& params,
                           std::size_t features_per_split, std::uint64_t seed) {
    require(!rows.empty(), ErrorCode::InsufficientData, "tree needs at least one sample");
    TreeBuilder b(X, y, params, features_per_split, seed);
    return b.build(rows);
}

std::size_t resolve_features_per_split(const ForestParams& params, std::size_t n_features) {
    const double F = static_cast<double>(n_features);
    switch (params.features_per_split) {
        case FeatureSubset::All: return n_features;
        case FeatureSubset::Sqrt: return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(F))));
        case FeatureSubset::Log2: return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::log2(F))));
        case FeatureSubset::Fixed: return std::min(params.fixed_features, n_features);
    }
    return n_features;
}

namespace {

ForestModel fit_forest(const Hyperparams& hp, const Matrix& X, const std::vector<std::uint8_t>& y) {
    const std::size_t n = X.rows();
    const std::size_t mtry = resolve_features_per_split(hp.forest, X.cols());
    const auto n_draw = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(hp.forest.bag_fraction * static_cast<double>(n))));
    ForestModel forest;
    forest.trees.resize(hp.forest.n_trees);

    auto train_one = [&](std::size_t t) {
        const std::uint64_t tree_seed = derive_seed(hp.seed, static_cast<std::uint64_t>(t));
        Rng rng(derive_seed(tree_seed, "bag"));
        std::vector<std::uint32_t> rows;
        rows.reserve(n_draw);
        if (hp.forest.bootstrap) {
            std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));
            for (std::size_t k = 0; k < n_draw; ++k) rows.push_back(pick(rng));
        } else if (n_draw == n) {
            for (std::size_t k = 0; k < n; ++k) rows.push_back(static_cast<std::uint32_t>(k));
        } else {
            for (std::size_t k : sample_without_replacement(n, n_draw, rng)) rows.push_back(static_cast<std::uint32_t>(k));
        }
        forest.trees[t] = fit_tree(X, y, rows, hp.tree, mtry, derive_seed(tree_seed, "splits"));
    };

    const std::size_t jobs = std::min(hp.forest.n_jobs, hp.forest.n_trees);
    if (jobs <= 1) {
        for (std::size_t t = 0; t < hp.forest.n_trees; ++t) train_one(t);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(jobs);
        for (std::size_t j = 0; j < jobs; ++j) {
            pool.emplace_back([&, j] {
                try {
                    for (std::size_t t = j; t < hp.forest.n_trees; t += jobs) train_one(t);
                } catch (...) {
                    errors[j] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
    return forest;
}

// ---------------------------------------------------------------- linear models

std::vector<double> margins(const LinearModel& m, const Matrix& X) {
    std::vector<double> z(X.rows());
    for (std::size_t r = 0; r < X.rows(); ++r) z[r] = m.margin(X.row(r));
    return z;
}

LinearModel fit_linear(const Hyperparams& hp, const Matrix& X, const std::vector<std::uint8_t>& y,
                       bool hinge) {
    const std::size_t n = X.rows();
    const std::size_t F = X.cols();
    LinearModel m;
    m.weights.assign(F, 0.0);
    std::vector<double> grad(F);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t epoch = 0; epoch < hp.linear.epochs; ++epoch) {
        const double eta = hp.linear.learning_rate / (1.0 + hp.linear.decay * static_cast<double>(epoch));
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_b = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const auto x = X.row(r);
            const double z = m.margin(x);
            double g;
            if (hinge) {
                const double ys = y[r] ? 1.0 : -1.0;
                g = ys * z < 1.0 ? -ys : 0.0;
            } else {
                g = sigmoid(z) - static_cast<double>(y[r]);
            }
            if (g == 0.0) continue;
            for (std::size_t k = 0; k < F; ++k) grad[k] += g * x[k];
            grad_b += g;
        }
        for (std::size_t k = 0; k < F; ++k) {
            m.weights[k] -= eta * (grad[k] * inv_n + hp.linear.l2_lambda * m.weights[k]);
        }
        m.bias -= eta * grad_b * inv_n;
    }
    return m;
}

// ---------------------------------------------------------------- naive Bayes

NaiveBayesModel fit_nb(const Hyperparams& hp, const Matrix& X, const std::vector<std::uint8_t>& y) {
    const std::size_t F = X.cols();
    NaiveBayesModel m;
    std::array<std::size_t, 2> count{};
    for (int c = 0; c < 2; ++c) {
        m.mean[c].assign(F, 0.0);
        m.variance[c].assign(F, 0.0);
    }
    for (std::size_t r = 0; r < X.rows(); ++r) {
        const int c = y[r];
        ++count[c];
        const auto x = X.row(r);
        for (std::size_t k = 0; k < F; ++k) m.mean[c][k] += x[k];
    }
    for (int c = 0; c < 2; ++c) {
        for (auto& v : m.mean[c]) v /= static_cast<double>(count[c]);
    }
    for (std::size_t r = 0; r < X.rows(); ++r) {
        const int c = y[r];
        const auto x = X.row(r);
        for (std::size_t k = 0; k < F; ++k) {
            const double d = x[k] - m.mean[c][k];
            m.variance[c][k] += d * d;
        }
    }
    const double total = static_cast<double>(X.rows());
    for (int c = 0; c < 2; ++c) {
        for (auto& v : m.variance[c]) v = std::max(v / static_cast<double>(count[c]), hp.nb.variance_floor);
        m.log_prior[c] = std::log(static_cast<double>(count[c]) / total);
    }
    return m;
}

}  // namespace

double LinearModel::margin(std::span<const double> x) const noexcept {
    double z = bias;
    for (std::size_t k = 0; k < weights.size(); ++k) z += weights[k] * x[k];
    return z;
}

double NaiveBayesModel::log_odds(std::span<const double> x) const noexcept {
    double ll[2];
    for (int c = 0; c < 2; ++c) {
        double s = log_prior[c];
        const auto& mu = mean[c];
        const auto& var = variance[c];
        for (std::size_t k = 0; k < mu.size(); ++k) {
            const double d = x[k] - mu[k];
            s -= 0.5 * (std::log(2.0 * std::numbers::pi * var[k]) + d * d / var[k]);
        }
        ll[c] = s;
    }
    return ll[1] - ll[0];
}

double logistic_loss(const LinearModel& m, const Matrix& X, const std::vector<std::uint8_t>& y,
                     double l2_lambda) {
    double loss = 0.0;
    const auto z = margins(m, X);
    for (std::size_t r = 0; r < X.rows(); ++r) {
        // log(1 + e^z) - y z, computed without overflow.
        const double softplus = z[r] > 0 ? z[r] + std::log1p(std::exp(-z[r])) : std::log1p(std::exp(z[r]));
        loss += softplus - static_cast<double>(y[r]) * z[r];
    }
    loss /= static_cast<double>(X.rows());
    double sq = 0.0;
    for (double w : m.weights) sq += w * w;
    return loss + 0.5 * l2_lambda * sq;
}

std::vector<double> logistic_gradient(const LinearModel& m, const Matrix& X,
                                      const std::vector<std::uint8_t>& y, double l2_lambda) {
    const std::size_t F = X.cols();
    std::vector<double> g(F + 1, 0.0);
    const auto z = margins(m, X);
    for (std::size_t r = 0; r < X.rows(); ++r) {
        const double e = sigmoid(z[r]) - static_cast<double>(y[r]);
        const auto x = X.row(r);
        for (std::size_t k = 0; k < F; ++k) g[k] += e * x[k];
        g[F] += e;
    }
    const double inv_n = 1.0 / static_cast<double>(X.rows());
    for (std::size_t k = 0; k < F; ++k) g[k] = g[k] * inv_n + l2_lambda * m.weights[k];
    g[F] *= inv_n;
    return g;
}

// ---------------------------------------------------------------- model facade

TrainedModel::TrainedModel(Hyperparams hp, std::size_t n_features, ModelParams params)
    : hp_(std::move(hp)), n_features_(n_features), params_(std::move(params)) {}

double TrainedModel::score_one(std::span<const double> x) const {
    require(x.size() == n_features_, ErrorCode::DimensionMismatch,
            "model expects " + std::to_string(n_features_) + " features, got " + std::to_string(x.size()));
    switch (hp_.algorithm) {
        case Algorithm::DecisionTree:
            return std::get<DecisionTreeModel>(params_).score(x);
        case Algorithm::RandomForest: {
            const auto& f = std::get<ForestModel>(params_);
            std::size_t votes = 0;
            for (const auto& t : f.trees) votes += t.score(x) >= 0.5 ? 1 : 0;
            return static_cast<double>(votes) / static_cast<double>(f.trees.size());
        }
        case Algorithm::LogisticRegression:
        case Algorithm::LinearSvm:
            return sigmoid(std::get<LinearModel>(params_).margin(x));
        case Algorithm::NaiveBayes: {
            const double d = std::get<NaiveBayesModel>(params_).log_odds(x);
            if (std::isnan(d)) return 0.5;
            return sigmoid(d);
        }
    }
    fail(ErrorCode::InvariantViolation, "unknown algorithm");
}

std::vector<double> TrainedModel::predict_score(const Matrix& X) const {
    require(X.cols() == n_features_ || X.rows() == 0, ErrorCode::DimensionMismatch,
            "model expects " + std::to_string(n_features_) + " features, got " + std::to_string(X.cols()));
    std::vector<double> s(X.rows());
    for (std::size_t r = 0; r < X.rows(); ++r) s[r] = score_one(X.row(r));
    return s;
}

std::vector<std::uint8_t> TrainedModel::predict(const Matrix& X) const {
    const auto s = predict_score(X);
    std::vector<std::uint8_t> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] >= 0.5 ? 1 : 0;
    return out;
}

TrainedModel fit(const Hyperparams& hp, const Matrix& X, const std::vector<std::uint8_t>& y) {
    hp.validate();
    check_training_data(X, y);
    switch (hp.algorithm) {
        case Algorithm::DecisionTree: {
            std::vector<std::uint32_t> rows(X.rows());
            for (std::size_t k = 0; k < rows.size(); ++k) rows[k] = static_cast<std::uint32_t>(k);
            return {hp, X.cols(), fit_tree(X, y, rows, hp.tree, X.cols(), hp.seed)};
        }
        case Algorithm::RandomForest:
            return {hp, X.cols(), fit_forest(hp, X, y)};
        case Algorithm::LogisticRegression:
            return {hp, X.cols(), fit_linear(hp, X, y, false)};
        case Algorithm::LinearSvm:
            return {hp, X.cols(), fit_linear(hp, X, y, true)};
        case Algorithm::NaiveBayes:
            return {hp, X.cols(), fit_nb(hp, X, y)};
    }
    fail(ErrorCode::InvariantViolation, "unknown algorithm");
}

}  // namespace cyberchar
