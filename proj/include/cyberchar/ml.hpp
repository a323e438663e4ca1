#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cyberchar/matrix.hpp"

namespace cyberchar {

enum class Algorithm : std::uint8_t {
    DecisionTree,
    RandomForest,
    LogisticRegression,
    LinearSvm,
    NaiveBayes,
};

inline constexpr std::array<Algorithm, 5> kAllAlgorithms = {
    Algorithm::DecisionTree, Algorithm::RandomForest, Algorithm::LogisticRegression,
    Algorithm::LinearSvm, Algorithm::NaiveBayes};

std::string_view to_string(Algorithm a) noexcept;
Algorithm parse_algorithm(std::string_view text);

enum class FeatureSubset : std::uint8_t { All, Sqrt, Log2, Fixed };
std::string_view to_string(FeatureSubset f) noexcept;
FeatureSubset parse_feature_subset(std::string_view text);

struct TreeParams {
    std::size_t max_depth = 0;  // 0 = unlimited
    std::size_t min_samples_split = 2;
    bool operator==(const TreeParams&) const = default;
};

struct ForestParams {
    std::size_t n_trees = 100;
    double bag_fraction = 1.0;  // sample size relative to the training set
    bool bootstrap = true;      // draw with replacement
    FeatureSubset features_per_split = FeatureSubset::Sqrt;
    std::size_t fixed_features = 0;
    std::size_t n_jobs = 1;
    bool operator==(const ForestParams&) const = default;
};

struct LinearParams {
    double learning_rate = 0.1;
    double decay = 0.01;  // step size lr / (1 + decay * epoch)
    double l2_lambda = 1e-4;
    std::size_t epochs = 200;
    bool operator==(const LinearParams&) const = default;
};

struct NbParams {
    double variance_floor = 1e-9;
    bool operator==(const NbParams&) const = default;
};

struct Hyperparams {
    Algorithm algorithm = Algorithm::RandomForest;
    TreeParams tree;
    ForestParams forest;
    LinearParams linear;
    NbParams nb;
    std::uint64_t seed = 0;

    void validate() const;
    bool operator==(const Hyperparams&) const = default;
};

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;     // go left when x[feature] < threshold
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;         // fraction of positive training samples reaching the node
    std::uint32_t samples = 0;

    bool operator==(const TreeNode&) const = default;
};

struct DecisionTreeModel {
    std::vector<TreeNode> nodes;

    double score(std::span<const double> x) const noexcept;
    std::size_t depth() const;
    std::size_t leaves() const;
    bool operator==(const DecisionTreeModel&) const = default;
};

struct ForestModel {
    std::vector<DecisionTreeModel> trees;
    bool operator==(const ForestModel&) const = default;
};

struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
    double margin(std::span<const double> x) const noexcept;
    bool operator==(const LinearModel&) const = default;
};

struct NaiveBayesModel {
    std::array<double, 2> log_prior{};
    std::array<std::vector<double>, 2> mean;
    std::array<std::vector<double>, 2> variance;

    /// log p(y=1 | x) - log p(y=0 | x).
    double log_odds(std::span<const double> x) const noexcept;
    bool operator==(const NaiveBayesModel&) const = default;
};

using ModelParams = std::variant<DecisionTreeModel, ForestModel, LinearModel, NaiveBayesModel>;

/// A fitted binary classifier. Scores lie in [0, 1]; labels are score >= 0.5,
/// so exact ties resolve to the positive class.
class TrainedModel {
public:
    TrainedModel() = default;
    TrainedModel(Hyperparams hp, std::size_t n_features, ModelParams params);

    Algorithm algorithm() const noexcept { return hp_.algorithm; }
    const Hyperparams& hyperparams() const noexcept { return hp_; }
    std::size_t n_features() const noexcept { return n_features_; }
    const ModelParams& params() const noexcept { return params_; }

    double score_one(std::span<const double> x) const;
    std::uint8_t predict_one(std::span<const double> x) const { return score_one(x) >= 0.5 ? 1 : 0; }
    std::vector<double> predict_score(const Matrix& X) const;
    std::vector<std::uint8_t> predict(const Matrix& X) const;

    bool operator==(const TrainedModel&) const = default;

private:
    Hyperparams hp_;
    std::size_t n_features_ = 0;
    ModelParams params_;
};

TrainedModel fit(const Hyperparams& hp, const Matrix& X, const std::vector<std::uint8_t>& y);

DecisionTreeModel fit_tree(const Matrix& X, const std::vector<std::uint8_t>& y,
                           const std::vector<std::uint32_t>& rows, const TreeParams& params,
                           std::size_t features_per_split, std::uint64_t seed);

std::size_t resolve_features_per_split(const ForestParams& params, std::size_t n_features);

/// Mean L2-regularised cross-entropy and its gradient (weights then bias).
double logistic_loss(const LinearModel& m, const Matrix& X, const std::vector<std::uint8_t>& y,
                     double l2_lambda);
std::vector<double> logistic_gradient(const LinearModel& m, const Matrix& X,
                                      const std::vector<std::uint8_t>& y, double l2_lambda);

double sigmoid(double z) noexcept;

/// Versioned text form; load(save(m)) reproduces predictions bit for bit.
std::string serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(std::string_view text);

}  // namespace cyberchar
