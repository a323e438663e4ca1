#include <cctype>
#include <charconv>
#include <cstdio>
#include <string>

#include "cyberchar/error.hpp"
#include "cyberchar/ml.hpp"

namespace cyberchar {

namespace {

constexpr std::string_view kMagic = "cyberchar-model v1";

void put(std::string& out, double v) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
    out.append(buf, static_cast<std::size_t>(n));
}

void put_kv(std::string& out, std::string_view key, std::string_view value) {
    out.append(key);
    out.push_back(' ');
    out.append(value);
    out.push_back('\n');
}

void put_kv(std::string& out, std::string_view key, double value) {
    out.append(key);
    out.push_back(' ');
    put(out, value);
    out.push_back('\n');
}

void put_kv(std::string& out, std::string_view key, std::uint64_t value) {
    put_kv(out, key, std::to_string(value));
}

void put_vector(std::string& out, const std::vector<double>& v) {
    out.append(std::to_string(v.size()));
    for (double x : v) {
        out.push_back(' ');
        put(out, x);
    }
    out.push_back('\n');
}

void put_tree(std::string& out, const DecisionTreeModel& t) {
    out.append("tree ").append(std::to_string(t.nodes.size())).push_back('\n');
    for (const auto& n : t.nodes) {
        out.append(std::to_string(n.feature)).push_back(' ');
        put(out, n.threshold);
        out.push_back(' ');
        out.append(std::to_string(n.left)).push_back(' ');
        out.append(std::to_string(n.right)).push_back(' ');
        put(out, n.value);
        out.push_back(' ');
        out.append(std::to_string(n.samples)).push_back('\n');
    }
}

/// Whitespace tokenizer with line tracking for error messages.
class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    std::string_view token() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            if (text_[pos_] == '\n') ++line_;
            ++pos_;
        }
        require(pos_ < text_.size(), ErrorCode::FormatError, "model file ends early at line " + std::to_string(line_));
        const std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        return text_.substr(start, pos_ - start);
    }

    std::string_view line() {
        while (pos_ < text_.size() && text_[pos_] == '\n') {
            ++line_;
            ++pos_;
        }
        const std::size_t end = text_.find('\n', pos_);
        const std::string_view l = text_.substr(pos_, end == text_.npos ? text_.npos : end - pos_);
        pos_ = end == text_.npos ? text_.size() : end;
        return l;
    }

    void expect(std::string_view word) {
        const auto t = token();
        require(t == word, ErrorCode::FormatError,
                "model file line " + std::to_string(line_) + ": expected '" + std::string(word) + "', found '" +
                    std::string(t) + "'");
    }

    double number() {
        const auto t = token();
        double v = 0.0;
        auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        require(ec == std::errc() && p == t.data() + t.size(), ErrorCode::FormatError,
                "model file line " + std::to_string(line_) + ": bad number '" + std::string(t) + "'");
        return v;
    }

    template <typename Int>
    Int integer() {
        const auto t = token();
        Int v{};
        auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        require(ec == std::errc() && p == t.data() + t.size(), ErrorCode::FormatError,
                "model file line " + std::to_string(line_) + ": bad integer '" + std::string(t) + "'");
        return v;
    }

    std::string_view keyed(std::string_view key) {
        expect(key);
        return token();
    }
    double keyed_number(std::string_view key) {
        expect(key);
        return number();
    }
    template <typename Int>
    Int keyed_int(std::string_view key) {
        expect(key);
        return integer<Int>();
    }

    std::vector<double> vector() {
        const auto n = integer<std::size_t>();
        std::vector<double> v(n);
        for (auto& x : v) x = number();
        return v;
    }

    DecisionTreeModel tree() {
        expect("tree");
        const auto n = integer<std::size_t>();
        DecisionTreeModel t;
        t.nodes.resize(n);
        for (auto& node : t.nodes) {
            node.feature = integer<std::int32_t>();
            node.threshold = number();
            node.left = integer<std::int32_t>();
            node.right = integer<std::int32_t>();
            node.value = number();
            node.samples = integer<std::uint32_t>();
        }
        for (const auto& node : t.nodes) {
            if (node.feature < 0) continue;
            require(node.left > 0 && node.right > 0 && static_cast<std::size_t>(node.left) < n &&
                        static_cast<std::size_t>(node.right) < n,
                    ErrorCode::FormatError, "model file holds a tree with dangling child links");
        }
        require(n > 0, ErrorCode::FormatError, "model file holds an empty tree");
        return t;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

}  // namespace

std::string serialize_model(const TrainedModel& model) {
    const Hyperparams& hp = model.hyperparams();
    std::string out;
    out.append(kMagic).push_back('\n');
    put_kv(out, "algorithm", to_string(hp.algorithm));
    put_kv(out, "seed", hp.seed);
    put_kv(out, "n_features", static_cast<std::uint64_t>(model.n_features()));
    put_kv(out, "tree.max_depth", static_cast<std::uint64_t>(hp.tree.max_depth));
    put_kv(out, "tree.min_samples_split", static_cast<std::uint64_t>(hp.tree.min_samples_split));
    put_kv(out, "forest.n_trees", static_cast<std::uint64_t>(hp.forest.n_trees));
    put_kv(out, "forest.bag_fraction", hp.forest.bag_fraction);
    put_kv(out, "forest.bootstrap", static_cast<std::uint64_t>(hp.forest.bootstrap ? 1 : 0));
    put_kv(out, "forest.features_per_split", to_string(hp.forest.features_per_split));
    put_kv(out, "forest.fixed_features", static_cast<std::uint64_t>(hp.forest.fixed_features));
    put_kv(out, "forest.n_jobs", static_cast<std::uint64_t>(hp.forest.n_jobs));
    put_kv(out, "linear.learning_rate", hp.linear.learning_rate);
    put_kv(out, "linear.decay", hp.linear.decay);
    put_kv(out, "linear.l2_lambda", hp.linear.l2_lambda);
    put_kv(out, "linear.epochs", static_cast<std::uint64_t>(hp.linear.epochs));
    put_kv(out, "nb.variance_floor", hp.nb.variance_floor);
    out.append("params\n");
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, DecisionTreeModel>) {
                put_tree(out, p);
            } else if constexpr (std::is_same_v<P, ForestModel>) {
                out.append("trees ").append(std::to_string(p.trees.size())).push_back('\n');
                for (const auto& t : p.trees) put_tree(out, t);
            } else if constexpr (std::is_same_v<P, LinearModel>) {
                out.append("weights ");
                put_vector(out, p.weights);
                put_kv(out, "bias", p.bias);
            } else {
                out.append("log_prior ");
                put(out, p.log_prior[0]);
                out.push_back(' ');
                put(out, p.log_prior[1]);
                out.push_back('\n');
                for (int c = 0; c < 2; ++c) {
                    out.append("mean ");
                    put_vector(out, p.mean[c]);
                    out.append("variance ");
                    put_vector(out, p.variance[c]);
                }
            }
        },
        model.params());
    out.append("end\n");
    return out;
}

TrainedModel deserialize_model(std::string_view text) {
    Reader in(text);
    require(in.line() == kMagic, ErrorCode::FormatError, "not a cyberchar model file (bad header)");
    Hyperparams hp;
    hp.algorithm = parse_algorithm(in.keyed("algorithm"));
    hp.seed = in.keyed_int<std::uint64_t>("seed");
    const auto n_features = in.keyed_int<std::size_t>("n_features");
    hp.tree.max_depth = in.keyed_int<std::size_t>("tree.max_depth");
    hp.tree.min_samples_split = in.keyed_int<std::size_t>("tree.min_samples_split");
    hp.forest.n_trees = in.keyed_int<std::size_t>("forest.n_trees");
    hp.forest.bag_fraction = in.keyed_number("forest.bag_fraction");
    hp.forest.bootstrap = in.keyed_int<int>("forest.bootstrap") != 0;
    hp.forest.features_per_split = parse_feature_subset(in.keyed("forest.features_per_split"));
    hp.forest.fixed_features = in.keyed_int<std::size_t>("forest.fixed_features");
    hp.forest.n_jobs = in.keyed_int<std::size_t>("forest.n_jobs");
    hp.linear.learning_rate = in.keyed_number("linear.learning_rate");
    hp.linear.decay = in.keyed_number("linear.decay");
    hp.linear.l2_lambda = in.keyed_number("linear.l2_lambda");
    hp.linear.epochs = in.keyed_int<std::size_t>("linear.epochs");
    hp.nb.variance_floor = in.keyed_number("nb.variance_floor");
    in.expect("params");

    ModelParams params;
    auto check_width = [&](std::size_t n) {
        require(n == n_features, ErrorCode::FormatError, "model parameter width differs from n_features");
    };
    auto check_tree = [&](const DecisionTreeModel& t) {
        for (const auto& node : t.nodes) {
            require(node.feature < static_cast<std::int32_t>(n_features), ErrorCode::FormatError,
                    "tree split references a feature beyond n_features");
        }
    };
    switch (hp.algorithm) {
        case Algorithm::DecisionTree: {
            auto t = in.tree();
            check_tree(t);
            params = std::move(t);
            break;
        }
        case Algorithm::RandomForest: {
            ForestModel f;
            f.trees.resize(in.keyed_int<std::size_t>("trees"));
            require(!f.trees.empty(), ErrorCode::FormatError, "forest without trees");
            for (auto& t : f.trees) {
                t = in.tree();
                check_tree(t);
            }
            params = std::move(f);
            break;
        }
        case Algorithm::LogisticRegression:
        case Algorithm::LinearSvm: {
            LinearModel m;
            in.expect("weights");
            m.weights = in.vector();
            check_width(m.weights.size());
            m.bias = in.keyed_number("bias");
            params = std::move(m);
            break;
        }
        case Algorithm::NaiveBayes: {
            NaiveBayesModel m;
            in.expect("log_prior");
            m.log_prior[0] = in.number();
            m.log_prior[1] = in.number();
            for (int c = 0; c < 2; ++c) {
                in.expect("mean");
                m.mean[c] = in.vector();
                check_width(m.mean[c].size());
                in.expect("variance");
                m.variance[c] = in.vector();
                check_width(m.variance[c].size());
            }
            params = std::move(m);
            break;
        }
    }
    in.expect("end");
    return TrainedModel(hp, n_features, std::move(params));
}

}  // namespace cyberchar
