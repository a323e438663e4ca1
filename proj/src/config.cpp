#include "cyberchar/config.hpp"

#include <charconv>
#include <filesystem>
#include <functional>

#include <json.hpp>

#include "cyberchar/error.hpp"
#include "cyberchar/io.hpp"

namespace cyberchar {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_list(std::string_view v) {
    std::vector<std::string> out;
    v = trim(v);
    if (v.empty()) return out;
    std::size_t start = 0;
    while (true) {
        const std::size_t p = v.find(',', start);
        const auto item = trim(v.substr(start, p == v.npos ? v.npos : p - start));
        if (item.empty()) fail(ErrorCode::ConfigError, "empty list item");
        out.emplace_back(item);
        if (p == v.npos) break;
        start = p + 1;
    }
    return out;
}

double to_double(std::string_view v) {
    v = trim(v);
    double x = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    require(r.ec == std::errc() && r.ptr == v.data() + v.size() && std::isfinite(x), ErrorCode::ConfigError,
            "expected a number, got '" + std::string(v) + "'");
    return x;
}

std::uint64_t to_u64(std::string_view v) {
    v = trim(v);
    std::uint64_t x = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    require(r.ec == std::errc() && r.ptr == v.data() + v.size(), ErrorCode::ConfigError,
            "expected a non-negative integer, got '" + std::string(v) + "'");
    return x;
}

std::size_t to_size(std::string_view v) { return static_cast<std::size_t>(to_u64(v)); }

bool to_bool(std::string_view v) {
    v = trim(v);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    fail(ErrorCode::ConfigError, "expected true or false, got '" + std::string(v) + "'");
}

std::string num(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

std::string join(const std::vector<std::string>& items) {
    std::string s;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) s += ',';
        s += items[i];
    }
    return s;
}

template <typename T, typename F>
std::string join_map(const std::vector<T>& v, F f) {
    std::vector<std::string> items;
    for (const auto& x : v) items.push_back(f(x));
    return join(items);
}

template <typename T, typename F>
std::vector<T> parse_list(std::string_view v, F f) {
    std::vector<T> out;
    for (const auto& s : split_list(v)) out.push_back(f(s));
    return out;
}

struct Key {
    std::string name;
    std::function<void(ExperimentConfig&, std::string_view)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

using LevelRef = std::function<LevelConfig&(ExperimentConfig&)>;

void level_keys(std::vector<Key>& keys, const std::string& p, LevelRef ref) {
    auto cref = [ref](const ExperimentConfig& c) -> const LevelConfig& {
        return ref(const_cast<ExperimentConfig&>(c));
    };
    auto add = [&](std::string k, std::function<void(LevelConfig&, std::string_view)> set,
                   std::function<std::string(const LevelConfig&)> get) {
        keys.push_back({p + "." + k, [ref, set](ExperimentConfig& c, std::string_view v) { set(ref(c), v); },
                        [cref, get](const ExperimentConfig& c) { return get(cref(c)); }});
    };
    add("algorithm", [](LevelConfig& l, std::string_view v) { l.hp.algorithm = parse_algorithm(trim(v)); },
        [](const LevelConfig& l) { return std::string(to_string(l.hp.algorithm)); });
    add("candidates",
        [](LevelConfig& l, std::string_view v) {
            l.candidates = parse_list<Algorithm>(v, [](const std::string& s) { return parse_algorithm(s); });
        },
        [](const LevelConfig& l) {
            return join_map(l.candidates, [](Algorithm a) { return std::string(to_string(a)); });
        });
    add("window_len", [](LevelConfig& l, std::string_view v) { l.geometry.window_len = to_size(v); },
        [](const LevelConfig& l) { return std::to_string(l.geometry.window_len); });
    add("window_step", [](LevelConfig& l, std::string_view v) { l.geometry.step = to_size(v); },
        [](const LevelConfig& l) { return std::to_string(l.geometry.step); });
    add("scaling", [](LevelConfig& l, std::string_view v) { l.scaling = parse_scaling(trim(v)); },
        [](const LevelConfig& l) { return std::string(to_string(l.scaling)); });
    add("train_ratio", [](LevelConfig& l, std::string_view v) { l.train_ratio = to_double(v); },
        [](const LevelConfig& l) { return num(l.train_ratio); });
    add("eval_ratio", [](LevelConfig& l, std::string_view v) { l.eval_ratio = to_double(v); },
        [](const LevelConfig& l) { return num(l.eval_ratio); });
    add("split",
        [](LevelConfig& l, std::string_view v) {
            const bool shuffle = l.split.shuffle;
            l.split = SplitSpec::parse(trim(v));
            l.split.shuffle = shuffle;
        },
        [](const LevelConfig& l) { return l.split.to_text(); });
    add("split_shuffle", [](LevelConfig& l, std::string_view v) { l.split.shuffle = to_bool(v); },
        [](const LevelConfig& l) { return std::string(l.split.shuffle ? "true" : "false"); });
    add("tree.max_depth", [](LevelConfig& l, std::string_view v) { l.hp.tree.max_depth = to_size(v); },
        [](const LevelConfig& l) { return std::to_string(l.hp.tree.max_depth); });
    add("tree.min_samples_split",
        [](LevelConfig& l, std::string_view v) { l.hp.tree.min_samples_split = to_size(v); },
        [](const LevelConfig& l) { return std::to_string(l.hp.tree.min_samples_split); });
    add("forest.n_trees", [](LevelConfig& l, std::string_view v) { l.hp.forest.n_trees = to_size(v); },
        [](const LevelConfig& l) { return std::to_string(l.hp.forest.n_trees); });
    add("forest.bag_fraction", [](LevelConfig& l, std::string_view v) { l.hp.forest.bag_fraction = to_double(v); },
        [](const LevelConfig& l) { return num(l.hp.forest.bag_fraction); });
    add("forest.bootstrap", [](LevelConfig& l, std::string_view v) { l.hp.forest.bootstrap = to_bool(v); },
        [](const LevelConfig& l) { return std::string(l.hp.forest.bootstrap ? "true" : "false"); });
    add("forest.features",
        [](LevelConfig& l, std::string_view v) {
            v = trim(v);
            if (!v.empty() && std::isdigit(static_cast<unsigned char>(v.front()))) {
                l.hp.forest.features_per_split = FeatureSubset::Fixed;
                l.hp.forest.fixed_features = to_size(v);
            } else {
                l.hp.forest.features_per_split = parse_feature_subset(v);
            }
        },
        [](const LevelConfig& l) {
            return l.hp.forest.features_per_split == FeatureSubset::Fixed
                       ? std::to_string(l.hp.forest.fixed_features)
                       : std::string(to_string(l.hp.forest.features_per_split));
        });
    add("forest.n_jobs", [](LevelConfig& l, std::string_view v) { l.hp.forest.n_jobs = to_size(v); },
        [](const LevelConfig& l) { return std::to_string(l.hp.forest.n_jobs); });
    add("linear.learning_rate", [](LevelConfig& l, std::string_view v) { l.hp.linear.learning_rate = to_double(v); },
        [](const LevelConfig& l) { return num(l.hp.linear.learning_rate); });
    add("linear.decay", [](LevelConfig& l, std::string_view v) { l.hp.linear.decay = to_double(v); },
        [](const LevelConfig& l) { return num(l.hp.linear.decay); });
    add("linear.l2_lambda", [](LevelConfig& l, std::string_view v) { l.hp.linear.l2_lambda = to_double(v); },
        [](const LevelConfig& l) { return num(l.hp.linear.l2_lambda); });
    add("linear.epochs", [](LevelConfig& l, std::string_view v) { l.hp.linear.epochs = to_size(v); },
        [](const LevelConfig& l) { return std::to_string(l.hp.linear.epochs); });
    add("nb.variance_floor", [](LevelConfig& l, std::string_view v) { l.hp.nb.variance_floor = to_double(v); },
        [](const LevelConfig& l) { return num(l.hp.nb.variance_floor); });
}

#define CC_NUM(NAME, FIELD)                                                                  \
    keys.push_back({NAME, [](ExperimentConfig& c, std::string_view v) { c.FIELD = to_double(v); }, \
                    [](const ExperimentConfig& c) { return num(c.FIELD); }})
#define CC_SIZE(NAME, FIELD)                                                                \
    keys.push_back({NAME, [](ExperimentConfig& c, std::string_view v) { c.FIELD = to_size(v); }, \
                    [](const ExperimentConfig& c) { return std::to_string(c.FIELD); }})

std::vector<Key> build_keys() {
    std::vector<Key> keys;
    keys.push_back({"seed", [](ExperimentConfig& c, std::string_view v) { c.seed = to_u64(v); },
                    [](const ExperimentConfig& c) { return std::to_string(c.seed); }});
    keys.push_back({"catalog", [](ExperimentConfig& c, std::string_view v) { c.catalog = std::string(trim(v)); },
                    [](const ExperimentConfig& c) { return c.catalog; }});
    keys.push_back({"output_dir", [](ExperimentConfig& c, std::string_view v) { c.output_dir = std::string(trim(v)); },
                    [](const ExperimentConfig& c) { return c.output_dir; }});
    keys.push_back({"created", [](ExperimentConfig& c, std::string_view v) { c.created = std::string(trim(v)); },
                    [](const ExperimentConfig& c) { return c.created; }});
    CC_SIZE("jobs", jobs);
    keys.push_back({"eval.roc", [](ExperimentConfig& c, std::string_view v) { c.roc = to_bool(v); },
                    [](const ExperimentConfig& c) { return std::string(c.roc ? "true" : "false"); }});

    keys.push_back({"schedule.normal",
                    [](ExperimentConfig& c, std::string_view v) {
                        c.use_case.normal_schedule = OpSchedule::parse(trim(v));
                    },
                    [](const ExperimentConfig& c) { return c.use_case.normal_schedule.to_text(); }});

    CC_NUM("artifacts.outlier_rate", use_case.artifacts.outlier_rate);
    CC_NUM("artifacts.outlier_operating_share", use_case.artifacts.outlier_operating_share);
    CC_NUM("artifacts.null_rate", use_case.artifacts.null_rate);
    CC_NUM("artifacts.null_cluster_mean_len", use_case.artifacts.null_cluster_mean_len);
    CC_NUM("artifacts.outlier_min_scale", use_case.artifacts.outlier_min_scale);
    CC_NUM("artifacts.outlier_max_scale", use_case.artifacts.outlier_max_scale);
    CC_NUM("artifacts.noise_gain", use_case.artifacts.noise_gain);
    keys.push_back({"artifacts.noise_scales",
                    [](ExperimentConfig& c, std::string_view v) {
                        c.use_case.artifacts.noise_scales =
                            parse_list<double>(v, [](const std::string& s) { return to_double(s); });
                    },
                    [](const ExperimentConfig& c) {
                        return join_map(c.use_case.artifacts.noise_scales, [](double d) { return num(d); });
                    }});

    CC_NUM("dynamics.power_lag_s", use_case.dynamics.power_lag_s);
    CC_NUM("dynamics.prompt_fraction", use_case.dynamics.prompt_fraction);
    CC_NUM("dynamics.decay_time_s", use_case.dynamics.decay_time_s);
    CC_NUM("dynamics.temperature_lag_s", use_case.dynamics.temperature_lag_s);
    CC_NUM("dynamics.rate_smoothing", use_case.dynamics.rate_smoothing);
    CC_NUM("dynamics.it_rate_hz", use_case.dynamics.it_rate_hz);
    CC_NUM("dynamics.it_noise_correlation", use_case.dynamics.it_noise_correlation);

    CC_NUM("use_case.abnormal_power_percent", use_case.abnormal_power_percent);
    CC_NUM("use_case.abnormal_duration_s", use_case.abnormal_duration_s);
    CC_NUM("use_case.pulse_period_s", use_case.pulse_period_s);
    CC_SIZE("use_case.n_trips", use_case.n_trips);
    CC_SIZE("use_case.half_window_s", use_case.half_window_s);
    keys.push_back({"use_case.reserve_trip_powers",
                    [](ExperimentConfig& c, std::string_view v) {
                        c.use_case.reserve_trip_powers =
                            parse_list<double>(v, [](const std::string& s) { return to_double(s); });
                    },
                    [](const ExperimentConfig& c) {
                        return join_map(c.use_case.reserve_trip_powers, [](double d) { return num(d); });
                    }});
    CC_NUM("use_case.reserve_hold_s", use_case.reserve_hold_s);
    CC_NUM("use_case.reserve_shutdown_s", use_case.reserve_shutdown_s);

    CC_NUM("dos.low_rate", use_case.dos_low_rate);
    CC_NUM("dos.high_rate", use_case.dos_high_rate);
    CC_NUM("dos.start_s", use_case.dos_start_s);
    keys.push_back({"dos.end_s",
                    [](ExperimentConfig& c, std::string_view v) {
                        v = trim(v);
                        if (v == "auto") {
                            c.use_case.dos_end_s.reset();
                        } else {
                            c.use_case.dos_end_s = to_double(v);
                        }
                    },
                    [](const ExperimentConfig& c) {
                        return c.use_case.dos_end_s ? num(*c.use_case.dos_end_s) : std::string("auto");
                    }});
    CC_NUM("dos.rate_noise", use_case.dos_rate_noise);
    CC_NUM("dos.it_sample_loss", use_case.dos_it_sample_loss);

    for (std::size_t k = 0; k < 3; ++k) {
        keys.push_back({"fdi.level" + std::to_string(k + 1) + ".targets",
                        [k](ExperimentConfig& c, std::string_view v) { c.fdi_targets[k] = split_list(v); },
                        [k](const ExperimentConfig& c) { return join(c.fdi_targets[k]); }});
    }

    keys.push_back({"clean.clip_outliers",
                    [](ExperimentConfig& c, std::string_view v) { c.architecture.clean.clip_outliers = to_bool(v); },
                    [](const ExperimentConfig& c) {
                        return std::string(c.architecture.clean.clip_outliers ? "true" : "false");
                    }});
    CC_NUM("clean.mad_k", architecture.clean.mad_k);
    keys.push_back({"pipeline.label_rule",
                    [](ExperimentConfig& c, std::string_view v) {
                        v = trim(v);
                        if (v == "any_abnormal") {
                            c.architecture.label_rule = LabelRule::AnyAbnormal;
                        } else if (v == "last_timestep") {
                            c.architecture.label_rule = LabelRule::LastTimestep;
                        } else {
                            fail(ErrorCode::ConfigError, "label rule must be any_abnormal or last_timestep");
                        }
                    },
                    [](const ExperimentConfig& c) {
                        return std::string(c.architecture.label_rule == LabelRule::AnyAbnormal ? "any_abnormal"
                                                                                                 : "last_timestep");
                    }});

    for (int k = 1; k <= 3; ++k) {
        level_keys(keys, "level" + std::to_string(k),
                   [k](ExperimentConfig& c) -> LevelConfig& { return c.architecture.level(k); });
    }
    level_keys(keys, "combined", [](ExperimentConfig& c) -> LevelConfig& { return c.combined.level; });

    keys.push_back({"sweep.preset",
                    [](ExperimentConfig& c, std::string_view v) {
                        v = trim(v);
                        const int level = c.sweep.level;
                        if (v == "desk") {
                            c.sweep = SweepGrid::desk();
                        } else if (v == "full") {
                            c.sweep = SweepGrid::full();
                        } else {
                            fail(ErrorCode::ConfigError, "sweep preset must be desk or full");
                        }
                        c.sweep.level = level;
                    },
                    nullptr});
    keys.push_back({"sweep.level",
                    [](ExperimentConfig& c, std::string_view v) { c.sweep.level = static_cast<int>(to_u64(v)); },
                    [](const ExperimentConfig& c) { return std::to_string(c.sweep.level); }});
    keys.push_back({"sweep.window_len",
                    [](ExperimentConfig& c, std::string_view v) {
                        c.sweep.window_len = parse_list<std::size_t>(v, [](const std::string& s) { return to_size(s); });
                    },
                    [](const ExperimentConfig& c) {
                        return join_map(c.sweep.window_len, [](std::size_t x) { return std::to_string(x); });
                    }});
    keys.push_back({"sweep.window_step",
                    [](ExperimentConfig& c, std::string_view v) {
                        c.sweep.window_step = parse_list<std::size_t>(v, [](const std::string& s) { return to_size(s); });
                    },
                    [](const ExperimentConfig& c) {
                        return join_map(c.sweep.window_step, [](std::size_t x) { return std::to_string(x); });
                    }});
    keys.push_back({"sweep.train_ratio",
                    [](ExperimentConfig& c, std::string_view v) {
                        c.sweep.train_ratio = parse_list<double>(v, [](const std::string& s) { return to_double(s); });
                    },
                    [](const ExperimentConfig& c) { return join_map(c.sweep.train_ratio, [](double x) { return num(x); }); }});
    keys.push_back({"sweep.scaling",
                    [](ExperimentConfig& c, std::string_view v) {
                        c.sweep.scaling =
                            parse_list<ScalingMethod>(v, [](const std::string& s) { return parse_scaling(s); });
                    },
                    [](const ExperimentConfig& c) {
                        return join_map(c.sweep.scaling, [](ScalingMethod m) { return std::string(to_string(m)); });
                    }});
    keys.push_back({"sweep.algorithm",
                    [](ExperimentConfig& c, std::string_view v) {
                        c.sweep.algorithm =
                            parse_list<Algorithm>(v, [](const std::string& s) { return parse_algorithm(s); });
                    },
                    [](const ExperimentConfig& c) {
                        return join_map(c.sweep.algorithm, [](Algorithm a) { return std::string(to_string(a)); });
                    }});
    keys.push_back({"sweep.split",
                    [](ExperimentConfig& c, std::string_view v) {
                        c.sweep.split = parse_list<SplitSpec>(v, [](const std::string& s) { return SplitSpec::parse(s); });
                    },
                    [](const ExperimentConfig& c) {
                        return join_map(c.sweep.split, [](const SplitSpec& s) { return s.to_text(); });
                    }});
    keys.push_back({"sweep.abnormal_fraction",
                    [](ExperimentConfig& c, std::string_view v) {
                        c.sweep.abnormal_fraction =
                            parse_list<double>(v, [](const std::string& s) { return to_double(s); });
                    },
                    [](const ExperimentConfig& c) {
                        return join_map(c.sweep.abnormal_fraction, [](double x) { return num(x); });
                    }});
    CC_SIZE("sweep.budget", sweep.budget);
    keys.push_back({"sweep.n_trees",
                    [](ExperimentConfig& c, std::string_view v) {
                        v = trim(v);
                        if (v == "auto") {
                            c.sweep.n_trees.reset();
                        } else {
                            c.sweep.n_trees = to_size(v);
                        }
                    },
                    [](const ExperimentConfig& c) {
                        return c.sweep.n_trees ? std::to_string(*c.sweep.n_trees) : std::string("auto");
                    }});

    keys.push_back({"out_of_training.fdi_signals",
                    [](ExperimentConfig& c, std::string_view v) { c.out_of_training.fdi_signals = split_list(v); },
                    [](const ExperimentConfig& c) { return join(c.out_of_training.fdi_signals); }});
    keys.push_back({"out_of_training.dos",
                    [](ExperimentConfig& c, std::string_view v) { c.out_of_training.dos = parse_dos_level(trim(v)); },
                    [](const ExperimentConfig& c) { return std::string(to_string(c.out_of_training.dos)); }});
    keys.push_back({"out_of_training.fdi_level",
                    [](ExperimentConfig& c, std::string_view v) {
                        c.out_of_training.fdi_level = static_cast<int>(to_u64(v));
                    },
                    [](const ExperimentConfig& c) { return std::to_string(c.out_of_training.fdi_level); }});
    return keys;
}

#undef CC_NUM
#undef CC_SIZE

const std::vector<Key>& keys() {
    static const std::vector<Key> k = build_keys();
    return k;
}

const Key* find_key(std::string_view name) {
    for (const auto& k : keys()) {
        if (k.name == name) return &k;
    }
    return nullptr;
}

void apply_at(ExperimentConfig& c, std::string_view key, std::string_view value, const std::string& where) {
    const Key* k = find_key(key);
    require(k != nullptr, ErrorCode::ConfigError, where + ": unknown key '" + std::string(key) + "'");
    try {
        k->set(c, value);
    } catch (const Error& e) {
        fail(ErrorCode::ConfigError, where + ": " + std::string(key) + ": " + e.what());
    }
}

void finish(ExperimentConfig& c, const std::string& source, const std::string& base_dir) {
    try {
        c.resolve(base_dir);
        c.validate();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::IoError) throw;
        fail(ErrorCode::ConfigError, source + ": " + e.what());
    }
}

ExperimentConfig parse_text(std::string_view text, const std::string& source, const std::string& base_dir) {
    ExperimentConfig c;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t p = text.find('\n', start);
        if (p == text.npos) p = text.size();
        ++line_no;
        std::string_view line = text.substr(start, p - start);
        start = p + 1;
        const std::size_t hash = line.find('#');
        if (hash != line.npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) {
            if (p == text.size()) break;
            continue;
        }
        const std::string where = source + " line " + std::to_string(line_no);
        const std::size_t eq = line.find('=');
        require(eq != line.npos, ErrorCode::ConfigError, where + ": expected 'key = value'");
        apply_at(c, trim(line.substr(0, eq)), line.substr(eq + 1), where);
        if (p == text.size()) break;
    }
    finish(c, source, base_dir);
    return c;
}

void flatten(const nlohmann::json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
        return;
    }
    auto scalar = [](const nlohmann::json& v) -> std::string {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_null()) return "";
        return v.dump();
    };
    if (j.is_array()) {
        std::string s;
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) s += ',';
            s += scalar(j[i]);
        }
        out.emplace_back(prefix, s);
    } else {
        out.emplace_back(prefix, scalar(j));
    }
}

ExperimentConfig parse_json(std::string_view text, const std::string& source, const std::string& base_dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorCode::ConfigError, source + ": " + e.what());
    }
    require(j.is_object(), ErrorCode::ConfigError, source + ": top level must be an object");
    std::vector<std::pair<std::string, std::string>> flat;
    flatten(j, "", flat);
    // "preset" resets the grid, so it goes first.
    std::stable_partition(flat.begin(), flat.end(), [](const auto& kv) { return kv.first == "sweep.preset"; });
    ExperimentConfig c;
    for (const auto& [k, v] : flat) apply_at(c, k, v, source + " key " + k);
    finish(c, source, base_dir);
    return c;
}

}  // namespace

void ExperimentConfig::resolve(const std::string& base_dir) {
    if (catalog != "default") {
        std::filesystem::path p(catalog);
        if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
        use_case.catalog = parse_catalog_json(read_text(p));
    } else {
        use_case.catalog = default_catalog();
    }
    for (std::size_t k = 0; k < 3; ++k) {
        use_case.fdi_targets[k].clear();
        for (const auto& name : fdi_targets[k]) use_case.fdi_targets[k].push_back(use_case.catalog.ot_index(name));
    }
}

void ExperimentConfig::validate() const {
    require(jobs >= 1, ErrorCode::ConfigError, "jobs must be at least 1");
    use_case.validate();
    architecture.validate();
    combined.level.hp.validate();
    combined.level.split.validate();
    require(sweep.level >= 1 && sweep.level <= 3, ErrorCode::ConfigError, "sweep level must be 1, 2 or 3");
    require(out_of_training.fdi_level >= 1 && out_of_training.fdi_level <= 3, ErrorCode::ConfigError,
            "out-of-training FDI level must be 1, 2 or 3");
    require(out_of_training.dos != DosLevel::None, ErrorCode::ConfigError, "out-of-training DoS must be low or high");
    for (const auto& s : out_of_training.fdi_signals) (void)use_case.catalog.ot_index(s);
}

ExperimentConfig parse_config(std::string_view text, const std::string& source) { return parse_text(text, source, ""); }

ExperimentConfig parse_config_json(std::string_view text, const std::string& source) {
    return parse_json(text, source, "");
}

ExperimentConfig load_config(const std::string& path) {
    std::string text;
    try {
        text = read_text(path);
    } catch (const Error& e) {
        fail(ErrorCode::ConfigError, e.what());
    }
    const std::string base = std::filesystem::path(path).parent_path().string();
    if (path.ends_with(".json")) return parse_json(text, path, base);
    return parse_text(text, path, base);
}

std::string to_text(const ExperimentConfig& config) {
    std::string out;
    for (const auto& k : keys()) {
        if (!k.get) continue;
        out += k.name;
        out += " = ";
        out += k.get(config);
        out += '\n';
    }
    return out;
}

void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value) {
    apply_at(config, key, value, "setting");
    finish(config, "setting", "");
}

}  // namespace cyberchar
