#include "cyberchar/architecture.hpp"

#include <algorithm>
#include <cstring>

#include "cyberchar/error.hpp"
#include "cyberchar/random.hpp"

namespace cyberchar {

ArchitectureParams ArchitectureParams::defaults() {
    ArchitectureParams p;
    for (LevelConfig* l : {&p.level1, &p.level2, &p.level3}) {
        l->hp.algorithm = Algorithm::RandomForest;
        l->geometry = {20, 1};
        l->scaling = ScalingMethod::Standard;
        l->split = SplitSpec{};
        l->train_ratio = 20.0;
        l->eval_ratio = 30.0;
    }
    p.level3.train_ratio = 1.0 / 3.0;
    p.level3.eval_ratio = 1.0 / 3.0;
    return p;
}

void ArchitectureParams::validate() const {
    for (int k = 1; k <= 3; ++k) {
        const LevelConfig& l = level(k);
        l.hp.validate();
        l.split.validate();
        require(l.geometry.window_len >= 1 && l.geometry.step >= 1, ErrorCode::ConfigError,
                "level " + std::to_string(k) + " window length and step must be at least 1");
        require(l.train_ratio > 0 && l.eval_ratio > 0, ErrorCode::ConfigError,
                "level " + std::to_string(k) + " balance ratios must be positive");
    }
    require(level1.geometry == level3.geometry, ErrorCode::ConfigError,
            "levels 1 and 3 must share the OT window geometry");
    require(clean.mad_k > 0, ErrorCode::ConfigError, "MAD multiplier must be positive");
}

const LevelConfig& ArchitectureParams::level(int k) const {
    require(k >= 1 && k <= 3, ErrorCode::InvalidArgument, "level must be 1, 2 or 3");
    return k == 1 ? level1 : k == 2 ? level2 : level3;
}

LevelConfig& ArchitectureParams::level(int k) {
    return const_cast<LevelConfig&>(std::as_const(*this).level(k));
}

double LevelModel::score(std::span<const double> raw_window) const {
    require(raw_window.size() == feature_width(), ErrorCode::DimensionMismatch,
            "window has " + std::to_string(raw_window.size()) + " values, level expects " +
                std::to_string(feature_width()));
    std::vector<double> x(raw_window.begin(), raw_window.end());
    scaler.apply(x);
    return model.score_one(x);
}

std::vector<double> LevelModel::score(const Matrix& raw_windows) const {
    require(raw_windows.cols() == feature_width() || raw_windows.rows() == 0, ErrorCode::DimensionMismatch,
            "windows have " + std::to_string(raw_windows.cols()) + " values, level expects " +
                std::to_string(feature_width()));
    std::vector<double> out(raw_windows.rows());
    std::vector<double> x(feature_width());
    for (std::size_t r = 0; r < raw_windows.rows(); ++r) {
        const auto row = raw_windows.row(r);
        std::copy(row.begin(), row.end(), x.begin());
        scaler.apply(x);
        out[r] = model.score_one(x);
    }
    return out;
}

std::vector<std::uint8_t> LevelModel::predict(const Matrix& raw_windows) const {
    const auto s = score(raw_windows);
    std::vector<std::uint8_t> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] >= 0.5 ? 1 : 0;
    return out;
}

const LevelModel& ThreeLevelClassifier::level(int k) const {
    require(k >= 1 && k <= 3, ErrorCode::InvalidArgument, "level must be 1, 2 or 3");
    return k == 1 ? level1 : k == 2 ? level2 : level3;
}

ClassifiedWindow ThreeLevelClassifier::classify_window(std::span<const double> ot_window,
                                                       std::span<const double> it_window) const {
    ClassifiedWindow out;
    out.levels.l1 = level1.score(ot_window) >= 0.5 ? 1 : 0;
    out.levels.l2 = level2.score(it_window) >= 0.5 ? 1 : 0;
    if (out.levels.l1) {
        out.levels.l3_evaluated = true;
        out.levels.l3 = level3.score(ot_window) >= 0.5 ? 1 : 0;
    }
    out.fused = fuse_levels(out.levels);
    return out;
}

std::vector<ClassifiedWindow> ThreeLevelClassifier::classify_batch(const Matrix& ot_windows,
                                                                   const Matrix& it_windows) const {
    require(ot_windows.rows() == it_windows.rows(), ErrorCode::DimensionMismatch,
            "OT and IT window batches differ in length");
    std::vector<ClassifiedWindow> out;
    out.reserve(ot_windows.rows());
    for (std::size_t r = 0; r < ot_windows.rows(); ++r) {
        out.push_back(classify_window(ot_windows.row(r), it_windows.row(r)));
    }
    return out;
}

LevelPools level_pools(int level) {
    switch (level) {
        case 1: return {{"normal"}, {"trip_unavailable_cyber", "fdi1", "fdi2", "fdi3"}};
        case 2: return {{"normal"}, {"dos_low", "dos_high"}};
        case 3: return {{"trip_unavailable_malfunction"}, {"fdi1", "fdi2", "fdi3"}};
        default: break;
    }
    fail(ErrorCode::InvalidArgument, "level must be 1, 2 or 3");
}

namespace {

Target level_target(int level) {
    return level == 1 ? Target::TripUnavailable : level == 2 ? Target::Dos : Target::Fdi;
}

Stream level_stream(int level) { return level == 2 ? Stream::IT : Stream::OT; }

std::uint32_t dataset_index(const UseCaseBundle& bundle, const std::string& id) {
    for (std::size_t k = 0; k < bundle.datasets.size(); ++k) {
        if (bundle.datasets[k].id == id) return static_cast<std::uint32_t>(k);
    }
    fail(ErrorCode::MissingDataset, "bundle has no dataset '" + id + "'");
}

}  // namespace

WindowSet level_pool(const UseCaseBundle& bundle, int level, const ArchitectureParams& params,
                     std::optional<WindowGeometry> geometry) {
    require(!bundle.datasets.empty(), ErrorCode::MissingDataset, "bundle is empty");
    const LevelPools pools = level_pools(level);
    const WindowGeometry g = geometry.value_or(params.level(level).geometry);
    WindowSet pool;
    std::vector<std::string> ids = pools.negatives;
    ids.insert(ids.end(), pools.positives.begin(), pools.positives.end());
    for (const auto& id : ids) {
        const std::uint32_t idx = dataset_index(bundle, id);
        const TelemetryFrame frame = clean(bundle.datasets[idx].frame, params.clean);
        pool.append(windowize(frame, level_stream(level), g.window_len, g.step, level_target(level),
                              params.label_rule, idx));
    }
    return pool;
}

LevelPartitions partition_level(const WindowSet& pool, const LevelConfig& cfg, std::uint64_t seed) {
    LevelPartitions out;
    out.pool_positives = pool.positives();
    out.pool_negatives = pool.negatives();
    SplitSpec spec = cfg.split;
    spec.seed = derive_seed(seed, "split");
    const auto parts = split(pool, spec);
    out.parts[0] = rebalance_within_budget(parts[0], cfg.train_ratio, derive_seed(seed, "balance-train"));
    out.parts[1] = rebalance_within_budget(parts[1], cfg.eval_ratio, derive_seed(seed, "balance-val"));
    out.parts[2] = rebalance_within_budget(parts[2], cfg.eval_ratio, derive_seed(seed, "balance-test"));
    return out;
}

LevelFit fit_level(const LevelPartitions& partitions, const LevelConfig& cfg, Stream stream,
                   Target target, std::uint64_t seed) {
    const WindowSet& train = partitions.parts[0];
    const WindowSet& val = partitions.parts[1];
    std::vector<Algorithm> algos = cfg.candidates;
    if (algos.empty()) algos.push_back(cfg.hp.algorithm);

    const ScalerParams scaler = fit_scaler(train.features, train.n_signals, cfg.scaling);
    const Matrix X = scaler.transformed(train.features);

    LevelFit best;
    double best_f1 = -1.0;
    for (Algorithm a : algos) {
        Hyperparams hp = cfg.hp;
        hp.algorithm = a;
        hp.seed = derive_seed(seed, "model");
        LevelModel m;
        m.model = fit(hp, X, train.labels);
        m.scaler = scaler;
        m.geometry = {train.window_len, train.step};
        m.stream = stream;
        m.target = target;
        m.n_signals = train.n_signals;
        const auto pred = m.predict(val.features);
        const ConfusionMatrix cm = confusion(val.labels, pred);
        const double f1 = metrics(cm).f1;
        if (f1 > best_f1) {
            best_f1 = f1;
            best.model = std::move(m);
            best.validation = cm;
            best.chosen = a;
        }
    }
    return best;
}

ArchitectureTraining train_architecture_full(const UseCaseBundle& bundle, const ArchitectureParams& params,
                                             std::uint64_t seed) {
    params.validate();
    require(!bundle.datasets.empty(), ErrorCode::MissingDataset, "bundle is empty");
    ArchitectureTraining out;
    std::array<LevelModel*, 3> slots{&out.classifier.level1, &out.classifier.level2, &out.classifier.level3};
    for (int k = 1; k <= 3; ++k) {
        const std::uint64_t lseed = derive_seed(seed, "level" + std::to_string(k));
        const WindowSet pool = level_pool(bundle, k, params);
        out.partitions[k - 1] = partition_level(pool, params.level(k), lseed);
        LevelFit f = fit_level(out.partitions[k - 1], params.level(k), level_stream(k), level_target(k), lseed);
        *slots[k - 1] = std::move(f.model);
        out.validation[k - 1] = f.validation;
    }
    out.classifier.params = params;
    out.classifier.seed = seed;
    out.classifier.bundle_fingerprint = bundle_fingerprint(bundle);
    return out;
}

ThreeLevelClassifier train_architecture(const UseCaseBundle& bundle, const ArchitectureParams& params,
                                        std::uint64_t seed) {
    return train_architecture_full(bundle, params, seed).classifier;
}

namespace {

struct Fnv {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    void bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 0x100000001b3ULL;
        }
    }
    void str(std::string_view s) { bytes(s.data(), s.size()); }
    void doubles(std::span<const double> v) { bytes(v.data(), v.size() * sizeof(double)); }
};

}  // namespace

std::uint64_t bundle_fingerprint(const UseCaseBundle& bundle) {
    Fnv f;
    for (const auto& d : bundle.datasets) {
        f.str(d.id);
        f.str(d.state.key());
        f.doubles(d.frame.ot_times);
        f.doubles(d.frame.ot.data());
        f.doubles(d.frame.it_times);
        f.doubles(d.frame.it.data());
        for (const auto& s : d.frame.ot_state) f.str(s.key());
    }
    return f.h;
}

TelemetryFrame align_ot_it(const TelemetryFrame& frame) {
    require(frame.it_samples() > 0 && frame.timesteps() > 0, ErrorCode::DisjointTimeRanges,
            "both streams need samples to be aligned");
    const double ot_lo = frame.ot_times.front();
    const double ot_hi = frame.ot_times.back();
    if (frame.it_times.front() > ot_hi || frame.it_times.back() < ot_lo) {
        fail(ErrorCode::DisjointTimeRanges, "OT and IT time ranges do not overlap");
    }
    const std::size_t n_ot = frame.ot.cols();
    const std::size_t n_it = frame.it.cols();
    TelemetryFrame out;
    out.ot_times = frame.ot_times;
    out.ot_state = frame.ot_state;
    out.ot_mode = frame.ot_mode;
    out.ot = Matrix(frame.timesteps(), n_ot + n_it);
    std::size_t j = 0;
    for (std::size_t t = 0; t < frame.timesteps(); ++t) {
        while (j + 1 < frame.it_samples() && frame.it_times[j + 1] <= frame.ot_times[t]) ++j;
        auto row = out.ot.row(t);
        std::copy_n(frame.ot.row(t).begin(), n_ot, row.begin());
        std::copy_n(frame.it.row(j).begin(), n_it, row.begin() + static_cast<std::ptrdiff_t>(n_ot));
    }
    return out;
}

CombinedParams CombinedParams::defaults() {
    CombinedParams p;
    p.level.hp.algorithm = Algorithm::RandomForest;
    p.level.geometry = {20, 1};
    p.level.train_ratio = 1.0;
    p.level.eval_ratio = 1.0;
    return p;
}

WindowSet combined_pool(const UseCaseBundle& bundle, const CombinedParams& params, const CleanPolicy& clean_policy) {
    require(!bundle.datasets.empty(), ErrorCode::MissingDataset, "bundle is empty");
    WindowSet pool;
    for (std::size_t k = 0; k < bundle.datasets.size(); ++k) {
        const auto& d = bundle.datasets[k];
        if (d.id == dataset_ids::kMalfunction) continue;  // same content as the cyber baseline
        const TelemetryFrame aligned = align_ot_it(clean(d.frame, clean_policy));
        pool.append(windowize(aligned, Stream::OT, params.level.geometry.window_len, params.level.geometry.step,
                              Target::Abnormal, LabelRule::AnyAbnormal, static_cast<std::uint32_t>(k)));
    }
    return pool;
}

CombinedTraining train_combined_full(const UseCaseBundle& bundle, const CombinedParams& params,
                                     const CleanPolicy& clean_policy, std::uint64_t seed) {
    const std::uint64_t cseed = derive_seed(seed, "combined");
    CombinedTraining out;
    const WindowSet pool = combined_pool(bundle, params, clean_policy);
    out.partitions = partition_level(pool, params.level, cseed);
    LevelFit f = fit_level(out.partitions, params.level, Stream::OT, Target::Abnormal, cseed);
    out.classifier.model = std::move(f.model);
    out.classifier.seed = seed;
    out.validation = f.validation;
    return out;
}

CombinedClassifier train_combined(const UseCaseBundle& bundle, const CombinedParams& params, std::uint64_t seed) {
    return train_combined_full(bundle, params, CleanPolicy{}, seed).classifier;
}

std::uint8_t CombinedClassifier::classify(std::span<const double> window) const {
    return model.score(window) >= 0.5 ? 1 : 0;
}

std::uint8_t classify_combined(const CombinedClassifier& clf, std::span<const double> window) {
    return clf.classify(window);
}

}  // namespace cyberchar
