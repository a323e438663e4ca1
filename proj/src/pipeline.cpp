#include "cyberchar/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <string>

#include "cyberchar/error.hpp"
#include "cyberchar/random.hpp"

namespace cyberchar {

namespace {

/// Compensated summation keeps pooled means accurate for large-offset signals.
struct NeumaierSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) noexcept {
        const double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    double value() const noexcept { return sum + comp; }
};

double median_of(std::vector<double> v) {
    const std::size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + n / 2, v.end());
    double m = v[n / 2];
    if (n % 2 == 0) {
        m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + n / 2));
    }
    return m;
}

}  // namespace

void clean_matrix(Matrix& values, const CleanPolicy& policy) {
    const std::size_t R = values.rows();
    const std::size_t C = values.cols();
    if (R == 0) return;
    for (std::size_t c = 0; c < C; ++c) {
        std::size_t first_valid = R;
        for (std::size_t r = 0; r < R; ++r) {
            if (!std::isnan(values(r, c))) {
                first_valid = r;
                break;
            }
        }
        if (first_valid == R) {
            fail(ErrorCode::AllNull, "signal column " + std::to_string(c) + " is entirely null");
        }
        double last = values(first_valid, c);
        for (std::size_t r = 0; r < R; ++r) {
            if (std::isnan(values(r, c))) {
                values(r, c) = last;
            } else {
                last = values(r, c);
            }
        }
        if (policy.clip_outliers) {
            std::vector<double> col(R);
            for (std::size_t r = 0; r < R; ++r) col[r] = values(r, c);
            const double med = median_of(col);
            for (auto& x : col) x = std::fabs(x - med);
            const double mad = median_of(std::move(col));
            if (mad > 0.0) {
                const double lim = policy.mad_k * 1.4826 * mad;
                for (std::size_t r = 0; r < R; ++r) {
                    values(r, c) = std::clamp(values(r, c), med - lim, med + lim);
                }
            }
        }
    }
}

TelemetryFrame clean(const TelemetryFrame& frame, const CleanPolicy& policy) {
    require(policy.mad_k > 0.0, ErrorCode::InvalidArgument, "MAD multiplier must be positive");
    TelemetryFrame out = frame;
    clean_matrix(out.ot, policy);
    clean_matrix(out.it, policy);
    return out;
}

std::string_view to_string(ScalingMethod m) noexcept {
    return m == ScalingMethod::MinMax ? "minmax" : "standard";
}

ScalingMethod parse_scaling(std::string_view text) {
    if (text == "minmax") return ScalingMethod::MinMax;
    if (text == "standard") return ScalingMethod::Standard;
    fail(ErrorCode::ConfigError, "unknown scaling method '" + std::string(text) + "'");
}

void ScalerParams::apply(std::span<double> features) const {
    const std::size_t n = n_signals();
    require(n > 0 && features.size() % n == 0, ErrorCode::DimensionMismatch,
            "feature width is not a multiple of the scaler's signal count");
    for (std::size_t k = 0; k < features.size(); ++k) {
        const std::size_t s = k % n;
        features[k] = (features[k] - center[s]) / scale[s];
    }
}

void ScalerParams::apply(Matrix& features) const {
    for (std::size_t r = 0; r < features.rows(); ++r) apply(features.row(r));
}

Matrix ScalerParams::transformed(const Matrix& features) const {
    Matrix out = features;
    apply(out);
    return out;
}

void ScalerParams::invert(Matrix& features) const {
    const std::size_t n = n_signals();
    require(n > 0 && features.cols() % n == 0, ErrorCode::DimensionMismatch,
            "feature width is not a multiple of the scaler's signal count");
    for (std::size_t r = 0; r < features.rows(); ++r) {
        auto row = features.row(r);
        for (std::size_t k = 0; k < row.size(); ++k) row[k] = row[k] * scale[k % n] + center[k % n];
    }
}

ScalerParams fit_scaler(const Matrix& features, std::size_t n_signals, ScalingMethod method) {
    require(n_signals > 0 && features.cols() % n_signals == 0, ErrorCode::DimensionMismatch,
            "feature width is not a multiple of the signal count");
    require(features.rows() > 0, ErrorCode::InsufficientData, "cannot fit a scaler on no data");
    ScalerParams p;
    p.method = method;
    p.center.assign(n_signals, 0.0);
    p.scale.assign(n_signals, 1.0);
    std::vector<double> lo(n_signals, INFINITY), hi(n_signals, -INFINITY);
    std::vector<NeumaierSum> sum(n_signals);
    const std::size_t per_row = features.cols() / n_signals;
    for (std::size_t r = 0; r < features.rows(); ++r) {
        const auto row = features.row(r);
        for (std::size_t k = 0; k < row.size(); ++k) {
            const std::size_t s = k % n_signals;
            const double x = row[k];
            require(!std::isnan(x), ErrorCode::NaNFeature, "scaler input contains NaN");
            lo[s] = std::min(lo[s], x);
            hi[s] = std::max(hi[s], x);
            sum[s].add(x);
        }
    }
    const double count = static_cast<double>(features.rows() * per_row);
    for (std::size_t s = 0; s < n_signals; ++s) {
        if (lo[s] == hi[s]) {
            // Constant signal: maps to exactly zero under either method.
            p.center[s] = lo[s];
            p.scale[s] = 1.0;
            continue;
        }
        if (method == ScalingMethod::MinMax) {
            p.center[s] = lo[s];
            p.scale[s] = hi[s] - lo[s];
        } else {
            p.center[s] = sum[s].value() / count;
        }
    }
    if (method == ScalingMethod::Standard) {
        std::vector<NeumaierSum> sq(n_signals);
        for (std::size_t r = 0; r < features.rows(); ++r) {
            const auto row = features.row(r);
            for (std::size_t k = 0; k < row.size(); ++k) {
                const std::size_t s = k % n_signals;
                const double d = row[k] - p.center[s];
                sq[s].add(d * d);
            }
        }
        for (std::size_t s = 0; s < n_signals; ++s) {
            if (lo[s] == hi[s]) continue;
            p.scale[s] = std::max(std::sqrt(sq[s].value() / count), kStdFloor);
        }
    }
    return p;
}

bool is_positive(Target target, const ScenarioState& s) noexcept {
    switch (target) {
        case Target::Abnormal: return !s.is_normal();
        case Target::TripUnavailable: return !s.trip_available;
        case Target::Dos: return s.dos_level != DosLevel::None;
        case Target::Fdi: return s.fdi_level > 0;
    }
    return false;
}

std::string_view to_string(Target t) noexcept {
    switch (t) {
        case Target::Abnormal: return "abnormal";
        case Target::TripUnavailable: return "trip_unavailable";
        case Target::Dos: return "dos";
        case Target::Fdi: return "fdi";
    }
    return "?";
}

std::size_t WindowSet::positives() const noexcept {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
}

WindowSet WindowSet::subset(const std::vector<std::size_t>& rows) const {
    WindowSet out;
    out.window_len = window_len;
    out.step = step;
    out.n_signals = n_signals;
    out.features = Matrix(rows.size(), features.cols());
    out.labels.reserve(rows.size());
    out.states.reserve(rows.size());
    out.origin.reserve(rows.size());
    out.end_time.reserve(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const std::size_t r = rows[k];
        std::copy_n(features.row(r).begin(), features.cols(), out.features.row(k).begin());
        out.labels.push_back(labels[r]);
        out.states.push_back(states[r]);
        out.origin.push_back(origin[r]);
        out.end_time.push_back(end_time[r]);
    }
    return out;
}

void WindowSet::append(const WindowSet& other) {
    if (other.size() == 0) return;
    if (size() == 0 && features.cols() == 0) {
        *this = other;
        return;
    }
    require(other.features.cols() == features.cols() && other.window_len == window_len &&
                other.n_signals == n_signals,
            ErrorCode::DimensionMismatch, "cannot append windows of a different geometry");
    Matrix merged(features.rows() + other.features.rows(), features.cols());
    std::copy(features.data().begin(), features.data().end(), merged.data().begin());
    std::copy(other.features.data().begin(), other.features.data().end(),
              merged.data().begin() + static_cast<std::ptrdiff_t>(features.data().size()));
    features = std::move(merged);
    labels.insert(labels.end(), other.labels.begin(), other.labels.end());
    states.insert(states.end(), other.states.begin(), other.states.end());
    origin.insert(origin.end(), other.origin.begin(), other.origin.end());
    end_time.insert(end_time.end(), other.end_time.begin(), other.end_time.end());
}

std::size_t window_count(std::size_t T, std::size_t window_len, std::size_t step) {
    if (window_len == 0 || step == 0 || T < window_len) return 0;
    return (T - window_len) / step + 1;
}

namespace {

void label_window(WindowSet& ws, const std::vector<ScenarioState>& states, std::size_t first,
                  std::size_t len, Target target, LabelRule rule) {
    ScenarioState window_state = ScenarioState::normal();
    bool positive = false;
    for (std::size_t t = first; t < first + len; ++t) {
        if (!states[t].is_normal()) window_state = states[t];
        if (rule == LabelRule::AnyAbnormal && is_positive(target, states[t])) positive = true;
    }
    if (rule == LabelRule::LastTimestep) {
        positive = is_positive(target, states[first + len - 1]);
        window_state = states[first + len - 1];
    }
    ws.labels.push_back(positive ? 1 : 0);
    ws.states.push_back(window_state);
}

}  // namespace

WindowSet windowize(const Matrix& values, const std::vector<ScenarioState>& states,
                    const std::vector<double>& times, std::size_t window_len, std::size_t step,
                    Target target, LabelRule rule, std::uint32_t frame_id) {
    require(window_len >= 1 && step >= 1, ErrorCode::InvalidArgument,
            "window length and step must be at least 1");
    const std::size_t T = values.rows();
    require(states.size() == T && times.size() == T, ErrorCode::DimensionMismatch,
            "labels and timestamps must match the sample count");
    if (T < window_len) {
        fail(ErrorCode::TooShort, "series of " + std::to_string(T) + " samples is shorter than window " +
                                      std::to_string(window_len));
    }
    const std::size_t n = window_count(T, window_len, step);
    const std::size_t C = values.cols();
    WindowSet ws;
    ws.window_len = window_len;
    ws.step = step;
    ws.n_signals = C;
    ws.features = Matrix(n, window_len * C);
    ws.labels.reserve(n);
    ws.states.reserve(n);
    ws.origin.reserve(n);
    ws.end_time.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t first = i * step;
        const auto block = values.rows_span(first, window_len);
        std::copy(block.begin(), block.end(), ws.features.row(i).begin());
        label_window(ws, states, first, window_len, target, rule);
        ws.origin.push_back({frame_id, static_cast<std::uint32_t>(first)});
        ws.end_time.push_back(times[first + window_len - 1]);
    }
    return ws;
}

WindowSet windowize(const TelemetryFrame& frame, Stream stream, std::size_t window_len,
                    std::size_t step, Target target, LabelRule rule, std::uint32_t frame_id) {
    return windowize(frame.values(stream), frame.states(stream), frame.times(stream), window_len,
                     step, target, rule, frame_id);
}

WindowSet aligned_it_windows(const TelemetryFrame& frame, std::size_t ot_window_len,
                             std::size_t ot_step, std::size_t it_window_len, Target target,
                             LabelRule rule, std::uint32_t frame_id) {
    require(it_window_len >= 1, ErrorCode::InvalidArgument, "IT window length must be at least 1");
    require(frame.it_samples() > 0, ErrorCode::InsufficientData, "frame has no IT samples");
    const std::size_t T = frame.timesteps();
    if (T < ot_window_len) {
        fail(ErrorCode::TooShort, "series of " + std::to_string(T) + " samples is shorter than window " +
                                      std::to_string(ot_window_len));
    }
    const std::size_t n = window_count(T, ot_window_len, ot_step);
    const std::size_t C = frame.it.cols();
    WindowSet ws;
    ws.window_len = it_window_len;
    ws.step = ot_step;
    ws.n_signals = C;
    ws.features = Matrix(n, it_window_len * C);
    std::vector<std::size_t> rows(it_window_len);
    std::vector<ScenarioState> win_states(it_window_len);
    std::size_t j = 0;  // count of IT samples with time <= current OT end
    for (std::size_t i = 0; i < n; ++i) {
        const double t_end = frame.ot_times[i * ot_step + ot_window_len - 1];
        while (j < frame.it_samples() && frame.it_times[j] <= t_end) ++j;
        for (std::size_t k = 0; k < it_window_len; ++k) {
            // Sample k of the window sits (it_window_len - 1 - k) samples before the last one.
            const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(j) - 1 -
                                       static_cast<std::ptrdiff_t>(it_window_len - 1 - k);
            rows[k] = idx < 0 ? 0 : static_cast<std::size_t>(idx);
        }
        auto out = ws.features.row(i);
        for (std::size_t k = 0; k < it_window_len; ++k) {
            std::copy_n(frame.it.row(rows[k]).begin(), C, out.begin() + static_cast<std::ptrdiff_t>(k * C));
            win_states[k] = frame.it_state[rows[k]];
        }
        label_window(ws, win_states, 0, it_window_len, target, rule);
        ws.origin.push_back({frame_id, static_cast<std::uint32_t>(i * ot_step)});
        ws.end_time.push_back(t_end);
    }
    return ws;
}

std::vector<std::size_t> rebalance_indices(const std::vector<std::uint8_t>& labels, double ratio,
                                           std::uint64_t seed) {
    require(ratio > 0.0 && std::isfinite(ratio), ErrorCode::InvalidArgument,
            "balance ratio must be positive");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
    if (pos.empty() || neg.empty()) {
        fail(ErrorCode::SingleClass, "rebalancing needs both classes present");
    }
    const auto want = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(pos.size())));
    if (want > neg.size()) {
        const double achievable = static_cast<double>(neg.size()) / static_cast<double>(pos.size());
        char buf[160];
        std::snprintf(buf, sizeof(buf), "ratio %.6g needs %zu negatives, only %zu available (achievable %.6g)",
                      ratio, want, neg.size(), achievable);
        throw InsufficientDataError(buf, achievable);
    }
    Rng rng(seed);
    std::vector<std::size_t> keep = pos;
    for (std::size_t k : sample_without_replacement(neg.size(), want, rng)) keep.push_back(neg[k]);
    std::sort(keep.begin(), keep.end());
    return keep;
}

WindowSet rebalance(const WindowSet& windows, double ratio, std::uint64_t seed) {
    return windows.subset(rebalance_indices(windows.labels, ratio, seed));
}

WindowSet rebalance_within_budget(const WindowSet& windows, double ratio, std::uint64_t seed) {
    require(ratio > 0.0 && std::isfinite(ratio), ErrorCode::InvalidArgument,
            "balance ratio must be positive");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < windows.size(); ++i) (windows.labels[i] ? pos : neg).push_back(i);
    if (pos.empty() || neg.empty()) fail(ErrorCode::SingleClass, "rebalancing needs both classes present");
    std::size_t k = pos.size();
    auto need = [&](std::size_t n) {
        return static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
    };
    if (need(k) > neg.size()) {
        k = static_cast<std::size_t>(std::floor((static_cast<double>(neg.size()) + 0.5) / ratio));
        while (k > 0 && need(k) > neg.size()) --k;
        while (k + 1 <= pos.size() && need(k + 1) <= neg.size()) ++k;
    }
    if (k == 0) {
        throw InsufficientDataError("too few negatives for even one positive at the requested ratio",
                                    static_cast<double>(neg.size()) / static_cast<double>(pos.size()));
    }
    std::vector<std::size_t> rows;
    if (k < pos.size()) {
        Rng rng(derive_seed(seed, "positive-budget"));
        for (std::size_t i : sample_without_replacement(pos.size(), k, rng)) rows.push_back(pos[i]);
        rows.insert(rows.end(), neg.begin(), neg.end());
        std::sort(rows.begin(), rows.end());
        const WindowSet trimmed = windows.subset(rows);
        return rebalance(trimmed, ratio, seed);
    }
    return rebalance(windows, ratio, seed);
}

void SplitSpec::validate() const {
    require(train > 0 && val > 0 && test > 0, ErrorCode::ConfigError, "split fractions must be positive");
    require(std::fabs(train + val + test - 1.0) <= 1e-9, ErrorCode::ConfigError,
            "split fractions must sum to 1");
}

SplitSpec SplitSpec::parse(std::string_view text) {
    SplitSpec s;
    double parts[3];
    std::size_t start = 0;
    for (int k = 0; k < 3; ++k) {
        const std::size_t pos = text.find('/', start);
        require((k < 2) == (pos != std::string_view::npos), ErrorCode::ConfigError,
                "split must look like 60/20/20");
        const std::string_view item = text.substr(start, pos == std::string_view::npos ? text.npos : pos - start);
        auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), parts[k]);
        require(ec == std::errc() && p == item.data() + item.size(), ErrorCode::ConfigError,
                "bad split fraction '" + std::string(item) + "'");
        start = pos + 1;
    }
    const double total = parts[0] + parts[1] + parts[2];
    const double denom = std::fabs(total - 100.0) < 1e-6 ? 100.0 : 1.0;
    s.train = parts[0] / denom;
    s.val = parts[1] / denom;
    s.test = parts[2] / denom;
    if (denom == 100.0) s.test = 1.0 - s.train - s.val;
    s.validate();
    return s;
}

std::string SplitSpec::to_text() const {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g/%.6g/%.6g", train * 100, val * 100, test * 100);
    return buf;
}

namespace {

/// Per-class shares of `total` proportional to class sizes (largest remainder),
/// never exceeding a class's remaining capacity.
std::vector<std::size_t> allocate(const std::vector<std::size_t>& sizes,
                                  const std::vector<std::size_t>& capacity, double fraction,
                                  std::size_t total) {
    std::vector<std::size_t> out(sizes.size());
    std::vector<std::pair<double, std::size_t>> rem;
    std::size_t used = 0;
    for (std::size_t c = 0; c < sizes.size(); ++c) {
        const double exact = fraction * static_cast<double>(sizes[c]);
        out[c] = std::min(static_cast<std::size_t>(std::floor(exact)), capacity[c]);
        used += out[c];
        rem.emplace_back(exact - std::floor(exact), c);
    }
    std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [r, c] : rem) {
        if (used >= total) break;
        if (out[c] < capacity[c]) {
            ++out[c];
            ++used;
        }
    }
    return out;
}

}  // namespace

std::array<std::vector<std::size_t>, 3> split_indices(const std::vector<std::uint8_t>& labels,
                                                      const SplitSpec& spec) {
    spec.validate();
    std::vector<std::vector<std::size_t>> by_class(2);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        require(labels[i] <= 1, ErrorCode::LabelOutOfRange, "split expects binary labels");
        by_class[labels[i]].push_back(i);
    }
    if (spec.shuffle) {
        Rng rng(spec.seed);
        for (auto& v : by_class) std::shuffle(v.begin(), v.end(), rng);
    }
    const std::size_t N = labels.size();
    const std::vector<std::size_t> sizes{by_class[0].size(), by_class[1].size()};
    const auto n_train = static_cast<std::size_t>(std::llround(spec.train * static_cast<double>(N)));
    const auto n_val = static_cast<std::size_t>(std::llround(spec.val * static_cast<double>(N)));
    const auto tr = allocate(sizes, sizes, spec.train, n_train);
    std::vector<std::size_t> left{sizes[0] - tr[0], sizes[1] - tr[1]};
    const auto va = allocate(sizes, left, spec.val, n_val);

    std::array<std::vector<std::size_t>, 3> parts;
    for (std::size_t c = 0; c < 2; ++c) {
        const auto& idx = by_class[c];
        if (idx.empty()) continue;
        const std::size_t te = idx.size() - tr[c] - va[c];
        if (tr[c] == 0 || va[c] == 0 || te == 0) {
            fail(ErrorCode::InsufficientData,
                 "class " + std::to_string(c) + " with " + std::to_string(idx.size()) +
                     " windows leaves an empty partition");
        }
        parts[0].insert(parts[0].end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(tr[c]));
        parts[1].insert(parts[1].end(), idx.begin() + static_cast<std::ptrdiff_t>(tr[c]),
                        idx.begin() + static_cast<std::ptrdiff_t>(tr[c] + va[c]));
        parts[2].insert(parts[2].end(), idx.begin() + static_cast<std::ptrdiff_t>(tr[c] + va[c]), idx.end());
    }
    for (auto& p : parts) std::sort(p.begin(), p.end());
    return parts;
}

std::array<WindowSet, 3> split(const WindowSet& windows, const SplitSpec& spec) {
    const auto idx = split_indices(windows.labels, spec);
    return {windows.subset(idx[0]), windows.subset(idx[1]), windows.subset(idx[2])};
}

}  // namespace cyberchar
