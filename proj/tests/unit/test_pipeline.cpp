#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "cyberchar/error.hpp"
#include "cyberchar/pipeline.hpp"
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

std::size_t brute_window_count(std::size_t T, std::size_t W, std::size_t step) {
    std::size_t n = 0;
    for (std::size_t s = 0; s + W <= T; s += step) ++n;
    return n;
}

std::vector<ScenarioState> states_with_abnormal(std::size_t T, std::size_t from, std::size_t to) {
    std::vector<ScenarioState> s(T);
    for (std::size_t t = from; t < to && t < T; ++t) s[t] = make_state(TripCause::Cyber, 0, DosLevel::None);
    return s;
}

WindowSet labeled_set(std::size_t pos, std::size_t neg, std::size_t cols = 2) {
    WindowSet ws;
    ws.window_len = 1;
    ws.n_signals = cols;
    ws.features = Matrix(pos + neg, cols);
    for (std::size_t i = 0; i < pos + neg; ++i) {
        for (std::size_t c = 0; c < cols; ++c) ws.features(i, c) = static_cast<double>(i * cols + c);
        ws.labels.push_back(i < pos ? 1 : 0);
        ws.states.push_back({});
        ws.origin.push_back({0, static_cast<std::uint32_t>(i)});
        ws.end_time.push_back(static_cast<double>(i));
    }
    return ws;
}

}  // namespace

TEST(Windowing, CountMatchesBruteForceGrid) {
    Rng rng(99);
    std::uniform_int_distribution<std::size_t> T_d(0, 3000), W_d(1, 60), s_d(1, 12);
    for (int k = 0; k < 500; ++k) {
        const std::size_t T = T_d(rng), W = W_d(rng), s = s_d(rng);
        ASSERT_EQ(window_count(T, W, s), brute_window_count(T, W, s)) << T << " " << W << " " << s;
    }
    EXPECT_EQ(window_count(1560, 20, 1), 1541u);
    EXPECT_EQ(window_count(19, 20, 1), 0u);
}

TEST(Windowing, FlattensTimeMajor) {
    const std::size_t T = 30, C = 3;
    Matrix v(T, C);
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t c = 0; c < C; ++c) v(t, c) = 100.0 * static_cast<double>(t) + static_cast<double>(c);
    std::vector<double> times(T);
    for (std::size_t t = 0; t < T; ++t) times[t] = 0.5 * static_cast<double>(t);
    const WindowSet ws = windowize(v, states_with_abnormal(T, 25, 30), times, 5, 3, Target::Abnormal);
    ASSERT_EQ(ws.size(), window_count(T, 5, 3));
    EXPECT_EQ(ws.features.cols(), 15u);
    for (std::size_t i = 0; i < ws.size(); ++i) {
        for (std::size_t k = 0; k < 5; ++k)
            for (std::size_t c = 0; c < C; ++c) ASSERT_EQ(ws.features(i, k * C + c), v(i * 3 + k, c));
        EXPECT_EQ(ws.end_time[i], times[i * 3 + 4]);
        // Window [3i, 3i + 5) touches the abnormal tail from 25 on.
        EXPECT_EQ(ws.labels[i], i * 3 + 4 >= 25 ? 1 : 0);
    }
    EXPECT_EQ(code_of([&] { windowize(v, states_with_abnormal(T, 0, 0), times, 31, 1, Target::Abnormal); }),
              ErrorCode::TooShort);
}

TEST(Windowing, LastTimestepRule) {
    const std::size_t T = 20;
    Matrix v(T, 1);
    std::vector<double> times(T, 0.0);
    const auto states = states_with_abnormal(T, 5, 8);
    const WindowSet any = windowize(v, states, times, 4, 1, Target::TripUnavailable, LabelRule::AnyAbnormal);
    const WindowSet last = windowize(v, states, times, 4, 1, Target::TripUnavailable, LabelRule::LastTimestep);
    for (std::size_t i = 0; i < any.size(); ++i) {
        EXPECT_EQ(any.labels[i], (i + 3 >= 5 && i <= 7) ? 1 : 0);
        EXPECT_EQ(last.labels[i], (i + 3 >= 5 && i + 3 < 8) ? 1 : 0);
    }
}

TEST(Windowing, TargetsSelectStateComponents) {
    const ScenarioState s = make_state(TripCause::Cyber, 2, DosLevel::Low);
    EXPECT_TRUE(is_positive(Target::TripUnavailable, s));
    EXPECT_TRUE(is_positive(Target::Fdi, s));
    EXPECT_TRUE(is_positive(Target::Dos, s));
    const ScenarioState m = make_state(TripCause::Malfunction, 0, DosLevel::None);
    EXPECT_FALSE(is_positive(Target::Fdi, m));
    EXPECT_FALSE(is_positive(Target::Dos, m));
    EXPECT_FALSE(is_positive(Target::Abnormal, ScenarioState::normal()));
}

TEST(Windowing, AlignedItHoldsLastSample) {
    TelemetryFrame f;
    for (int t = 0; t < 10; ++t) {
        f.ot_times.push_back(t);
        f.ot_state.push_back({});
        f.ot_mode.push_back(Mode::Operating);
    }
    f.ot = Matrix(10, 1);
    // IT samples at 2.5, 4, 7.
    f.it_times = {2.5, 4.0, 7.0};
    f.it = Matrix(3, 1);
    f.it(0, 0) = 10;
    f.it(1, 0) = 20;
    f.it(2, 0) = 30;
    f.it_state = {{}, {}, make_state(TripCause::None, 0, DosLevel::High)};
    f.it_mode.assign(3, Mode::Operating);
    const WindowSet ws = aligned_it_windows(f, 3, 1, 2, Target::Dos);
    ASSERT_EQ(ws.size(), 8u);
    // OT window ends at 2: no IT sample yet, pad with the earliest.
    EXPECT_EQ(ws.features(0, 0), 10);
    EXPECT_EQ(ws.features(0, 1), 10);
    // Ends at 4: samples 2.5 and 4.
    EXPECT_EQ(ws.features(2, 0), 10);
    EXPECT_EQ(ws.features(2, 1), 20);
    EXPECT_EQ(ws.labels[2], 0);
    // Ends at 7: samples 4 and 7, the second flooded.
    EXPECT_EQ(ws.features(5, 0), 20);
    EXPECT_EQ(ws.features(5, 1), 30);
    EXPECT_EQ(ws.labels[5], 1);
    EXPECT_EQ(ws.end_time[7], 9.0);
}

TEST(Rebalance, ExactRatioOrTypedError) {
    Rng rng(5);
    std::uniform_int_distribution<std::size_t> p_d(1, 60), n_d(1, 900);
    const double ratios[] = {0.5, 1.0, 1.0 / 3.0, 3.0, 20.0, 30.0};
    for (int k = 0; k < 200; ++k) {
        const std::size_t pos = p_d(rng), neg = n_d(rng);
        const double ratio = ratios[k % 6];
        const WindowSet ws = labeled_set(pos, neg);
        const std::size_t want = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(pos)));
        if (want <= neg) {
            const WindowSet r = rebalance(ws, ratio, static_cast<std::uint64_t>(k));
            EXPECT_EQ(r.positives(), pos);
            EXPECT_EQ(r.negatives(), want);
        } else {
            try {
                rebalance(ws, ratio, static_cast<std::uint64_t>(k));
                ADD_FAILURE() << "expected InsufficientData";
            } catch (const InsufficientDataError& e) {
                EXPECT_EQ(e.code(), ErrorCode::InsufficientData);
                EXPECT_DOUBLE_EQ(e.achievable_ratio(), static_cast<double>(neg) / static_cast<double>(pos));
            }
        }
    }
    EXPECT_EQ(code_of([] { rebalance(labeled_set(0, 5), 1.0, 1); }), ErrorCode::SingleClass);
    EXPECT_EQ(code_of([] { rebalance(labeled_set(3, 5), -1.0, 1); }), ErrorCode::InvalidArgument);
}

TEST(Rebalance, WithinBudgetShrinksPositives) {
    const WindowSet ws = labeled_set(100, 300);
    const WindowSet r = rebalance_within_budget(ws, 20.0, 3);
    EXPECT_EQ(r.positives(), 15u);
    EXPECT_EQ(r.negatives(), 300u);
    const WindowSet keep = rebalance_within_budget(ws, 2.0, 3);
    EXPECT_EQ(keep.positives(), 100u);
    EXPECT_EQ(keep.negatives(), 200u);
    EXPECT_TRUE(rebalance(ws, 2.0, 3).features.bitwise_equal(keep.features));
    EXPECT_EQ(code_of([] { rebalance_within_budget(labeled_set(10, 5), 20.0, 1); }), ErrorCode::InsufficientData);
}

TEST(Scaling, StandardColumnsHaveZeroMean) {
    Rng rng(17);
    std::normal_distribution<double> g(0.0, 1.0);
    const std::size_t n_sig = 4, W = 5;
    Matrix X(300, n_sig * W);
    for (std::size_t i = 0; i < X.rows(); ++i)
        for (std::size_t j = 0; j < X.cols(); ++j)
            X(i, j) = 1e6 * static_cast<double>(j % n_sig + 1) + 1e3 * g(rng);
    const ScalerParams sp = fit_scaler(X, n_sig, ScalingMethod::Standard);
    const Matrix Z = sp.transformed(X);
    for (std::size_t s = 0; s < n_sig; ++s) {
        double sum = 0, sq = 0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < Z.rows(); ++i)
            for (std::size_t k = 0; k < W; ++k) {
                const double z = Z(i, k * n_sig + s);
                sum += z;
                sq += z * z;
                ++n;
            }
        const double mean = sum / static_cast<double>(n);
        EXPECT_LT(std::fabs(mean), 1e-9);
        EXPECT_NEAR(sq / static_cast<double>(n) - mean * mean, 1.0, 1e-9);
    }
    Matrix back = Z;
    sp.invert(back);
    for (std::size_t k = 0; k < X.data().size(); ++k) EXPECT_NEAR(back.data()[k], X.data()[k], 1e-6);
}

TEST(Scaling, MinMaxRangeAndConstantColumn) {
    Matrix X(4, 2);
    for (std::size_t i = 0; i < 4; ++i) {
        X(i, 0) = static_cast<double>(i) * 2.0 - 1.0;
        X(i, 1) = 7.0;
    }
    const ScalerParams sp = fit_scaler(X, 2, ScalingMethod::MinMax);
    const Matrix Z = sp.transformed(X);
    EXPECT_DOUBLE_EQ(Z(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(Z(3, 0), 1.0);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_TRUE(std::isfinite(Z(i, 1)));
    Matrix bad = X;
    bad(1, 1) = std::nan("");
    EXPECT_EQ(code_of([&] { fit_scaler(bad, 2, ScalingMethod::Standard); }), ErrorCode::NaNFeature);
    EXPECT_EQ(code_of([&] { fit_scaler(X, 3, ScalingMethod::Standard); }), ErrorCode::DimensionMismatch);
}

TEST(Cleaning, HoldLastWithLeadingBackfill) {
    Matrix m(5, 2);
    const double nan = std::nan("");
    const double col0[] = {nan, 2, nan, nan, 5};
    const double col1[] = {1, 1, 3, nan, 4};
    for (std::size_t i = 0; i < 5; ++i) {
        m(i, 0) = col0[i];
        m(i, 1) = col1[i];
    }
    clean_matrix(m);
    const double want0[] = {2, 2, 2, 2, 5};
    const double want1[] = {1, 1, 3, 3, 4};
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(m(i, 0), want0[i]);
        EXPECT_EQ(m(i, 1), want1[i]);
    }
    Matrix all_null(3, 1, nan);
    EXPECT_EQ(code_of([&] { clean_matrix(all_null); }), ErrorCode::AllNull);
}

TEST(Cleaning, MadClipping) {
    Matrix m(101, 1);
    for (std::size_t i = 0; i < 101; ++i) m(i, 0) = static_cast<double>(i % 10);
    m(50, 0) = 1e9;
    clean_matrix(m, {true, 5.0});
    EXPECT_LT(m(50, 0), 100.0);
    EXPECT_EQ(m(49, 0), 9.0);
}

TEST(Split, StratifiedAndDisjoint) {
    const WindowSet ws = labeled_set(100, 900);
    SplitSpec spec = SplitSpec::parse("60/20/20");
    spec.seed = 4;
    const auto idx = split_indices(ws.labels, spec);
    std::set<std::size_t> all;
    for (const auto& p : idx) all.insert(p.begin(), p.end());
    EXPECT_EQ(all.size(), 1000u);
    const auto parts = split(ws, spec);
    EXPECT_EQ(parts[0].size(), 600u);
    EXPECT_EQ(parts[1].size(), 200u);
    EXPECT_EQ(parts[2].size(), 200u);
    EXPECT_EQ(parts[0].positives(), 60u);
    EXPECT_EQ(parts[1].positives(), 20u);
    EXPECT_EQ(parts[2].positives(), 20u);
    const auto again = split_indices(ws.labels, spec);
    EXPECT_EQ(again, idx);
    spec.seed = 5;
    EXPECT_NE(split_indices(ws.labels, spec), idx);
}

TEST(Split, ContiguousWithoutShuffle) {
    const WindowSet ws = labeled_set(10, 10);
    SplitSpec spec = SplitSpec::parse("60/20/20");
    spec.shuffle = false;
    const auto idx = split_indices(ws.labels, spec);
    const std::vector<std::size_t> train{0, 1, 2, 3, 4, 5, 10, 11, 12, 13, 14, 15};
    EXPECT_EQ(idx[0], train);
}

TEST(Split, ParseAndErrors) {
    const SplitSpec s = SplitSpec::parse("0.7/0.1/0.2");
    EXPECT_DOUBLE_EQ(s.train, 0.7);
    EXPECT_EQ(SplitSpec::parse("70/10/20").to_text(), "70/10/20");
    EXPECT_EQ(code_of([] { SplitSpec::parse("60/20"); }), ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] { SplitSpec::parse("60/30/20"); }), ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] { split_indices(labeled_set(2, 50).labels, SplitSpec{}); }), ErrorCode::InsufficientData);
}
