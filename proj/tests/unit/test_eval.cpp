#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "cyberchar/error.hpp"
#include "cyberchar/eval.hpp"
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

const UseCaseBundle& bundle() {
    static const UseCaseBundle b = build_use_case(UseCaseConfig{}, 4242);
    return b;
}

ArchitectureParams small_params() {
    ArchitectureParams p = ArchitectureParams::defaults();
    for (int k = 1; k <= 3; ++k) p.level(k).hp.forest.n_trees = 10;
    return p;
}

const ThreeLevelClassifier& classifier() {
    static const ThreeLevelClassifier c = train_architecture(bundle(), small_params(), 3);
    return c;
}

SweepGrid tiny_grid() {
    SweepGrid g;
    g.level = 2;
    g.window_len = {5};
    g.window_step = {5};
    g.train_ratio = {1, 5};
    g.scaling = {ScalingMethod::MinMax, ScalingMethod::Standard};
    g.algorithm = {Algorithm::DecisionTree, Algorithm::NaiveBayes};
    g.split = {SplitSpec::parse("60/20/20")};
    g.abnormal_fraction = {1.0};
    g.n_trees = 5;
    return g;
}

}  // namespace

TEST(Eval, EvaluateLevelCountsEveryWindow) {
    const auto tests = level_test_sets(bundle(), small_params(), 9);
    for (int k = 1; k <= 3; ++k) {
        const WindowSet& t = tests[static_cast<std::size_t>(k - 1)];
        const double ratio = small_params().level(k).eval_ratio;
        EXPECT_EQ(t.negatives(), static_cast<std::size_t>(std::llround(ratio * static_cast<double>(t.positives()))));
        const LevelReport r = evaluate_level(classifier().level(k), t, k, true);
        EXPECT_EQ(r.cm.total(), t.size());
        EXPECT_EQ(r.cm.tp() + r.cm.fn(), t.positives());
        ASSERT_TRUE(r.roc.has_value());
        EXPECT_GE(r.roc->auc, 0.95);
        EXPECT_DOUBLE_EQ(r.metrics.f1, metrics(r.cm).f1);
    }
}

TEST(Eval, DosProbesPresentTheDosOnlyClass) {
    const auto probes = dos_probes(bundle(), UseCaseConfig{}, 1);
    ASSERT_EQ(probes.size(), 2u);
    const TelemetryFrame& normal = bundle().get(dataset_ids::kNormal).frame;
    for (const auto& p : probes) {
        EXPECT_EQ(true_class(p.state), FusedClass::Dos);
        EXPECT_EQ(p.frame.timesteps(), 1560u);
        const std::size_t first = (normal.timesteps() - 1560) / 2;
        for (std::size_t t = 0; t < 1560; t += 97) {
            for (std::size_t c = 0; c < normal.ot.cols(); ++c) {
                const double a = p.frame.ot(t, c), b = normal.ot(first + t, c);
                ASSERT_TRUE(a == b || (std::isnan(a) && std::isnan(b)));
            }
        }
        for (const auto& s : p.frame.it_state) EXPECT_NE(s.dos_level, DosLevel::None);
    }
}

TEST(Eval, ClassifyFrameTruthAndDecisions) {
    const DatasetRecord& d = bundle().get("fdi2_dos_high");
    const FrameDecisions fd = classify_frame(classifier(), d.frame);
    ASSERT_EQ(fd.truth.size(), 1541u);
    ASSERT_EQ(fd.decisions.size(), 1541u);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < fd.truth.size(); ++i) {
        EXPECT_EQ(fd.truth[i], to_int(FusedClass::FdiDos));
        EXPECT_EQ(fd.decisions[i].fused, fuse_levels(fd.decisions[i].levels));
        correct += fd.truth[i] == to_int(fd.decisions[i].fused);
    }
    EXPECT_GT(correct, 1500u);
    EXPECT_EQ(fd.end_time.front(), 19.0);
}

TEST(Eval, OverallMatrixRowsMatchWindowCounts) {
    std::vector<DatasetRecord> sets = {bundle().get("normal"), bundle().get("trip_unavailable_malfunction"),
                                       bundle().get("fdi1"), bundle().get("dos_low")};
    for (auto& p : dos_probes(bundle(), UseCaseConfig{}, 2)) sets.push_back(std::move(p));
    const ConfusionMatrix cm = evaluate_overall(classifier(), sets);
    EXPECT_EQ(cm.k, 6u);
    EXPECT_EQ(cm.row_total(to_int(FusedClass::Other)), 1541u);
    EXPECT_EQ(cm.row_total(to_int(FusedClass::Fdi)), 1541u);
    EXPECT_EQ(cm.row_total(to_int(FusedClass::OtherDos)), 1541u);
    EXPECT_EQ(cm.row_total(to_int(FusedClass::Dos)), 2u * 1541u);
    EXPECT_EQ(cm.row_total(to_int(FusedClass::Normal)), window_count(14400, 20, 1));
    EXPECT_GE(accuracy(cm), 0.95);
}

TEST(Eval, OutOfTrainingScenarioLabels) {
    const EvaluationReport r = out_of_training_eval(classifier(), UseCaseConfig{}, OutOfTrainingConfig{}, 77);
    EXPECT_EQ(r.scenario, "out_of_training");
    EXPECT_EQ(r.overall.total(), 1541u);
    EXPECT_EQ(r.overall.row_total(to_int(FusedClass::FdiDos)), 1541u);
    EXPECT_EQ(r.levels[1].metrics.f1, 1.0);
    for (const auto& l : r.levels) {
        EXPECT_GT(l.cm.tp() + l.cm.fn(), 0u);
        EXPECT_GT(l.cm.tn() + l.cm.fp(), 0u);
    }
    OutOfTrainingConfig bad;
    bad.fdi_signals = {"ch9_cps"};
    EXPECT_EQ(code_of([&] { out_of_training_eval(classifier(), UseCaseConfig{}, bad, 1); }),
              ErrorCode::InvalidArgument);
}

TEST(Sweep, RowsRankedDeterministicAndRecomputable) {
    const SweepGrid g = tiny_grid();
    EXPECT_EQ(g.size(), 8u);
    const SweepReport a = sweep(bundle(), g, small_params(), 11);
    ASSERT_EQ(a.rows.size(), 8u);
    EXPECT_EQ(a.grid_size, 8u);
    std::set<std::size_t> idx;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        const SweepRow& r = a.rows[i];
        idx.insert(r.index);
        EXPECT_DOUBLE_EQ(r.metrics.f1, metrics(r.validation).f1);
        if (i > 0) {
            EXPECT_GE(a.rows[i - 1].metrics.f1, r.metrics.f1);
            if (a.rows[i - 1].metrics.f1 == r.metrics.f1) {
                EXPECT_LT(a.rows[i - 1].index, r.index);
            }
        }
        EXPECT_GT(r.validation.total(), 0u);
    }
    EXPECT_EQ(idx.size(), 8u);
    SweepGrid threaded = g;
    threaded.n_jobs = 3;
    const SweepReport b = sweep(bundle(), threaded, small_params(), 11);
    ASSERT_EQ(b.rows.size(), a.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(a.rows[i].index, b.rows[i].index);
        EXPECT_EQ(a.rows[i].seed, b.rows[i].seed);
        EXPECT_EQ(a.rows[i].validation, b.rows[i].validation);
    }
}

TEST(Sweep, GridEnumerationOrder) {
    SweepGrid g = tiny_grid();
    g.abnormal_fraction = {0.5, 1.0};
    g.budget = 5;
    const SweepReport r = sweep(bundle(), g, small_params(), 2);
    EXPECT_EQ(r.grid_size, 16u);
    EXPECT_EQ(r.rows.size(), 5u);
    for (const auto& row : r.rows) {
        // abnormal_fraction varies fastest, then split, algorithm, scaling and ratio.
        EXPECT_EQ(row.abnormal_fraction, g.abnormal_fraction[row.index % 2]);
        EXPECT_EQ(row.algorithm, g.algorithm[(row.index / 2) % 2]);
        EXPECT_EQ(row.scaling, g.scaling[(row.index / 4) % 2]);
        EXPECT_EQ(row.train_ratio, g.train_ratio[(row.index / 8) % 2]);
        EXPECT_EQ(row.seed, derive_seed(2, static_cast<std::uint64_t>(row.index)));
    }
}

TEST(Sweep, DeskAndFullGridSizes) {
    EXPECT_EQ(SweepGrid::desk().size(), 64u);
    EXPECT_EQ(SweepGrid::full().size(), 5u * 5u * 6u * 2u * 5u * 3u);
}

TEST(Sweep, InvalidGrids) {
    SweepGrid empty;
    EXPECT_EQ(code_of([&] { sweep(bundle(), empty, small_params(), 1); }), ErrorCode::EmptyGrid);
    SweepGrid g = tiny_grid();
    g.abnormal_fraction = {1.5};
    EXPECT_EQ(code_of([&] { sweep(bundle(), g, small_params(), 1); }), ErrorCode::ConfigError);
    g = tiny_grid();
    g.level = 4;
    EXPECT_EQ(code_of([&] { sweep(bundle(), g, small_params(), 1); }), ErrorCode::ConfigError);
}

TEST(Sensitivity, CurvesAndSvg) {
    const SweepReport r = sweep(bundle(), tiny_grid(), small_params(), 11);
    const auto curves = sensitivity_curves(r);
    std::set<std::string> axes;
    for (const auto& c : curves) {
        axes.insert(c.axis);
        EXPECT_EQ(c.x.size(), 2u);
        EXPECT_EQ(c.mean_f1.size(), 2u);
        const std::string svg = render_svg(c);
        EXPECT_EQ(svg.rfind("<svg", 0), 0u);
        EXPECT_NE(svg.find("polyline"), std::string::npos);
    }
    EXPECT_EQ(axes, (std::set<std::string>{"train_ratio", "scaling", "algorithm"}));
}
