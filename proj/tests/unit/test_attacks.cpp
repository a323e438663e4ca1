#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "cyberchar/attacks.hpp"
#include "cyberchar/error.hpp"

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
    static const UseCaseBundle b = build_use_case(UseCaseConfig{}, 2024);
    return b;
}

using Cell = std::tuple<std::uint32_t, std::uint32_t>;

std::set<Cell> falsified(const TelemetryFrame& f) {
    std::set<Cell> cells;
    for (const auto& m : f.mask) {
        if (m.kind == MaskKind::Falsified) cells.insert({m.row, m.col});
    }
    return cells;
}

bool same_or_both_nan(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

}  // namespace

TEST(Attacks, BundleHoldsFourteenDatasets) {
    const auto& b = bundle();
    ASSERT_EQ(b.datasets.size(), 14u);
    for (const auto& s : enumerate_states()) {
        const DatasetRecord* d = b.find(s);
        ASSERT_NE(d, nullptr) << s.key();
        EXPECT_EQ(d->id, dataset_id(s));
    }
    EXPECT_EQ(code_of([&] { b.get("nope"); }), ErrorCode::MissingDataset);
}

TEST(Attacks, AbnormalDatasetSizes) {
    for (const auto& d : bundle().datasets) {
        if (d.id == dataset_ids::kNormal) continue;
        EXPECT_EQ(d.frame.ot_points(), 104520u) << d.id;
        EXPECT_EQ(d.frame.it_points(), 9900u) << d.id;
    }
}

TEST(Attacks, FdiMaskNesting) {
    const auto& b = bundle();
    const auto f1 = falsified(b.get("fdi1").frame);
    const auto f2 = falsified(b.get("fdi2").frame);
    const auto f3 = falsified(b.get("fdi3").frame);
    ASSERT_FALSE(f1.empty());
    EXPECT_TRUE(std::includes(f2.begin(), f2.end(), f1.begin(), f1.end()));
    EXPECT_TRUE(std::includes(f3.begin(), f3.end(), f2.begin(), f2.end()));
    EXPECT_LT(f1.size(), f2.size());
    EXPECT_LT(f2.size(), f3.size());
    // 13 windows of 120 s over one, two and three signals.
    EXPECT_EQ(f1.size(), 13u * 120u);
    EXPECT_EQ(f3.size(), 3u * 13u * 120u);
}

TEST(Attacks, FdiOverwritesOnlyTargets) {
    const auto& b = bundle();
    const TelemetryFrame& base = b.get(dataset_ids::kCyberBaseline).frame;
    const TelemetryFrame& f3 = b.get("fdi3").frame;
    const auto cells = falsified(f3);
    std::size_t changed = 0;
    for (std::size_t t = 0; t < base.timesteps(); ++t) {
        for (std::size_t c = 0; c < base.ot.cols(); ++c) {
            const bool in_mask = cells.count({static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(c)}) > 0;
            if (!in_mask) {
                ASSERT_TRUE(same_or_both_nan(base.ot(t, c), f3.ot(t, c))) << t << "," << c;
            } else {
                changed += base.ot(t, c) != f3.ot(t, c);
            }
        }
    }
    EXPECT_GT(changed, cells.size() / 2);
    for (const auto& m : f3.mask) {
        if (m.kind == MaskKind::Falsified) {
            EXPECT_TRUE(same_or_both_nan(m.original, base.ot(m.row, m.col)));
        }
    }
    EXPECT_TRUE(base.it.bitwise_equal(f3.it));
}

TEST(Attacks, DosLeavesOtBitIdentical) {
    const auto& b = bundle();
    const auto& cat = b.catalog;
    const std::size_t pr = cat.packet_rate();
    for (const char* pair : {"dos_low", "dos_high"}) {
        const TelemetryFrame& base = b.get(dataset_ids::kCyberBaseline).frame;
        const TelemetryFrame& d = b.get(pair).frame;
        EXPECT_TRUE(d.ot.bitwise_equal(base.ot)) << pair;
        double mean = 0;
        for (std::size_t j = 0; j < d.it_samples(); ++j) mean += d.it(j, pr);
        mean /= static_cast<double>(d.it_samples());
        const double target = std::string(pair) == "dos_low" ? 870.0 : 24000.0;
        EXPECT_NEAR(mean, target, 0.05 * target) << pair;
    }
    for (int level = 1; level <= 3; ++level) {
        const std::string fdi = "fdi" + std::to_string(level);
        for (const char* dos : {"_dos_low", "_dos_high"}) {
            EXPECT_TRUE(b.get(fdi + dos).frame.ot.bitwise_equal(b.get(fdi).frame.ot)) << fdi << dos;
        }
    }
}

TEST(Attacks, DosIntervalAndValidation) {
    const auto& cat = default_catalog();
    const TelemetryFrame base = generate_normal(cat, OpSchedule::parse("60:600"), {}, 3);
    DosSpec spec = DosSpec::defaults(DosLevel::High, 100.0, 300.0);
    const TelemetryFrame d = apply_dos(base, cat, spec, 9);
    const std::size_t pr = cat.packet_rate();
    for (std::size_t j = 0; j < d.it_samples(); ++j) {
        const bool inside = d.it_times[j] >= 100.0 && d.it_times[j] < 300.0;
        EXPECT_EQ(d.it_state[j].dos_level, inside ? DosLevel::High : DosLevel::None);
        if (inside) {
            EXPECT_GT(d.it(j, pr), 10000.0);
        } else {
            EXPECT_EQ(d.it(j, pr), base.it(j, pr));
        }
    }
    EXPECT_TRUE(d.ot.bitwise_equal(base.ot));
    spec.end_s = 900.0;
    EXPECT_EQ(code_of([&] { apply_dos(base, cat, spec, 9); }), ErrorCode::IntervalOutsideFrame);
    spec.end_s = 50.0;
    EXPECT_EQ(code_of([&] { apply_dos(base, cat, spec, 9); }), ErrorCode::InvalidArgument);
    spec = DosSpec::defaults(DosLevel::Low, 0, 600);
    spec.mean_rate = 10.0;
    EXPECT_EQ(code_of([&] { apply_dos(base, cat, spec, 9); }), ErrorCode::InvalidArgument);
}

TEST(Attacks, TripUnavailableChangesOnlyTripButton) {
    const auto& cat = default_catalog();
    const TelemetryFrame base = generate_normal(cat, OpSchedule::parse("60:1560"), {}, 21);
    const TelemetryFrame t = emulate_trip_unavailable(base, cat, TripCause::Malfunction);
    const std::size_t tb = cat.trip_button();
    std::size_t pulses = 0;
    for (std::size_t r = 0; r < base.timesteps(); ++r) {
        for (std::size_t c = 0; c < base.ot.cols(); ++c) {
            if (c == tb) continue;
            ASSERT_EQ(t.ot(r, c), base.ot(r, c));
        }
        if (t.ot(r, tb) == 1.0) {
            ++pulses;
            EXPECT_EQ(r % 20, 0u);
        }
        EXPECT_EQ(t.ot_state[r].trip_cause, TripCause::Malfunction);
        EXPECT_FALSE(t.ot_state[r].trip_available);
    }
    EXPECT_EQ(pulses, 78u);
    EXPECT_TRUE(t.it.bitwise_equal(base.it));
    EXPECT_EQ(code_of([&] { emulate_trip_unavailable(base, cat, TripCause::None); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([&] { emulate_trip_unavailable(base, cat, TripCause::Cyber, 20.0, 2000.0); }),
              ErrorCode::FrameTooShort);
}

TEST(Attacks, MalfunctionContentEqualsCyberBaseline) {
    const auto& b = bundle();
    const auto& cyber = b.get(dataset_ids::kCyberBaseline).frame;
    const auto& mal = b.get(dataset_ids::kMalfunction).frame;
    EXPECT_TRUE(cyber.ot.bitwise_equal(mal.ot));
    EXPECT_TRUE(cyber.it.bitwise_equal(mal.it));
    for (const auto& s : mal.ot_state) EXPECT_EQ(s.trip_cause, TripCause::Malfunction);
}

TEST(Attacks, FdiGuards) {
    const auto& cat = default_catalog();
    EXPECT_EQ(code_of([&] { validate_fdi_nesting({FdiSpec::defaults(2, cat), FdiSpec::defaults(1, cat)}); }),
              ErrorCode::InvalidArgument);
    validate_fdi_nesting({FdiSpec::defaults(1, cat), FdiSpec::defaults(2, cat), FdiSpec::defaults(3, cat)});
    const TelemetryFrame& base = bundle().get(dataset_ids::kCyberBaseline).frame;
    const FdiSpec spec = FdiSpec::defaults(1, cat);
    EXPECT_EQ(code_of([&] { inject_fdi(base, spec, {}, {60}); }), ErrorCode::MissingTemplate);
    EXPECT_EQ(code_of([&] { inject_fdi(base, spec, {}, {10}); }), ErrorCode::IntervalOutsideFrame);
    EXPECT_EQ(code_of([&] { inject_fdi(base, spec, {}, {100, 150}); }), ErrorCode::OverlappingWindows);
}

TEST(Attacks, TripEventGeometry) {
    const auto rows = trip_event_rows(1560.0, 13);
    ASSERT_EQ(rows.size(), 13u);
    EXPECT_EQ(rows.front(), 60u);
    EXPECT_EQ(rows.back(), 1500u);
    EXPECT_EQ(pulse_rows(20.0, 1560.0).size(), 78u);
}

TEST(Attacks, DeterministicPerSeed) {
    const UseCaseBundle again = build_use_case(UseCaseConfig{}, 2024);
    for (std::size_t k = 0; k < again.datasets.size(); ++k) {
        EXPECT_TRUE(again.datasets[k].frame.ot.bitwise_equal(bundle().datasets[k].frame.ot));
        EXPECT_TRUE(again.datasets[k].frame.it.bitwise_equal(bundle().datasets[k].frame.it));
    }
}
