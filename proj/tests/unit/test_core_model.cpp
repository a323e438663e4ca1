#include <gtest/gtest.h>

#include <set>

#include "cyberchar/core_model.hpp"
#include "cyberchar/error.hpp"

using namespace cyberchar;

namespace {

struct TruthRow {
    int l1, l2, l3;
    bool reachable;
    FusedClass cls;
};

// Literal transcription of the architecture truth table.
const TruthRow kTable[] = {
    {0, 0, 0, true, FusedClass::Normal},  {1, 0, 0, true, FusedClass::Other},
    {1, 0, 1, true, FusedClass::Fdi},     {0, 1, 0, true, FusedClass::Dos},
    {1, 1, 0, true, FusedClass::OtherDos}, {1, 1, 1, true, FusedClass::FdiDos},
    {0, 0, 1, false, FusedClass::Normal}, {0, 1, 1, false, FusedClass::Normal},
};

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InvariantViolation;
}

}  // namespace

TEST(CoreModel, FourteenDistinctValidStates) {
    const auto states = enumerate_states();
    ASSERT_EQ(states.size(), 14u);
    std::set<std::string> keys;
    for (const auto& s : states) {
        EXPECT_TRUE(s.is_valid()) << s.key();
        keys.insert(s.key());
    }
    EXPECT_EQ(keys.size(), 14u);
    EXPECT_TRUE(states.front().is_normal());
}

TEST(CoreModel, SixFdiDosCombinations) {
    int combos = 0, fdi_only = 0, dos_only = 0;
    for (const auto& s : enumerate_states()) {
        const bool dos = s.dos_level != DosLevel::None;
        if (s.fdi_level > 0 && dos) ++combos;
        if (s.fdi_level > 0 && !dos) ++fdi_only;
        if (s.fdi_level == 0 && dos) ++dos_only;
    }
    EXPECT_EQ(combos, 6);
    EXPECT_EQ(fdi_only, 3);
    EXPECT_EQ(dos_only, 2);
}

TEST(CoreModel, InvalidStatesRejected) {
    EXPECT_EQ(code_of([] { make_state(TripCause::Malfunction, 1, DosLevel::None); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { make_state(TripCause::None, 2, DosLevel::None); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { make_state(TripCause::Cyber, 4, DosLevel::None); }), ErrorCode::InvalidArgument);
    ScenarioState s;
    s.trip_available = false;
    EXPECT_FALSE(s.is_valid());
}

TEST(CoreModel, TruthTableBruteForce) {
    for (const auto& row : kTable) {
        if (row.reachable) {
            EXPECT_EQ(fuse_bits(row.l1, row.l2, row.l3), row.cls) << row.l1 << row.l2 << row.l3;
        } else {
            EXPECT_EQ(code_of([&] { fuse_bits(row.l1, row.l2, row.l3); }), ErrorCode::Unreachable);
        }
    }
}

TEST(CoreModel, FuseLevelsGating) {
    LevelOutputs lo;
    lo.l1 = 0;
    lo.l3_evaluated = true;
    EXPECT_EQ(code_of([&] { fuse_levels(lo); }), ErrorCode::Unreachable);
    lo = {1, 1, 1, true};
    EXPECT_EQ(fuse_levels(lo), FusedClass::FdiDos);
    EXPECT_EQ(code_of([] { fuse_bits(2, 0, 0); }), ErrorCode::InvalidArgument);
}

TEST(CoreModel, TrueClassPerState) {
    EXPECT_EQ(true_class(ScenarioState::normal()), FusedClass::Normal);
    EXPECT_EQ(true_class(make_state(TripCause::Malfunction, 0, DosLevel::None)), FusedClass::Other);
    EXPECT_EQ(true_class(make_state(TripCause::Cyber, 0, DosLevel::None)), FusedClass::Other);
    EXPECT_EQ(true_class(make_state(TripCause::Cyber, 2, DosLevel::None)), FusedClass::Fdi);
    EXPECT_EQ(true_class(make_state(TripCause::Cyber, 0, DosLevel::High)), FusedClass::OtherDos);
    EXPECT_EQ(true_class(make_state(TripCause::Cyber, 3, DosLevel::Low)), FusedClass::FdiDos);
    EXPECT_EQ(true_class(make_state(TripCause::None, 0, DosLevel::Low)), FusedClass::Dos);
}

TEST(CoreModel, DosOnlyClassUnreachableFromUseCaseStates) {
    for (const auto& s : enumerate_states()) EXPECT_NE(true_class(s), FusedClass::Dos) << s.key();
}

TEST(CoreModel, NamesAndParsing) {
    EXPECT_EQ(class_name(FusedClass::OtherDos), "Other+DoS");
    EXPECT_EQ(parse_trip_cause("malfunction"), TripCause::Malfunction);
    EXPECT_EQ(parse_dos_level("high"), DosLevel::High);
    EXPECT_EQ(code_of([] { parse_dos_level("medium"); }), ErrorCode::FormatError);
    EXPECT_EQ(code_of([] { fused_class_from_int(6); }), ErrorCode::LabelOutOfRange);
    EXPECT_EQ(make_state(TripCause::Cyber, 2, DosLevel::Low).key(), "cyber-fdi2-doslow");
}

TEST(CoreModel, ExitCodes) {
    EXPECT_EQ(exit_code_for(ErrorCode::ConfigError), 2);
    EXPECT_EQ(exit_code_for(ErrorCode::IoError), 3);
    EXPECT_EQ(exit_code_for(ErrorCode::InvariantViolation), 4);
}
