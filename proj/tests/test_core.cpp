#include <gtest/gtest.h>

#include <map>

#include "test_support.hpp"
#include "wqad/core.hpp"
#include "wqad/error.hpp"

using namespace wqad;
using wqad::testing::hour;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorCode::Io;
}

}  // namespace

TEST(TypeClass, TableExamples) {
    EXPECT_EQ(classify_type_to_class(TypeCode::A), 1);
    EXPECT_EQ(classify_type_to_class(TypeCode::K), 2);
    EXPECT_EQ(classify_type_to_class(TypeCode::H), 3);
}

TEST(TypeClass, ExhaustiveTwelveCases) {
    const std::map<char, int> expected{{'A', 1}, {'B', 3}, {'C', 3}, {'D', 1}, {'E', 3}, {'F', 2},
                                       {'G', 2}, {'H', 3}, {'I', 1}, {'J', 1}, {'K', 2}, {'L', 3}};
    ASSERT_EQ(std::size(kAllTypeCodes), 12u);
    for (TypeCode code : kAllTypeCodes) {
        const char c = to_char(code);
        EXPECT_EQ(classify_type_to_class(code), expected.at(c)) << c;
        EXPECT_EQ(classify_type_to_class(c), expected.at(c)) << c;
        EXPECT_EQ(parse_type_code(std::string(1, c)), code);
    }
}

TEST(TypeClass, UnknownLetterRejected) {
    EXPECT_EQ(code_of([] { (void)classify_type_to_class('M'); }), ErrorCode::InvalidType);
    EXPECT_EQ(code_of([] { (void)classify_type_to_class('a' - 1); }), ErrorCode::InvalidType);
    EXPECT_EQ(code_of([] { (void)parse_type_code("Z"); }), ErrorCode::InvalidType);
    EXPECT_EQ(code_of([] { (void)parse_type_code(""); }), ErrorCode::InvalidType);
}

TEST(TypeClass, LabelCarriesClass) {
    AnomalyLabel l{TypeCode::J, Provenance::GroundTruth};
    EXPECT_EQ(l.anomaly_class(), 1);
}

TEST(ValidateFrame, ValidFramePasses) {
    auto f = wqad::testing::hourly_frame({1, 2, 3});
    f.labels[hour(1)] = {TypeCode::A, Provenance::GroundTruth};
    EXPECT_TRUE(validate_frame(f).empty());
    EXPECT_NO_THROW(require_valid(f));
}

TEST(ValidateFrame, DuplicateTimestamp) {
    auto f = wqad::testing::hourly_frame({1, 2, 3});
    f.observations[2].timestamp = f.observations[1].timestamp;
    const auto r = validate_frame(f);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].kind, FindingKind::DuplicateTimestamp);
    EXPECT_EQ(r[0].index, 2u);
}

TEST(ValidateFrame, OrphanLabel) {
    auto f = wqad::testing::hourly_frame({1, 2, 3});
    f.labels[hour(7)] = {TypeCode::D, Provenance::GroundTruth};
    const auto r = validate_frame(f);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].kind, FindingKind::OrphanLabel);
    EXPECT_EQ(r[0].timestamp, hour(7));
}

TEST(ValidateFrame, NonMonotoneRejectedByConstruction) {
    std::vector<Observation> obs{{hour(2), 1.0, {}}, {hour(1), 2.0, {}}};
    const auto r = validate_frame(SeriesFrame{"x", obs, {}});
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].kind, FindingKind::NonMonotoneTimestamp);
    EXPECT_EQ(category_of(code_of([&] { (void)make_frame("x", obs); })), ErrorCategory::Data);
}

TEST(Timestamp, IsoRoundTrip) {
    const Timestamp t = timestamp_from_epoch(1'500'000'123);
    const std::string text = format_timestamp(t);
    EXPECT_EQ(text, "2017-07-14T02:42:03Z");
    EXPECT_EQ(parse_timestamp(text), t);
    EXPECT_EQ(epoch_seconds(parse_timestamp("2017-01-01T00:00:00")), wqad::testing::kEpoch);
}

TEST(Timestamp, CustomPatternAndGarbage) {
    EXPECT_EQ(epoch_seconds(parse_timestamp("01/01/2017 01:00", "%d/%m/%Y %H:%M")),
              wqad::testing::kEpoch + 3600);
    EXPECT_EQ(code_of([] { (void)parse_timestamp("not a time"); }), ErrorCode::Parse);
    EXPECT_EQ(code_of([] { (void)parse_timestamp("2017-01-01T00:00:00junk"); }), ErrorCode::Parse);
}

TEST(Config, Defaults) {
    DetectorConfig c;
    EXPECT_DOUBLE_EQ(c.alpha, 0.01);
    EXPECT_DOUBLE_EQ(c.max_gap_minutes, 180.0);
    EXPECT_EQ(c.k_neighbours, 10);
    EXPECT_DOUBLE_EQ(c.evt_alpha, 0.05);
    EXPECT_EQ(c.p_max, 5);
    EXPECT_EQ(c.d_max, 2);
    EXPECT_EQ(c.q_max, 5);
    EXPECT_DOUBLE_EQ(c.s_floor, 1e-8);
    EXPECT_NO_THROW(c.validate());
}

TEST(Config, BoundsRejected) {
    DetectorConfig c;
    c.alpha = 1.0;
    EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidConfig);
    c = {};
    c.max_gap_minutes = 0;
    EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidConfig);
    c = {};
    c.k_neighbours = 0;
    EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidConfig);
}

TEST(Config, SensorSpecs) {
    EXPECT_TRUE(default_sensor_spec("turbidity").zero_is_impossible);
    EXPECT_TRUE(default_sensor_spec("conductivity").zero_is_impossible);
    EXPECT_FALSE(default_sensor_spec("level").zero_is_impossible);
    SensorSpec bad{"x", 5.0, 5.0, false};
    EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::InvalidConfig);
}

TEST(Errors, CategoriesMapToExitCodes) {
    EXPECT_EQ(static_cast<int>(category_of(ErrorCode::InvalidConfig)), 1);
    EXPECT_EQ(static_cast<int>(category_of(ErrorCode::Parse)), 2);
    EXPECT_EQ(static_cast<int>(category_of(ErrorCode::NoModel)), 3);
}
