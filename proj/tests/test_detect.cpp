#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "test_support.hpp"
#include "wqad/detect.hpp"
#include "wqad/error.hpp"
#include "wqad/forecast.hpp"
#include "wqad/stats.hpp"

using namespace wqad;
using namespace wqad::detect;
using forecast::ForecastModel;
using forecast::ModelKind;
using forecast::SeriesTransform;
using wqad::testing::exp_of;
using wqad::testing::hourly_frame;

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

ForecastModel naive(double s, std::size_t T = 1000) {
    ForecastModel m;
    m.kind = ModelKind::Naive;
    m.s = s;
    m.T = T;
    m.k_params = 1;
    m.training_transform = SeriesTransform::Log;
    return m;
}

// Longest run of consecutive flagged records starting at `from`.
std::size_t run_from(const DetectionTrace& trace, Timestamp from) {
    std::size_t run = 0;
    bool started = false;
    for (const auto& r : trace.records) {
        if (r.timestamp == from) started = true;
        if (!started) continue;
        if (!r.flagged) break;
        ++run;
    }
    return run;
}

}  // namespace

TEST(PredictionInterval, FlooredScale) {
    const auto m = naive(1e-8, 100);
    const auto pi = prediction_interval(m, 3.0, 0.01);
    const double t = stats::student_t_quantile(0.995, 99);
    EXPECT_NEAR(pi.width(), 2.0 * t * 1e-8, 1e-15);
    EXPECT_GT(pi.width(), 0.0);
    EXPECT_LE(pi.lower, pi.center);
    EXPECT_LE(pi.center, pi.upper);
}

TEST(PredictionInterval, NearNormalLimit) {
    const auto pi = prediction_interval(naive(1.0, 5001), 0.0, 0.01);
    EXPECT_NEAR(pi.upper, 2.577, 1e-3);
    EXPECT_NEAR(pi.lower, -2.577, 1e-3);
}

TEST(PredictionInterval, TableValue) {
    auto m = naive(2.0, 12);
    m.k_params = 2;
    EXPECT_NEAR(interval_half_width(m, 0.05), 2.0 * 2.228139, 1e-5);
    const auto pi = prediction_interval(m, 1.0, 0.05);
    EXPECT_NEAR(pi.upper - 1.0, 4.456, 1e-3);
}

TEST(PredictionInterval, NoDegreesOfFreedom) {
    auto m = naive(1.0, 3);
    m.k_params = 3;
    EXPECT_EQ(code_of([&] { (void)prediction_interval(m, 0.0, 0.01); }), ErrorCode::InvalidDof);
}

TEST(Classify, BoundaryIsNormal) {
    const PredictionInterval pi{-1.0, 1.0, 0.0, 0.01};
    EXPECT_FALSE(classify_observation(0.0, pi));
    EXPECT_FALSE(classify_observation(1.0, pi));
    EXPECT_FALSE(classify_observation(-1.0, pi));
    EXPECT_TRUE(classify_observation(std::nextafter(1.0, 2.0), pi));
    EXPECT_TRUE(classify_observation(std::nextafter(-1.0, -2.0), pi));
    static_assert(classify_observation(5.0, PredictionInterval{-1.0, 1.0, 0.0, 0.01}));
}

TEST(RunDetection, SpikeUnderAd) {
    const double s = 0.05;
    std::vector<double> logs(100, 3.0);
    logs[50] += 20 * s;
    const auto frame = hourly_frame(exp_of(logs));
    const auto trace = run_detection(frame, naive(s), {Mode::AD, 0.01});
    const auto n = trace.flag_count();
    EXPECT_GE(n, 1u);
    EXPECT_LE(n, 2u);
    bool spike_flagged = false;
    for (const auto& r : trace.records) {
        if (r.timestamp == frame.observations[50].timestamp) spike_flagged = r.flagged;
    }
    EXPECT_TRUE(spike_flagged);
    EXPECT_EQ(trace.substitution_count(), 0u);
}

TEST(RunDetection, SpikeUnderAdam) {
    const double s = 0.05;
    std::vector<double> logs(100, 3.0);
    logs[50] += 20 * s;
    const auto frame = hourly_frame(exp_of(logs));
    const auto trace = run_detection(frame, naive(s), {Mode::ADAM, 0.01});
    ASSERT_EQ(trace.flag_count(), 1u);
    for (const auto& r : trace.records) {
        EXPECT_EQ(r.flagged, r.timestamp == frame.observations[50].timestamp);
    }
    EXPECT_EQ(trace.substitution_count(), 1u);
}

TEST(RunDetection, LevelShiftRuns) {
    const double s = 0.05;
    std::vector<double> logs(120, 3.0);
    for (std::size_t i = 60; i < logs.size(); ++i) logs[i] += 10 * s;
    const auto frame = hourly_frame(exp_of(logs));
    const auto shift = frame.observations[60].timestamp;
    const auto ad = run_detection(frame, naive(s), {Mode::AD, 0.01});
    const auto adam = run_detection(frame, naive(s), {Mode::ADAM, 0.01});
    EXPECT_GE(run_from(ad, shift), 1u);
    EXPECT_LE(run_from(ad, shift), 3u);
    EXPECT_GE(run_from(adam, shift), run_from(ad, shift));
    // The mitigated state never sees the new level, so every shifted point is flagged.
    EXPECT_EQ(run_from(adam, shift), 60u);
}

TEST(RunDetection, TraceCompleteness) {
    const auto frame = hourly_frame(exp_of(wqad::testing::random_walk(200, 2.0, 0.1, 3)));
    auto m = naive(0.1);
    auto trace = run_detection(frame, m, {});
    EXPECT_EQ(trace.warmup.size(), 1u);
    EXPECT_EQ(trace.records.size(), frame.size() - 1);
    EXPECT_TRUE(trace.dropped.empty());
    for (const auto& r : trace.warmup) EXPECT_FALSE(r.pi.has_value());

    ForecastModel ar;
    ar.kind = ModelKind::LinearAR;
    ar.p = 3;
    ar.d = 0;
    ar.include_constant = true;
    ar.phi = {0.1, 0.1, 0.1};
    ar.s = 0.1;
    ar.T = 500;
    ar.k_params = 4;
    ar.training_transform = SeriesTransform::DiffLog;
    trace = run_detection(frame, ar, {});
    EXPECT_EQ(trace.dropped.size(), 1u);
    EXPECT_EQ(trace.warmup.size(), 3u);
    EXPECT_EQ(trace.records.size(), frame.size() - 1 - 3);
    EXPECT_EQ(trace.dropped.front(), frame.observations.front().timestamp);
}

TEST(RunDetection, TransformNeedsPositiveValues) {
    const auto frame = hourly_frame({3.0, 2.0, -1.0, 4.0});
    EXPECT_EQ(code_of([&] { (void)run_detection(frame, naive(0.1), {}); }), ErrorCode::Transform);
}

TEST(RunDetection, RegressionNeedsCovariates) {
    auto m = naive(0.1);
    m.kind = ModelKind::RegARIMA;
    m.beta = {0.0, 1.0};
    const auto frame = hourly_frame({3.0, 2.0, 1.0});
    EXPECT_EQ(code_of([&] { (void)run_detection(frame, m, {}); }), ErrorCode::MissingCovariate);
}

TEST(RunDetectionProperty, FalsePositiveRateNearAlpha) {
    const double sigma = 0.05;
    const auto train = wqad::testing::random_walk(5000, 3.0, sigma, 500);
    const auto model = forecast::fit_naive(train);
    const auto test = hourly_frame(exp_of(wqad::testing::random_walk(10000, 3.0, sigma, 501)));
    const auto trace = run_detection(test, model, {Mode::AD, 0.01});
    const double rate = static_cast<double>(trace.flag_count()) / static_cast<double>(trace.records.size());
    EXPECT_GE(rate, 0.002);
    EXPECT_LE(rate, 0.03);
}

TEST(RunDetectionProperty, AdStateIsTheObservedHistory) {
    const auto values = exp_of(wqad::testing::random_walk(300, 2.0, 0.05, 8));
    const auto frame = hourly_frame(values);
    const auto model = naive(0.02);
    std::vector<rules::RuleFinding> findings{{frame.observations[40].timestamp, TypeCode::K, "gap"}};
    const auto with = run_detection(frame, model, {Mode::AD, 0.01}, findings);
    const auto without = run_detection(frame, model, {Mode::AD, 0.01});
    ASSERT_EQ(with.records.size(), without.records.size());
    for (std::size_t i = 0; i < with.records.size(); ++i) {
        EXPECT_EQ(*with.records[i].forecast, *without.records[i].forecast);
        EXPECT_EQ(with.records[i].used_value, with.records[i].observed);
    }
    // Naive forecasts are the previous observation.
    for (std::size_t i = 1; i < with.records.size(); ++i) {
        EXPECT_EQ(*with.records[i].forecast, with.records[i - 1].observed);
    }
}

TEST(RunDetectionProperty, SubstitutionsStayInsideTheirInterval) {
    const auto values = exp_of(wqad::testing::random_walk(400, 2.0, 0.08, 9));
    const auto trace = run_detection(hourly_frame(values), naive(0.03), {Mode::ADAM, 0.01});
    ASSERT_GT(trace.substitution_count(), 0u);
    for (const auto& r : trace.records) {
        if (!r.substituted) {
            EXPECT_EQ(r.used_value, r.observed);
            continue;
        }
        EXPECT_EQ(r.used_value, *r.forecast);
        EXPECT_FALSE(classify_observation(r.used_value, *r.pi));
        EXPECT_EQ(r.source, FlagSource::PI);
    }
}

TEST(RunDetectionProperty, RuleFlagsTakePrecedence) {
    const double s = 0.05;
    std::vector<double> logs(60, 3.0);
    logs[30] += 20 * s;
    logs[45] += 0.1 * s;
    const auto frame = hourly_frame(exp_of(logs));
    std::vector<rules::RuleFinding> findings{{frame.observations[30].timestamp, TypeCode::G, "range"},
                                             {frame.observations[45].timestamp, TypeCode::K, "gap"}};
    for (Mode mode : {Mode::AD, Mode::ADAM}) {
        const auto trace = run_detection(frame, naive(s), {mode, 0.01}, findings);
        std::size_t rule = 0;
        std::size_t pi = 0;
        for (const auto& r : trace.records) {
            rule += r.source == FlagSource::Rule;
            pi += r.source == FlagSource::PI;
            if (r.timestamp == frame.observations[30].timestamp) {
                EXPECT_EQ(r.source, FlagSource::Rule);
                EXPECT_EQ(r.rule_type, TypeCode::G);
            }
            if (r.timestamp == frame.observations[45].timestamp) {
                // inside its interval: flagged by the rule alone and never substituted
                EXPECT_TRUE(r.flagged);
                EXPECT_FALSE(r.substituted);
            }
        }
        EXPECT_EQ(rule, 2u);
        EXPECT_EQ(trace.flag_count(), rule + pi);
    }
}

TEST(TraceCsv, HeaderAndRows) {
    const auto frame = hourly_frame({10.0, 11.0, 12.0});
    const auto trace = run_detection(frame, naive(0.1), {Mode::ADAM, 0.01});
    std::ostringstream out;
    write_trace_csv(out, trace);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "timestamp,observed,used_value,forecast,lower,upper,flagged,source,mode");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        EXPECT_NE(line.find(",ADAM"), std::string::npos);
    }
    EXPECT_EQ(rows, 3);
}

TEST(Names, Modes) {
    EXPECT_EQ(parse_mode("AD"), Mode::AD);
    EXPECT_EQ(parse_mode(to_string(Mode::ADAM)), Mode::ADAM);
    EXPECT_EQ(code_of([] { (void)parse_mode("both"); }), ErrorCode::InvalidConfig);
}
