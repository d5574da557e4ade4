#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "reference_rows.hpp"
#include "test_support.hpp"
#include "wqad/error.hpp"
#include "wqad/evaluate.hpp"
#include "wqad/synth.hpp"

using namespace wqad;
using namespace wqad::evaluate;
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

FlagSet flags_over(std::size_t n, std::initializer_list<std::size_t> flagged) {
    FlagSet out;
    for (std::size_t i = 0; i < n; ++i) out[hour(i)] = false;
    for (auto i : flagged) out[hour(i)] = true;
    return out;
}

LabelMap labels_at(std::initializer_list<std::pair<std::size_t, TypeCode>> items) {
    LabelMap out;
    for (const auto& [i, code] : items) out[hour(i)] = {code, Provenance::GroundTruth};
    return out;
}

// Printed two-decimal value, rounded half-up from the exact fraction.
double two_decimals(std::uint64_t num, std::uint64_t den) {
    return std::floor(100.0 * static_cast<double>(num) / static_cast<double>(den) + 0.5) / 100.0;
}

}  // namespace

TEST(BuildConfusion, AllFlaggedAllAnomalous) {
    const auto m = build_confusion(flags_over(5, {0, 1, 2, 3, 4}),
                                   labels_at({{0, TypeCode::A}, {1, TypeCode::A}, {2, TypeCode::D},
                                              {3, TypeCode::L}, {4, TypeCode::B}}));
    EXPECT_EQ(m, (ConfusionMatrix{5, 0, 0, 0}));
}

TEST(BuildConfusion, NothingFlaggedNothingAnomalous) {
    const auto m = build_confusion(flags_over(7, {}), {});
    EXPECT_EQ(m, (ConfusionMatrix{0, 0, 7, 0}));
}

TEST(BuildConfusion, HandEnumeration) {
    const auto m = build_confusion(flags_over(10, {2, 6}), labels_at({{2, TypeCode::A}, {8, TypeCode::J}}));
    EXPECT_EQ(m.tp, 1u);
    EXPECT_EQ(m.fn, 1u);
    EXPECT_EQ(m.fp, 1u);
    EXPECT_EQ(m.tn, 7u);
    EXPECT_EQ(m.total(), 10u);
}

TEST(BuildConfusion, LabelOutsideEvaluatedSet) {
    const auto flags = flags_over(4, {});
    const auto labels = labels_at({{9, TypeCode::A}});
    EXPECT_EQ(code_of([&] { (void)build_confusion(flags, labels); }), ErrorCode::Alignment);
    EXPECT_EQ(build_confusion(flags, labels, false).total(), 4u);
}

TEST(FoldClass2, AddsRuleHitsToTruePositives) {
    const ConfusionMatrix model{22, 2, 5759, 459};
    const auto folded = fold_class2(model, 34 + 4);
    EXPECT_EQ(folded.tp, 60u);
    EXPECT_EQ(folded.fp, 2u);
    EXPECT_EQ(folded.tn, 5759u);
    EXPECT_EQ(folded.fn, 459u);
}

TEST(FoldClass2, ZeroIsIdentity) {
    const ConfusionMatrix m{3, 4, 5, 6};
    EXPECT_EQ(fold_class2(m, 0), m);
}

TEST(FoldClass2, MissedRuleHitsAreFalseNegatives) {
    const auto m = fold_class2(ConfusionMatrix{1, 1, 1, 1}, 3, 2);
    EXPECT_EQ(m.tp, 4u);
    EXPECT_EQ(m.fn, 3u);
}

TEST(FoldClass2, FoldedNaiveConductivityRow) {
    const auto r = metrics(fold_class2(ConfusionMatrix{22, 2, 5759, 459}, 38));
    EXPECT_DOUBLE_EQ(r.accuracy.rounded(), 0.93);
    EXPECT_DOUBLE_EQ(r.error_rate.rounded(), 0.07);
    EXPECT_DOUBLE_EQ(r.npv->rounded(), 0.93);
    EXPECT_DOUBLE_EQ(r.ppv->rounded(), 0.97);
}

TEST(Metrics, NaiveTurbidityRow) {
    const auto r = metrics(ConfusionMatrix{16, 133, 5416, 715});
    EXPECT_NEAR(r.accuracy.value(), 0.865, 5e-4);
    EXPECT_NEAR(r.error_rate.value(), 0.135, 5e-4);
    EXPECT_NEAR(r.npv->value(), 0.883, 5e-4);
    EXPECT_NEAR(r.ppv->value(), 0.107, 5e-4);
    EXPECT_DOUBLE_EQ(r.accuracy.rounded(), 0.86);
    EXPECT_DOUBLE_EQ(r.error_rate.rounded(), 0.14);
    EXPECT_DOUBLE_EQ(r.npv->rounded(), 0.88);
    EXPECT_DOUBLE_EQ(r.ppv->rounded(), 0.11);
}

TEST(Metrics, ArimaConductivityRow) {
    const auto r = metrics(ConfusionMatrix{64, 5, 5756, 455});
    EXPECT_NEAR(r.accuracy.value(), 0.927, 5e-4);
    EXPECT_NEAR(r.npv->value(), 0.927, 5e-4);
    EXPECT_NEAR(r.ppv->value(), 0.928, 5e-4);
    EXPECT_EQ(format_metric(r.accuracy), "0.93");
    EXPECT_EQ(format_metric(r.npv), "0.93");
    EXPECT_EQ(format_metric(r.ppv), "0.93");
}

TEST(Metrics, UndefinedPpv) {
    const auto r = metrics(ConfusionMatrix{0, 0, 10, 2});
    EXPECT_FALSE(r.ppv.has_value());
    ASSERT_TRUE(r.npv.has_value());
    EXPECT_EQ(format_metric(r.ppv), "n/a");
}

TEST(Metrics, EmptyMatrix) {
    EXPECT_EQ(code_of([] { (void)metrics(ConfusionMatrix{}); }), ErrorCode::EmptyEvaluation);
}

TEST(Ratio, HalfUpRounding) {
    EXPECT_DOUBLE_EQ((Ratio{1, 8}).rounded(2), 0.13);    // 0.125
    EXPECT_DOUBLE_EQ((Ratio{3, 8}).rounded(2), 0.38);    // 0.375
    EXPECT_DOUBLE_EQ((Ratio{1, 200}).rounded(2), 0.01);  // 0.005
    EXPECT_DOUBLE_EQ((Ratio{1, 3}).rounded(2), 0.33);
    EXPECT_DOUBLE_EQ((Ratio{2, 3}).rounded(3), 0.667);
    EXPECT_DOUBLE_EQ((Ratio{5, 5}).rounded(2), 1.0);
}

TEST(Metrics, ReferenceRowsReproduce) {
    // One linear AR turbidity PPV cell prints 0.04 although 19/(19+151) is 0.11; every other cell must match.
    std::vector<std::string> mismatched;
    for (const auto& row : wqad::testing::reference_rows()) {
        const auto r = metrics(ConfusionMatrix{row.tp, row.fp, row.tn, row.fn});
        const auto& npv_col = row.swapped ? r.ppv : r.npv;
        const auto& ppv_col = row.swapped ? r.npv : r.ppv;
        auto check = [&](const char* what, const std::optional<Ratio>& got, double printed) {
            if (printed < 0) {
                EXPECT_FALSE(got.has_value()) << row.name;
                return;
            }
            ASSERT_TRUE(got.has_value()) << row.name;
            if (std::abs(got->rounded(2) - printed) > 1e-9) mismatched.push_back(std::string(row.name) + " " + what);
        };
        check("accuracy", r.accuracy, row.accuracy);
        check("error", r.error_rate, row.error);
        check("NPV", npv_col, row.npv);
        check("PPV", ppv_col, row.ppv);
    }
    EXPECT_EQ(mismatched, std::vector<std::string>{"regression PR turbidity linear-ar AD PPV"});
    EXPECT_DOUBLE_EQ((Ratio{19, 170}).rounded(2), 0.11);
}

TEST(Rmse, Examples) {
    detect::DetectionTrace trace;
    auto add = [&](double observed, double forecast) {
        detect::TraceRecord r;
        r.observed = observed;
        r.forecast = forecast;
        trace.records.push_back(r);
    };
    add(1.0, 1.0);
    add(2.0, 2.0);
    EXPECT_DOUBLE_EQ(rmse(trace), 0.0);
    trace.records.clear();
    add(5.0, 4.5);
    add(1.0, 0.5);
    add(-1.0, -1.5);
    EXPECT_DOUBLE_EQ(rmse(trace), 0.5);
    trace.records.clear();
    add(3.0, 0.0);
    add(0.0, 4.0);
    EXPECT_NEAR(rmse(trace), std::sqrt(12.5), 1e-12);
    EXPECT_NEAR(rmse(trace), 3.5355, 1e-4);
    trace.records.clear();
    EXPECT_EQ(code_of([&] { (void)rmse(trace); }), ErrorCode::EmptyEvaluation);
}

TEST(Rmse, WarmupIsIgnored) {
    detect::DetectionTrace trace;
    detect::TraceRecord w;
    w.observed = 100.0;
    trace.warmup.push_back(w);
    detect::TraceRecord r;
    r.observed = 2.0;
    r.forecast = 1.0;
    trace.records.push_back(r);
    EXPECT_DOUBLE_EQ(rmse(trace), 1.0);
}

TEST(PerType, AllFlagged) {
    LabelMap labels;
    std::size_t i = 0;
    for (auto [code, count] : {std::pair{TypeCode::A, 1}, {TypeCode::D, 3}, {TypeCode::J, 5}, {TypeCode::K, 4}}) {
        for (int c = 0; c < count; ++c) labels[hour(i++)] = {code, Provenance::GroundTruth};
    }
    FlagSet flags;
    for (std::size_t j = 0; j < 20; ++j) flags[hour(j)] = j < i;
    const auto report = per_type_report(flags, labels);
    ASSERT_EQ(report.size(), 4u);
    EXPECT_EQ(report.at(TypeCode::A), (TypeHits{1, 1}));
    EXPECT_EQ(report.at(TypeCode::D), (TypeHits{3, 3}));
    EXPECT_EQ(report.at(TypeCode::J), (TypeHits{5, 5}));
    EXPECT_EQ(report.at(TypeCode::K), (TypeHits{4, 4}));

    for (auto& [ts, f] : flags) f = false;
    for (const auto& [code, hits] : per_type_report(flags, labels)) EXPECT_EQ(hits.hit, 0u) << to_char(code);
}

TEST(PerType, EveryInjectedTypeHasARow) {
    synth::InjectionPlan plan;
    plan.n = 600;
    plan.seed = 4;
    std::size_t start = 10;
    for (TypeCode code : kAllTypeCodes) {
        synth::Injection inj{code, start, code == TypeCode::K ? 3u : 4u, 8.0};
        if (code == TypeCode::G) inj.magnitude = 5000.0;
        plan.injections.push_back(inj);
        start += 40;
    }
    const auto frame = synth::realize(plan);
    FlagSet perfect;
    for (const auto& o : frame.observations) perfect[o.timestamp] = frame.labels.contains(o.timestamp);
    const auto report = per_type_report(perfect, frame.labels);
    EXPECT_EQ(report.size(), std::size(kAllTypeCodes));
    for (const auto& [code, hits] : report) {
        EXPECT_GT(hits.total, 0u) << to_char(code);
        EXPECT_EQ(hits.hit, hits.total) << to_char(code);
    }
}

TEST(EvaluateProperty, IdentitiesOnRandomMatrices) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::uint64_t> count(0, 3000);
    for (int trial = 0; trial < 2000; ++trial) {
        ConfusionMatrix m{count(rng), count(rng), count(rng), count(rng)};
        if (trial % 7 == 0) m.tp = m.fp = 0;
        if (trial % 11 == 0) m.tn = m.fn = 0;
        if (m.total() == 0) continue;
        const auto r = metrics(m);
        EXPECT_EQ(r.accuracy.numerator + r.error_rate.numerator, m.total());
        EXPECT_EQ(r.accuracy.denominator, m.total());
        EXPECT_DOUBLE_EQ(r.accuracy.value() + r.error_rate.value(), 1.0);
        for (const auto& x : {std::optional<Ratio>(r.accuracy), std::optional<Ratio>(r.error_rate), r.npv, r.ppv}) {
            if (!x) continue;
            EXPECT_GE(x->value(), 0.0);
            EXPECT_LE(x->value(), 1.0);
        }
        EXPECT_EQ(r.ppv.has_value(), m.tp + m.fp > 0);
        EXPECT_EQ(r.npv.has_value(), m.tn + m.fn > 0);
        if (r.ppv) EXPECT_DOUBLE_EQ(r.ppv->rounded(2), two_decimals(m.tp, m.tp + m.fp));
        if (r.npv) EXPECT_DOUBLE_EQ(r.npv->rounded(2), two_decimals(m.tn, m.tn + m.fn));
    }
}

TEST(EvaluateProperty, PerTypeTotalsMatchPositives) {
    std::mt19937_64 rng(5);
    std::bernoulli_distribution coin(0.3);
    std::uniform_int_distribution<int> letter(0, 11);
    for (int trial = 0; trial < 50; ++trial) {
        FlagSet flags;
        LabelMap labels;
        for (std::size_t i = 0; i < 300; ++i) {
            flags[hour(i)] = coin(rng);
            if (coin(rng)) labels[hour(i)] = {kAllTypeCodes[letter(rng)], Provenance::GroundTruth};
        }
        const auto m = build_confusion(flags, labels);
        EXPECT_EQ(m.total(), flags.size());
        std::uint64_t total = 0;
        std::uint64_t hit = 0;
        for (const auto& [code, h] : per_type_report(flags, labels)) {
            total += h.total;
            hit += h.hit;
        }
        EXPECT_EQ(total, m.tp + m.fn);
        EXPECT_EQ(hit, m.tp);
    }
}

TEST(Exclude, RemovesTimestampsFromBoth) {
    auto flags = flags_over(5, {1});
    auto labels = labels_at({{1, TypeCode::F}, {3, TypeCode::A}});
    exclude(flags, labels, {hour(1)});
    EXPECT_EQ(flags.size(), 4u);
    EXPECT_EQ(labels.size(), 1u);
    EXPECT_EQ(build_confusion(flags, labels), (ConfusionMatrix{0, 0, 3, 1}));
}

TEST(FlagsFromTrace, WarmupOptional) {
    detect::DetectionTrace trace;
    detect::TraceRecord w;
    w.timestamp = hour(0);
    w.flagged = true;
    trace.warmup.push_back(w);
    detect::TraceRecord r;
    r.timestamp = hour(1);
    r.forecast = 0.0;
    trace.records.push_back(r);
    EXPECT_EQ(flags_from_trace(trace).size(), 2u);
    EXPECT_TRUE(flags_from_trace(trace).at(hour(0)));
    EXPECT_EQ(flags_from_trace(trace, false).size(), 1u);
}

TEST(Writers, TableAndCsvColumns) {
    EvalReport r;
    r.variable = "turbidity";
    r.method = "naive-AD";
    r.matrix = {16, 133, 5416, 715};
    r.metrics = metrics(r.matrix);
    r.rmse = 0.25;
    r.per_type = {{TypeCode::A, {2, 1}}};
    std::ostringstream table;
    write_report_table(table, {r});
    EXPECT_NE(table.str().find("TN"), std::string::npos);
    EXPECT_NE(table.str().find("0.86"), std::string::npos);
    EXPECT_NE(table.str().find("0.11"), std::string::npos);

    std::ostringstream csv;
    write_report_csv(csv, {r});
    std::istringstream in(csv.str());
    std::string header;
    std::string line;
    std::getline(in, header);
    std::getline(in, line);
    EXPECT_EQ(header, "variable,method,tn,fn,fp,tp,folded,accuracy,error_rate,npv,ppv,rmse");
    EXPECT_EQ(line.rfind("turbidity,naive-AD,5416,715,133,16,0,", 0), 0u);

    std::ostringstream per_type;
    write_per_type_csv(per_type, {r});
    EXPECT_EQ(per_type.str(), "variable,method,type,total,hit\nturbidity,naive-AD,A,2,1\n");

    r.matrix = {0, 0, 10, 0};
    r.metrics = metrics(r.matrix);
    std::ostringstream undefined;
    write_report_csv(undefined, {r});
    EXPECT_NE(undefined.str().find("undefined"), std::string::npos);
}
