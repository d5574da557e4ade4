#include "wqad/evaluate.hpp"

#include <cmath>

#include <fmt/format.h>

#include "wqad/error.hpp"

namespace wqad::evaluate {

double Ratio::rounded(int digits) const {
    std::uint64_t scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    // floor(scale * num / den + 1/2) without floating point.
    const std::uint64_t q = (2 * scale * numerator + denominator) / (2 * denominator);
    return static_cast<double>(q) / static_cast<double>(scale);
}

ConfusionMatrix build_confusion(const FlagSet& flags, const LabelMap& labels, bool strict) {
    if (strict) {
        for (const auto& [ts, label] : labels) {
            if (!flags.contains(ts)) {
                throw Error(ErrorCode::Alignment,
                            fmt::format("label {} at {} is not among the evaluated timestamps",
                                        to_char(label.type_code), format_timestamp(ts)));
            }
        }
    }
    ConfusionMatrix m;
    for (const auto& [ts, flagged] : flags) {
        const bool anomalous = labels.contains(ts);
        if (flagged && anomalous) ++m.tp;
        else if (flagged) ++m.fp;
        else if (anomalous) ++m.fn;
        else ++m.tn;
    }
    return m;
}

ConfusionMatrix fold_class2(ConfusionMatrix matrix, std::uint64_t rule_hits, std::uint64_t missed) {
    matrix.tp += rule_hits;
    matrix.fn += missed;
    return matrix;
}

Metrics metrics(const ConfusionMatrix& m) {
    const std::uint64_t total = m.total();
    if (total == 0) throw Error(ErrorCode::EmptyEvaluation, "confusion matrix is empty");
    Metrics out;
    out.accuracy = {m.tp + m.tn, total};
    out.error_rate = {m.fp + m.fn, total};
    if (m.tn + m.fn > 0) out.npv = Ratio{m.tn, m.tn + m.fn};
    if (m.tp + m.fp > 0) out.ppv = Ratio{m.tp, m.tp + m.fp};
    return out;
}

double rmse(const detect::DetectionTrace& trace) {
    if (trace.records.empty()) {
        throw Error(ErrorCode::EmptyEvaluation, "trace has no forecast records");
    }
    double acc = 0.0;
    for (const auto& r : trace.records) {
        const double e = r.observed - *r.forecast;
        acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(trace.records.size()));
}

PerTypeReport per_type_report(const FlagSet& flags, const LabelMap& labels) {
    PerTypeReport out;
    for (const auto& [ts, label] : labels) {
        auto& entry = out[label.type_code];
        ++entry.total;
        const auto it = flags.find(ts);
        if (it != flags.end() && it->second) ++entry.hit;
    }
    return out;
}

FlagSet flags_from_trace(const detect::DetectionTrace& trace, bool include_warmup) {
    FlagSet out;
    if (include_warmup) {
        for (const auto& r : trace.warmup) out.emplace(r.timestamp, r.flagged);
    }
    for (const auto& r : trace.records) out.emplace(r.timestamp, r.flagged);
    return out;
}

void exclude(FlagSet& flags, LabelMap& labels, const std::set<Timestamp>& timestamps) {
    for (const auto& ts : timestamps) {
        flags.erase(ts);
        labels.erase(ts);
    }
}

std::string format_metric(const std::optional<Ratio>& r) {
    return r ? fmt::format("{:.2f}", r->rounded(2)) : std::string("n/a");
}

void write_report_table(std::ostream& out, const std::vector<EvalReport>& reports) {
    out << fmt::format("{:<14} {:<20} {:>7} {:>7} {:>7} {:>7} {:>8} {:>6} {:>5} {:>5} {:>8}\n", "variable",
                       "method", "TN", "FN", "FP", "TP", "Accuracy", "Error", "NPV", "PPV", "RMSE");
    for (const auto& r : reports) {
        out << fmt::format("{:<14} {:<20} {:>7} {:>7} {:>7} {:>7} {:>8} {:>6} {:>5} {:>5} {:>8}\n", r.variable,
                           r.method, r.matrix.tn, r.matrix.fn, r.matrix.fp, r.matrix.tp,
                           format_metric(r.metrics.accuracy), format_metric(r.metrics.error_rate),
                           format_metric(r.metrics.npv), format_metric(r.metrics.ppv),
                           r.rmse ? fmt::format("{:.4f}", *r.rmse) : std::string("-"));
    }
}

void write_report_csv(std::ostream& out, const std::vector<EvalReport>& reports) {
    out << "variable,method,tn,fn,fp,tp,folded,accuracy,error_rate,npv,ppv,rmse\n";
    auto full = [](const std::optional<Ratio>& r) { return r ? fmt::format("{}", r->value()) : std::string("undefined"); };
    for (const auto& r : reports) {
        out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", r.variable, r.method, r.matrix.tn, r.matrix.fn,
                           r.matrix.fp, r.matrix.tp, r.folded, full(r.metrics.accuracy),
                           full(r.metrics.error_rate), full(r.metrics.npv), full(r.metrics.ppv),
                           r.rmse ? fmt::format("{}", *r.rmse) : std::string());
    }
}

void write_per_type_csv(std::ostream& out, const std::vector<EvalReport>& reports) {
    out << "variable,method,type,total,hit\n";
    for (const auto& r : reports) {
        for (const auto& [code, hits] : r.per_type) {
            out << fmt::format("{},{},{},{},{}\n", r.variable, r.method, to_char(code), hits.total, hits.hit);
        }
    }
}

}  // namespace wqad::evaluate
