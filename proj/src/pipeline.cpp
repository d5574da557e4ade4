#include "wqad/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "wqad/error.hpp"
#include "wqad/model_json.hpp"
#include "wqad/parallel.hpp"
#include "wqad/plot.hpp"
#include "wqad/prepare.hpp"

namespace wqad::pipeline {

using nlohmann::json;

std::string_view to_string(FeatureTransform t) noexcept {
    switch (t) {
        case FeatureTransform::Log: return "log";
        case FeatureTransform::Derivative: return "derivative";
        case FeatureTransform::OneSided: return "one-sided";
    }
    return "unknown";
}

FeatureTransform parse_feature_transform(std::string_view text) {
    if (text == "log") return FeatureTransform::Log;
    if (text == "derivative") return FeatureTransform::Derivative;
    if (text == "one-sided") return FeatureTransform::OneSided;
    throw Error(ErrorCode::InvalidConfig, fmt::format("unknown feature transform '{}'", text));
}

std::string method_name(forecast::ModelKind kind, detect::Mode mode) {
    return fmt::format("{}-{}", forecast::to_string(kind), detect::to_string(mode));
}

void RunConfig::validate(const std::set<std::string>& available) const {
    detector.validate();
    auto need = [&](const std::string& var, const char* where) {
        if (!available.contains(var)) {
            throw Error(ErrorCode::InvalidConfig, fmt::format("{} refers to unknown variable '{}'", where, var));
        }
    };
    for (const auto& v : variables) need(v, "variables");
    for (const auto& [v, covs] : covariates) {
        need(v, "covariates");
        for (const auto& c : covs) need(c.variable, "covariates");
    }
    for (const auto& [v, spec] : sensors) spec.validate();
    if (models.empty() && feature_methods.empty()) {
        throw Error(ErrorCode::InvalidConfig, "no models and no feature methods selected");
    }
    if (!models.empty() && modes.empty()) throw Error(ErrorCode::InvalidConfig, "no detection modes selected");
    if (!feature_methods.empty() && feature_transforms.empty()) {
        throw Error(ErrorCode::InvalidConfig, "no feature transforms selected");
    }
    const bool regression = std::find(models.begin(), models.end(), forecast::ModelKind::RegARIMA) != models.end();
    if (regression && covariates.empty()) {
        throw Error(ErrorCode::InvalidConfig, "regarima selected but no covariates configured");
    }
}

RunConfig config_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Parse, fmt::format("config JSON: {}", e.what()));
    }
    try {
        RunConfig c;
        if (doc.contains("detector")) {
            const auto& d = doc.at("detector");
            auto& det = c.detector;
            det.alpha = d.value("alpha", det.alpha);
            det.max_gap_minutes = d.value("max_gap_minutes", det.max_gap_minutes);
            det.k_neighbours = d.value("k_neighbours", det.k_neighbours);
            det.evt_alpha = d.value("evt_alpha", det.evt_alpha);
            det.p_max = d.value("p_max", det.p_max);
            det.q_max = d.value("q_max", det.q_max);
            det.d_max = d.value("d_max", det.d_max);
            det.s_floor = d.value("s_floor", det.s_floor);
            det.pacf_z = d.value("pacf_z", det.pacf_z);
        }
        if (doc.contains("mapping")) {
            const auto& m = doc.at("mapping");
            auto& map = c.mapping;
            map.timestamp_column = m.value("timestamp_column", map.timestamp_column);
            map.value_columns = m.value("value_columns", map.value_columns);
            if (m.contains("label_column")) map.label_column = m.at("label_column").get<std::string>();
            map.label_columns = m.value("label_columns", map.label_columns);
            if (m.contains("quality_column")) map.quality_column = m.at("quality_column").get<std::string>();
            map.timestamp_format = m.value("timestamp_format", map.timestamp_format);
        }
        if (doc.contains("sensors")) {
            for (const auto& [var, s] : doc.at("sensors").items()) {
                SensorSpec spec = default_sensor_spec(var);
                spec.min_detectable = s.value("min_detectable", spec.min_detectable);
                spec.max_detectable = s.value("max_detectable", spec.max_detectable);
                spec.zero_is_impossible = s.value("zero_is_impossible", spec.zero_is_impossible);
                c.sensors[var] = spec;
            }
        }
        c.variables = doc.value("variables", c.variables);
        if (doc.contains("models")) {
            c.models.clear();
            for (const auto& m : doc.at("models")) c.models.push_back(forecast::parse_model_kind(m.get<std::string>()));
        }
        if (doc.contains("modes")) {
            c.modes.clear();
            for (const auto& m : doc.at("modes")) c.modes.push_back(detect::parse_mode(m.get<std::string>()));
        }
        if (doc.contains("feature_methods")) {
            for (const auto& m : doc.at("feature_methods")) {
                c.feature_methods.push_back(features::parse_method(m.get<std::string>()));
            }
        }
        if (doc.contains("feature_transforms")) {
            c.feature_transforms.clear();
            for (const auto& t : doc.at("feature_transforms")) {
                c.feature_transforms.push_back(parse_feature_transform(t.get<std::string>()));
            }
        }
        if (doc.contains("one_sided_direction")) {
            for (const auto& [var, d] : doc.at("one_sided_direction").items()) {
                c.one_sided_direction[var] = features::parse_direction(d.get<std::string>());
            }
        }
        if (doc.contains("covariates")) {
            for (const auto& [var, list] : doc.at("covariates").items()) {
                for (const auto& entry : list) {
                    c.covariates[var].push_back({entry.at("variable").get<std::string>(), entry.value("log", false)});
                }
            }
        }
        c.fold_class2 = doc.value("fold_class2", c.fold_class2);
        c.plots = doc.value("plots", c.plots);
        c.threads = doc.value("threads", c.threads);
        c.detector.validate();
        return c;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, fmt::format("config JSON: {}", e.what()));
    }
}

std::string config_to_json(const RunConfig& c) {
    nlohmann::ordered_json doc;
    const auto& d = c.detector;
    doc["detector"] = {{"alpha", d.alpha},           {"max_gap_minutes", d.max_gap_minutes},
                       {"k_neighbours", d.k_neighbours}, {"evt_alpha", d.evt_alpha},
                       {"p_max", d.p_max},           {"q_max", d.q_max},
                       {"d_max", d.d_max},           {"s_floor", d.s_floor},
                       {"pacf_z", d.pacf_z}};
    nlohmann::ordered_json mapping;
    mapping["timestamp_column"] = c.mapping.timestamp_column;
    mapping["value_columns"] = c.mapping.value_columns;
    if (c.mapping.label_column) mapping["label_column"] = *c.mapping.label_column;
    mapping["label_columns"] = c.mapping.label_columns;
    if (c.mapping.quality_column) mapping["quality_column"] = *c.mapping.quality_column;
    mapping["timestamp_format"] = c.mapping.timestamp_format;
    doc["mapping"] = mapping;
    doc["sensors"] = nlohmann::ordered_json::object();
    for (const auto& [var, s] : c.sensors) {
        doc["sensors"][var] = {{"min_detectable", s.min_detectable},
                               {"max_detectable", s.max_detectable},
                               {"zero_is_impossible", s.zero_is_impossible}};
    }
    doc["variables"] = c.variables;
    doc["models"] = nlohmann::ordered_json::array();
    for (auto m : c.models) doc["models"].push_back(forecast::to_string(m));
    doc["modes"] = nlohmann::ordered_json::array();
    for (auto m : c.modes) doc["modes"].push_back(detect::to_string(m));
    doc["feature_methods"] = nlohmann::ordered_json::array();
    for (auto m : c.feature_methods) doc["feature_methods"].push_back(features::to_string(m));
    doc["feature_transforms"] = nlohmann::ordered_json::array();
    for (auto t : c.feature_transforms) doc["feature_transforms"].push_back(to_string(t));
    doc["one_sided_direction"] = nlohmann::ordered_json::object();
    for (const auto& [var, dir] : c.one_sided_direction) doc["one_sided_direction"][var] = features::to_string(dir);
    doc["covariates"] = nlohmann::ordered_json::object();
    for (const auto& [var, list] : c.covariates) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& cov : list) arr.push_back({{"variable", cov.variable}, {"log", cov.log}});
        doc["covariates"][var] = arr;
    }
    doc["fold_class2"] = c.fold_class2;
    doc["plots"] = c.plots;
    doc["threads"] = c.threads;
    return doc.dump(2) + "\n";
}

namespace {

template <class F>
auto staged(const std::string& stage, const std::string& variable, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const Error& e) {
        throw Error(e.code(), fmt::format("[{}:{}] {}", stage, variable, e.what()));
    }
}

std::string file_safe(std::string s) {
    for (char& c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
    }
    return s;
}

forecast::SeriesTransform transform_for(forecast::ModelKind kind) {
    return kind == forecast::ModelKind::LinearAR ? forecast::SeriesTransform::DiffLog : forecast::SeriesTransform::Log;
}

struct Class2Split {
    std::set<Timestamp> timestamps;
    std::uint64_t hits = 0;
    std::uint64_t missed = 0;
};

Class2Split split_class2(const LabelMap& labels, const std::vector<rules::RuleFinding>& findings,
                         const std::set<Timestamp>& evaluated) {
    std::set<Timestamp> found;
    for (const auto& f : findings) found.insert(f.timestamp);
    Class2Split out;
    for (const auto& [ts, label] : labels) {
        if (label.anomaly_class() != 2 || !evaluated.contains(ts)) continue;
        out.timestamps.insert(ts);
        if (found.contains(ts)) ++out.hits;
        else ++out.missed;
    }
    return out;
}

evaluate::EvalReport evaluate_flags(const std::string& variable, const std::string& method, evaluate::FlagSet flags,
                                    const LabelMap& all_labels, const std::vector<rules::RuleFinding>& findings,
                                    bool fold) {
    std::set<Timestamp> evaluated;
    for (const auto& [ts, f] : flags) evaluated.insert(ts);
    LabelMap labels;
    for (const auto& [ts, label] : all_labels) {
        if (evaluated.contains(ts)) labels.emplace(ts, label);
    }
    evaluate::EvalReport report;
    report.variable = variable;
    report.method = method;
    if (fold) {
        const auto split = split_class2(labels, findings, evaluated);
        evaluate::exclude(flags, labels, split.timestamps);
        report.matrix = evaluate::build_confusion(flags, labels);
        report.per_type = evaluate::per_type_report(flags, labels);
        report.matrix = evaluate::fold_class2(report.matrix, split.hits, split.missed);
        report.folded = split.hits;
    } else {
        report.matrix = evaluate::build_confusion(flags, labels);
        report.per_type = evaluate::per_type_report(flags, labels);
    }
    report.metrics = evaluate::metrics(report.matrix);
    return report;
}

struct VariableOutput {
    std::vector<rules::RuleFinding> findings;
    SeriesFrame sanitized;
    std::vector<ModelRun> runs;
    std::vector<evaluate::EvalReport> reports;
    std::map<std::string, std::string> artifacts;
};

forecast::CovariateMatrix covariate_matrix(const RunConfig& config, const std::string& variable,
                                           const SeriesFrame& target,
                                           const std::map<std::string, SeriesFrame>& input) {
    forecast::CovariateMatrix z;
    const auto it = config.covariates.find(variable);
    if (it == config.covariates.end() || it->second.empty()) {
        throw Error(ErrorCode::MissingCovariate, fmt::format("no covariates configured for '{}'", variable));
    }
    std::vector<std::vector<double>> columns;
    for (const auto& spec : it->second) {
        SeriesFrame cov = input.at(spec.variable);
        if (spec.log) {
            cov = prepare::sanitize_frame(cov);
            for (auto& o : cov.observations) o.value = std::log(o.value);
        }
        columns.push_back(prepare::interpolate_covariate(target, cov));
    }
    z.cols = columns.size();
    for (std::size_t i = 0; i < target.size(); ++i) {
        for (const auto& col : columns) z.data.push_back(col[i]);
    }
    return z;
}

VariableOutput process_variable(const RunConfig& config, const std::string& variable,
                                const std::map<std::string, SeriesFrame>& input) {
    VariableOutput out;
    const SeriesFrame& frame = input.at(variable);
    const auto sensor_it = config.sensors.find(variable);
    const SensorSpec spec = sensor_it != config.sensors.end() ? sensor_it->second : default_sensor_spec(variable);
    const std::string v = file_safe(variable);

    out.findings = staged("rules", variable, [&] { return rules::run_rules(frame, spec, config.detector); });
    {
        std::ostringstream s;
        io::write_flag_csv(s, io::flag_rows(out.findings, frame));
        out.artifacts[fmt::format("flags/{}_rules.csv", v)] = s.str();
    }
    out.sanitized = staged("sanitize", variable, [&] { return prepare::sanitize_frame(frame); });

    for (const auto kind : config.models) {
        const std::string kind_name(forecast::to_string(kind));
        const auto transform = transform_for(kind);
        const auto training =
            staged("train", variable, [&] { return prepare::build_training_set(out.sanitized, transform); });

        std::optional<forecast::CovariateMatrix> z_all;
        if (kind == forecast::ModelKind::RegARIMA) {
            z_all = staged("covariates", variable, [&] { return covariate_matrix(config, variable, out.sanitized, input); });
        }

        ModelRun run;
        run.variable = variable;
        run.fit = staged("fit", variable, [&]() -> forecast::FitResult {
            const auto& det = config.detector;
            forecast::FitOptions opts;
            opts.s_floor = det.s_floor;
            opts.transform = transform;
            opts.threads = config.threads;
            switch (kind) {
                case forecast::ModelKind::Naive: {
                    auto m = forecast::fit_naive(training.values, det.s_floor, transform);
                    return {m, forecast::diagnose(m, training.values)};
                }
                case forecast::ModelKind::LinearAR: {
                    const int p = forecast::select_ar_order(training.values, det.p_max, det.pacf_z);
                    auto m = forecast::fit_linear_ar(training.values, p, det.s_floor, transform);
                    return {m, forecast::diagnose(m, training.values)};
                }
                case forecast::ModelKind::ARIMA:
                    return forecast::auto_arima(training.values, det.p_max, det.d_max, det.q_max, opts);
                case forecast::ModelKind::RegARIMA: {
                    forecast::CovariateMatrix z_train;
                    z_train.cols = z_all->cols;
                    for (std::size_t idx : training.indices) z_train.append_row(z_all->row(idx));
                    return forecast::fit_regarima(training.values, z_train, det.p_max, det.d_max, det.q_max, opts);
                }
            }
            throw Error(ErrorCode::InvalidConfig, "unknown model kind");
        });
        out.artifacts[fmt::format("models/{}_{}.json", v, kind_name)] =
            model_to_json(run.fit.model, &run.fit.diagnostics);

        for (const auto mode : config.modes) {
            const std::string method = method_name(kind, mode);
            auto trace = staged("detect", variable, [&] {
                return detect::run_detection(out.sanitized, run.fit.model, {mode, config.detector.alpha}, out.findings,
                                             z_all ? &*z_all : nullptr);
            });
            std::ostringstream trace_csv;
            detect::write_trace_csv(trace_csv, trace);
            out.artifacts[fmt::format("traces/{}_{}.csv", v, method)] = trace_csv.str();
            std::ostringstream flag_csv;
            io::write_flag_csv(flag_csv, io::flag_rows(trace, method));
            out.artifacts[fmt::format("flags/{}_{}.csv", v, method)] = flag_csv.str();
            if (config.plots) {
                out.artifacts[fmt::format("plots/{}_{}.svg", v, method)] =
                    plot::trace_svg(trace, frame.labels, {1200, 400, fmt::format("{} {}", variable, method)});
            }
            auto report = staged("evaluate", variable, [&] {
                return evaluate_flags(variable, method, evaluate::flags_from_trace(trace), frame.labels, out.findings,
                                      config.fold_class2);
            });
            report.rmse = evaluate::rmse(trace);
            out.reports.push_back(std::move(report));
            run.traces.push_back(std::move(trace));
        }
        out.runs.push_back(std::move(run));
    }
    return out;
}

features::FeatureColumn feature_column(const SeriesFrame& sanitized, FeatureTransform transform,
                                       features::Direction direction) {
    features::FeatureColumn col;
    col.name = sanitized.name;
    col.timestamps = sanitized.timestamps();
    col.values = features::transform_log(sanitized.values());
    if (transform != FeatureTransform::Log) col.values = features::transform_derivative(col.values);
    if (transform == FeatureTransform::OneSided) col.values = features::transform_one_sided(col.values, direction);
    return col;
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& config, const std::map<std::string, SeriesFrame>& input) {
    if (input.empty()) throw Error(ErrorCode::InsufficientData, "[load] no input series");
    std::set<std::string> available;
    for (const auto& [name, frame] : input) available.insert(name);
    config.validate(available);

    std::vector<std::string> variables = config.variables;
    if (variables.empty()) variables.assign(available.begin(), available.end());

    std::vector<VariableOutput> outputs(variables.size());
    parallel_for(variables.size(), config.threads,
                 [&](std::size_t i) { outputs[i] = process_variable(config, variables[i], input); });

    PipelineResult result;
    for (std::size_t i = 0; i < variables.size(); ++i) {
        auto& o = outputs[i];
        result.rule_findings[variables[i]] = o.findings;
        for (auto& r : o.runs) result.model_runs.push_back(std::move(r));
        for (auto& r : o.reports) result.reports.push_back(std::move(r));
        result.artifacts.merge(o.artifacts);
    }

    for (const auto transform : config.feature_transforms) {
        if (config.feature_methods.empty()) break;
        const std::string tname(to_string(transform));
        std::vector<features::FeatureColumn> columns;
        for (std::size_t i = 0; i < variables.size(); ++i) {
            const auto dir_it = config.one_sided_direction.find(variables[i]);
            const auto dir = dir_it != config.one_sided_direction.end() ? dir_it->second : features::Direction::Positive;
            columns.push_back(staged("features", variables[i],
                                     [&] { return feature_column(outputs[i].sanitized, transform, dir); }));
        }
        const auto matrix = staged("features", tname, [&] { return features::normalize_columns(features::assemble(columns)); });
        features::FeatureOptions fopts;
        fopts.k = static_cast<std::size_t>(config.detector.k_neighbours);
        fopts.evt_alpha = config.detector.evt_alpha;
        fopts.threads = config.threads;

        LabelMap union_labels;
        for (const auto& v : variables) {
            for (const auto& [ts, label] : input.at(v).labels) union_labels.emplace(ts, label);
        }

        for (const auto method : config.feature_methods) {
            const std::string mname(features::to_string(method));
            auto scores = staged("features", mname, [&] { return features::run_method(matrix, method, fopts); });
            std::ostringstream score_csv;
            io::write_score_csv(score_csv, matrix, scores, tname);
            result.artifacts[fmt::format("scores/{}_{}.csv", tname, mname)] = score_csv.str();
            if (config.plots) {
                result.artifacts[fmt::format("plots/features_{}_{}.svg", tname, mname)] =
                    plot::scores_svg(matrix, scores, union_labels, {1200, 400, fmt::format("{} {}", mname, tname)});
            }
            evaluate::FlagSet flags;
            for (std::size_t r = 0; r < matrix.rows(); ++r) flags.emplace(matrix.timestamps[r], scores.flagged[r]);
            for (const auto& v : variables) {
                const std::string method = fmt::format("{}/{}", mname, tname);
                std::ostringstream flag_csv;
                io::write_flag_csv(flag_csv, io::flag_rows(matrix, scores, v));
                result.artifacts[fmt::format("flags/{}_{}_{}.csv", file_safe(v), mname, tname)] = flag_csv.str();
                result.reports.push_back(staged("evaluate", v, [&] {
                    return evaluate_flags(v, method, flags, input.at(v).labels, result.rule_findings.at(v),
                                          config.fold_class2);
                }));
            }
            result.feature_runs.push_back({transform, method, matrix, std::move(scores)});
        }
    }

    std::ostringstream table;
    evaluate::write_report_table(table, result.reports);
    result.artifacts["report.txt"] = table.str();
    std::ostringstream csv;
    evaluate::write_report_csv(csv, result.reports);
    result.artifacts["report.csv"] = csv.str();
    std::ostringstream per_type;
    evaluate::write_per_type_csv(per_type, result.reports);
    result.artifacts["per_type.csv"] = per_type.str();
    result.artifacts["config.json"] = config_to_json(config);
    return result;
}

void write_artifacts(const PipelineResult& result, const std::filesystem::path& out_dir) {
    for (const auto& [rel, content] : result.artifacts) io::write_file(out_dir / rel, content);
}

}  // namespace wqad::pipeline
