// wqad: command-line front end for the anomaly-detection library.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "wqad/csv.hpp"
#include "wqad/detect.hpp"
#include "wqad/error.hpp"
#include "wqad/evaluate.hpp"
#include "wqad/features.hpp"
#include "wqad/forecast.hpp"
#include "wqad/io.hpp"
#include "wqad/model_json.hpp"
#include "wqad/pipeline.hpp"
#include "wqad/plot.hpp"
#include "wqad/prepare.hpp"
#include "wqad/rules.hpp"
#include "wqad/synth.hpp"

namespace {

using namespace wqad;

struct Common {
    std::string input;
    std::string config;
    std::string variable;
    std::string out;
};

pipeline::RunConfig load_config(const std::string& path) {
    return path.empty() ? pipeline::RunConfig{} : pipeline::config_from_json(io::read_file(path));
}

std::map<std::string, SeriesFrame> load_input(const Common& c, const pipeline::RunConfig& config) {
    if (c.input.empty()) throw Error(ErrorCode::InvalidConfig, "--input is required");
    return io::load_csv(c.input, config.mapping);
}

const SeriesFrame& pick(const std::map<std::string, SeriesFrame>& frames, const std::string& variable) {
    if (variable.empty()) {
        if (frames.size() == 1) return frames.begin()->second;
        throw Error(ErrorCode::InvalidConfig, "--variable is required when the input has several series");
    }
    const auto it = frames.find(variable);
    if (it == frames.end()) throw Error(ErrorCode::InvalidConfig, fmt::format("no variable '{}' in input", variable));
    return it->second;
}

SensorSpec sensor_for(const pipeline::RunConfig& config, const std::string& variable) {
    const auto it = config.sensors.find(variable);
    return it != config.sensors.end() ? it->second : default_sensor_spec(variable);
}

/// Writes to `path`, or stdout when empty.
void emit(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
    } else {
        io::write_file(path, content);
    }
}

void add_common(CLI::App* cmd, Common& c, bool needs_variable = true) {
    cmd->add_option("-i,--input", c.input, "input CSV");
    cmd->add_option("-c,--config", c.config, "run configuration JSON (mapping, detector, sensors)");
    if (needs_variable) cmd->add_option("-v,--variable", c.variable, "series to process");
    cmd->add_option("-o,--out", c.out, "output path (stdout when omitted)");
}

forecast::FitResult fit_model(const pipeline::RunConfig& config, const SeriesFrame& sanitized,
                              forecast::ModelKind kind) {
    const auto& det = config.detector;
    const auto transform =
        kind == forecast::ModelKind::LinearAR ? forecast::SeriesTransform::DiffLog : forecast::SeriesTransform::Log;
    const auto training = prepare::build_training_set(sanitized, transform);
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
        case forecast::ModelKind::RegARIMA:
            break;
    }
    throw Error(ErrorCode::InvalidConfig, "regarima is only available through the pipeline subcommand");
}

int run(int argc, char** argv) {
    CLI::App app{"Water-quality sensor anomaly detection"};
    app.require_subcommand(1);

    // rules
    Common rules_c;
    auto* rules_cmd = app.add_subcommand("rules", "flag impossible, out-of-range and post-gap observations");
    add_common(rules_cmd, rules_c);

    // fit
    Common fit_c;
    std::string fit_kind = "naive";
    auto* fit_cmd = app.add_subcommand("fit", "fit a forecasting model on the clean training set");
    add_common(fit_cmd, fit_c);
    fit_cmd->add_option("-m,--model", fit_kind, "naive | linear_ar | arima")->capture_default_str();

    // detect
    Common det_c;
    std::string det_model;
    std::string det_mode = "AD";
    std::string det_flags;
    auto* det_cmd = app.add_subcommand("detect", "one-step-ahead detection with a fitted model");
    add_common(det_cmd, det_c);
    det_cmd->add_option("-m,--model", det_model, "model JSON from `fit`")->required();
    det_cmd->add_option("--mode", det_mode, "AD | ADAM")->capture_default_str();
    det_cmd->add_option("--flags", det_flags, "also write the flag CSV here");

    // features
    Common feat_c;
    std::string feat_method = "hdoutliers";
    std::string feat_transform = "derivative";
    auto* feat_cmd = app.add_subcommand("features", "multivariate feature-based detection");
    add_common(feat_cmd, feat_c, false);
    feat_cmd->add_option("--method", feat_method, "hdoutliers | knn-agg | knn-sum")->capture_default_str();
    feat_cmd->add_option("--transform", feat_transform, "log | derivative | one-sided")->capture_default_str();

    // evaluate
    Common eval_c;
    std::string eval_flags;
    bool eval_csv = false;
    auto* eval_cmd = app.add_subcommand("evaluate", "score a flag CSV against the input's labels");
    add_common(eval_cmd, eval_c);
    eval_cmd->add_option("-f,--flags", eval_flags, "flag CSV")->required();
    eval_cmd->add_flag("--csv", eval_csv, "CSV instead of a text table");

    // inject
    std::string inj_plan;
    std::string inj_out;
    std::optional<std::uint64_t> inj_seed;
    auto* inj_cmd = app.add_subcommand("inject", "generate a synthetic series with planted anomalies");
    inj_cmd->add_option("-p,--plan", inj_plan, "plan JSON")->required();
    inj_cmd->add_option("--seed", inj_seed, "overrides the plan seed");
    inj_cmd->add_option("-o,--out", inj_out, "output CSV (stdout when omitted)");

    // plot
    Common plot_c;
    std::string plot_model;
    std::string plot_mode = "AD";
    auto* plot_cmd = app.add_subcommand("plot", "SVG of a detection trace");
    add_common(plot_cmd, plot_c);
    plot_cmd->add_option("-m,--model", plot_model, "model JSON from `fit`")->required();
    plot_cmd->add_option("--mode", plot_mode, "AD | ADAM")->capture_default_str();

    // pipeline
    Common pipe_c;
    std::string pipe_plan;
    std::optional<std::uint64_t> pipe_seed;
    auto* pipe_cmd = app.add_subcommand("pipeline", "rules, models, features and evaluation in one run");
    add_common(pipe_cmd, pipe_c, false);
    pipe_cmd->add_option("-p,--plan", pipe_plan, "synthesize the input from a plan JSON instead of --input");
    pipe_cmd->add_option("--seed", pipe_seed, "overrides the plan seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ErrorCategory::Config);
    }

    if (*rules_cmd) {
        const auto config = load_config(rules_c.config);
        const auto frames = load_input(rules_c, config);
        const auto& frame = pick(frames, rules_c.variable);
        const auto findings = rules::run_rules(frame, sensor_for(config, frame.name), config.detector);
        std::ostringstream s;
        io::write_flag_csv(s, io::flag_rows(findings, frame));
        emit(rules_c.out, s.str());
    } else if (*fit_cmd) {
        const auto config = load_config(fit_c.config);
        const auto frames = load_input(fit_c, config);
        const auto sanitized = prepare::sanitize_frame(pick(frames, fit_c.variable));
        const auto fit = fit_model(config, sanitized, forecast::parse_model_kind(fit_kind));
        emit(fit_c.out, model_to_json(fit.model, &fit.diagnostics));
    } else if (*det_cmd) {
        const auto config = load_config(det_c.config);
        const auto frames = load_input(det_c, config);
        const auto& frame = pick(frames, det_c.variable);
        const auto model = load_model(det_model);
        const auto findings = rules::run_rules(frame, sensor_for(config, frame.name), config.detector);
        const auto mode = detect::parse_mode(det_mode);
        const auto trace =
            detect::run_detection(prepare::sanitize_frame(frame), model, {mode, config.detector.alpha}, findings);
        std::ostringstream s;
        detect::write_trace_csv(s, trace);
        emit(det_c.out, s.str());
        if (!det_flags.empty()) {
            std::ostringstream f;
            io::write_flag_csv(f, io::flag_rows(trace, pipeline::method_name(model.kind, mode)));
            io::write_file(det_flags, f.str());
        }
    } else if (*feat_cmd) {
        auto config = load_config(feat_c.config);
        const auto frames = load_input(feat_c, config);
        config.models.clear();
        config.feature_methods = {features::parse_method(feat_method)};
        config.feature_transforms = {pipeline::parse_feature_transform(feat_transform)};
        config.plots = false;
        const auto result = pipeline::run_pipeline(config, frames);
        const auto& run = result.feature_runs.front();
        std::ostringstream s;
        io::write_score_csv(s, run.matrix, run.scores, feat_transform);
        emit(feat_c.out, s.str());
    } else if (*eval_cmd) {
        const auto config = load_config(eval_c.config);
        const auto frames = load_input(eval_c, config);
        const auto& frame = pick(frames, eval_c.variable);
        const auto findings = rules::run_rules(frame, sensor_for(config, frame.name), config.detector);

        std::istringstream in(io::read_file(eval_flags));
        std::size_t line = 0;
        const auto header = csv::read_record(in, line);
        if (!header || header->size() < 4) throw Error(ErrorCode::Parse, "flag CSV: bad header");
        std::map<std::string, evaluate::FlagSet> by_method;
        while (const auto rec = csv::read_record(in, line)) {
            if (rec->size() < 4) continue;
            if ((*rec)[1] != frame.name) continue;
            by_method[(*rec)[2]][parse_timestamp((*rec)[0])] = (*rec)[3] == "1";
        }
        if (by_method.empty()) {
            throw Error(ErrorCode::EmptyEvaluation, fmt::format("no flags for '{}' in {}", frame.name, eval_flags));
        }
        std::vector<evaluate::EvalReport> reports;
        for (auto& [method, flags] : by_method) {
            std::set<Timestamp> class2;
            std::uint64_t hits = 0;
            std::uint64_t missed = 0;
            std::set<Timestamp> found;
            for (const auto& f : findings) found.insert(f.timestamp);
            LabelMap labels;
            for (const auto& [ts, label] : frame.labels) {
                if (!flags.contains(ts)) continue;
                labels.emplace(ts, label);
                if (label.anomaly_class() == 2) {
                    class2.insert(ts);
                    (found.contains(ts) ? hits : missed) += 1;
                }
            }
            evaluate::exclude(flags, labels, class2);
            evaluate::EvalReport r;
            r.variable = frame.name;
            r.method = method;
            r.matrix = evaluate::build_confusion(flags, labels);
            r.per_type = evaluate::per_type_report(flags, labels);
            r.matrix = evaluate::fold_class2(r.matrix, hits, missed);
            r.folded = hits;
            r.metrics = evaluate::metrics(r.matrix);
            reports.push_back(std::move(r));
        }
        std::ostringstream s;
        if (eval_csv) {
            evaluate::write_report_csv(s, reports);
        } else {
            evaluate::write_report_table(s, reports);
        }
        emit(eval_c.out, s.str());
    } else if (*inj_cmd) {
        auto plan = synth::plan_from_json(io::read_file(inj_plan));
        if (inj_seed) plan.seed = *inj_seed;
        const auto frame = synth::realize(plan);
        std::ostringstream s;
        io::write_frames_csv(s, {&frame});
        emit(inj_out, s.str());
    } else if (*plot_cmd) {
        const auto config = load_config(plot_c.config);
        const auto frames = load_input(plot_c, config);
        const auto& frame = pick(frames, plot_c.variable);
        const auto model = load_model(plot_model);
        const auto findings = rules::run_rules(frame, sensor_for(config, frame.name), config.detector);
        const auto trace = detect::run_detection(prepare::sanitize_frame(frame), model,
                                                 {detect::parse_mode(plot_mode), config.detector.alpha}, findings);
        emit(plot_c.out, plot::trace_svg(trace, frame.labels, {1200, 400, frame.name}));
    } else if (*pipe_cmd) {
        const auto config = load_config(pipe_c.config);
        std::map<std::string, SeriesFrame> frames;
        if (!pipe_plan.empty()) {
            auto plan = synth::plan_from_json(io::read_file(pipe_plan));
            if (pipe_seed) plan.seed = *pipe_seed;
            auto frame = synth::realize(plan);
            frames.emplace(frame.name, std::move(frame));
        } else {
            frames = load_input(pipe_c, config);
        }
        if (pipe_c.out.empty()) throw Error(ErrorCode::InvalidConfig, "--out directory is required");
        const auto result = pipeline::run_pipeline(config, frames);
        pipeline::write_artifacts(result, pipe_c.out);
        std::cout << result.artifacts.at("report.txt");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const wqad::Error& e) {
        std::cerr << "wqad: " << wqad::to_string(e.code()) << ": " << e.what() << '\n';
        return static_cast<int>(e.category());
    } catch (const std::exception& e) {
        std::cerr << "wqad: " << e.what() << '\n';
        return static_cast<int>(wqad::ErrorCategory::Data);
    }
}
