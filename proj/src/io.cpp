#include "wqad/io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "wqad/csv.hpp"
#include "wqad/error.hpp"

namespace wqad::io {

namespace {

std::size_t column_index(const std::vector<std::string>& header, const std::string& name,
                         const std::string& source) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw Error(ErrorCode::InvalidConfig, fmt::format("{}: column '{}' not found in header", source, name));
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::map<std::string, SeriesFrame> read_frames(std::istream& in, const ColumnMapping& mapping,
                                               const std::string& source) {
    std::size_t line = 0;
    const auto header = csv::read_record(in, line);
    if (!header) throw Error(ErrorCode::Parse, fmt::format("{}: empty file", source));
    std::vector<std::string> names;
    for (const auto& h : *header) names.push_back(trim(h));
    if (mapping.value_columns.empty()) {
        // No explicit mapping: every column except timestamp, label and quality is a variable.
        ColumnMapping inferred = mapping;
        const std::string label = mapping.label_column.value_or("label");
        for (const auto& n : names) {
            if (n == mapping.timestamp_column || n == label || (mapping.quality_column && n == *mapping.quality_column)) {
                continue;
            }
            inferred.value_columns[n] = n;
        }
        if (std::find(names.begin(), names.end(), label) != names.end()) inferred.label_column = label;
        if (inferred.value_columns.empty()) {
            throw Error(ErrorCode::InvalidConfig, fmt::format("{}: no value columns in header", source));
        }
        std::ostringstream rest;
        rest << csv::join(*header) << '\n' << in.rdbuf();
        std::istringstream again(rest.str());
        return read_frames(again, inferred, source);
    }

    const std::size_t ts_col = column_index(names, mapping.timestamp_column, source);
    std::map<std::string, std::size_t> value_col;
    std::map<std::string, std::optional<std::size_t>> label_col;
    const std::optional<std::size_t> global_label =
        mapping.label_column ? std::optional(column_index(names, *mapping.label_column, source)) : std::nullopt;
    const std::optional<std::size_t> quality_col =
        mapping.quality_column ? std::optional(column_index(names, *mapping.quality_column, source)) : std::nullopt;
    for (const auto& [var, col] : mapping.value_columns) {
        value_col[var] = column_index(names, col, source);
        const auto it = mapping.label_columns.find(var);
        label_col[var] = it != mapping.label_columns.end() ? std::optional(column_index(names, it->second, source))
                                                           : global_label;
    }

    std::map<std::string, SeriesFrame> frames;
    for (const auto& [var, col] : value_col) frames[var].name = var;

    while (true) {
        const std::size_t record_line = line + 1;
        const auto rec = csv::read_record(in, line);
        if (!rec) break;
        if (rec->size() == 1 && trim((*rec)[0]).empty()) continue;
        if (rec->size() != names.size()) {
            throw Error(ErrorCode::Parse, fmt::format("{}:{}: expected {} fields, found {}", source, record_line,
                                                      names.size(), rec->size()));
        }
        Timestamp ts;
        try {
            ts = parse_timestamp(trim((*rec)[ts_col]), mapping.timestamp_format);
        } catch (const Error& e) {
            throw Error(ErrorCode::Parse, fmt::format("{}:{}: {}", source, record_line, e.what()));
        }
        for (const auto& [var, col] : value_col) {
            const std::string cell = trim((*rec)[col]);
            if (cell.empty() || cell == "NA" || cell == "NaN") continue;
            double value = 0.0;
            try {
                std::size_t used = 0;
                value = std::stod(cell, &used);
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw Error(ErrorCode::Parse,
                            fmt::format("{}:{}: '{}' is not a number in column '{}'", source, record_line, cell,
                                        names[col]));
            }
            Observation obs{ts, value, std::nullopt};
            if (quality_col && !trim((*rec)[*quality_col]).empty()) obs.quality = trim((*rec)[*quality_col]);
            auto& frame = frames[var];
            frame.observations.push_back(std::move(obs));
            if (const auto lc = label_col[var]) {
                const std::string letter = trim((*rec)[*lc]);
                if (!letter.empty()) {
                    try {
                        frame.labels[ts] = {parse_type_code(letter), Provenance::GroundTruth};
                    } catch (const Error& e) {
                        throw Error(ErrorCode::InvalidType, fmt::format("{}:{}: {}", source, record_line, e.what()));
                    }
                }
            }
        }
    }
    for (const auto& [var, frame] : frames) {
        if (frame.empty()) throw Error(ErrorCode::InsufficientData, fmt::format("{}: no values for '{}'", source, var));
        require_valid(frame);
    }
    return frames;
}

std::map<std::string, SeriesFrame> load_csv(const std::filesystem::path& path, const ColumnMapping& mapping) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, fmt::format("cannot read '{}'", path.string()));
    return read_frames(in, mapping, path.string());
}

void write_frames_csv(std::ostream& out, const std::vector<const SeriesFrame*>& frames) {
    std::set<Timestamp> all;
    std::vector<std::map<Timestamp, double>> values(frames.size());
    std::vector<std::string> header{"timestamp"};
    for (std::size_t f = 0; f < frames.size(); ++f) {
        header.push_back(frames[f]->name);
        for (const auto& o : frames[f]->observations) {
            all.insert(o.timestamp);
            values[f][o.timestamp] = o.value;
        }
    }
    header.push_back("label");
    out << csv::join(header) << '\n';
    for (const auto& ts : all) {
        std::vector<std::string> row{format_timestamp(ts)};
        for (std::size_t f = 0; f < frames.size(); ++f) {
            const auto it = values[f].find(ts);
            row.push_back(it != values[f].end() ? fmt::format("{}", it->second) : std::string());
        }
        std::string label;
        if (!frames.empty()) {
            const auto it = frames[0]->labels.find(ts);
            if (it != frames[0]->labels.end()) label = std::string(1, to_char(it->second.type_code));
        }
        row.push_back(label);
        out << csv::join(row) << '\n';
    }
}

void write_flag_csv(std::ostream& out, const std::vector<FlagRow>& rows) {
    out << "timestamp,variable,method,flagged,type_code,source\n";
    for (const auto& r : rows) {
        out << csv::join({format_timestamp(r.timestamp), r.variable, r.method, r.flagged ? "1" : "0",
                          r.type_code ? std::string(1, to_char(*r.type_code)) : std::string(), r.source})
            << '\n';
    }
}

std::vector<FlagRow> flag_rows(const detect::DetectionTrace& trace, const std::string& method) {
    std::vector<FlagRow> out;
    auto add = [&](const detect::TraceRecord& r) {
        out.push_back({r.timestamp, trace.variable, method, r.flagged, r.rule_type,
                       std::string(detect::to_string(r.source))});
    };
    for (const auto& r : trace.warmup) add(r);
    for (const auto& r : trace.records) add(r);
    return out;
}

std::vector<FlagRow> flag_rows(const std::vector<rules::RuleFinding>& findings, const SeriesFrame& frame) {
    std::map<Timestamp, TypeCode> at;
    for (const auto& f : findings) at.emplace(f.timestamp, f.type_code);
    std::vector<FlagRow> out;
    for (const auto& o : frame.observations) {
        const auto it = at.find(o.timestamp);
        const bool hit = it != at.end();
        out.push_back({o.timestamp, frame.name, "rules", hit, hit ? std::optional(it->second) : std::nullopt,
                       hit ? "rule" : "none"});
    }
    return out;
}

std::vector<FlagRow> flag_rows(const features::FeatureMatrix& matrix, const features::OutlierScoreSet& scores,
                               const std::string& variable) {
    std::vector<FlagRow> out;
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        out.push_back({matrix.timestamps[i], variable, std::string(features::to_string(scores.method)),
                       static_cast<bool>(scores.flagged[i]), std::nullopt,
                       scores.flagged[i] ? "feature" : "none"});
    }
    return out;
}

void write_score_csv(std::ostream& out, const features::FeatureMatrix& matrix,
                     const features::OutlierScoreSet& scores, const std::string& transform) {
    out << "timestamp,score,flagged,method,transform\n";
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        out << format_timestamp(matrix.timestamps[i]) << ',' << fmt::format("{}", scores.scores[i]) << ','
            << (scores.flagged[i] ? 1 : 0) << ',' << features::to_string(scores.method) << ','
            << csv::escape(transform) << '\n';
    }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", path.string()));
    out << content;
    if (!out) throw Error(ErrorCode::Io, fmt::format("write failed for '{}'", path.string()));
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, fmt::format("cannot read '{}'", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace wqad::io
