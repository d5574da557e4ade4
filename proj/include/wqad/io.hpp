#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wqad/core.hpp"
#include "wqad/detect.hpp"
#include "wqad/features.hpp"
#include "wqad/rules.hpp"

namespace wqad::io {

struct ColumnMapping {
    std::string timestamp_column = "timestamp";
    /// variable -> column name
    std::map<std::string, std::string> value_columns;
    /// Ground-truth letters applying to every variable of the row.
    std::optional<std::string> label_column;
    /// Per-variable label columns; take precedence over label_column.
    std::map<std::string, std::string> label_columns;
    std::optional<std::string> quality_column;
    std::string timestamp_format = "%Y-%m-%dT%H:%M:%S";
};

/// One frame per mapped variable. Empty value cells are skipped for that variable only.
/// With no value columns mapped, every column other than timestamp, label and quality is used.
/// Errors carry the line number of the offending record.
[[nodiscard]] std::map<std::string, SeriesFrame> read_frames(std::istream& in, const ColumnMapping& mapping,
                                                             const std::string& source = "<input>");
[[nodiscard]] std::map<std::string, SeriesFrame> load_csv(const std::filesystem::path& path,
                                                          const ColumnMapping& mapping);

/// timestamp,<variable>...,label: frames are outer-joined on timestamp; the label column holds
/// the first frame's label (use one frame per file for per-variable labels).
void write_frames_csv(std::ostream& out, const std::vector<const SeriesFrame*>& frames);

struct FlagRow {
    Timestamp timestamp{};
    std::string variable;
    std::string method;
    bool flagged = false;
    std::optional<TypeCode> type_code;
    std::string source;
};

/// timestamp,variable,method,flagged,type_code,source
void write_flag_csv(std::ostream& out, const std::vector<FlagRow>& rows);

[[nodiscard]] std::vector<FlagRow> flag_rows(const detect::DetectionTrace& trace, const std::string& method);
[[nodiscard]] std::vector<FlagRow> flag_rows(const std::vector<rules::RuleFinding>& findings,
                                             const SeriesFrame& frame);
[[nodiscard]] std::vector<FlagRow> flag_rows(const features::FeatureMatrix& matrix,
                                             const features::OutlierScoreSet& scores,
                                             const std::string& variable);

/// timestamp,score,flagged,method,transform
void write_score_csv(std::ostream& out, const features::FeatureMatrix& matrix,
                     const features::OutlierScoreSet& scores, const std::string& transform);

/// Writes `content` to `path`, creating parent directories. Throws Error(Io).
void write_file(const std::filesystem::path& path, const std::string& content);
[[nodiscard]] std::string read_file(const std::filesystem::path& path);

}  // namespace wqad::io
