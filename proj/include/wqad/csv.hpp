#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wqad::csv {

/// Reads one record (RFC 4180 quoting; quoted fields may span lines).
/// Returns nullopt at end of input. `line` is advanced by the physical lines consumed.
[[nodiscard]] std::optional<std::vector<std::string>> read_record(std::istream& in, std::size_t& line);

/// Quotes a field when it contains a comma, quote or newline.
[[nodiscard]] std::string escape(std::string_view field);

[[nodiscard]] std::string join(const std::vector<std::string>& fields);

}  // namespace wqad::csv
