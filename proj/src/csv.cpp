#include "wqad/csv.hpp"

#include <fmt/format.h>

#include "wqad/error.hpp"

namespace wqad::csv {

std::optional<std::vector<std::string>> read_record(std::istream& in, std::size_t& line) {
    std::string text;
    if (!std::getline(in, text)) return std::nullopt;
    ++line;
    const std::size_t first_line = line;

    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    while (true) {
        if (i == text.size()) {
            if (!quoted) break;
            std::string more;
            if (!std::getline(in, more)) {
                throw Error(ErrorCode::Parse, fmt::format("line {}: unterminated quoted field", first_line));
            }
            ++line;
            field += '\n';
            text = std::move(more);
            i = 0;
            continue;
        }
        const char c = text[i++];
        if (quoted) {
            if (c == '"') {
                if (i < text.size() && text[i] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\r' && i == text.size()) {
            // tolerate CRLF
        } else {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string join(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out += ',';
        out += escape(fields[i]);
    }
    return out;
}

}  // namespace wqad::csv
