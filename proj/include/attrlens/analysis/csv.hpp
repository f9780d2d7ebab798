#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "attrlens/core/errors.hpp"

namespace attrlens {

/// Shortest representation that round-trips the exact double value.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string csv_escape(std::string_view field) {
    bool needs_quotes = field.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

class CsvWriter {
public:
    CsvWriter& row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) buf_.push_back(',');
            buf_ += csv_escape(cells[i]);
        }
        buf_.push_back('\n');
        return *this;
    }

    const std::string& str() const { return buf_; }

private:
    std::string buf_;
};

/// Minimal RFC-4180-style reader: quoted fields, doubled quotes, CRLF.
inline std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool row_started = false;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
        row_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"': in_quotes = true; row_started = true; break;
            case ',': end_field(); row_started = true; break;
            case '\r': break;
            case '\n':
                if (row_started || !field.empty() || !row.empty()) end_row();
                break;
            default: field.push_back(c); row_started = true; break;
        }
    }
    if (in_quotes) throw IoError("CSV ends inside a quoted field");
    if (row_started || !field.empty() || !row.empty()) end_row();
    return rows;
}

}  // namespace attrlens
