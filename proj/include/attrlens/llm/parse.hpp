#pragma once

#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "attrlens/core/errors.hpp"
#include "attrlens/core/normalize.hpp"

namespace attrlens {

enum class YesNo { Yes, No, Ambiguous };

namespace detail {

// Parses a Python-style list of quoted strings starting at text[open] == '['.
// Returns the raw (unnormalized) items, or nullopt if the bracket does not
// open such a list. Tolerates whitespace, newlines and a trailing comma.
inline std::optional<std::vector<std::string>> parse_quoted_list(std::string_view text, std::size_t open) {
    std::vector<std::string> items;
    std::size_t i = open + 1;
    auto skip_ws = [&] {
        while (i < text.size() && is_space(text[i])) ++i;
    };
    bool expect_item = true;
    while (true) {
        skip_ws();
        if (i >= text.size()) return std::nullopt;
        if (text[i] == ']') return items;
        if (!expect_item) return std::nullopt;
        char quote = text[i];
        if (quote != '"' && quote != '\'') return std::nullopt;
        ++i;
        std::string item;
        while (true) {
            if (i >= text.size()) return std::nullopt;
            char c = text[i];
            if (c == '\\' && i + 1 < text.size()) {
                char next = text[i + 1];
                if (next == '\\' || next == '\'' || next == '"') {
                    item.push_back(next);
                    i += 2;
                    continue;
                }
            }
            if (c == quote) {
                ++i;
                break;
            }
            item.push_back(c);
            ++i;
        }
        items.push_back(std::move(item));
        skip_ws();
        if (i >= text.size()) return std::nullopt;
        if (text[i] == ',') {
            ++i;
            expect_item = true;  // trailing comma before ']' is tolerated above
            continue;
        }
        if (text[i] == ']') return items;
        return std::nullopt;
    }
}

}  // namespace detail

/// Extracts the first balanced bracketed list of quoted strings from a chat
/// response (tolerating code fences, leading prose, single or double quotes)
/// and returns the normalized items in order, with within-list duplicates
/// removed keeping the first occurrence.
inline std::vector<std::string> parse_list_response(std::string_view text) {
    for (std::size_t pos = text.find('['); pos != std::string_view::npos; pos = text.find('[', pos + 1)) {
        auto raw = detail::parse_quoted_list(text, pos);
        if (!raw || raw->empty()) continue;
        std::vector<std::string> out;
        std::set<std::string> seen;
        for (const auto& item : *raw) {
            std::string norm = normalize_name(item);
            if (norm.empty()) continue;
            if (seen.insert(norm).second) out.push_back(std::move(norm));
        }
        if (!out.empty()) return out;
    }
    throw ParseError("no bracketed list of quoted strings found in response");
}

/// Classifies a yes/no answer by its first alphabetic token.
inline YesNo parse_yes_no(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size() && !std::isalpha(static_cast<unsigned char>(text[i]))) ++i;
    std::string token;
    while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i])))
        token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[i++]))));
    if (token == "yes") return YesNo::Yes;
    if (token == "no") return YesNo::No;
    return YesNo::Ambiguous;
}

}  // namespace attrlens
