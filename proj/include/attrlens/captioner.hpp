#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "attrlens/core/errors.hpp"
#include "attrlens/core/normalize.hpp"
#include "attrlens/core/types.hpp"

namespace attrlens {

struct RenderedCaption {
    std::string text;
    std::string category_name;
    std::string attribute;
};

namespace detail {

inline std::vector<std::string> split_words(std::string_view s) {
    std::vector<std::string> words;
    std::string cur;
    for (char c : s) {
        if (is_space(c)) {
            if (!cur.empty()) words.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) words.push_back(std::move(cur));
    return words;
}

inline bool same_word_loose(std::string_view a, std::string_view b) {
    if (a == b) return true;
    // Treat singular/plural pairs like "eye"/"eyes" as the same head word.
    if (a.size() == b.size() + 1 && a.back() == 's' && a.substr(0, b.size()) == b) return true;
    if (b.size() == a.size() + 1 && b.back() == 's' && b.substr(0, a.size()) == a) return true;
    return false;
}

/// The "has" template normally appends the category name, but when the
/// attribute already ends with the category's head word ("yellow eyes"
/// under "eye color") the suffix would read twice, so it is dropped.
inline bool suppress_category_suffix(std::string_view attribute, std::string_view category) {
    auto attr_words = split_words(attribute);
    auto cat_words = split_words(category);
    if (attr_words.empty() || cat_words.empty()) return false;
    return same_word_loose(attr_words.back(), cat_words.front());
}

}  // namespace detail

/// Renders a noun-attribute caption for one attribute. Identity returns the
/// attribute string verbatim.
inline RenderedCaption render_caption(CaptionTemplate tmpl, std::string_view noun,
                                      std::string_view attribute, std::string_view category_name) {
    std::string n = trim(noun);
    std::string attr = trim(attribute);
    if (attr.empty()) throw EmptyInput("attribute must be non-empty");

    RenderedCaption out;
    out.category_name = std::string(category_name);
    out.attribute = std::string(attribute);

    if (tmpl == CaptionTemplate::Identity) {
        out.text = std::string(attribute);
        return out;
    }
    if (n.empty()) throw EmptyInput("noun must be non-empty");

    switch (tmpl) {
        case CaptionTemplate::Is:
            out.text = "a " + attr + " " + n;
            break;
        case CaptionTemplate::Has: {
            out.text = "a " + n + " has " + attr;
            std::string cat = trim(category_name);
            if (!cat.empty() && !detail::suppress_category_suffix(attr, cat)) out.text += " " + cat;
            break;
        }
        case CaptionTemplate::With:
            out.text = "a " + n + " with " + attr;
            break;
        case CaptionTemplate::In:
            out.text = "a " + n + " in " + attr;
            break;
        case CaptionTemplate::From:
            out.text = "a " + n + " from " + attr;
            break;
        case CaptionTemplate::Identity:
            break;  // handled above
    }
    return out;
}

/// The generic reference caption scored alongside the attribute captions;
/// identical to the phrase used in the category-discovery prompt.
inline std::string base_caption(const DomainSpec& domain) {
    std::string caption = trim(domain.caption);
    if (caption.empty()) throw EmptyInput("domain caption must be non-empty");
    return caption;
}

}  // namespace attrlens
