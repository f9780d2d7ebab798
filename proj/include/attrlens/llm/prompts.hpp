#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "attrlens/core/errors.hpp"
#include "attrlens/core/types.hpp"

namespace attrlens {

/// One chat-completion request. `run_tag` is a client-side discriminator
/// for repeated issues of the same prompt; it is folded into cache and
/// fixture keys but never sent on the wire.
struct LlmRequest {
    std::string prompt;
    double temperature = 0.3;
    std::string model_id;
    std::string run_tag;
};

/// Category-discovery prompt.
inline std::string build_q1(const DomainSpec& domain) {
    DomainSpec d = domain;
    validate_domain(d);
    return "What are " + std::to_string(d.n_categories) +
           " attribute categories that can be used to visually distinguish images "
           "described by the caption \"" +
           d.caption + "\"? Output the categories in one Python list";
}

/// Per-category attribute prompt.
inline std::string build_q2(const DomainSpec& domain, std::string_view category) {
    DomainSpec d = domain;
    validate_domain(d);
    std::string cat = trim(category);
    if (cat.empty()) throw EmptyInput("category must be non-empty");
    return "What are " + std::to_string(d.m_attributes) + " different examples of the category " +
           cat + " that can be used to distinguish images described by the caption \"" +
           d.caption + "\"? Output the examples in one Python list";
}

/// Object-vs-image decision prompt over a category's attributes.
inline std::string build_q3(const std::vector<std::string>& attributes) {
    if (attributes.empty()) throw EmptyInput("attribute list must be non-empty");
    std::string joined;
    for (std::size_t i = 0; i < attributes.size(); ++i) {
        if (i) joined += ", ";
        joined += attributes[i];
    }
    return "Are " + joined + " examples of objects or items? Answer with a yes or no. Explain your answer.";
}

}  // namespace attrlens
