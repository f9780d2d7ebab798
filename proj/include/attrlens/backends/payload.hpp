#pragma once

#include <openssl/evp.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "attrlens/backends/backend.hpp"
#include "attrlens/core/json_io.hpp"
#include "attrlens/llm/prompts.hpp"

namespace attrlens {

// Request payloads shared by the HTTP clients, the scripted mocks and the
// response cache, so all three agree on what identifies a request.

/// With `wire` the payload matches the HTTP body exactly; otherwise the
/// client-side run_tag is included so repeated issues of one prompt stay
/// distinct in cache and fixture keys.
inline json chat_payload(const LlmRequest& r, bool wire) {
    json j{{"model", r.model_id}, {"prompt", r.prompt}, {"temperature", r.temperature}};
    if (!wire && !r.run_tag.empty()) j["run_tag"] = r.run_tag;
    return j;
}

inline std::string base64_encode(std::string_view data) {
    static constexpr char table[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 3 <= data.size()) {
        std::uint32_t v = (static_cast<std::uint8_t>(data[i]) << 16) |
                          (static_cast<std::uint8_t>(data[i + 1]) << 8) |
                          static_cast<std::uint8_t>(data[i + 2]);
        out.push_back(table[(v >> 18) & 63]);
        out.push_back(table[(v >> 12) & 63]);
        out.push_back(table[(v >> 6) & 63]);
        out.push_back(table[v & 63]);
        i += 3;
    }
    if (i + 1 == data.size()) {
        std::uint32_t v = static_cast<std::uint8_t>(data[i]) << 16;
        out.push_back(table[(v >> 18) & 63]);
        out.push_back(table[(v >> 12) & 63]);
        out += "==";
    } else if (i + 2 == data.size()) {
        std::uint32_t v = (static_cast<std::uint8_t>(data[i]) << 16) |
                          (static_cast<std::uint8_t>(data[i + 1]) << 8);
        out.push_back(table[(v >> 18) & 63]);
        out.push_back(table[(v >> 12) & 63]);
        out.push_back(table[(v >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

inline json itm_payload(std::string_view model, const std::string& image_bytes, const std::string& caption) {
    return json{{"model", std::string(model)}, {"image_b64", base64_encode(image_bytes)}, {"caption", caption}};
}

inline json detect_payload(std::string_view model, const std::string& image_bytes,
                           const std::vector<std::string>& queries) {
    return json{{"model", std::string(model)}, {"image_b64", base64_encode(image_bytes)}, {"queries", queries}};
}

inline json embed_payload(std::string_view model, const std::string& text) {
    return json{{"model", std::string(model)}, {"text", text}};
}

inline std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 15]);
    }
    return out;
}

/// Content-addressed key over (operation name, full request payload). The
/// payload carries the model id, so distinct models never share keys.
inline std::string request_key(std::string_view op, const json& payload) {
    return sha256_hex(std::string(op) + "\n" + payload.dump());
}

}  // namespace attrlens
