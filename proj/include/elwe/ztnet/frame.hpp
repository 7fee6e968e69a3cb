// Wire frames: u32 little-endian length prefix + UTF-8 JSON body.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "elwe/errors.hpp"
#include "elwe/ztnet/mac.hpp"
#include "elwe/ztnet/policy.hpp"

namespace elwe::ztnet {

inline constexpr std::size_t kMaxFrameBytes = 16 * 1024 * 1024;

inline nlohmann::json request_to_json(const Request& r) {
    return {{"client_id", r.client_id}, {"source_ip", r.source_ip}, {"token_id", r.token_id},
            {"proof", hex_encode(r.proof)}, {"ts", r.ts},           {"model", r.model},
            {"payload", hex_encode(r.payload)}};
}

inline Request request_from_json(const nlohmann::json& j) {
    Request r;
    try {
        r.client_id = j.at("client_id").get<std::string>();
        r.source_ip = j.at("source_ip").get<std::string>();
        r.token_id = j.at("token_id").get<std::string>();
        r.proof = hex_decode(j.at("proof").get<std::string>());
        r.ts = j.at("ts").get<std::int64_t>();
        r.model = j.at("model").get<std::string>();
        r.payload = hex_decode(j.at("payload").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("request frame parse failed: ") + e.what());
    }
    return r;
}

inline nlohmann::json response_to_json(const Response& r) {
    return {{"status", r.status}, {"reason", reason_name(r.reason)}, {"body", hex_encode(r.body)},
            {"epoch", r.epoch}};
}

inline Response response_from_json(const nlohmann::json& j) {
    Response r;
    try {
        r.status = j.at("status").get<std::string>();
        r.reason = parse_reason(j.at("reason").get<std::string>());
        r.body = hex_decode(j.at("body").get<std::string>());
        r.epoch = j.at("epoch").get<std::uint32_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("response frame parse failed: ") + e.what());
    }
    return r;
}

inline std::vector<std::uint8_t> frame_bytes(const nlohmann::json& j) {
    std::string body = j.dump();
    if (body.size() > kMaxFrameBytes) throw DomainError("frame exceeds the 16 MiB limit");
    std::vector<std::uint8_t> out;
    out.reserve(4 + body.size());
    std::uint32_t len = static_cast<std::uint32_t>(body.size());
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((len >> (8 * i)) & 0xff));
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

// Parses one frame from a byte buffer; advances offset past the frame.
inline std::optional<nlohmann::json> frame_parse(const std::vector<std::uint8_t>& buf, std::size_t& offset) {
    if (buf.size() - offset < 4) return std::nullopt;
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(buf[offset + i]) << (8 * i);
    if (len > kMaxFrameBytes) throw DomainError("frame exceeds the 16 MiB limit");
    if (buf.size() - offset - 4 < len) return std::nullopt;
    std::string body(buf.begin() + static_cast<std::ptrdiff_t>(offset + 4),
                     buf.begin() + static_cast<std::ptrdiff_t>(offset + 4 + len));
    offset += 4 + len;
    try {
        return nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("frame body is not valid JSON: ") + e.what());
    }
}

}  // namespace elwe::ztnet
