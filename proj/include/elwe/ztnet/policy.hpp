// Access policy model: tokens, allowlists, requests, and decisions.
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "elwe/errors.hpp"
#include "elwe/ztnet/cidr.hpp"
#include "elwe/ztnet/mac.hpp"

namespace elwe::ztnet {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d4a4ecbd1afcbbull;
    return z ^ (z >> 31);
}
}  // namespace detail

struct Token {
    std::string id;
    Bytes secret;                       // 32 bytes
    std::set<std::string> model_scope;  // non-empty
    std::int64_t issued_at = 0;         // ms since epoch
    std::int64_t expires_at = 0;        // ms since epoch, > issued_at
    bool revoked = false;
};

struct RotationPolicy {
    std::int64_t hours = 24;
    std::uint64_t requests = 1000;
};

struct Policy {
    std::vector<std::string> ip_whitelist;            // CIDR ranges
    std::map<std::string, Token> tokens;              // keyed by id
    std::map<std::string, std::string> model_acl;     // model id -> required scope
    std::int64_t clock_skew_ms = 0;
    RotationPolicy rotation;

    void validate() const {
        CidrList check(ip_whitelist);  // throws on malformed entries
        for (const auto& [id, tok] : tokens) {
            if (id != tok.id) throw ConfigError("token registry key mismatch: " + id);
            if (tok.secret.size() != 32) throw ConfigError("token secret must be 32 bytes: " + id);
            if (tok.model_scope.empty()) throw ConfigError("token scope must be non-empty: " + id);
            if (tok.expires_at <= tok.issued_at) throw ConfigError("token expires before issue: " + id);
        }
        if (clock_skew_ms < 0) throw ConfigError("clock skew must be non-negative");
        if (rotation.hours <= 0 || rotation.requests == 0) throw ConfigError("rotation thresholds must be positive");
    }
};

struct Request {
    std::string client_id;
    std::string source_ip;   // dotted IPv4
    std::string token_id;
    Bytes proof;             // 32-byte MAC
    std::int64_t ts = 0;     // ms since epoch
    std::string model;
    Bytes payload;           // serialized ciphertext bytes
};

enum class Verdict { accept, reject };

enum class Reason { ok, invalid_token, ip_not_whitelisted, expired_token, scope_violation, malformed };

inline const char* reason_name(Reason r) {
    switch (r) {
        case Reason::ok: return "ok";
        case Reason::invalid_token: return "invalid_token";
        case Reason::ip_not_whitelisted: return "ip_not_whitelisted";
        case Reason::expired_token: return "expired_token";
        case Reason::scope_violation: return "scope_violation";
        case Reason::malformed: return "malformed";
    }
    return "malformed";
}

inline Reason parse_reason(const std::string& name) {
    for (Reason r : {Reason::ok, Reason::invalid_token, Reason::ip_not_whitelisted, Reason::expired_token,
                     Reason::scope_violation, Reason::malformed}) {
        if (name == reason_name(r)) return r;
    }
    throw ConfigError("unknown decision reason: " + name);
}

struct Decision {
    Verdict verdict = Verdict::reject;
    Reason reason = Reason::malformed;
    std::int64_t latency_us = 0;
    std::uint64_t bytes_processed = 0;

    bool accepted() const { return verdict == Verdict::accept; }
};

// Wire-level reply: status "ok" or "rejected", body carries the model output.
struct Response {
    std::string status;
    Reason reason = Reason::ok;
    Bytes body;
    std::uint32_t epoch = 0;

    bool ok() const { return status == "ok"; }
};

inline Response make_response(const Decision& d, Bytes body, std::uint32_t epoch) {
    Response resp;
    resp.status = d.accepted() ? "ok" : "rejected";
    resp.reason = d.reason;
    resp.body = std::move(body);
    resp.epoch = epoch;
    return resp;
}

inline std::uint64_t request_size(const Request& r) {
    return r.client_id.size() + r.source_ip.size() + r.token_id.size() + r.proof.size() + 8 +
           r.model.size() + r.payload.size();
}

// Proof input: client_id | 0x00 | ts (8 bytes LE) | model | 0x00 | SHA-256(payload).
inline Bytes proof_message(const Request& r) {
    Bytes msg;
    msg.insert(msg.end(), r.client_id.begin(), r.client_id.end());
    msg.push_back(0x00);
    std::uint64_t ts = static_cast<std::uint64_t>(r.ts);
    for (int i = 0; i < 8; ++i) msg.push_back(static_cast<std::uint8_t>((ts >> (8 * i)) & 0xff));
    msg.insert(msg.end(), r.model.begin(), r.model.end());
    msg.push_back(0x00);
    Digest pd = sha256(r.payload);
    msg.insert(msg.end(), pd.begin(), pd.end());
    return msg;
}

inline Bytes compute_proof(const Bytes& secret, const Request& r) {
    Digest mac = hmac_sha256(secret, proof_message(r));
    return Bytes(mac.begin(), mac.end());
}

// Cache key: digest over every field including the proof.
inline std::string request_digest(const Request& r) {
    Bytes msg = proof_message(r);
    msg.insert(msg.end(), r.source_ip.begin(), r.source_ip.end());
    msg.push_back(0x00);
    msg.insert(msg.end(), r.token_id.begin(), r.token_id.end());
    msg.push_back(0x00);
    msg.insert(msg.end(), r.proof.begin(), r.proof.end());
    return hex_encode(sha256(msg));
}

inline nlohmann::json policy_to_json(const Policy& p) {
    nlohmann::json tokens = nlohmann::json::array();
    for (const auto& [id, tok] : p.tokens) {
        tokens.push_back({{"id", tok.id},
                          {"secret_hex", hex_encode(tok.secret)},
                          {"scope", std::vector<std::string>(tok.model_scope.begin(), tok.model_scope.end())},
                          {"issued_at", tok.issued_at},
                          {"expires_at", tok.expires_at},
                          {"revoked", tok.revoked}});
    }
    return {{"whitelist", p.ip_whitelist},
            {"tokens", tokens},
            {"models", p.model_acl},
            {"clock_skew_ms", p.clock_skew_ms},
            {"rotation", {{"hours", p.rotation.hours}, {"requests", p.rotation.requests}}}};
}

inline Policy policy_from_json(const nlohmann::json& j) {
    Policy p;
    try {
        p.ip_whitelist = j.at("whitelist").get<std::vector<std::string>>();
        for (const auto& t : j.at("tokens")) {
            Token tok;
            tok.id = t.at("id").get<std::string>();
            tok.secret = hex_decode(t.at("secret_hex").get<std::string>());
            auto scope = t.at("scope").get<std::vector<std::string>>();
            tok.model_scope = std::set<std::string>(scope.begin(), scope.end());
            tok.issued_at = t.at("issued_at").get<std::int64_t>();
            tok.expires_at = t.at("expires_at").get<std::int64_t>();
            tok.revoked = t.value("revoked", false);
            p.tokens[tok.id] = tok;
        }
        p.model_acl = j.at("models").get<std::map<std::string, std::string>>();
        p.clock_skew_ms = j.value("clock_skew_ms", std::int64_t{0});
        if (j.contains("rotation")) {
            p.rotation.hours = j["rotation"].value("hours", std::int64_t{24});
            p.rotation.requests = j["rotation"].value("requests", std::uint64_t{1000});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("policy parse failed: ") + e.what());
    }
    p.validate();
    return p;
}

}  // namespace elwe::ztnet
