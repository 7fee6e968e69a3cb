// Attack-traffic synthesis: each request passes every check before its target.
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "elwe/errors.hpp"
#include "elwe/serial.hpp"
#include "elwe/ztnet/broker.hpp"
#include "elwe/ztnet/metrics.hpp"
#include "elwe/ztnet/policy.hpp"

namespace elwe::ztnet {

struct AttackMix {
    std::size_t invalid_token = 0;
    std::size_t ip_not_whitelisted = 0;
    std::size_t expired_token = 0;

    std::size_t total() const { return invalid_token + ip_not_whitelisted + expired_token; }
};

struct AttackOutcome {
    MetricsLedger ledger;
    std::size_t requests = 0;
    std::size_t ground_truth_mismatches = 0;  // observed reason differed from intent
};

namespace detail {

inline Bytes deterministic_secret(std::uint64_t tag) {
    Bytes secret(32);
    std::uint64_t state = tag;
    for (std::size_t i = 0; i < 4; ++i) {
        std::uint64_t word = splitmix64(state);
        for (int b = 0; b < 8; ++b) secret[i * 8 + b] = static_cast<std::uint8_t>((word >> (8 * b)) & 0xff);
    }
    return secret;
}

inline std::string ip_to_string(std::uint32_t ip) {
    return std::to_string((ip >> 24) & 0xff) + "." + std::to_string((ip >> 16) & 0xff) + "." +
           std::to_string((ip >> 8) & 0xff) + "." + std::to_string(ip & 0xff);
}

inline std::string whitelisted_address(const Policy& policy) {
    if (policy.ip_whitelist.empty()) throw ConfigError("attack synthesis needs a non-empty whitelist");
    Cidr first = parse_cidr(policy.ip_whitelist.front());
    std::uint32_t ip = first.prefix == 32 ? first.base : (first.base | 1u);
    return ip_to_string(ip);
}

inline std::string non_whitelisted_address(const Policy& policy) {
    CidrList list(policy.ip_whitelist);
    // Walk the documentation/test address blocks until one falls outside.
    for (std::uint32_t base : {0xc0000200u, 0xc6336400u, 0xcb007100u}) {
        for (std::uint32_t off = 1; off < 255; ++off) {
            if (!list.allows(base + off)) return ip_to_string(base + off);
        }
    }
    throw ConfigError("could not find an address outside the whitelist");
}

// A syntactically valid serialized ciphertext; content is irrelevant to checks.
inline Bytes placeholder_payload() {
    lwe::Ciphertext ct;
    ct.n = 2;
    ct.q = 97;
    ct.c1 = {1, 2};
    ct.c2 = 3;
    return serial::ciphertexts_to_bytes({ct});
}

struct LiveCredential {
    Token token;
    std::string model;  // in-scope model for this token
};

inline LiveCredential find_live_credential(const Policy& policy, std::int64_t now_ms) {
    for (const auto& [id, token] : policy.tokens) {
        if (token.revoked) continue;
        if (now_ms < token.issued_at - policy.clock_skew_ms) continue;
        if (now_ms > token.expires_at + policy.clock_skew_ms) continue;
        for (const auto& [model, scope] : policy.model_acl) {
            if (token.model_scope.count(scope) != 0) return LiveCredential{token, model};
        }
    }
    throw ConfigError("attack synthesis needs a live in-scope token");
}

}  // namespace detail

// Deterministic demo policy shared by tests, the attack harness, and the CLI.
inline Policy make_demo_policy(std::int64_t now_ms) {
    Policy p;
    p.ip_whitelist = {"10.0.0.0/8", "192.168.1.0/24"};
    p.model_acl = {{"gpt", "gpt"}, {"bert", "bert"}, {"llama", "llama"}};
    p.clock_skew_ms = 30'000;
    std::uint64_t tag = 0x51f0'77ed'0a11'ce00ull;
    for (const char* scope_name : {"gpt", "bert", "llama"}) {
        std::string scope = scope_name;
        Token tok;
        tok.id = "tok-" + scope;
        tok.secret = detail::deterministic_secret(tag++);
        tok.model_scope = {scope};
        tok.issued_at = now_ms - 3600'000;
        tok.expires_at = now_ms + 24 * 3600'000;
        p.tokens[tok.id] = tok;
    }
    Token all;
    all.id = "tok-all";
    all.secret = detail::deterministic_secret(tag++);
    all.model_scope = {"gpt", "bert", "llama"};
    all.issued_at = now_ms - 3600'000;
    all.expires_at = now_ms + 24 * 3600'000;
    p.tokens[all.id] = all;
    p.validate();
    return p;
}

inline Request make_legit_request(const Policy& policy, std::int64_t now_ms, const std::string& client_id) {
    auto cred = detail::find_live_credential(policy, now_ms);
    Request r;
    r.client_id = client_id;
    r.source_ip = detail::whitelisted_address(policy);
    r.token_id = cred.token.id;
    r.ts = now_ms;
    r.model = cred.model;
    r.payload = detail::placeholder_payload();
    r.proof = compute_proof(cred.token.secret, r);
    return r;
}

// Fires the synthesized mix (plus optional legitimate interleave) through
// broker_validate and ledgers every decision. Attack purity: an invalid-token
// request comes from a whitelisted address, an off-list request carries an
// otherwise valid credential, an expired credential is real but out of window.
inline AttackOutcome run_attack_suite(const Policy& policy, const AttackMix& mix, std::uint64_t seed,
                                      std::size_t legit_count = 0, std::int64_t now_ms = 1'700'000'000'000) {
    if (mix.total() == 0) throw ConfigError("attack mix must contain at least one request");
    Policy arena = policy;

    Token expired;
    expired.id = "atk-expired-cred";
    expired.secret = detail::deterministic_secret(seed ^ 0xdead'beef'cafe'f00dull);
    expired.model_scope = {arena.model_acl.empty() ? std::string("gpt") : arena.model_acl.begin()->second};
    expired.issued_at = now_ms - 7200'000;
    expired.expires_at = now_ms - 3600'000;
    arena.tokens[expired.id] = expired;
    arena.validate();

    auto cred = detail::find_live_credential(arena, now_ms);
    std::string inside_ip = detail::whitelisted_address(arena);
    std::string outside_ip = detail::non_whitelisted_address(arena);
    Bytes payload = detail::placeholder_payload();

    enum class Kind { invalid_token, bad_ip, expired, legit };
    std::vector<Kind> plan;
    plan.insert(plan.end(), mix.invalid_token, Kind::invalid_token);
    plan.insert(plan.end(), mix.ip_not_whitelisted, Kind::bad_ip);
    plan.insert(plan.end(), mix.expired_token, Kind::expired);
    plan.insert(plan.end(), legit_count, Kind::legit);
    std::mt19937_64 rng(seed);
    std::shuffle(plan.begin(), plan.end(), rng);

    AttackOutcome outcome;
    std::uint64_t noise_state = seed ^ 0x0123'4567'89ab'cdefull;
    std::size_t serial = 0;
    for (Kind kind : plan) {
        Request r;
        r.client_id = "atk-client-" + std::to_string(serial++);
        r.ts = now_ms;
        r.payload = payload;
        Reason expected = Reason::ok;
        switch (kind) {
            case Kind::invalid_token:
                r.source_ip = inside_ip;
                r.token_id = "atk-ghost-" + std::to_string(detail::splitmix64(noise_state) % 100000);
                r.model = cred.model;
                r.proof = detail::deterministic_secret(detail::splitmix64(noise_state));
                expected = Reason::invalid_token;
                break;
            case Kind::bad_ip:
                r.source_ip = outside_ip;
                r.token_id = cred.token.id;
                r.model = cred.model;
                r.proof = compute_proof(cred.token.secret, r);
                expected = Reason::ip_not_whitelisted;
                break;
            case Kind::expired:
                r.source_ip = inside_ip;
                r.token_id = expired.id;
                r.model = *expired.model_scope.begin();
                for (const auto& [model, scope] : arena.model_acl) {
                    if (expired.model_scope.count(scope) != 0) { r.model = model; break; }
                }
                r.proof = compute_proof(expired.secret, r);
                expected = Reason::expired_token;
                break;
            case Kind::legit:
                r.source_ip = inside_ip;
                r.token_id = cred.token.id;
                r.model = cred.model;
                r.proof = compute_proof(cred.token.secret, r);
                expected = Reason::ok;
                break;
        }
        Decision d = broker_validate(arena, r, now_ms);
        outcome.ledger.record_decision(d);
        ++outcome.requests;
        if (d.reason != expected) ++outcome.ground_truth_mismatches;
    }
    return outcome;
}

}  // namespace elwe::ztnet
