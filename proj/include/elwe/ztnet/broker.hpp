// Broker gatekeeper: ordered validation, caching, rotation, admission, attacks.
#pragma once

#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <string>
#include <vector>

#include "elwe/errors.hpp"
#include "elwe/lwe.hpp"
#include "elwe/rational.hpp"
#include "elwe/serial.hpp"
#include "elwe/ztnet/agent.hpp"
#include "elwe/ztnet/clock.hpp"
#include "elwe/ztnet/lru.hpp"
#include "elwe/ztnet/metrics.hpp"
#include "elwe/ztnet/policy.hpp"

namespace elwe::ztnet {

// Modeled validation costs, cheapest checks first; Decision latency is their sum
// over the checks actually executed, so short-circuited failures cost less.
namespace check_cost_us {
inline constexpr std::int64_t parse = 20;
inline constexpr std::int64_t ip = 50;
inline constexpr std::int64_t token = 200;
inline constexpr std::int64_t expiry = 10;
inline constexpr std::int64_t mac = 150;
inline constexpr std::int64_t scope = 10;
}  // namespace check_cost_us

inline bool payload_is_well_formed(const Bytes& payload) {
    try {
        serial::ciphertexts_from_bytes(payload);
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

// Fixed check order: malformed fields, IP, token existence/revocation, expiry,
// MAC proof, model scope. The first failing check names the reason.
inline Decision broker_validate(const Policy& policy, const Request& request, std::int64_t now_ms) {
    Decision d;
    d.bytes_processed = request_size(request);
    auto reject = [&](Reason reason) {
        d.verdict = Verdict::reject;
        d.reason = reason;
        return d;
    };
    try {
        d.latency_us += check_cost_us::parse;
        auto ip = parse_ipv4(request.source_ip);
        bool fields_ok = !request.client_id.empty() && !request.token_id.empty() &&
                         !request.model.empty() && request.ts >= 0 && request.proof.size() == 32;
        if (!fields_ok || !ip || !payload_is_well_formed(request.payload)) {
            return reject(Reason::malformed);
        }

        d.latency_us += check_cost_us::ip;
        CidrList whitelist(policy.ip_whitelist);
        if (!whitelist.allows(*ip)) return reject(Reason::ip_not_whitelisted);

        d.latency_us += check_cost_us::token;
        auto it = policy.tokens.find(request.token_id);
        if (it == policy.tokens.end() || it->second.revoked) return reject(Reason::invalid_token);
        const Token& token = it->second;

        d.latency_us += check_cost_us::expiry;
        std::int64_t lo = token.issued_at - policy.clock_skew_ms;
        std::int64_t hi = token.expires_at + policy.clock_skew_ms;
        if (now_ms < lo || now_ms > hi) return reject(Reason::expired_token);

        d.latency_us += check_cost_us::mac;
        if (compute_proof(token.secret, request) != request.proof) return reject(Reason::invalid_token);

        d.latency_us += check_cost_us::scope;
        auto acl = policy.model_acl.find(request.model);
        if (acl == policy.model_acl.end() || token.model_scope.count(acl->second) == 0) {
            return reject(Reason::scope_violation);
        }

        d.verdict = Verdict::accept;
        d.reason = Reason::ok;
        return d;
    } catch (const std::exception&) {
        return reject(Reason::malformed);
    }
}

// Admission limit: requests beyond the capacity queue until a slot frees up.
class AdmissionGate {
public:
    explicit AdmissionGate(int capacity) : capacity_(capacity) {
        if (capacity_ <= 0) throw ConfigError("admission capacity must be positive");
    }

    void acquire() {
        std::unique_lock<std::mutex> lock(mu_);
        cv_.wait(lock, [&] { return in_use_ < capacity_; });
        ++in_use_;
    }

    void release() {
        {
            std::lock_guard<std::mutex> lock(mu_);
            --in_use_;
        }
        cv_.notify_one();
    }

    int in_use() const {
        std::lock_guard<std::mutex> lock(mu_);
        return in_use_;
    }

private:
    int capacity_;
    mutable std::mutex mu_;
    std::condition_variable cv_;
    int in_use_ = 0;
};

class AdmissionGuard {
public:
    explicit AdmissionGuard(AdmissionGate& gate) : gate_(gate) { gate_.acquire(); }
    ~AdmissionGuard() { gate_.release(); }
    AdmissionGuard(const AdmissionGuard&) = delete;
    AdmissionGuard& operator=(const AdmissionGuard&) = delete;

private:
    AdmissionGate& gate_;
};

struct BrokerConfig {
    lwe::Params payload_params{32, 3329, 13, 3.2, 0};
    std::string key_seed = "5/8";
    std::size_t cache_capacity = 16;
    int admission_limit = 8;
};

class Broker {
public:
    Broker(Policy policy, AgentPolicy agent_policy, Clock& clock, BrokerConfig config = {})
        : clock_(clock),
          config_(std::move(config)),
          cache_(config_.cache_capacity),
          gate_(config_.admission_limit),
          agent_(std::move(agent_policy)),
          key_seed_(seed_from_text(config_.key_seed)),
          keypair_(std::make_shared<lwe::KeyPair>(lwe::keygen(config_.payload_params, key_seed_))) {
        policy.validate();
        policy_ = std::make_shared<const Policy>(std::move(policy));
        last_rotation_ms_ = clock_.now_ms();
        for (const auto& [model, scope] : policy_snapshot()->model_acl) {
            (void)scope;
            agent_.models().register_model(model);
        }
    }

    std::shared_ptr<const Policy> policy_snapshot() const {
        std::shared_lock<std::shared_mutex> lock(policy_mu_);
        return policy_;
    }

    void update_policy(Policy policy) {
        policy.validate();
        auto next = std::make_shared<const Policy>(std::move(policy));
        std::unique_lock<std::shared_mutex> lock(policy_mu_);
        policy_ = std::move(next);
    }

    void revoke_token(const std::string& token_id) {
        Policy updated = *policy_snapshot();
        auto it = updated.tokens.find(token_id);
        if (it == updated.tokens.end()) throw ConfigError("unknown token: " + token_id);
        it->second.revoked = true;
        update_policy(std::move(updated));
    }

    lwe::PublicKey public_key() const {
        std::lock_guard<std::mutex> lock(key_mu_);
        return lwe::public_part(*keypair_);
    }

    std::uint32_t epoch() const {
        std::lock_guard<std::mutex> lock(key_mu_);
        return epoch_;
    }

    MetricsLedger& ledger() { return ledger_; }
    Agent& agent() { return agent_; }
    Clock& clock() { return clock_; }
    LruCache<std::string, Bytes>& cache() { return cache_; }

    // Full pipeline for one request: admission, rotation bookkeeping, ordered
    // validation, response cache, agent grant, payload decrypt, model stub.
    Response handle(const Request& request) {
        AdmissionGuard admitted(gate_);
        std::int64_t t0 = clock_.now_us();
        maybe_rotate();

        auto policy = policy_snapshot();
        std::int64_t now_ms = clock_.now_ms();
        Decision d = broker_validate(*policy, request, now_ms);
        clock_.sleep_us(d.latency_us);
        if (!d.accepted()) {
            ledger_.record_decision(d);
            record_total(t0);
            return make_response(d, {}, epoch());
        }

        std::string digest = request_digest(request);
        if (auto cached = cache_.get(digest)) {
            ledger_.record_cache(true);
            ledger_.record_decision(d);
            record_total(t0);
            return make_response(d, *cached, epoch());
        }
        ledger_.record_cache(false);

        std::string grant;
        Decision agent_d = agent_.admit(request, now_ms, &grant);
        d.latency_us += check_cost_us::scope;
        clock_.sleep_us(check_cost_us::scope);
        if (!agent_d.accepted()) {
            d.verdict = agent_d.verdict;
            d.reason = agent_d.reason;
            ledger_.record_decision(d);
            record_total(t0);
            return make_response(d, {}, epoch());
        }

        std::string prompt = decrypt_payload(request.payload);

        std::int64_t m0 = clock_.now_us();
        Decision replay_failure;
        std::string body = agent_.respond(grant, request.model, prompt, clock_, &replay_failure);
        if (replay_failure.reason == Reason::expired_token) {
            d.verdict = replay_failure.verdict;
            d.reason = replay_failure.reason;
            ledger_.record_decision(d);
            record_total(t0);
            return make_response(d, {}, epoch());
        }
        ledger_.record_component("model", static_cast<double>(clock_.now_us() - m0));

        Bytes body_bytes(body.begin(), body.end());
        cache_.put(digest, body_bytes);
        ledger_.record_decision(d);
        record_total(t0);
        return make_response(d, std::move(body_bytes), epoch());
    }

    // Rotation thresholds: wall-clock hours or handled-request count, whichever
    // trips first. Rotation refreshes the payload keypair and bumps the epoch.
    void maybe_rotate() {
        std::lock_guard<std::mutex> lock(key_mu_);
        auto policy = policy_snapshot();
        ++requests_since_rotation_;
        std::int64_t now = clock_.now_ms();
        bool by_time = now - last_rotation_ms_ >= policy->rotation.hours * 3600'000;
        bool by_count = requests_since_rotation_ > policy->rotation.requests;
        if (!by_time && !by_count) return;
        key_seed_ = successor_seed(key_seed_);
        keypair_ = std::make_shared<lwe::KeyPair>(lwe::keygen(config_.payload_params, key_seed_));
        ++epoch_;
        last_rotation_ms_ = now;
        requests_since_rotation_ = 1;
    }

private:
    void record_total(std::int64_t t0) {
        ledger_.record_component("total", static_cast<double>(clock_.now_us() - t0));
    }

    std::string decrypt_payload(const Bytes& payload) {
        std::int64_t t0 = clock_.now_us();
        std::shared_ptr<lwe::KeyPair> kp;
        {
            std::lock_guard<std::mutex> lock(key_mu_);
            kp = keypair_;
        }
        std::string prompt;
        try {
            auto cts = serial::ciphertexts_from_bytes(payload);
            clock_.sleep_us(40 + 6 * static_cast<std::int64_t>(cts.size()));
            Bytes plain = lwe::decrypt_bytes(lwe::secret_part(*kp), cts);
            prompt.assign(plain.begin(), plain.end());
        } catch (const std::exception&) {
            prompt.clear();  // garbage payloads still get a (useless) response
        }
        ledger_.record_component("decrypt", static_cast<double>(clock_.now_us() - t0));
        return prompt;
    }

    Clock& clock_;
    BrokerConfig config_;
    mutable std::shared_mutex policy_mu_;
    std::shared_ptr<const Policy> policy_;
    MetricsLedger ledger_;
    LruCache<std::string, Bytes> cache_;
    AdmissionGate gate_;
    Agent agent_;

    mutable std::mutex key_mu_;
    Rational key_seed_;
    std::shared_ptr<lwe::KeyPair> keypair_;
    std::uint32_t epoch_ = 0;
    std::int64_t last_rotation_ms_ = 0;
    std::uint64_t requests_since_rotation_ = 0;
};

}  // namespace elwe::ztnet
