// Agent-side validation: role and time-window rules, single-use grants, model stub.
#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <unordered_set>

#include "elwe/errors.hpp"
#include "elwe/ztnet/clock.hpp"
#include "elwe/ztnet/policy.hpp"

namespace elwe::ztnet {

// Window in minutes of the UTC day, inclusive start, exclusive end; 0..1440 = always.
struct RoleRule {
    std::set<std::string> models;
    int window_start_min = 0;
    int window_end_min = 1440;
};

struct AgentPolicy {
    std::map<std::string, std::string> client_roles;  // client_id -> role
    std::map<std::string, RoleRule> role_rules;
    std::string default_role = "analyst";

    const RoleRule* rule_for_role(const std::string& role) const {
        auto it = role_rules.find(role);
        return it == role_rules.end() ? nullptr : &it->second;
    }

    std::string role_for(const std::string& client_id) const {
        auto it = client_roles.find(client_id);
        return it == client_roles.end() ? default_role : it->second;
    }
};

inline int minute_of_day(std::int64_t now_ms) {
    std::int64_t minutes = now_ms / 60000;
    return static_cast<int>(((minutes % 1440) + 1440) % 1440);
}

// Role must permit the model and the current minute must fall inside the window.
inline Decision agent_validate(const AgentPolicy& policy, const Request& request, const std::string& role,
                               std::int64_t now_ms) {
    Decision d;
    d.bytes_processed = request_size(request);
    const RoleRule* rule = policy.rule_for_role(role);
    if (rule == nullptr || rule->models.count(request.model) == 0) {
        d.verdict = Verdict::reject;
        d.reason = Reason::scope_violation;
        return d;
    }
    int minute = minute_of_day(now_ms);
    bool in_window = minute >= rule->window_start_min && minute < rule->window_end_min;
    if (!in_window) {
        d.verdict = Verdict::reject;
        d.reason = Reason::scope_violation;
        return d;
    }
    d.verdict = Verdict::accept;
    d.reason = Reason::ok;
    return d;
}

// Accepts mint single-use grants; a consumed grant never authorizes again.
class GrantTable {
public:
    std::string mint(const std::string& request_key) {
        std::lock_guard<std::mutex> lock(mu_);
        std::string grant = request_key + "#" + std::to_string(next_serial_++);
        active_.insert(grant);
        return grant;
    }

    bool consume(const std::string& grant) {
        std::lock_guard<std::mutex> lock(mu_);
        return active_.erase(grant) == 1;
    }

    std::size_t active_count() const {
        std::lock_guard<std::mutex> lock(mu_);
        return active_.size();
    }

private:
    mutable std::mutex mu_;
    std::unordered_set<std::string> active_;
    std::uint64_t next_serial_ = 0;
};

// Stands in for the model services; echoes with a header after a configured delay.
class ModelStub {
public:
    static constexpr std::int64_t kGptClassLatencyMs = 480;
    static constexpr std::int64_t kBertClassLatencyMs = 80;

    void register_model(const std::string& model) {
        std::lock_guard<std::mutex> lock(mu_);
        latency_ms_.emplace(model, default_latency_ms(model));
    }

    void set_latency_ms(const std::string& model, std::int64_t ms) {
        std::lock_guard<std::mutex> lock(mu_);
        latency_ms_[model] = ms;
    }

    bool knows(const std::string& model) const {
        std::lock_guard<std::mutex> lock(mu_);
        return latency_ms_.count(model) != 0;
    }

    std::string invoke(const std::string& model, const std::string& prompt, Clock& clock) const {
        std::int64_t delay = 0;
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = latency_ms_.find(model);
            if (it == latency_ms_.end()) throw DomainError("unknown model: " + model);
            delay = it->second;
        }
        clock.sleep_ms(delay);
        return model + ":" + prompt;
    }

    static std::int64_t default_latency_ms(const std::string& model) {
        return model.find("bert") != std::string::npos ? kBertClassLatencyMs : kGptClassLatencyMs;
    }

private:
    mutable std::mutex mu_;
    std::map<std::string, std::int64_t> latency_ms_;
};

class Agent {
public:
    Agent() = default;
    explicit Agent(AgentPolicy policy) : policy_(std::move(policy)) {}

    AgentPolicy& policy() { return policy_; }
    ModelStub& models() { return models_; }
    GrantTable& grants() { return grants_; }

    // Broker-accepted request: role/time validation, then a one-shot grant for the
    // model invocation. Replays of a consumed grant surface as expired_token.
    Decision admit(const Request& request, std::int64_t now_ms, std::string* grant_out) {
        Decision d = agent_validate(policy_, request, policy_.role_for(request.client_id), now_ms);
        if (d.accepted() && grant_out != nullptr) *grant_out = grants_.mint(request_digest(request));
        return d;
    }

    std::string respond(const std::string& grant, const std::string& model, const std::string& prompt,
                        Clock& clock, Decision* failure) {
        if (!grants_.consume(grant)) {
            if (failure != nullptr) {
                failure->verdict = Verdict::reject;
                failure->reason = Reason::expired_token;
            }
            return {};
        }
        return models_.invoke(model, prompt, clock);
    }

private:
    AgentPolicy policy_;
    ModelStub models_;
    GrantTable grants_;
};

}  // namespace elwe::ztnet
