// Client-side delivery: jittered retries over an exponential reconnect backoff.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "elwe/errors.hpp"
#include "elwe/ztnet/broker.hpp"
#include "elwe/ztnet/clock.hpp"
#include "elwe/ztnet/metrics.hpp"
#include "elwe/ztnet/policy.hpp"

namespace elwe::ztnet {

class Transport {
public:
    virtual ~Transport() = default;
    // nullopt models a dropped connection or lost frame.
    virtual std::optional<Response> try_send(const Request& request) = 0;
};

// Loopback transport with a scripted drop plan, indexed by delivery attempt.
class InMemoryTransport final : public Transport {
public:
    explicit InMemoryTransport(Broker& broker, std::vector<bool> drop_plan = {})
        : broker_(broker), drop_plan_(std::move(drop_plan)) {}

    std::optional<Response> try_send(const Request& request) override {
        std::size_t attempt = attempt_++;
        if (attempt < drop_plan_.size() && drop_plan_[attempt]) return std::nullopt;
        return broker_.handle(request);
    }

    std::size_t attempts_seen() const { return attempt_; }

private:
    Broker& broker_;
    std::vector<bool> drop_plan_;
    std::size_t attempt_ = 0;
};

struct RetryPolicy {
    int max_retries = 3;          // delivery attempts = 1 + max_retries
    std::int64_t jitter_min_ms = 100;
    std::int64_t jitter_max_ms = 300;
};

struct ReconnectPolicy {
    std::int64_t initial_backoff_ms = 500;
    std::int64_t max_backoff_ms = 5000;
    std::int64_t multiplier = 2;
};

struct AttemptRecord {
    int attempt = 0;              // 1-based
    std::int64_t backoff_ms = 0;  // exponential schedule, 0 on the first attempt
    std::int64_t jitter_ms = 0;
    bool delivered = false;
};

struct SendOutcome {
    bool success = false;
    Response response;
    std::vector<AttemptRecord> attempts;
};

namespace detail {
inline std::int64_t jitter_for(std::uint64_t seed, int attempt, const RetryPolicy& policy) {
    std::uint64_t state = seed + static_cast<std::uint64_t>(attempt) * 0x9e37'79b9ull;
    std::uint64_t span = static_cast<std::uint64_t>(policy.jitter_max_ms - policy.jitter_min_ms + 1);
    return policy.jitter_min_ms + static_cast<std::int64_t>(splitmix64(state) % span);
}
}  // namespace detail

// Waits backoff + jitter before every retry; the backoff doubles per retry up
// to the ceiling, while the jitter stays within its fixed band.
inline SendOutcome client_send(Transport& transport, const Request& request, const RetryPolicy& retry,
                               const ReconnectPolicy& reconnect, Clock& clock, MetricsLedger* ledger = nullptr,
                               std::uint64_t jitter_seed = 0) {
    if (retry.max_retries < 0) throw ConfigError("max_retries must be non-negative");
    if (retry.jitter_min_ms > retry.jitter_max_ms) throw ConfigError("jitter band is inverted");
    if (reconnect.initial_backoff_ms <= 0 || reconnect.multiplier < 1) {
        throw ConfigError("reconnect policy must grow from a positive backoff");
    }

    SendOutcome outcome;
    std::int64_t backoff = reconnect.initial_backoff_ms;
    for (int attempt = 1; attempt <= retry.max_retries + 1; ++attempt) {
        AttemptRecord rec;
        rec.attempt = attempt;
        if (attempt > 1) {
            rec.backoff_ms = backoff;
            rec.jitter_ms = detail::jitter_for(jitter_seed, attempt, retry);
            clock.sleep_ms(rec.backoff_ms + rec.jitter_ms);
            backoff = std::min(backoff * reconnect.multiplier, reconnect.max_backoff_ms);
        }
        std::int64_t t0 = clock.now_us();
        auto response = transport.try_send(request);
        rec.delivered = response.has_value();
        outcome.attempts.push_back(rec);
        if (ledger != nullptr && attempt > 1) ledger->record_reconnect(rec.delivered);
        if (response) {
            if (ledger != nullptr) {
                ledger->record_component("network", static_cast<double>(clock.now_us() - t0));
            }
            outcome.success = true;
            outcome.response = std::move(*response);
            return outcome;
        }
    }
    return outcome;  // terminal failure; attempt history travels with it
}

}  // namespace elwe::ztnet
