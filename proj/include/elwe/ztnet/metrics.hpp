// Request-pipeline metrics: counters, latency reservoirs, statistics report.
#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "elwe/errors.hpp"
#include "elwe/stats.hpp"
#include "elwe/ztnet/policy.hpp"

namespace elwe::ztnet {

// Latency components across the pipeline, in microseconds.
inline const std::vector<std::string>& latency_components() {
    static const std::vector<std::string> names{"encrypt", "decrypt", "network", "model", "total"};
    return names;
}

class MetricsLedger {
public:
    MetricsLedger() = default;

    MetricsLedger(const MetricsLedger& other) { *this = other; }

    MetricsLedger& operator=(const MetricsLedger& other) {
        if (this == &other) return *this;
        std::scoped_lock lock(mu_, other.mu_);
        accepted_ = other.accepted_;
        rejected_ = other.rejected_;
        bytes_processed_ = other.bytes_processed_;
        reason_counts_ = other.reason_counts_;
        reason_latency_us_ = other.reason_latency_us_;
        component_latency_us_ = other.component_latency_us_;
        cache_hits_ = other.cache_hits_;
        cache_misses_ = other.cache_misses_;
        reconnect_attempts_ = other.reconnect_attempts_;
        reconnect_successes_ = other.reconnect_successes_;
        return *this;
    }

    void record_decision(const Decision& d) {
        std::lock_guard<std::mutex> lock(mu_);
        std::string key = reason_name(d.reason);
        reason_counts_[key] += 1;
        reason_latency_us_[key].push_back(static_cast<double>(d.latency_us));
        bytes_processed_ += d.bytes_processed;
        if (d.accepted()) ++accepted_; else ++rejected_;
    }

    void record_component(const std::string& component, double latency_us) {
        std::lock_guard<std::mutex> lock(mu_);
        component_latency_us_[component].push_back(latency_us);
    }

    void record_cache(bool hit) {
        std::lock_guard<std::mutex> lock(mu_);
        if (hit) ++cache_hits_; else ++cache_misses_;
    }

    void record_reconnect(bool success) {
        std::lock_guard<std::mutex> lock(mu_);
        ++reconnect_attempts_;
        if (success) ++reconnect_successes_;
    }

    std::uint64_t accepted() const { std::lock_guard<std::mutex> lock(mu_); return accepted_; }
    std::uint64_t rejected() const { std::lock_guard<std::mutex> lock(mu_); return rejected_; }
    std::uint64_t total() const { std::lock_guard<std::mutex> lock(mu_); return accepted_ + rejected_; }
    std::uint64_t bytes_processed() const { std::lock_guard<std::mutex> lock(mu_); return bytes_processed_; }
    std::uint64_t cache_hits() const { std::lock_guard<std::mutex> lock(mu_); return cache_hits_; }
    std::uint64_t cache_misses() const { std::lock_guard<std::mutex> lock(mu_); return cache_misses_; }
    std::uint64_t reconnect_attempts() const { std::lock_guard<std::mutex> lock(mu_); return reconnect_attempts_; }
    std::uint64_t reconnect_successes() const { std::lock_guard<std::mutex> lock(mu_); return reconnect_successes_; }

    double rejection_rate() const {
        std::lock_guard<std::mutex> lock(mu_);
        std::uint64_t t = accepted_ + rejected_;
        return t == 0 ? 0.0 : static_cast<double>(rejected_) / static_cast<double>(t);
    }

    std::uint64_t reason_count(Reason r) const {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = reason_counts_.find(reason_name(r));
        return it == reason_counts_.end() ? 0 : it->second;
    }

    std::map<std::string, std::uint64_t> reason_counts() const {
        std::lock_guard<std::mutex> lock(mu_);
        return reason_counts_;
    }

    std::map<std::string, std::vector<double>> reason_latencies() const {
        std::lock_guard<std::mutex> lock(mu_);
        return reason_latency_us_;
    }

    std::map<std::string, std::vector<double>> component_latencies() const {
        std::lock_guard<std::mutex> lock(mu_);
        return component_latency_us_;
    }

    nlohmann::json to_json() const {
        std::lock_guard<std::mutex> lock(mu_);
        return {{"totals", {{"requests", accepted_ + rejected_},
                            {"accepted", accepted_},
                            {"rejected", rejected_},
                            {"bytes_processed", bytes_processed_}}},
                {"by_reason", reason_counts_},
                {"reason_latency_us", reason_latency_us_},
                {"component_latency_us", component_latency_us_},
                {"cache", {{"hits", cache_hits_}, {"misses", cache_misses_}}},
                {"reconnect", {{"attempts", reconnect_attempts_}, {"successes", reconnect_successes_}}}};
    }

    static MetricsLedger from_json(const nlohmann::json& j) {
        MetricsLedger ledger;
        try {
            ledger.accepted_ = j.at("totals").at("accepted").get<std::uint64_t>();
            ledger.rejected_ = j.at("totals").at("rejected").get<std::uint64_t>();
            ledger.bytes_processed_ = j.at("totals").value("bytes_processed", std::uint64_t{0});
            ledger.reason_counts_ = j.at("by_reason").get<std::map<std::string, std::uint64_t>>();
            ledger.reason_latency_us_ =
                j.value("reason_latency_us", std::map<std::string, std::vector<double>>{});
            ledger.component_latency_us_ =
                j.value("component_latency_us", std::map<std::string, std::vector<double>>{});
            if (j.contains("cache")) {
                ledger.cache_hits_ = j["cache"].value("hits", std::uint64_t{0});
                ledger.cache_misses_ = j["cache"].value("misses", std::uint64_t{0});
            }
            if (j.contains("reconnect")) {
                ledger.reconnect_attempts_ = j["reconnect"].value("attempts", std::uint64_t{0});
                ledger.reconnect_successes_ = j["reconnect"].value("successes", std::uint64_t{0});
            }
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("ledger parse failed: ") + e.what());
        }
        return ledger;
    }

private:
    mutable std::mutex mu_;
    std::uint64_t accepted_ = 0;
    std::uint64_t rejected_ = 0;
    std::uint64_t bytes_processed_ = 0;
    std::map<std::string, std::uint64_t> reason_counts_;
    std::map<std::string, std::vector<double>> reason_latency_us_;
    std::map<std::string, std::vector<double>> component_latency_us_;
    std::uint64_t cache_hits_ = 0;
    std::uint64_t cache_misses_ = 0;
    std::uint64_t reconnect_attempts_ = 0;
    std::uint64_t reconnect_successes_ = 0;
};

struct ComponentStats {
    std::size_t count = 0;
    double mean = 0, std_dev = 0, min = 0, max = 0;
    double p5 = 0, p25 = 0, p50 = 0, p75 = 0, p95 = 0;
    double iqr = 0, cv = 0;
};

inline ComponentStats summarize_latencies(std::vector<double> xs) {
    if (xs.empty()) throw DomainError("cannot summarize an empty latency series");
    ComponentStats s;
    s.count = xs.size();
    s.mean = stats::mean(xs);
    s.std_dev = stats::stddev(xs);
    std::sort(xs.begin(), xs.end());
    s.min = xs.front();
    s.max = xs.back();
    s.p5 = stats::percentile_sorted(xs, 5.0);
    s.p25 = stats::percentile_sorted(xs, 25.0);
    s.p50 = stats::percentile_sorted(xs, 50.0);
    s.p75 = stats::percentile_sorted(xs, 75.0);
    s.p95 = stats::percentile_sorted(xs, 95.0);
    s.iqr = s.p75 - s.p25;
    s.cv = s.mean == 0.0 ? 0.0 : s.std_dev / s.mean;
    return s;
}

inline nlohmann::json stats_to_json(const ComponentStats& s) {
    return {{"count", s.count}, {"mean", s.mean},   {"std_dev", s.std_dev}, {"min", s.min},
            {"max", s.max},     {"p5", s.p5},       {"p25", s.p25},         {"p50", s.p50},
            {"p75", s.p75},     {"p95", s.p95},     {"iqr", s.iqr},         {"cv", s.cv}};
}

// Statistics document over a ledger; empty components are listed with a note.
inline nlohmann::json metrics_report(const MetricsLedger& ledger) {
    nlohmann::json components = nlohmann::json::object();
    auto recorded = ledger.component_latencies();
    for (const auto& name : latency_components()) {
        auto it = recorded.find(name);
        if (it == recorded.end() || it->second.empty()) {
            components[name] = {{"note", "no samples recorded"}};
        } else {
            components[name] = stats_to_json(summarize_latencies(it->second));
        }
    }
    for (const auto& [name, series] : recorded) {
        if (!components.contains(name) && !series.empty()) {
            components[name] = stats_to_json(summarize_latencies(series));
        }
    }
    nlohmann::json reasons = nlohmann::json::object();
    auto latencies = ledger.reason_latencies();
    for (const auto& [name, count] : ledger.reason_counts()) {
        nlohmann::json entry = {{"count", count}};
        auto it = latencies.find(name);
        if (it != latencies.end() && !it->second.empty()) {
            entry["latency_us"] = stats_to_json(summarize_latencies(it->second));
        }
        reasons[name] = entry;
    }
    return {{"totals", {{"requests", ledger.total()},
                        {"accepted", ledger.accepted()},
                        {"rejected", ledger.rejected()},
                        {"rejection_rate", ledger.rejection_rate()},
                        {"bytes_processed", ledger.bytes_processed()}}},
            {"by_reason", reasons},
            {"components", components},
            {"cache", {{"hits", ledger.cache_hits()},
                       {"misses", ledger.cache_misses()},
                       {"hit_rate", ledger.cache_hits() + ledger.cache_misses() == 0
                                        ? 0.0
                                        : static_cast<double>(ledger.cache_hits()) /
                                              static_cast<double>(ledger.cache_hits() + ledger.cache_misses())}}},
            {"reconnect", {{"attempts", ledger.reconnect_attempts()},
                           {"successes", ledger.reconnect_successes()}}}};
}

}  // namespace elwe::ztnet
