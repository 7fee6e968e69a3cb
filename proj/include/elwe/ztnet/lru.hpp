// Synchronized LRU cache with hit/miss accounting.
#pragma once

#include <cstdint>
#include <list>
#include <mutex>
#include <optional>
#include <unordered_map>

#include "elwe/errors.hpp"

namespace elwe::ztnet {

template <typename Key, typename Value>
class LruCache {
public:
    explicit LruCache(std::size_t capacity = 16) : capacity_(capacity) {
        if (capacity_ == 0) throw ConfigError("cache capacity must be positive");
    }

    // Hit promotes the entry to most recently used.
    std::optional<Value> get(const Key& key) {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = index_.find(key);
        if (it == index_.end()) {
            ++misses_;
            return std::nullopt;
        }
        order_.splice(order_.begin(), order_, it->second);
        ++hits_;
        return it->second->second;
    }

    void put(const Key& key, Value value) {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = index_.find(key);
        if (it != index_.end()) {
            it->second->second = std::move(value);
            order_.splice(order_.begin(), order_, it->second);
            return;
        }
        if (order_.size() == capacity_) {
            index_.erase(order_.back().first);
            order_.pop_back();
        }
        order_.emplace_front(key, std::move(value));
        index_[key] = order_.begin();
    }

    bool contains(const Key& key) const {
        std::lock_guard<std::mutex> lock(mu_);
        return index_.find(key) != index_.end();
    }

    std::size_t size() const {
        std::lock_guard<std::mutex> lock(mu_);
        return order_.size();
    }

    std::uint64_t hits() const {
        std::lock_guard<std::mutex> lock(mu_);
        return hits_;
    }

    std::uint64_t misses() const {
        std::lock_guard<std::mutex> lock(mu_);
        return misses_;
    }

    double hit_rate() const {
        std::lock_guard<std::mutex> lock(mu_);
        std::uint64_t total = hits_ + misses_;
        return total == 0 ? 0.0 : static_cast<double>(hits_) / static_cast<double>(total);
    }

private:
    std::size_t capacity_;
    mutable std::mutex mu_;
    std::list<std::pair<Key, Value>> order_;  // front = most recently used
    std::unordered_map<Key, typename std::list<std::pair<Key, Value>>::iterator> index_;
    std::uint64_t hits_ = 0;
    std::uint64_t misses_ = 0;
};

}  // namespace elwe::ztnet
