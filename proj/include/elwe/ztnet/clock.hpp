// Clock abstraction: real time for servers, simulated time for tests.
#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>
#include <thread>

namespace elwe::ztnet {

class Clock {
public:
    virtual ~Clock() = default;
    virtual std::int64_t now_us() = 0;
    virtual void sleep_us(std::int64_t us) = 0;

    std::int64_t now_ms() { return now_us() / 1000; }
    void sleep_ms(std::int64_t ms) { sleep_us(ms * 1000); }
};

class SystemClock final : public Clock {
public:
    std::int64_t now_us() override {
        auto t = std::chrono::system_clock::now().time_since_epoch();
        return std::chrono::duration_cast<std::chrono::microseconds>(t).count();
    }

    void sleep_us(std::int64_t us) override {
        if (us > 0) std::this_thread::sleep_for(std::chrono::microseconds(us));
    }
};

// Deterministic clock: sleeping advances time, nothing waits for real time.
class SimClock final : public Clock {
public:
    explicit SimClock(std::int64_t start_ms = 0) : now_us_(start_ms * 1000) {}

    std::int64_t now_us() override {
        std::lock_guard<std::mutex> lock(mu_);
        return now_us_;
    }

    void sleep_us(std::int64_t us) override {
        std::lock_guard<std::mutex> lock(mu_);
        if (us > 0) now_us_ += us;
    }

    void set_ms(std::int64_t ms) {
        std::lock_guard<std::mutex> lock(mu_);
        now_us_ = ms * 1000;
    }

private:
    mutable std::mutex mu_;
    std::int64_t now_us_ = 0;
};

}  // namespace elwe::ztnet
