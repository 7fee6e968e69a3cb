// IPv4 parsing and CIDR allowlists.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "elwe/errors.hpp"

namespace elwe::ztnet {

inline std::optional<std::uint32_t> parse_ipv4(const std::string& text) {
    std::uint32_t value = 0;
    int octets = 0;
    std::size_t i = 0;
    while (octets < 4) {
        if (i >= text.size() || text[i] < '0' || text[i] > '9') return std::nullopt;
        std::uint32_t octet = 0;
        std::size_t digits = 0;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
            octet = octet * 10 + static_cast<std::uint32_t>(text[i] - '0');
            if (octet > 255 || ++digits > 3) return std::nullopt;
            ++i;
        }
        value = (value << 8) | octet;
        ++octets;
        if (octets < 4) {
            if (i >= text.size() || text[i] != '.') return std::nullopt;
            ++i;
        }
    }
    if (i != text.size()) return std::nullopt;
    return value;
}

// "a.b.c.d/p" with 0 <= p <= 32; a bare address means /32.
struct Cidr {
    std::uint32_t base = 0;
    int prefix = 32;

    bool contains(std::uint32_t ip) const {
        if (prefix == 0) return true;
        std::uint32_t mask = prefix == 32 ? 0xffffffffu : ~((1u << (32 - prefix)) - 1u);
        return (ip & mask) == (base & mask);
    }
};

inline Cidr parse_cidr(const std::string& text) {
    std::string addr = text;
    int prefix = 32;
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        addr = text.substr(0, slash);
        std::string tail = text.substr(slash + 1);
        if (tail.empty() || tail.size() > 2) throw ConfigError("invalid CIDR prefix: " + text);
        prefix = 0;
        for (char c : tail) {
            if (c < '0' || c > '9') throw ConfigError("invalid CIDR prefix: " + text);
            prefix = prefix * 10 + (c - '0');
        }
        if (prefix > 32) throw ConfigError("invalid CIDR prefix: " + text);
    }
    auto ip = parse_ipv4(addr);
    if (!ip) throw ConfigError("invalid CIDR address: " + text);
    return Cidr{*ip, prefix};
}

class CidrList {
public:
    CidrList() = default;

    explicit CidrList(const std::vector<std::string>& entries) {
        for (const auto& e : entries) ranges_.push_back(parse_cidr(e));
    }

    void add(const std::string& entry) { ranges_.push_back(parse_cidr(entry)); }

    bool allows(std::uint32_t ip) const {
        for (const auto& r : ranges_) {
            if (r.contains(ip)) return true;
        }
        return false;
    }

    bool empty() const { return ranges_.empty(); }
    std::size_t size() const { return ranges_.size(); }

private:
    std::vector<Cidr> ranges_;
};

}  // namespace elwe::ztnet
