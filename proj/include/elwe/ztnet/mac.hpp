// SHA-256 digests, HMAC-SHA256 proofs, and hex codecs.
#pragma once

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "elwe/errors.hpp"

namespace elwe::ztnet {

using Bytes = std::vector<std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;

inline std::string hex_encode(const std::uint8_t* data, std::size_t len) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (std::size_t i = 0; i < len; ++i) {
        out.push_back(digits[data[i] >> 4]);
        out.push_back(digits[data[i] & 0x0f]);
    }
    return out;
}

inline std::string hex_encode(const Bytes& data) {
    return hex_encode(data.data(), data.size());
}

template <std::size_t N>
std::string hex_encode(const std::array<std::uint8_t, N>& data) {
    return hex_encode(data.data(), N);
}

inline int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

inline Bytes hex_decode(const std::string& text) {
    if (text.size() % 2 != 0) throw ConfigError("hex string has odd length");
    Bytes out;
    out.reserve(text.size() / 2);
    for (std::size_t i = 0; i < text.size(); i += 2) {
        int hi = hex_nibble(text[i]);
        int lo = hex_nibble(text[i + 1]);
        if (hi < 0 || lo < 0) throw ConfigError("hex string has invalid character");
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

inline Digest sha256(const std::uint8_t* data, std::size_t len) {
    Digest out{};
    unsigned int out_len = 0;
    if (EVP_Digest(data, len, out.data(), &out_len, EVP_sha256(), nullptr) != 1 || out_len != out.size()) {
        throw std::runtime_error("sha256 failed");
    }
    return out;
}

inline Digest sha256(const Bytes& data) { return sha256(data.data(), data.size()); }

inline Digest sha256(const std::string& data) {
    return sha256(reinterpret_cast<const std::uint8_t*>(data.data()), data.size());
}

inline Digest hmac_sha256(const Bytes& key, const Bytes& message) {
    Digest out{};
    unsigned int out_len = 0;
    if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), message.data(), message.size(),
             out.data(), &out_len) == nullptr ||
        out_len != out.size()) {
        throw std::runtime_error("hmac-sha256 failed");
    }
    return out;
}

}  // namespace elwe::ztnet
