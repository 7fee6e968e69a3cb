#pragma once
// On-disk formats, little-endian throughout.
//
// Key container:
//   "ELWE" | u8 version(0x01) | u8 record | u32 n | u32 q | u32 p | f64 sigma | payload
//     record 0x01 public     payload = A row-major (n*n u32) + b (n u32)
//     record 0x02 secret     payload = s (n u32)
//     record 0x03 seed-only  payload = u32 length + seed string bytes
//     record 0x04 public16   payload = A row-major (n*n u16) + b (n u32)
//                            (quantized mod-p cells; requires p <= 65536)
// Ciphertext container:
//   "ELWC" | u8 version(0x01) | u32 n | u32 q | u32 count | count * (c1: n u32, c2: u32)
//
// Readers validate magic, version, record type, declared sizes and reject
// trailing bytes. Writers are atomic: temp file in the target directory,
// then rename.

#include <unistd.h>

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "elwe/errors.hpp"
#include "elwe/lwe.hpp"

namespace elwe::serial {

inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::uint8_t kRecordPublic = 0x01;
inline constexpr std::uint8_t kRecordSecret = 0x02;
inline constexpr std::uint8_t kRecordSeed = 0x03;
inline constexpr std::uint8_t kRecordPublic16 = 0x04;

namespace detail {

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_f64(std::vector<std::uint8_t>& out, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

struct Cursor {
    const std::uint8_t* p;
    const std::uint8_t* end;

    bool take(std::size_t count, const std::uint8_t** out) {
        if (static_cast<std::size_t>(end - p) < count) return false;
        *out = p;
        p += count;
        return true;
    }

    bool u16(std::uint16_t& v) {
        const std::uint8_t* b;
        if (!take(2, &b)) return false;
        v = static_cast<std::uint16_t>(b[0] | (b[1] << 8));
        return true;
    }

    bool u32(std::uint32_t& v) {
        const std::uint8_t* b;
        if (!take(4, &b)) return false;
        v = b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
        return true;
    }

    bool f64(double& v) {
        const std::uint8_t* b;
        if (!take(8, &b)) return false;
        std::uint64_t bits = 0;
        for (int i = 7; i >= 0; --i) bits = (bits << 8) | b[i];
        v = std::bit_cast<double>(bits);
        return true;
    }
};

inline std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    return data;
}

} // namespace detail

// Writes bytes to `path` via a sibling temp file plus rename, so readers
// never observe a half-written file.
inline void atomic_write(const std::string& path, const std::vector<std::uint8_t>& data) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path dir = target.parent_path().empty() ? fs::path(".") : target.parent_path();
    fs::path tmp = dir / (target.filename().string() + ".tmp." +
                          std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot create " + tmp.string());
        out.write(reinterpret_cast<const char*>(data.data()),
                  static_cast<std::streamsize>(data.size()));
        if (!out) throw IoError("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw IoError("cannot rename into place: " + path + ": " + ec.message());
    }
}

inline void atomic_write_text(const std::string& path, const std::string& text) {
    atomic_write(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

namespace detail {

inline std::vector<std::uint8_t> key_header(std::uint8_t record, const lwe::Params& p) {
    std::vector<std::uint8_t> out{'E', 'L', 'W', 'E', kVersion, record};
    put_u32(out, p.n);
    put_u32(out, p.q);
    put_u32(out, p.p);
    put_f64(out, p.sigma);
    return out;
}

} // namespace detail

inline void write_public(const std::string& path, const lwe::PublicKey& pk,
                         bool quantized16 = false) {
    if (quantized16 && pk.params.p > 65536)
        throw ConfigError("quantized key cells require p <= 65536");
    auto out = detail::key_header(quantized16 ? kRecordPublic16 : kRecordPublic, pk.params);
    for (std::uint32_t v : pk.a) {
        if (quantized16)
            detail::put_u16(out, static_cast<std::uint16_t>(v));
        else
            detail::put_u32(out, v);
    }
    for (std::uint32_t v : pk.b) detail::put_u32(out, v);
    atomic_write(path, out);
}

inline void write_secret(const std::string& path, const lwe::SecretKey& sk) {
    auto out = detail::key_header(kRecordSecret, sk.params);
    for (std::uint32_t v : sk.s) detail::put_u32(out, v);
    atomic_write(path, out);
}

inline void write_seed(const std::string& path, const lwe::Params& params,
                       const std::string& seed_text) {
    auto out = detail::key_header(kRecordSeed, params);
    detail::put_u32(out, static_cast<std::uint32_t>(seed_text.size()));
    out.insert(out.end(), seed_text.begin(), seed_text.end());
    atomic_write(path, out);
}

struct KeyRecord {
    std::uint8_t record = 0;
    lwe::Params params;
    std::vector<std::uint32_t> a;   // public records
    std::vector<std::uint32_t> b;   // public records
    std::vector<std::uint32_t> s;   // secret record
    std::string seed_text;          // seed-only record
};

inline KeyRecord load_key(const std::string& path) {
    auto data = detail::read_file(path);
    detail::Cursor cur{data.data(), data.data() + data.size()};
    const std::uint8_t* magic;
    if (!cur.take(4, &magic) || std::memcmp(magic, "ELWE", 4) != 0)
        throw ConfigError(path + ": not an ELWE key file");
    const std::uint8_t* vb;
    if (!cur.take(2, &vb)) throw ConfigError(path + ": truncated header");
    if (vb[0] != kVersion) throw ConfigError(path + ": unsupported version");
    KeyRecord rec;
    rec.record = vb[1];
    if (!cur.u32(rec.params.n) || !cur.u32(rec.params.q) || !cur.u32(rec.params.p) ||
        !cur.f64(rec.params.sigma))
        throw ConfigError(path + ": truncated header");
    lwe::validate(rec.params);
    const std::size_t n = rec.params.n;

    auto read_u32s = [&](std::vector<std::uint32_t>& v, std::size_t count) {
        v.resize(count);
        for (std::size_t i = 0; i < count; ++i)
            if (!cur.u32(v[i])) throw ConfigError(path + ": truncated payload");
    };

    switch (rec.record) {
    case kRecordPublic:
        read_u32s(rec.a, n * n);
        read_u32s(rec.b, n);
        break;
    case kRecordPublic16: {
        rec.a.resize(n * n);
        for (std::size_t i = 0; i < n * n; ++i) {
            std::uint16_t v;
            if (!cur.u16(v)) throw ConfigError(path + ": truncated payload");
            rec.a[i] = v;
        }
        read_u32s(rec.b, n);
        break;
    }
    case kRecordSecret:
        read_u32s(rec.s, n);
        break;
    case kRecordSeed: {
        std::uint32_t len;
        if (!cur.u32(len)) throw ConfigError(path + ": truncated payload");
        const std::uint8_t* text;
        if (!cur.take(len, &text)) throw ConfigError(path + ": truncated payload");
        rec.seed_text.assign(reinterpret_cast<const char*>(text), len);
        break;
    }
    default:
        throw ConfigError(path + ": unknown record type");
    }
    if (cur.p != cur.end) throw ConfigError(path + ": trailing bytes");
    return rec;
}

inline lwe::PublicKey as_public(const KeyRecord& rec) {
    if (rec.record != kRecordPublic && rec.record != kRecordPublic16)
        throw ConfigError("key record is not a public key");
    return {rec.params, rec.a, rec.b};
}

inline lwe::SecretKey as_secret(const KeyRecord& rec) {
    if (rec.record != kRecordSecret)
        throw ConfigError("key record is not a secret key");
    return {rec.params, rec.s};
}

// Raw byte form of a ciphertext list; also the wire-payload encoding.
inline std::vector<std::uint8_t> ciphertexts_to_bytes(const std::vector<lwe::Ciphertext>& cts) {
    if (cts.empty()) throw ConfigError("refusing to serialize an empty ciphertext list");
    std::vector<std::uint8_t> out{'E', 'L', 'W', 'C', kVersion};
    detail::put_u32(out, cts.front().n);
    detail::put_u32(out, cts.front().q);
    detail::put_u32(out, static_cast<std::uint32_t>(cts.size()));
    for (const auto& ct : cts) {
        if (ct.n != cts.front().n || ct.q != cts.front().q)
            throw ConfigError("mixed parameters in one ciphertext list");
        for (std::uint32_t v : ct.c1) detail::put_u32(out, v);
        detail::put_u32(out, ct.c2);
    }
    return out;
}

inline std::vector<lwe::Ciphertext> ciphertexts_from_bytes(const std::vector<std::uint8_t>& data) {
    detail::Cursor cur{data.data(), data.data() + data.size()};
    const std::uint8_t* magic;
    if (!cur.take(5, &magic) || std::memcmp(magic, "ELWC", 4) != 0)
        throw ConfigError("not an ELWC ciphertext blob");
    if (magic[4] != kVersion) throw ConfigError("ELWC blob: unsupported version");
    std::uint32_t n, q, count;
    if (!cur.u32(n) || !cur.u32(q) || !cur.u32(count))
        throw ConfigError("ELWC blob: truncated header");
    if (n == 0 || q < 2 || count == 0) throw ConfigError("ELWC blob: degenerate header");
    std::vector<lwe::Ciphertext> cts(count);
    for (auto& ct : cts) {
        ct.n = n;
        ct.q = q;
        ct.c1.resize(n);
        for (std::uint32_t i = 0; i < n; ++i)
            if (!cur.u32(ct.c1[i])) throw ConfigError("ELWC blob: truncated body");
        if (!cur.u32(ct.c2)) throw ConfigError("ELWC blob: truncated body");
    }
    if (cur.p != cur.end) throw ConfigError("ELWC blob: trailing bytes");
    return cts;
}

inline void write_ciphertexts(const std::string& path,
                              const std::vector<lwe::Ciphertext>& cts) {
    atomic_write(path, ciphertexts_to_bytes(cts));
}

inline std::vector<lwe::Ciphertext> load_ciphertexts(const std::string& path) {
    try {
        return ciphertexts_from_bytes(detail::read_file(path));
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

} // namespace elwe::serial
