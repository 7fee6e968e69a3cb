#pragma once
// LWE key generation, encryption and decryption, with all randomness drawn
// from an Engel coefficient stream.
//
// Stream consumption order is part of the key-file contract:
//   draws 1 .. n^2            -> A (row-major), entry = a_k mod p
//   draws n^2+1 .. n^2+n      -> s, entry = a_k mod q
//   draws n^2+n+1 .. n^2+2n   -> e inputs t_1..t_n, then
//                                e_i = floor((sum_{j != i} (t_j - t_i)) / n)
//                                centered mod (2B+1) into [-B, B]
// Encryption draws n further coefficients per attempt for r, r_i = a_k mod 2.

#include <cstdint>
#include <cstddef>
#include <cmath>
#include <string>
#include <vector>

#include "elwe/engel.hpp"
#include "elwe/errors.hpp"
#include "elwe/rational.hpp"

namespace elwe::lwe {

struct Params {
    std::uint32_t n = 0;      // dimension, >= 2
    std::uint32_t q = 0;      // ciphertext modulus, q > p
    std::uint32_t p = 0;      // A-matrix residue modulus, >= 2
    double sigma = 0.0;       // nominal noise width, > 0
    std::uint64_t alpha = 0;  // optional A-draw rejection threshold; 0 = off
};

// Centered noise bound. Keeps |<e,r>| <= n*B <= q/4, the decryption margin.
inline std::uint32_t noise_bound(const Params& p) {
    double three_sigma = std::floor(3.0 * p.sigma);
    std::uint64_t cap = static_cast<std::uint64_t>(p.q) / (4ull * p.n);
    std::uint64_t b = three_sigma >= 9.0e18 ? UINT64_MAX
                                            : static_cast<std::uint64_t>(three_sigma);
    if (cap < b) b = cap;
    return static_cast<std::uint32_t>(b);
}

inline void validate(const Params& p) {
    if (p.n < 2) throw ConfigError("params: n must be at least 2");
    if (p.p < 2) throw ConfigError("params: p must be at least 2");
    if (p.q <= p.p) throw ConfigError("params: q must exceed p");
    if (!(p.sigma > 0.0)) throw ConfigError("params: sigma must be positive");
    if (noise_bound(p) < 1)
        throw ConfigError("params: noise bound min(floor(3*sigma), floor(q/4n)) vanishes");
}

struct KeyPair {
    Params params;
    std::vector<std::uint32_t> a;  // n*n, row-major, entries in [0, p)
    std::vector<std::uint32_t> b;  // n, b = A s + e mod q
    std::vector<std::uint32_t> s;  // n, entries in [0, q)
    std::vector<std::int32_t> e;   // n, centered entries in [-B, B]
    std::uint64_t seed_fingerprint = 0;
};

struct PublicKey {
    Params params;
    std::vector<std::uint32_t> a;
    std::vector<std::uint32_t> b;
};

struct SecretKey {
    Params params;
    std::vector<std::uint32_t> s;
};

inline PublicKey public_part(const KeyPair& kp) { return {kp.params, kp.a, kp.b}; }
inline SecretKey secret_part(const KeyPair& kp) { return {kp.params, kp.s}; }

struct Ciphertext {
    std::uint32_t n = 0;
    std::uint32_t q = 0;
    std::vector<std::uint32_t> c1;  // n entries
    std::uint32_t c2 = 0;
};

namespace detail {

inline std::uint32_t mod_u64(std::uint64_t v, std::uint32_t m) {
    return static_cast<std::uint32_t>(v % m);
}

// Centered error block from n raw stream draws.
inline std::vector<std::int32_t> error_block(const std::vector<std::uint64_t>& t,
                                             std::uint32_t n, std::uint32_t bound) {
    BigInt sum = 0;
    for (std::uint64_t v : t) sum += BigInt(v);
    const std::uint32_t m = 2 * bound + 1;
    std::vector<std::int32_t> e(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        BigInt diff = sum - BigInt(n) * BigInt(t[i]);  // sum_{j != i} (t_j - t_i)
        BigInt mean;
        mpz_fdiv_q_ui(mean.get_mpz_t(), diff.get_mpz_t(), n);
        BigInt r;
        mpz_fdiv_r_ui(r.get_mpz_t(), mean.get_mpz_t(), m);  // in [0, 2B]
        long c = mpz_get_si(r.get_mpz_t());
        if (c > static_cast<long>(bound)) c -= m;
        e[i] = static_cast<std::int32_t>(c);
    }
    return e;
}

} // namespace detail

inline KeyPair keygen(const Params& params, const Rational& seed,
                      StreamConfig stream_config = {}) {
    validate(params);
    CoefficientStream stream(seed, stream_config);
    const std::uint32_t n = params.n;
    const std::uint64_t budget = 10ull * n * n;   // total draw budget for A

    KeyPair kp;
    kp.params = params;
    kp.seed_fingerprint = seed_fingerprint(seed);
    kp.a.reserve(static_cast<std::size_t>(n) * n);

    std::uint64_t draws = 0;
    while (kp.a.size() < static_cast<std::size_t>(n) * n) {
        if (draws >= budget)
            throw DomainError("keygen: generation exhausted (alpha rejection accepted "
                              "fewer than n^2 draws within the 10*n^2 budget)");
        std::uint64_t v = stream.next();
        ++draws;
        if (params.alpha != 0 && v > params.alpha) continue;  // skipped draw, position consumed
        kp.a.push_back(detail::mod_u64(v, params.p));
    }

    kp.s.resize(n);
    for (std::uint32_t i = 0; i < n; ++i)
        kp.s[i] = detail::mod_u64(stream.next(), params.q);

    std::vector<std::uint64_t> t = stream.next_block(n);
    kp.e = detail::error_block(t, n, noise_bound(params));

    kp.b.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        std::uint64_t acc = 0;
        const std::uint32_t* row = kp.a.data() + static_cast<std::size_t>(i) * n;
        for (std::uint32_t j = 0; j < n; ++j)
            acc += (static_cast<std::uint64_t>(row[j]) * kp.s[j]) % params.q;
        std::int64_t v = static_cast<std::int64_t>(acc % params.q) + kp.e[i];
        v %= static_cast<std::int64_t>(params.q);
        if (v < 0) v += params.q;
        kp.b[i] = static_cast<std::uint32_t>(v);
    }
    return kp;
}

// Deterministic O(stream) re-derivation of a key pair from its seed.
inline KeyPair regenerate_keypair(const Params& params, const Rational& seed,
                                  StreamConfig stream_config = {}) {
    return keygen(params, seed, stream_config);
}

namespace detail {

inline Ciphertext encrypt_bit_from_stream(const PublicKey& pk, int bit,
                                          CoefficientStream& stream) {
    const std::uint32_t n = pk.params.n;
    const std::uint32_t q = pk.params.q;
    std::vector<std::uint8_t> r(n);
    bool nonzero = false;
    // Initial draw plus at most 16 retries, each consuming a fresh n-block.
    for (int attempt = 0; attempt < 17 && !nonzero; ++attempt) {
        for (std::uint32_t i = 0; i < n; ++i) {
            r[i] = static_cast<std::uint8_t>(stream.next() & 1u);
            nonzero = nonzero || r[i];
        }
    }
    if (!nonzero)
        throw DomainError("encrypt: r stayed the zero vector after 16 retries");

    Ciphertext ct;
    ct.n = n;
    ct.q = q;
    ct.c1.resize(n);
    for (std::uint32_t j = 0; j < n; ++j) {
        std::uint64_t acc = 0;
        for (std::uint32_t i = 0; i < n; ++i)
            if (r[i]) acc += pk.a[static_cast<std::size_t>(i) * n + j];
        ct.c1[j] = detail::mod_u64(acc, q);
    }
    std::uint64_t acc = 0;
    for (std::uint32_t i = 0; i < n; ++i)
        if (r[i]) acc += pk.b[i];
    acc += static_cast<std::uint64_t>(bit ? q / 2 : 0);
    ct.c2 = detail::mod_u64(acc, q);
    return ct;
}

} // namespace detail

inline Ciphertext encrypt_bit(const PublicKey& pk, int bit, const Rational& encryption_seed,
                              StreamConfig stream_config = {}) {
    validate(pk.params);
    if (bit != 0 && bit != 1) throw DomainError("encrypt: message bit must be 0 or 1");
    CoefficientStream stream(encryption_seed, stream_config);
    return detail::encrypt_bit_from_stream(pk, bit, stream);
}

// Decision value: d = c2 - <s, c1> mod q, centered into ]-q/2, q/2].
inline std::int64_t decrypt_offset(const SecretKey& sk, const Ciphertext& ct) {
    if (ct.n != sk.params.n || ct.q != sk.params.q)
        throw DomainError("decrypt: ciphertext parameters do not match the key");
    const std::uint32_t q = sk.params.q;
    std::uint64_t acc = 0;
    for (std::uint32_t i = 0; i < ct.n; ++i)
        acc += (static_cast<std::uint64_t>(sk.s[i]) * ct.c1[i]) % q;
    std::int64_t d = static_cast<std::int64_t>(ct.c2 % q) -
                     static_cast<std::int64_t>(acc % q);
    d %= static_cast<std::int64_t>(q);
    if (d < 0) d += q;
    if (2 * d > static_cast<std::int64_t>(q)) d -= q;   // now in ]-q/2, q/2]
    return d;
}

// Bit is 0 exactly when |d| < q/4 (strict).
inline int decide_bit(std::int64_t centered, std::uint32_t q) {
    std::int64_t mag = centered < 0 ? -centered : centered;
    return (4 * mag < static_cast<std::int64_t>(q)) ? 0 : 1;
}

inline int decrypt_bit(const SecretKey& sk, const Ciphertext& ct) {
    return decide_bit(decrypt_offset(sk, ct), sk.params.q);
}

// MSB-first bit order within each byte; one ciphertext per bit, all drawn
// from a single stream over `encryption_seed`.
inline std::vector<Ciphertext> encrypt_bytes(const PublicKey& pk,
                                             const std::vector<std::uint8_t>& data,
                                             const Rational& encryption_seed,
                                             StreamConfig stream_config = {}) {
    validate(pk.params);
    CoefficientStream stream(encryption_seed, stream_config);
    std::vector<Ciphertext> out;
    out.reserve(data.size() * 8);
    for (std::uint8_t byte : data)
        for (int bit = 7; bit >= 0; --bit)
            out.push_back(detail::encrypt_bit_from_stream(pk, (byte >> bit) & 1, stream));
    return out;
}

inline std::vector<std::uint8_t> decrypt_bytes(const SecretKey& sk,
                                               const std::vector<Ciphertext>& cts) {
    if (cts.size() % 8 != 0)
        throw DomainError("decrypt: ciphertext count is not a whole number of bytes");
    std::vector<std::uint8_t> out(cts.size() / 8, 0);
    for (std::size_t i = 0; i < cts.size(); ++i)
        out[i / 8] = static_cast<std::uint8_t>((out[i / 8] << 1) | decrypt_bit(sk, cts[i]));
    return out;
}

} // namespace elwe::lwe
