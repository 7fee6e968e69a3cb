#pragma once
// Exact rational arithmetic: seed parsing, the logistic map, and the
// deterministic precision cap that keeps long logistic orbits affordable.
//
// Every quantity here is an exact GMP rational. Floating point is banned on
// these paths: the recursions downstream amplify any rounding into a
// completely different (and platform-dependent) orbit within ~50 steps.

#include <gmpxx.h>

#include <cstdint>
#include <cstddef>
#include <string>

#include "elwe/errors.hpp"

namespace elwe {

using Rational = mpq_class;
using BigInt = mpz_class;

// Denominator cap for logistic-map states. One exact logistic step squares
// the denominator, so an uncapped orbit grows as 2^steps bits; states whose
// denominator outgrows this many bits are rounded (half-up) to denominator
// 2^kStateBits. Rounding is pure integer arithmetic, hence reproducible.
inline constexpr unsigned kStateBits = 4096;

// Maximum number of fractional digits accepted in a decimal seed.
inline constexpr std::size_t kMaxSeedDigits = 10000;

namespace detail {

inline bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

} // namespace detail

// Parses "p/q" or a decimal string such as "0.375", "1", "1.0".
// Result is canonical (lowest terms, positive denominator).
inline Rational parse_seed(const std::string& text) {
    if (text.empty()) throw ConfigError("seed: empty string");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        std::string num = text.substr(0, slash);
        std::string den = text.substr(slash + 1);
        if (!detail::all_digits(num) || !detail::all_digits(den))
            throw ConfigError("seed: malformed rational '" + text + "'");
        BigInt d(den, 10);
        if (d == 0) throw ConfigError("seed: zero denominator");
        Rational r(BigInt(num, 10), d);
        r.canonicalize();
        return r;
    }
    auto dot = text.find('.');
    std::string whole = dot == std::string::npos ? text : text.substr(0, dot);
    std::string frac = dot == std::string::npos ? "" : text.substr(dot + 1);
    if (whole.empty()) whole = "0";
    if (!detail::all_digits(whole) || (!frac.empty() && !detail::all_digits(frac)))
        throw ConfigError("seed: malformed decimal '" + text + "'");
    if (frac.size() > kMaxSeedDigits)
        throw ConfigError("seed: more than 10000 fractional digits");
    BigInt scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    BigInt num = BigInt(whole, 10) * scale + (frac.empty() ? BigInt(0) : BigInt(frac, 10));
    Rational r(num, scale);
    r.canonicalize();
    return r;
}

// Deterministic text -> seed mapping for call sites that accept arbitrary
// strings: parseable seeds are taken literally, anything else is hashed
// (FNV-1a) into an odd-numerator dyadic in ]0,1[.
inline Rational seed_from_text(const std::string& text) {
    try {
        Rational r = parse_seed(text);
        if (r > 0 && r <= 1) return r;
    } catch (const ConfigError&) {
    }
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::uint64_t num = (h >> 3) | 1ull;   // odd, below 2^61
    Rational r(BigInt(static_cast<unsigned long>(num)), BigInt(1) << 61);
    r.canonicalize();
    return r;
}

// One exact logistic step x -> 4x(1-x).
inline Rational logistic_step(const Rational& x) {
    Rational r = 4 * x * (1 - x);
    r.canonicalize();
    return r;
}

// Rounds x (in [0,1]) to the nearest fraction with denominator 2^bits,
// half-up, when its denominator exceeds `bits` bits. No-op otherwise.
inline Rational cap_state(const Rational& x, unsigned bits = kStateBits) {
    if (mpz_sizeinbase(x.get_den().get_mpz_t(), 2) <= bits) return x;
    BigInt num = x.get_num();
    const BigInt& den = x.get_den();
    num <<= (bits + 1);
    num += den;
    BigInt scaled = num / (den << 1);   // floor(num*2^bits/den + 1/2)
    Rational r(scaled, BigInt(1) << bits);
    r.canonicalize();
    return r;
}

// Logistic successor used to derive fresh deterministic streams from one
// seed; falls back to the fixed state 2/5 when the orbit would die at 0/1.
inline Rational successor_seed(const Rational& x) {
    Rational y = cap_state(logistic_step(x));
    if (y == 0 || y == 1) y = Rational(2, 5);
    return y;
}

// 64-bit FNV-1a over the canonical "num/den" rendering. Used to tag key
// material with the seed it was derived from without storing the seed.
inline std::uint64_t seed_fingerprint(const Rational& x) {
    std::string s = x.get_num().get_str() + "/" + x.get_den().get_str();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace elwe
