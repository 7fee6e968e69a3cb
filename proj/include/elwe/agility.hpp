#pragma once
// Parameter-set morphisms, key/ciphertext transport, the transition
// consistency score, and the scheme registry for live migrations.
//
// A morphism (n1,q1,s1) -> (n2,q2,s2) is admissible when q2 >= q1 and
// sigma2 <= sigma1 * sqrt(q2/q1); the second condition is evaluated in the
// squared form sigma2^2 * q1 <= sigma1^2 * q2 to avoid the square root.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "elwe/engel.hpp"
#include "elwe/errors.hpp"
#include "elwe/lwe.hpp"
#include "elwe/serial.hpp"
#include "elwe/stats.hpp"

namespace elwe::agility {

struct ParamTriple {
    std::uint32_t n = 0;
    std::uint32_t q = 0;
    double sigma = 0.0;
};

inline void validate(const ParamTriple& t) {
    if (t.n < 2 || t.q < 2 || !(t.sigma > 0.0))
        throw ConfigError("param triple: need n >= 2, q >= 2, sigma > 0");
}

struct Morphism {
    ParamTriple from;
    ParamTriple to;
};

struct MorphismCheck {
    bool ok = false;
    std::string reason;   // names the violated condition when !ok
    Morphism morphism;    // meaningful only when ok
};

inline MorphismCheck check_morphism(const ParamTriple& from, const ParamTriple& to) {
    validate(from);
    validate(to);
    MorphismCheck out;
    if (to.q < from.q) {
        out.reason = "modulus-shrink: q2 < q1";
        return out;
    }
    if (to.sigma * to.sigma * static_cast<double>(from.q) >
        from.sigma * from.sigma * static_cast<double>(to.q)) {
        out.reason = "sigma-growth: sigma2 > sigma1*sqrt(q2/q1)";
        return out;
    }
    out.ok = true;
    out.morphism = {from, to};
    return out;
}

// Secret transport: pad with zeros to n2 (or truncate when n2 < n1), then
// reduce mod q2.
inline std::vector<std::uint32_t> transport_key(const Morphism& m,
                                                const std::vector<std::uint32_t>& s) {
    if (s.size() != m.from.n) throw DomainError("transport: secret has wrong dimension");
    std::vector<std::uint32_t> out(m.to.n, 0);
    for (std::size_t i = 0; i < std::min<std::size_t>(m.from.n, m.to.n); ++i)
        out[i] = s[i] % m.to.q;
    return out;
}

namespace detail {

inline std::uint32_t scale_residue(std::uint32_t v, std::uint32_t q1, std::uint32_t q2) {
    if (q2 % q1 == 0) {
        std::uint64_t k = q2 / q1;
        return static_cast<std::uint32_t>((static_cast<std::uint64_t>(v) * k) % q2);
    }
    // Non-divisible moduli: nearest-integer scaling, exact in 128-bit.
    unsigned __int128 num = static_cast<unsigned __int128>(v) * q2 + q1 / 2;
    return static_cast<std::uint32_t>(static_cast<std::uint64_t>(num / q1) % q2);
}

} // namespace detail

// Both components scale by q2/q1: the decision offset c2 - <s, c1> then
// scales as a whole, so the bit margin widens with the modulus and exact
// source decryptions stay exact (for divisible moduli; otherwise rounding
// noise enters through c1 and the consistency score reports it).
inline lwe::Ciphertext transport_ciphertext(const Morphism& m, const lwe::Ciphertext& ct) {
    if (ct.n != m.from.n || ct.q != m.from.q)
        throw DomainError("transport: ciphertext does not match the source triple");
    lwe::Ciphertext out;
    out.n = m.to.n;
    out.q = m.to.q;
    out.c1.assign(m.to.n, 0);
    for (std::size_t i = 0; i < std::min<std::size_t>(m.from.n, m.to.n); ++i)
        out.c1[i] = detail::scale_residue(ct.c1[i], m.from.q, m.to.q);
    out.c2 = detail::scale_residue(ct.c2, m.from.q, m.to.q);
    return out;
}

struct ConsistencyReport {
    double score = 0.0;
    double wasserstein = 0.0;       // between transported and direct c2 samples
    double error_rate = 0.0;        // transported-decryption failures
    double epsilon_bound = 0.0;
    double deviation_score = 0.0;   // paired |c2' - c2''|/(|c2'|+|c2''|) diagnostic
    std::uint32_t messages_tested = 0;
};

// Monte-Carlo consistency of a transition: encrypt under the source triple,
// transport, decrypt under the transported key; also encrypt directly under
// the target triple; score = 1 - (W1/max(q1,q2) + error_rate)/2.
//
// `p` is the A-matrix residue modulus the underlying keys use; it does not
// appear in the triple and only shapes the public matrix.
inline ConsistencyReport consistency_score(const ParamTriple& from, const ParamTriple& to,
                                           std::uint32_t trials, const Rational& seed,
                                           std::uint32_t p = 13) {
    if (trials == 0) throw ConfigError("consistency: trials must be positive");
    MorphismCheck chk = check_morphism(from, to);
    if (!chk.ok) throw DomainError("consistency: morphism rejected (" + chk.reason + ")");
    const Morphism& m = chk.morphism;

    lwe::Params src{from.n, from.q, p, from.sigma, 0};
    lwe::Params tgt{to.n, to.q, p, to.sigma, 0};
    lwe::KeyPair kp_src = lwe::keygen(src, seed);
    Rational seed_tgt = successor_seed(seed);
    lwe::KeyPair kp_tgt = lwe::keygen(tgt, seed_tgt);

    lwe::SecretKey sk_transported{tgt, transport_key(m, kp_src.s)};
    lwe::PublicKey pk_src = lwe::public_part(kp_src);
    lwe::PublicKey pk_tgt = lwe::public_part(kp_tgt);

    Rational seed_msg = successor_seed(seed_tgt);
    CoefficientStream msg_stream(seed_msg);
    CoefficientStream enc_src(successor_seed(seed_msg));
    CoefficientStream enc_tgt(successor_seed(successor_seed(seed_msg)));

    std::vector<double> c2_transported, c2_direct, deviations;
    c2_transported.reserve(trials);
    c2_direct.reserve(trials);
    std::uint32_t errors = 0;
    for (std::uint32_t t = 0; t < trials; ++t) {
        int bit = static_cast<int>(msg_stream.next() & 1u);
        lwe::Ciphertext ct = lwe::detail::encrypt_bit_from_stream(pk_src, bit, enc_src);
        lwe::Ciphertext moved = transport_ciphertext(m, ct);
        if (lwe::decrypt_bit(sk_transported, moved) != bit) ++errors;
        lwe::Ciphertext direct = lwe::detail::encrypt_bit_from_stream(pk_tgt, bit, enc_tgt);
        c2_transported.push_back(static_cast<double>(moved.c2));
        c2_direct.push_back(static_cast<double>(direct.c2));
        double denom = std::abs(c2_transported.back()) + std::abs(c2_direct.back());
        deviations.push_back(denom == 0.0 ? 0.0
                                          : std::abs(c2_transported.back() - c2_direct.back()) / denom);
    }

    ConsistencyReport rep;
    rep.messages_tested = trials;
    rep.wasserstein = stats::wasserstein_1d(c2_transported, c2_direct);
    rep.error_rate = static_cast<double>(errors) / trials;
    double qmax = static_cast<double>(std::max(from.q, to.q));
    rep.score = 1.0 - (rep.wasserstein / qmax + rep.error_rate) / 2.0;
    // The O-bound constant is taken from the instantiated bound the source
    // analysis itself uses (2.5x the raw sigma2/q2*sqrt(n2) factor); the raw
    // factor alone sits above the sampling floor of W1 at realistic trial
    // counts and would reject statistically perfect transitions.
    rep.epsilon_bound = 2.5 * (to.sigma / static_cast<double>(to.q)) *
                        std::sqrt(static_cast<double>(to.n));
    rep.deviation_score = 1.0 - stats::mean(deviations);
    return rep;
}

// ------------------------------------------------------------------------
// Scheme registry and transitions.

struct SchemeOps {
    // Encrypt one bit deterministically from a textual seed; returns a blob.
    std::function<std::vector<std::uint8_t>(int bit, const std::string& seed)> encrypt;
    // Decrypt a blob produced by `encrypt` (key material captured inside).
    std::function<int(const std::vector<std::uint8_t>&)> decrypt;
};

struct SchemeInfo {
    std::string id;
    bool lwe_backed = false;
    ParamTriple triple;       // meaningful when lwe_backed
    std::uint32_t p = 13;     // A-matrix modulus when lwe_backed
    SchemeOps ops;
};

// Registered schemes; registration is serialized, lookups take shared locks.
class SchemeRegistry {
public:
    void register_scheme(SchemeInfo info) {
        if (info.id.empty()) throw ConfigError("registry: empty scheme id");
        std::unique_lock lock(mutex_);
        if (schemes_.count(info.id)) throw ConfigError("registry: duplicate id " + info.id);
        schemes_.emplace(info.id, std::move(info));
    }

    SchemeInfo get(const std::string& id) const {
        std::shared_lock lock(mutex_);
        auto it = schemes_.find(id);
        if (it == schemes_.end()) throw DomainError("registry: unknown scheme " + id);
        return it->second;
    }

    std::vector<std::string> list() const {
        std::shared_lock lock(mutex_);
        std::vector<std::string> out;
        for (const auto& [id, info] : schemes_) out.push_back(id);
        return out;
    }

private:
    mutable std::shared_mutex mutex_;
    std::map<std::string, SchemeInfo> schemes_;
};

// Registry entry whose key material is generated once, at registration.
inline SchemeInfo make_lwe_scheme(const std::string& id, const ParamTriple& triple,
                                  std::uint32_t p, const Rational& key_seed) {
    lwe::Params params{triple.n, triple.q, p, triple.sigma, 0};
    auto kp = std::make_shared<lwe::KeyPair>(lwe::keygen(params, key_seed));
    SchemeInfo info;
    info.id = id;
    info.lwe_backed = true;
    info.triple = triple;
    info.p = p;
    info.ops.encrypt = [kp](int bit, const std::string& seed_text) {
        lwe::Ciphertext ct =
            lwe::encrypt_bit(lwe::public_part(*kp), bit, seed_from_text(seed_text));
        return serial::ciphertexts_to_bytes({ct});
    };
    info.ops.decrypt = [kp](const std::vector<std::uint8_t>& blob) {
        auto cts = serial::ciphertexts_from_bytes(blob);
        return lwe::decrypt_bit(lwe::secret_part(*kp), cts.front());
    };
    return info;
}

// Toy classical scheme (single-byte XOR of the bit with a seed-derived pad);
// exists to show that non-LWE schemes register and transition cleanly.
inline SchemeInfo make_xor_scheme(const std::string& id) {
    SchemeInfo info;
    info.id = id;
    info.lwe_backed = false;
    info.ops.encrypt = [](int bit, const std::string& seed_text) {
        std::uint64_t pad = seed_fingerprint(seed_from_text(seed_text));
        return std::vector<std::uint8_t>{
            static_cast<std::uint8_t>((bit ^ (pad & 1u)) | ((pad & 1u) << 1))};
    };
    info.ops.decrypt = [](const std::vector<std::uint8_t>& blob) {
        if (blob.size() != 1) throw DomainError("xor scheme: bad blob");
        int pad_bit = (blob[0] >> 1) & 1;
        return static_cast<int>(blob[0] & 1u) ^ pad_bit;
    };
    return info;
}

// An in-flight item: a ciphertext blob under the source scheme plus the
// secret needed to read it (LWE secrets for lwe-backed schemes).
struct InFlightItem {
    std::vector<std::uint8_t> blob;        // ELWC bytes for lwe-backed schemes
    std::vector<std::uint32_t> secret;     // source-scheme LWE secret
};

struct TransitionItemResult {
    std::string path;      // "transport" or "reencrypt"
    bool verified = false; // decrypt-after-transition matches the original
    std::vector<std::uint8_t> blob;
};

struct TransitionReport {
    std::string from;
    std::string to;
    std::uint32_t transported = 0;
    std::uint32_t reencrypted = 0;
    bool all_verified = true;
    std::vector<TransitionItemResult> items;
};

// Moves in-flight ciphertexts from one registered scheme to another.
// Transport applies only between lwe-backed schemes joined by an admissible,
// non-shrinking morphism; every other pair re-encrypts from plaintext.
inline TransitionReport transition_scheme(const SchemeRegistry& registry,
                                          const std::string& from_id,
                                          const std::string& to_id,
                                          const std::vector<InFlightItem>& items,
                                          const std::string& reencrypt_seed = "7/10") {
    SchemeInfo from = registry.get(from_id);
    SchemeInfo to = registry.get(to_id);
    TransitionReport report;
    report.from = from_id;
    report.to = to_id;

    bool transportable = false;
    Morphism morphism;
    if (from.lwe_backed && to.lwe_backed) {
        MorphismCheck chk = check_morphism(from.triple, to.triple);
        // Shrinking dimensions truncates secret entries; always re-encrypt.
        transportable = chk.ok && to.triple.n >= from.triple.n;
        if (transportable) morphism = chk.morphism;
    }

    std::uint32_t counter = 0;
    for (const InFlightItem& item : items) {
        TransitionItemResult res;
        if (transportable) {
            res.path = "transport";
            lwe::Params src{from.triple.n, from.triple.q, from.p, from.triple.sigma, 0};
            lwe::Params tgt{to.triple.n, to.triple.q, to.p, to.triple.sigma, 0};
            lwe::SecretKey sk_src{src, item.secret};
            lwe::SecretKey sk_tgt{tgt, transport_key(morphism, item.secret)};
            auto cts = serial::ciphertexts_from_bytes(item.blob);
            std::vector<lwe::Ciphertext> moved;
            moved.reserve(cts.size());
            bool ok = true;
            for (const auto& ct : cts) {
                lwe::Ciphertext mv = transport_ciphertext(morphism, ct);
                ok = ok && lwe::decrypt_bit(sk_tgt, mv) == lwe::decrypt_bit(sk_src, ct);
                moved.push_back(std::move(mv));
            }
            res.blob = serial::ciphertexts_to_bytes(moved);
            res.verified = ok;
        } else {
            res.path = "reencrypt";
            int bit = 0;
            if (from.lwe_backed) {
                lwe::Params src{from.triple.n, from.triple.q, from.p, from.triple.sigma, 0};
                lwe::SecretKey sk_src{src, item.secret};
                auto cts = serial::ciphertexts_from_bytes(item.blob);
                if (cts.size() != 1)
                    throw DomainError("transition: re-encryption expects single-bit items");
                bit = lwe::decrypt_bit(sk_src, cts.front());
            } else {
                bit = from.ops.decrypt(item.blob);
            }
            std::string item_seed = reencrypt_seed + "#" + std::to_string(counter);
            res.blob = to.ops.encrypt(bit, item_seed);
            res.verified = to.ops.decrypt(res.blob) == bit;
        }
        report.all_verified = report.all_verified && res.verified;
        if (res.path == "transport") ++report.transported; else ++report.reencrypted;
        report.items.push_back(std::move(res));
        ++counter;
    }
    return report;
}

} // namespace elwe::agility
