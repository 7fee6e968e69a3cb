#pragma once
// Wiretap-channel analysis: AWGN secure rates, secure-region grids, the
// epsilon-security condition, and an information-theoretic rejection
// simulation on top of the LWE channel.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "elwe/errors.hpp"
#include "elwe/lwe.hpp"
#include "elwe/noise.hpp"

namespace elwe::wiretap {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double awgn_capacity_bits(double snr_linear) {
    return 0.5 * std::log2(1.0 + snr_linear);
}

// Secure rate in bits per channel use. The eavesdropper's effective SNR is
// degraded by `delta_db`; the rate clamps at zero when the eavesdropper is
// at least as good as the main channel.
inline double secure_rate(double main_snr_db, double eve_snr_db, double delta_db) {
    double eff_eve_db = eve_snr_db - delta_db;
    double rate = awgn_capacity_bits(db_to_linear(main_snr_db)) -
                  awgn_capacity_bits(db_to_linear(eff_eve_db));
    return rate > 0.0 ? rate : 0.0;
}

struct RegionPoint {
    double main_db = 0.0;
    double eve_db = 0.0;
    double delta_db = 0.0;
    double rate = 0.0;
};

// Row-major grid: delta slices outermost, then main SNR rows, then eve SNR
// columns; matches the CSV rendering order.
inline std::vector<RegionPoint> security_region(const std::vector<double>& main_db,
                                                const std::vector<double>& eve_db,
                                                const std::vector<double>& delta_db) {
    if (main_db.empty() || eve_db.empty() || delta_db.empty())
        throw ConfigError("security_region: empty grid axis");
    std::vector<RegionPoint> out;
    out.reserve(main_db.size() * eve_db.size() * delta_db.size());
    for (double d : delta_db)
        for (double m : main_db)
            for (double e : eve_db)
                out.push_back({m, e, d, secure_rate(m, e, d)});
    return out;
}

// Epsilon-security: holds exactly when sigma_eve^2 > sigma_main^2 + delta
// (strict).
inline bool epsilon_security_check(double sigma_main, double sigma_eve, double delta) {
    if (!(sigma_main >= 0.0) || !(sigma_eve >= 0.0))
        throw DomainError("epsilon_security_check: sigmas must be non-negative");
    return sigma_eve * sigma_eve > sigma_main * sigma_main + delta;
}

enum class ItsMode { categorical, traditional };

inline ItsMode parse_its_mode(const std::string& s) {
    if (s == "categorical") return ItsMode::categorical;
    if (s == "traditional") return ItsMode::traditional;
    throw ConfigError("its mode must be 'categorical' or 'traditional'");
}

struct ItsConfig {
    lwe::Params params;       // LWE channel parameters (sigma doubles as sigma_main)
    double adv_sigma = 0.0;   // adversarial noise scale; per-trial draw is adv_sigma*U[0,2]
    double delta = 0.0;       // epsilon-security slack
    std::uint32_t trials = 0;
    ItsMode mode = ItsMode::categorical;
    std::uint64_t rng_seed = 1;
};

struct ItsReport {
    std::uint32_t trials = 0;
    std::uint32_t accepted = 0;
    std::uint32_t rejected = 0;
    std::uint32_t errors = 0;       // wrong decryptions among accepted
    double rejection_rate = 0.0;
    double error_rate = 0.0;        // errors / accepted (0 when nothing accepted)
};

// Per trial: draw an adversarial sigma, run the epsilon-security check with
// the drawn value as the eavesdropper noise (categorical mode rejects on
// failure; traditional never rejects), then transmit one random bit through
// the LWE channel with the adversarial noise injected on c2.
inline ItsReport its_simulate(const ItsConfig& cfg) {
    lwe::validate(cfg.params);
    if (cfg.trials == 0) throw ConfigError("its-sim: trials must be positive");
    if (!(cfg.adv_sigma >= 0.0)) throw ConfigError("its-sim: adv_sigma must be >= 0");

    Rational key_seed = seed_from_text("its:" + std::to_string(cfg.rng_seed));
    lwe::KeyPair kp = lwe::keygen(cfg.params, key_seed);
    lwe::PublicKey pk = lwe::public_part(kp);
    lwe::SecretKey sk = lwe::secret_part(kp);

    std::mt19937_64 rng(cfg.rng_seed);
    noise::GaussianSampler unit(1.0, rng());
    CoefficientStream enc_stream(successor_seed(key_seed));

    ItsReport rep;
    rep.trials = cfg.trials;
    for (std::uint32_t t = 0; t < cfg.trials; ++t) {
        double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
        double adv = cfg.adv_sigma * 2.0 * u;
        bool secure = epsilon_security_check(cfg.params.sigma, adv, cfg.delta);
        int bit = static_cast<int>(rng() & 1u);
        if (cfg.mode == ItsMode::categorical && !secure) {
            ++rep.rejected;
            continue;
        }
        lwe::Ciphertext ct = lwe::detail::encrypt_bit_from_stream(pk, bit, enc_stream);
        std::int64_t inject = std::llround(adv * unit.next());
        std::int64_t c2 = (static_cast<std::int64_t>(ct.c2) + inject) %
                          static_cast<std::int64_t>(cfg.params.q);
        if (c2 < 0) c2 += cfg.params.q;
        ct.c2 = static_cast<std::uint32_t>(c2);
        ++rep.accepted;
        if (lwe::decrypt_bit(sk, ct) != bit) ++rep.errors;
    }
    rep.rejection_rate = static_cast<double>(rep.rejected) / cfg.trials;
    rep.error_rate = rep.accepted == 0
                         ? 0.0
                         : static_cast<double>(rep.errors) / static_cast<double>(rep.accepted);
    return rep;
}

} // namespace elwe::wiretap
