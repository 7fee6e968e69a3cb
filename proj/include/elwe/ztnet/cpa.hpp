// Chosen-plaintext probe: repeated encryptions of one bit must not collide.
#pragma once

#include <cstddef>
#include <string>

#include "elwe/lwe.hpp"
#include "elwe/rational.hpp"

namespace elwe::ztnet {

struct CpaProbe {
    std::size_t trials = 0;
    std::size_t distinct_pairs = 0;
    double distinct_fraction = 0.0;
};

// Encrypts the same plaintext bit twice per trial under fresh randomness and
// counts how often the two ciphertexts differ. Anything below 1.0 means the
// randomizer is reusing r vectors.
inline CpaProbe cpa_probe(const lwe::Params& params, std::size_t trials, const std::string& seed_text) {
    if (trials == 0) throw ConfigError("cpa probe needs at least one trial");
    Rational seed = seed_from_text(seed_text);
    auto kp = lwe::keygen(params, seed);
    auto pk = lwe::public_part(kp);

    CpaProbe probe;
    probe.trials = trials;
    Rational enc_seed = successor_seed(seed);
    for (std::size_t t = 0; t < trials; ++t) {
        auto first = lwe::encrypt_bit(pk, 1, enc_seed);
        enc_seed = successor_seed(enc_seed);
        auto second = lwe::encrypt_bit(pk, 1, enc_seed);
        enc_seed = successor_seed(enc_seed);
        if (first.c1 != second.c1 || first.c2 != second.c2) ++probe.distinct_pairs;
    }
    probe.distinct_fraction = static_cast<double>(probe.distinct_pairs) / static_cast<double>(trials);
    return probe;
}

inline CpaProbe cpa_probe() { return cpa_probe(lwe::Params{32, 3329, 13, 3.2, 0}, 100, "3/7"); }

}  // namespace elwe::ztnet
