#pragma once
// Engel expansions over exact rationals, the logistic-map shuffle, and the
// unbounded deterministic coefficient stream built from both.
//
// Expansion recursion, for x_1 = seed in ]0,1]:
//     a_i = ceil(1/x_i),  x_{i+1} = a_i * x_i - 1,  stop when x_{i+1} = 0.
// The denominator of x_{i+1} always divides the denominator of x_i, so a
// single expansion never grows its state; only logistic re-seeding does.

#include <cstdint>
#include <cstddef>
#include <vector>

#include "elwe/errors.hpp"
#include "elwe/rational.hpp"

namespace elwe {

struct EngelSequence {
    Rational seed;
    std::vector<BigInt> coefficients;
    bool terminated = false;   // expansion reached x = 0 within max_terms
};

namespace detail {

// ceil(1/x) for rational x = num/den in ]0,1].
inline BigInt inverse_ceil(const Rational& x) {
    BigInt a;
    mpz_cdiv_q(a.get_mpz_t(), x.get_den().get_mpz_t(), x.get_num().get_mpz_t());
    return a;
}

} // namespace detail

inline void require_unit_interval_seed(const Rational& seed) {
    if (seed <= 0 || seed > 1)
        throw DomainError("seed must lie in ]0,1]");
}

inline EngelSequence engel_expand(const Rational& seed, std::size_t max_terms = 100000) {
    require_unit_interval_seed(seed);
    if (max_terms == 0) throw ConfigError("max_terms must be positive");
    EngelSequence out;
    out.seed = seed;
    Rational x = seed;
    for (std::size_t i = 0; i < max_terms; ++i) {
        BigInt a = detail::inverse_ceil(x);
        out.coefficients.push_back(a);
        x = a * x - 1;
        x.canonicalize();
        if (x == 0) {
            out.terminated = true;
            break;
        }
    }
    return out;
}

// Exact value of a finite expansion: sum_i 1/(a_1 a_2 ... a_i).
// For a terminated sequence this reproduces the seed exactly.
inline Rational engel_reconstruct(const std::vector<BigInt>& coefficients) {
    Rational sum = 0;
    BigInt product = 1;
    for (const BigInt& a : coefficients) {
        product *= a;
        sum += Rational(1, product);
    }
    sum.canonicalize();
    return sum;
}

// ------------------------------------------------------------------------
// Logistic-map shuffle.

struct ShuffleState {
    Rational x;        // in [0,1]; unlike expansion seeds, 0 and 1 are legal
    std::size_t n = 0; // live window length

    ShuffleState(Rational x0, std::size_t window) : x(std::move(x0)), n(window) {
        if (x < 0 || x > 1) throw DomainError("shuffle state must lie in [0,1]");
        if (n == 0) throw ConfigError("shuffle window must be positive");
    }
};

// Emits `count` indices j_k = floor(N * x_k), advancing x_{k+1} = 4x_k(1-x_k).
// Indices satisfy 0 <= j_k <= N (j = N only when x = 1 exactly).
inline std::vector<std::size_t> logistic_indices(ShuffleState& state, std::size_t count) {
    if (count == 0) throw ConfigError("count must be positive");
    std::vector<std::size_t> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        BigInt j;
        BigInt scaled = BigInt(static_cast<unsigned long>(state.n)) * state.x.get_num();
        mpz_fdiv_q(j.get_mpz_t(), scaled.get_mpz_t(), state.x.get_den().get_mpz_t());
        out.push_back(static_cast<std::size_t>(j.get_ui()));
        state.x = cap_state(logistic_step(state.x));
    }
    return out;
}

// Swap pass over a window of N values: the index list j_1..j_N is drawn
// first, then a_i <-> a_{j_i} is applied for i = 1..N (1-based). j = 0 and
// j = i are self-swaps.
template <typename T>
inline void shuffle_coefficients(std::vector<T>& values, ShuffleState& state) {
    if (values.size() != state.n)
        throw ConfigError("shuffle window length does not match state");
    std::vector<std::size_t> js = logistic_indices(state, values.size());
    for (std::size_t i = 1; i <= values.size(); ++i) {
        std::size_t j = js[i - 1];
        if (j >= 1 && j != i)
            std::swap(values[i - 1], values[j - 1]);
    }
}

// ------------------------------------------------------------------------
// Coefficient stream.

struct StreamConfig {
    unsigned max_coefficient_bits = 64; // re-seed once a coefficient outgrows this
    std::size_t block_size = 64;        // production granularity (CLI chunking, retry draws)
    unsigned state_bits = kStateBits;   // logistic-state denominator cap
};

// Unbounded deterministic supply of Engel coefficients. Runs the expansion
// recursion and, whenever it terminates or a coefficient outgrows
// max_coefficient_bits, derives a successor state by one logistic step on
// the last non-zero fractional state (or on the original seed when that
// state is degenerate) and restarts. Two streams with equal seed and config
// emit identical sequences.
class CoefficientStream {
public:
    explicit CoefficientStream(Rational seed, StreamConfig config = {})
        : seed_(std::move(seed)), config_(config) {
        require_unit_interval_seed(seed_);
        if (config_.max_coefficient_bits == 0 || config_.block_size == 0)
            throw ConfigError("stream configuration values must be positive");
        if (config_.max_coefficient_bits > 64)
            throw ConfigError("max_coefficient_bits above 64 does not fit the emitted cell type");
        x_ = seed_;
        last_nonzero_ = seed_;
    }

    std::uint64_t next() {
        for (;;) {
            if (x_ == 0) reseed(last_nonzero_);
            BigInt a = detail::inverse_ceil(x_);
            if (mpz_sizeinbase(a.get_mpz_t(), 2) > config_.max_coefficient_bits) {
                reseed(x_);
                continue;
            }
            Rational next_x = a * x_ - 1;
            next_x.canonicalize();
            if (next_x != 0) last_nonzero_ = next_x;
            x_ = next_x;
            ++position_;
            return static_cast<std::uint64_t>(mpz_get_ui(a.get_mpz_t()));
        }
    }

    std::vector<std::uint64_t> next_block(std::size_t count) {
        std::vector<std::uint64_t> out;
        out.reserve(count);
        for (std::size_t i = 0; i < count; ++i) out.push_back(next());
        return out;
    }

    std::size_t position() const { return position_; }
    const StreamConfig& config() const { return config_; }
    const Rational& seed() const { return seed_; }

private:
    void reseed(const Rational& from) {
        Rational candidate = (from == 0 || from == 1) ? seed_ : from;
        Rational next = cap_state(logistic_step(candidate), config_.state_bits);
        if (next == 0 || next == 1)
            next = Rational(2, 5); // dyadic orbits die at 0/1; fixed documented restart
        x_ = next;
        last_nonzero_ = next;
    }

    Rational seed_;
    Rational x_;
    Rational last_nonzero_;
    StreamConfig config_;
    std::size_t position_ = 0;
};

} // namespace elwe
