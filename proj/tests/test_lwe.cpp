// Key generation stream contract, decision boundaries, and round trips.
#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "elwe/engel.hpp"
#include "elwe/errors.hpp"
#include "elwe/lwe.hpp"
#include "elwe/rational.hpp"

using namespace elwe;

TEST_CASE("parameter validation rejects each broken field", "[lwe]") {
    CHECK_THROWS_AS(lwe::validate({1, 4096, 13, 3.2, 0}), ConfigError);
    CHECK_THROWS_AS(lwe::validate({16, 13, 13, 3.2, 0}), ConfigError);
    CHECK_THROWS_AS(lwe::validate({16, 4096, 1, 3.2, 0}), ConfigError);
    CHECK_THROWS_AS(lwe::validate({16, 4096, 13, 0.0, 0}), ConfigError);
    // sigma too small: floor(3 * 0.1) = 0 kills the noise bound.
    CHECK_THROWS_AS(lwe::validate({16, 4096, 13, 0.1, 0}), ConfigError);
    // q too small for n: floor(q / 4n) = 0 regardless of sigma.
    CHECK_THROWS_AS(lwe::validate({512, 1024, 13, 3.2, 0}), ConfigError);
    CHECK_NOTHROW(lwe::validate({256, 4096, 13, 3.2, 0}));
}

TEST_CASE("noise bound takes the binding minimum", "[lwe]") {
    CHECK(lwe::noise_bound({256, 4096, 13, 3.2, 0}) == 4);   // q/4n = 4 < 9
    CHECK(lwe::noise_bound({32, 3329, 13, 3.2, 0}) == 9);    // 3*sigma = 9 < 26
    CHECK(lwe::noise_bound({2, 4096, 13, 0.5, 0}) == 1);
}

TEST_CASE("keygen consumes the stream in the documented order", "[lwe]") {
    const lwe::Params params{4, 4096, 13, 3.2, 0};
    const Rational seed(3, 10);
    lwe::KeyPair kp = lwe::keygen(params, seed);

    CoefficientStream stream(seed);
    const std::uint32_t n = params.n;
    // A: first n^2 draws mod p.
    for (std::size_t i = 0; i < static_cast<std::size_t>(n) * n; ++i) {
        REQUIRE(kp.a[i] == stream.next() % params.p);
    }
    // s: next n draws mod q.
    for (std::uint32_t i = 0; i < n; ++i) {
        REQUIRE(kp.s[i] == stream.next() % params.q);
    }
    // e: centered differences of the next n draws.
    std::vector<std::uint64_t> t = stream.next_block(n);
    const std::uint32_t bound = lwe::noise_bound(params);
    long long sum = 0;
    for (auto v : t) sum += static_cast<long long>(v);
    for (std::uint32_t i = 0; i < n; ++i) {
        long long diff = sum - static_cast<long long>(n) * static_cast<long long>(t[i]);
        long long mean = diff >= 0 ? diff / n : -((-diff + n - 1) / n);   // floor division
        long long m = 2 * static_cast<long long>(bound) + 1;
        long long c = ((mean % m) + m) % m;
        if (c > bound) c -= m;
        REQUIRE(kp.e[i] == c);
        REQUIRE(kp.e[i] >= -static_cast<std::int32_t>(bound));
        REQUIRE(kp.e[i] <= static_cast<std::int32_t>(bound));
    }
    // b = A s + e mod q.
    for (std::uint32_t i = 0; i < n; ++i) {
        std::uint64_t acc = 0;
        for (std::uint32_t j = 0; j < n; ++j)
            acc += static_cast<std::uint64_t>(kp.a[i * n + j]) * kp.s[j];
        long long v = static_cast<long long>(acc % params.q) + kp.e[i];
        v %= params.q;
        if (v < 0) v += params.q;
        REQUIRE(kp.b[i] == static_cast<std::uint32_t>(v));
    }
}

TEST_CASE("keygen is reproducible from the seed", "[lwe]") {
    const lwe::Params params{16, 4096, 13, 3.2, 0};
    auto kp1 = lwe::keygen(params, Rational(3, 7));
    auto kp2 = lwe::regenerate_keypair(params, Rational(3, 7));
    CHECK(kp1.a == kp2.a);
    CHECK(kp1.b == kp2.b);
    CHECK(kp1.s == kp2.s);
    CHECK(kp1.e == kp2.e);
    CHECK(kp1.seed_fingerprint == kp2.seed_fingerprint);

    auto kp3 = lwe::keygen(params, Rational(4, 7));
    CHECK(kp1.a != kp3.a);
}

TEST_CASE("alpha rejection filters the A draws it documents", "[lwe]") {
    const lwe::Params params{4, 4096, 13, 3.2, 6};
    const Rational seed(3, 10);

    // Predict the accepted draws from the raw stream.
    CoefficientStream stream(seed);
    std::vector<std::uint32_t> expected;
    std::uint64_t draws = 0;
    const std::uint64_t budget = 10ull * params.n * params.n;
    while (expected.size() < static_cast<std::size_t>(params.n) * params.n && draws < budget) {
        std::uint64_t v = stream.next();
        ++draws;
        if (v > params.alpha) continue;
        expected.push_back(static_cast<std::uint32_t>(v % params.p));
    }

    if (expected.size() == static_cast<std::size_t>(params.n) * params.n) {
        auto kp = lwe::keygen(params, seed);
        CHECK(kp.a == expected);
    } else {
        CHECK_THROWS_AS(lwe::keygen(params, seed), DomainError);
    }

    // A threshold no draw exceeds changes nothing.
    lwe::Params open = params;
    open.alpha = UINT64_MAX;
    lwe::Params off = params;
    off.alpha = 0;
    CHECK(lwe::keygen(open, seed).a == lwe::keygen(off, seed).a);
}

TEST_CASE("decision boundaries sit exactly at q/4", "[lwe]") {
    const std::uint32_t q = 4096;
    CHECK(lwe::decide_bit(0, q) == 0);
    CHECK(lwe::decide_bit(q / 4 - 1, q) == 0);
    CHECK(lwe::decide_bit(q / 4, q) == 1);
    CHECK(lwe::decide_bit(q / 2, q) == 1);
    CHECK(lwe::decide_bit(-(static_cast<std::int64_t>(q) / 4 - 1), q) == 0);
    CHECK(lwe::decide_bit(-(static_cast<std::int64_t>(q) / 4), q) == 1);

    // Odd modulus: strict inequality 4|d| < q.
    CHECK(lwe::decide_bit(832, 3329) == 0);   // 4*832 = 3328 < 3329
    CHECK(lwe::decide_bit(833, 3329) == 1);
}

TEST_CASE("single-bit round trip over several seeds", "[lwe]") {
    const lwe::Params params{32, 3329, 13, 3.2, 0};
    auto kp = lwe::keygen(params, Rational(3, 7));
    auto pk = lwe::public_part(kp);
    auto sk = lwe::secret_part(kp);

    Rational enc_seed(3, 10);
    for (int i = 0; i < 50; ++i) {
        for (int bit : {0, 1}) {
            auto ct = lwe::encrypt_bit(pk, bit, enc_seed);
            CHECK(lwe::decrypt_bit(sk, ct) == bit);
        }
        enc_seed = successor_seed(enc_seed);
    }
}

TEST_CASE("decrypt offset stays within the centered interval", "[lwe]") {
    const lwe::Params params{32, 3329, 13, 3.2, 0};
    auto kp = lwe::keygen(params, Rational(5, 8));
    auto ct = lwe::encrypt_bit(lwe::public_part(kp), 1, Rational(3, 10));
    std::int64_t d = lwe::decrypt_offset(lwe::secret_part(kp), ct);
    CHECK(d > -static_cast<std::int64_t>(params.q) / 2);
    CHECK(d <= static_cast<std::int64_t>(params.q) / 2);
}

TEST_CASE("byte encryption round-trips and is seed-deterministic", "[lwe]") {
    const lwe::Params params{16, 4096, 13, 3.2, 0};
    auto kp = lwe::keygen(params, Rational(3, 7));
    auto pk = lwe::public_part(kp);
    auto sk = lwe::secret_part(kp);

    std::string text = "hello world";
    std::vector<std::uint8_t> data(text.begin(), text.end());
    auto cts = lwe::encrypt_bytes(pk, data, Rational(3, 10));
    REQUIRE(cts.size() == data.size() * 8);
    CHECK(lwe::decrypt_bytes(sk, cts) == data);

    auto cts2 = lwe::encrypt_bytes(pk, data, Rational(3, 10));
    REQUIRE(cts2.size() == cts.size());
    for (std::size_t i = 0; i < cts.size(); ++i) {
        CHECK(cts2[i].c1 == cts[i].c1);
        CHECK(cts2[i].c2 == cts[i].c2);
    }
}

TEST_CASE("mismatched ciphertext parameters are rejected", "[lwe]") {
    auto kp = lwe::keygen({16, 4096, 13, 3.2, 0}, Rational(3, 7));
    auto other = lwe::keygen({32, 3329, 13, 3.2, 0}, Rational(3, 7));
    auto ct = lwe::encrypt_bit(lwe::public_part(kp), 0, Rational(3, 10));
    CHECK_THROWS_AS(lwe::decrypt_bit(lwe::secret_part(other), ct), DomainError);
    CHECK_THROWS_AS(lwe::encrypt_bit(lwe::public_part(kp), 2, Rational(3, 10)), DomainError);
    CHECK_THROWS_AS(lwe::decrypt_bytes(lwe::secret_part(kp), {ct}), DomainError);
}
