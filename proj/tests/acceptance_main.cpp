// Acceptance suite: one [PASS]/[FAIL] line per criterion, nonzero exit on failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "elwe/agility.hpp"
#include "elwe/engel.hpp"
#include "elwe/lwe.hpp"
#include "elwe/noise.hpp"
#include "elwe/rational.hpp"
#include "elwe/stats.hpp"
#include "elwe/wiretap.hpp"
#include "elwe/ztnet.hpp"

using namespace elwe;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::int64_t kNowMs = 1'700'000'000'000;

struct CriterionResult {
    bool pass = false;
    std::string detail;   // printed on the status line, may mention timing
    std::string report;   // deterministic content for the rerun comparison
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ------------------------------------------------------------ criterion 1 --

std::vector<Rational> round_trip_seed_set() {
    std::mt19937_64 rng(101);
    std::vector<Rational> seeds;
    seeds.reserve(1000);
    for (int i = 0; i < 1000; ++i) {
        long den = static_cast<long>(rng() % 1'000'000) + 1;
        long num = static_cast<long>(rng() % static_cast<std::uint64_t>(den)) + 1;
        Rational x(num, den);
        x.canonicalize();
        seeds.push_back(std::move(x));
    }
    return seeds;
}

CriterionResult criterion1() {
    auto t0 = Clock::now();
    CriterionResult r;
    std::size_t failures = 0;
    std::size_t longest = 0;
    r.report = "engel round trip over 1000 rational seeds, denominators <= 1e6\n";
    for (const Rational& x : round_trip_seed_set()) {
        EngelSequence seq = engel_expand(x);
        longest = std::max(longest, seq.coefficients.size());
        if (!seq.terminated || engel_reconstruct(seq.coefficients) != x) ++failures;
    }
    double secs = seconds_since(t0);
    r.report += "failures=" + std::to_string(failures) +
                " longest_expansion=" + std::to_string(longest) + "\n";
    r.pass = failures == 0 && secs < 10.0;
    r.detail = "1000/1000 exact, longest " + std::to_string(longest) + " terms, " +
               fmt(secs) + "s";
    if (failures != 0) r.detail = std::to_string(failures) + " reconstruction failures";
    else if (secs >= 10.0) r.detail += " (over the 10s budget)";
    return r;
}

// ------------------------------------------------------------ criterion 2 --

CriterionResult criterion2() {
    CriterionResult r;
    std::size_t violations = 0;
    for (const Rational& x : round_trip_seed_set()) {
        EngelSequence seq = engel_expand(x);
        for (std::size_t i = 1; i < seq.coefficients.size(); ++i) {
            if (seq.coefficients[i] < seq.coefficients[i - 1]) ++violations;
        }
    }
    r.pass = violations == 0;
    r.detail = violations == 0 ? "coefficients non-decreasing in all 1000 expansions"
                               : std::to_string(violations) + " ordering violations";
    return r;
}

// ------------------------------------------------------------ criterion 3 --

CriterionResult criterion3() {
    auto t0 = Clock::now();
    CriterionResult r;
    const lwe::Params params{256, 4096, 13, 3.2, 0};
    const char* key_seeds[4] = {"3/7", "5/11", "7/13", "9/17"};
    std::mt19937_64 rng(303);
    std::size_t errors = 0;
    r.report = "lwe round trip n=256 q=4096 p=13 sigma=3.2, 1000 bits\n";
    for (const char* seed_text : key_seeds) {
        Rational key_seed = seed_from_text(seed_text);
        lwe::KeyPair kp = lwe::keygen(params, key_seed);
        lwe::PublicKey pk = lwe::public_part(kp);
        lwe::SecretKey sk = lwe::secret_part(kp);
        Rational enc_seed = successor_seed(key_seed);
        std::size_t batch_errors = 0;
        for (int i = 0; i < 250; ++i) {
            int bit = static_cast<int>(rng() & 1);
            lwe::Ciphertext ct = lwe::encrypt_bit(pk, bit, enc_seed);
            enc_seed = successor_seed(enc_seed);
            if (lwe::decrypt_bit(sk, ct) != bit) ++batch_errors;
        }
        errors += batch_errors;
        r.report += std::string("key_seed=") + seed_text + " bits=250 errors=" +
                    std::to_string(batch_errors) + "\n";
    }
    double secs = seconds_since(t0);
    r.pass = errors == 0 && secs < 60.0;
    r.detail = std::to_string(1000 - errors) + "/1000 bits correct, " + fmt(secs) + "s";
    return r;
}

// ------------------------------------------------------------ criterion 4 --

CriterionResult criterion4() {
    CriterionResult r;
    std::size_t mismatches = 0;
    for (std::uint32_t q : {4096u, 64u, 3328u}) {
        std::int64_t quarter = q / 4;
        struct { std::int64_t d; int want; } cases[] = {
            {0, 0}, {quarter - 1, 0}, {quarter, 1}, {static_cast<std::int64_t>(q / 2), 1}};
        for (const auto& c : cases) {
            if (lwe::decide_bit(c.d, q) != c.want) ++mismatches;
        }
    }
    r.pass = mismatches == 0;
    r.detail = mismatches == 0 ? "offsets {0, q/4-1, q/4, q/2} decode to {0,0,1,1}"
                               : std::to_string(mismatches) + " boundary mismatches";
    return r;
}

// ------------------------------------------------------------ criterion 5 --

CriterionResult criterion5() {
    auto t0 = Clock::now();
    CriterionResult r;
    const agility::ParamTriple from{256, 4096, 3.2};
    const agility::ParamTriple to{512, 8192, 3.2};
    auto rep = agility::consistency_score(from, to, 1000, seed_from_text("3/7"), 13);
    double secs = seconds_since(t0);
    double w1_rel = rep.wasserstein / static_cast<double>(to.q);
    r.report = "consistency (256,4096,3.2) -> (512,8192,3.2), 1000 trials, seed 3/7\n";
    r.report += "score=" + fmt(rep.score) + " wasserstein=" + fmt(rep.wasserstein) +
                " error_rate=" + fmt(rep.error_rate) + " epsilon_bound=" + fmt(rep.epsilon_bound) +
                " w1_over_q2=" + fmt(w1_rel) + "\n";
    r.pass = rep.score >= 0.97 && rep.score <= 1.0 && rep.error_rate == 0.0 && w1_rel <= 0.05 &&
             secs < 300.0;
    r.detail = "score " + fmt(rep.score) + ", error_rate " + fmt(rep.error_rate) +
               ", W1/q2 " + fmt(w1_rel) + ", " + fmt(secs) + "s";
    return r;
}

// ------------------------------------------------------------ criterion 6 --

CriterionResult criterion6() {
    CriterionResult r;
    std::mt19937_64 rng(606);
    auto random_triple = [&rng]() {
        agility::ParamTriple t;
        t.n = 8 + static_cast<std::uint32_t>(rng() % 1017);
        t.q = 256 + static_cast<std::uint32_t>(rng() % 65281);
        t.sigma = 0.5 + (static_cast<double>(rng() % 10'000) / 10'000.0) * 11.5;
        return t;
    };
    std::size_t gate_mismatches = 0;
    std::size_t identity_failures = 0;
    for (int i = 0; i < 10'000; ++i) {
        agility::ParamTriple a = random_triple();
        agility::ParamTriple b = random_triple();
        bool lawful = b.q >= a.q &&
                      b.sigma <= a.sigma * std::sqrt(static_cast<double>(b.q) /
                                                     static_cast<double>(a.q));
        if (agility::check_morphism(a, b).ok != lawful) ++gate_mismatches;
        if (!agility::check_morphism(a, a).ok) ++identity_failures;
    }
    r.pass = gate_mismatches == 0 && identity_failures == 0;
    r.detail = "10000 random pairs, " + std::to_string(gate_mismatches) + " gate mismatches, " +
               std::to_string(identity_failures) + " identity rejections";
    return r;
}

// ------------------------------------------------------------ criterion 7 --

CriterionResult criterion7() {
    CriterionResult r;
    const std::vector<double> sigma_grid{2, 4, 8, 16, 32};
    int seeds_agreeing = 0;
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        auto sweep = noise::divergence_sweep({256}, {1024}, sigma_grid, 300, seed);
        double best_w1_sigma = -1, best_kl_sigma = -1;
        double best_w1 = 0, best_kl = 0;
        r.report += "seed=" + std::to_string(seed) + "\n";
        for (const auto& cell : sweep.cells) {
            r.report += "  n=256 q=1024 sigma=" + fmt(cell.sigma) + " w1=" + fmt(cell.wasserstein) +
                        " kl=" + fmt(cell.kl) + (cell.ok() ? "" : " error=" + cell.error) + "\n";
            if (!cell.ok()) continue;
            if (best_w1_sigma < 0 || cell.wasserstein < best_w1) {
                best_w1 = cell.wasserstein;
                best_w1_sigma = cell.sigma;
            }
            if (best_kl_sigma < 0 || cell.kl < best_kl) {
                best_kl = cell.kl;
                best_kl_sigma = cell.sigma;
            }
        }

        auto profile = noise::divergence_sweep({128, 256, 512}, {1024}, {8.0}, 300, seed);
        std::vector<double> ns, kls;
        bool infeasible_reported = false;
        for (const auto& cell : profile.cells) {
            r.report += "  n=" + std::to_string(cell.n) + " q=1024 sigma=8 kl=" + fmt(cell.kl) +
                        (cell.ok() ? "" : " error=" + cell.error) + "\n";
            if (cell.ok()) {
                ns.push_back(static_cast<double>(cell.n));
                kls.push_back(cell.kl);
            } else if (cell.n == 512) {
                // n=512 at q=1024 has a zero noise bound; the cell must fail
                // in place and the rank correlation runs over the valid cells.
                infeasible_reported = true;
            }
        }
        double corr = ns.size() >= 2 ? stats::spearman(ns, kls) : 0.0;
        bool seed_ok = best_w1_sigma == 8.0 && best_kl_sigma == 8.0 && infeasible_reported &&
                       ns.size() == 2 && corr < 0.0;
        r.report += "  w1_argmin=" + fmt(best_w1_sigma) + " kl_argmin=" + fmt(best_kl_sigma) +
                    " kl_n_spearman=" + fmt(corr) + " agree=" + (seed_ok ? "yes" : "no") + "\n";
        if (seed_ok) ++seeds_agreeing;
    }
    r.pass = seeds_agreeing >= 2;
    r.detail = std::to_string(seeds_agreeing) + "/3 seeds place the W1 and KL minima at sigma=8 "
               "with KL falling in n";
    return r;
}

// ------------------------------------------------------------ criterion 8 --

CriterionResult criterion8() {
    CriterionResult r;
    const double sigma = 3.2;
    auto xs = noise::sample_engel_phi(sigma, 10'000);
    auto again = noise::sample_engel_phi(sigma, 10'000);
    double ks = stats::ks_statistic(xs, [sigma](double x) { return noise::normal_cdf(x / sigma); });
    r.report = "engel_phi sigma=3.2 samples=10000 ks=" + fmt(ks) + "\n";
    r.pass = ks < 0.02 && xs == again;
    r.detail = "KS " + fmt(ks) + " vs N(0, sigma^2), deterministic resample " +
               (xs == again ? "identical" : "DIFFERS");
    return r;
}

// ------------------------------------------------------------ criterion 9 --

CriterionResult criterion9() {
    CriterionResult r;
    std::size_t zero_violations = 0;
    std::size_t monotonic_violations = 0;
    for (int main_db = 0; main_db <= 20; ++main_db) {
        for (int eve_db = 0; eve_db <= 20; ++eve_db) {
            double prev = -1.0;
            for (double delta : {0.0, 4.0, 8.0}) {
                double rate = wiretap::secure_rate(main_db, eve_db, delta);
                if (eve_db - delta >= main_db && rate != 0.0) ++zero_violations;
                if (rate < prev) ++monotonic_violations;
                prev = rate;
            }
        }
    }
    r.pass = zero_violations == 0 && monotonic_violations == 0;
    r.detail = "441 grid points x 3 deltas: " + std::to_string(zero_violations) +
               " nonzero rates with eve_eff >= main, " + std::to_string(monotonic_violations) +
               " delta monotonicity violations";
    return r;
}

// ----------------------------------------------------------- criterion 10 --

CriterionResult criterion10() {
    auto t0 = Clock::now();
    CriterionResult r;
    ztnet::AttackMix mix;
    mix.invalid_token = 350;
    mix.ip_not_whitelisted = 420;
    mix.expired_token = 230;
    auto out = ztnet::run_attack_suite(ztnet::make_demo_policy(kNowMs), mix, 42, 100, kNowMs);
    double secs = seconds_since(t0);
    bool counts_exact = out.ledger.reason_count(ztnet::Reason::invalid_token) == 350 &&
                        out.ledger.reason_count(ztnet::Reason::ip_not_whitelisted) == 420 &&
                        out.ledger.reason_count(ztnet::Reason::expired_token) == 230 &&
                        out.ledger.reason_count(ztnet::Reason::ok) == 100;
    r.pass = out.requests == 1100 && out.ledger.rejected() == 1000 &&
             out.ledger.accepted() == 100 && counts_exact &&
             out.ground_truth_mismatches == 0 && secs < 30.0;
    r.detail = std::to_string(out.ledger.rejected()) + "/1000 attacks rejected with exact "
               "per-reason counts, " + std::to_string(out.ledger.accepted()) +
               "/100 legit accepted, " + fmt(secs) + "s";
    return r;
}

// ----------------------------------------------------------- criterion 11 --

CriterionResult criterion11() {
    CriterionResult r;
    ztnet::Policy policy = ztnet::make_demo_policy(kNowMs);
    const ztnet::Token& tok = policy.tokens.at("tok-llama");
    std::size_t scoped_out = 0;
    for (int i = 0; i < 100; ++i) {
        ztnet::Request req;
        req.client_id = "segment-probe-" + std::to_string(i);
        req.source_ip = "10.0.0.1";
        req.token_id = tok.id;
        req.ts = kNowMs;
        req.model = "bert";
        req.payload = ztnet::detail::placeholder_payload();
        req.proof = ztnet::compute_proof(tok.secret, req);
        ztnet::Decision d = ztnet::broker_validate(policy, req, kNowMs);
        if (!d.accepted() && d.reason == ztnet::Reason::scope_violation) ++scoped_out;
    }
    r.pass = scoped_out == 100;
    r.detail = std::to_string(scoped_out) + "/100 llama-scoped bert requests rejected with "
               "scope_violation";
    return r;
}

// ----------------------------------------------------------- criterion 12 --

CriterionResult criterion12() {
    CriterionResult r;
    ztnet::SimClock clock(kNowMs);
    ztnet::AgentPolicy agent_policy;
    agent_policy.role_rules["analyst"] = ztnet::RoleRule{{"gpt", "bert", "llama"}, 0, 1440};
    ztnet::Broker broker(ztnet::make_demo_policy(kNowMs), agent_policy, clock);
    ztnet::InMemoryTransport transport(broker, {true, true, false});
    ztnet::Request req = ztnet::make_legit_request(ztnet::make_demo_policy(kNowMs), kNowMs, "rt");

    auto out = ztnet::client_send(transport, req, ztnet::RetryPolicy{}, ztnet::ReconnectPolicy{},
                                  clock, nullptr, 7);
    std::vector<std::int64_t> backoffs;
    for (const auto& a : out.attempts) backoffs.push_back(a.backoff_ms);
    r.pass = out.success && out.attempts.size() == 3 && out.attempts.back().attempt == 3 &&
             backoffs == std::vector<std::int64_t>{0, 500, 1000} && out.response.ok();
    r.detail = out.success
                   ? "delivered on attempt " + std::to_string(out.attempts.back().attempt) +
                         " with backoffs [" + std::to_string(backoffs[1]) + ", " +
                         std::to_string(backoffs[2]) + "] ms on the simulated clock"
                   : "delivery failed";
    return r;
}

// ----------------------------------------------------------- criterion 13 --

CriterionResult criterion13() {
    CriterionResult r;

    ztnet::LruCache<int, int> order(16);
    for (int k = 0; k < 16; ++k) order.put(k, k);
    order.get(0);   // protect the oldest entry
    order.put(16, 16);
    bool eviction_ok = order.contains(0) && !order.contains(1) && order.contains(16) &&
                       order.size() == 16;

    ztnet::LruCache<int, int> promote(2);
    promote.put(1, 10);
    promote.put(2, 20);
    promote.put(1, 11);
    promote.put(3, 30);
    eviction_ok = eviction_ok && promote.get(1) == 11 && !promote.contains(2);

    // Deterministic trace: 1000 lookups, 80 cold one-shot keys (92% duplicates)
    // over a 10-key working set that fits the 16-entry cache.
    ztnet::LruCache<int, int> cache(16);
    int cold = 0;
    for (int i = 0; i < 1000; ++i) {
        bool is_cold = (i % 25 == 12) || (i % 25 == 24);
        int key = is_cold ? 10'000 + cold++ : i % 10;
        if (!cache.get(key)) cache.put(key, i);
    }
    double rate = cache.hit_rate();

    r.pass = eviction_ok && rate >= 0.90;
    r.detail = std::string(eviction_ok ? "eviction order holds" : "eviction order BROKEN") +
               ", hit rate " + fmt(rate) + " on the 92%-duplicate trace";
    return r;
}

// ----------------------------------------------------------- criterion 14 --

CriterionResult criterion14(const std::map<int, std::string>& first_reports) {
    CriterionResult r;
    fs::create_directories("acceptance_reports");
    std::map<int, std::string> second_reports{
        {1, criterion1().report}, {3, criterion3().report}, {5, criterion5().report},
        {7, criterion7().report}, {8, criterion8().report}};
    std::vector<int> differing;
    for (const auto& [k, second] : second_reports) {
        const std::string& first = first_reports.at(k);
        for (int run = 1; run <= 2; ++run) {
            std::ofstream out("acceptance_reports/criterion" + std::to_string(k) + "_run" +
                              std::to_string(run) + ".txt", std::ios::binary);
            out << (run == 1 ? first : second);
        }
        std::ifstream a("acceptance_reports/criterion" + std::to_string(k) + "_run1.txt",
                        std::ios::binary);
        std::ifstream b("acceptance_reports/criterion" + std::to_string(k) + "_run2.txt",
                        std::ios::binary);
        std::string a_bytes{std::istreambuf_iterator<char>(a), std::istreambuf_iterator<char>()};
        std::string b_bytes{std::istreambuf_iterator<char>(b), std::istreambuf_iterator<char>()};
        if (a_bytes != b_bytes || a_bytes.empty()) differing.push_back(k);
    }
    r.pass = differing.empty();
    if (r.pass) {
        r.detail = "criteria 1, 3, 5, 7, 8 reran byte-identical (acceptance_reports/)";
    } else {
        r.detail = "report drift in criteria:";
        for (int k : differing) r.detail += " " + std::to_string(k);
    }
    return r;
}

// ----------------------------------------------------------- criterion 15 --

CriterionResult criterion15() {
    CriterionResult r;
    const std::vector<std::uint32_t> dims{256, 512, 768, 1024};
    const std::vector<std::uint8_t> message{0xa5, 0x3c, 0x96, 0x0f};  // 32 bits
    std::vector<double> medians;
    r.report = "encrypt timing q=16384 p=13 sigma=3.2, 32 bits per repeat\n";
    for (std::uint32_t n : dims) {
        lwe::Params params{n, 16384, 13, 3.2, 0};
        lwe::PublicKey pk = lwe::public_part(lwe::keygen(params, seed_from_text("3/7")));
        std::vector<double> times;
        Rational enc_seed = seed_from_text("2/7");
        for (int rep = 0; rep < 5; ++rep) {
            auto t0 = Clock::now();
            auto cts = lwe::encrypt_bytes(pk, message, enc_seed);
            times.push_back(seconds_since(t0));
            enc_seed = successor_seed(enc_seed);
            if (cts.size() != 32) {
                r.detail = "unexpected ciphertext count";
                return r;
            }
        }
        std::sort(times.begin(), times.end());
        medians.push_back(times[2]);
    }
    bool monotone = true;
    for (std::size_t i = 1; i < medians.size(); ++i) {
        if (medians[i] <= medians[i - 1]) monotone = false;
    }
    double ratio = medians.back() / medians.front();
    r.pass = monotone && ratio >= 4.0;
    r.detail = "median encrypt ms per 32 bits:";
    for (std::size_t i = 0; i < dims.size(); ++i) {
        r.detail += " n=" + std::to_string(dims[i]) + " " + fmt(medians[i] * 1000.0);
    }
    r.detail += "; ratio " + fmt(ratio) + (monotone ? "" : "; NOT monotone");
    return r;
}

}  // namespace

int main() {
    struct Entry {
        int k;
        const char* title;
        CriterionResult result;
    };
    std::map<int, std::string> reports;
    std::vector<Entry> entries;

    auto add = [&](int k, const char* title, CriterionResult result) {
        if (!result.report.empty()) reports[k] = result.report;
        entries.push_back({k, title, std::move(result)});
    };

    add(1, "Engel expansions reconstruct 1000 random rationals exactly", criterion1());
    add(2, "Engel coefficients are non-decreasing", criterion2());
    add(3, "LWE decrypts 1000 bits with zero errors", criterion3());
    add(4, "decision rule boundary offsets decode strictly", criterion4());
    add(5, "consistency score for the modulus-doubling transition", criterion5());
    add(6, "morphism gate matches the admissibility law on 10k pairs", criterion6());
    add(7, "divergence minima sit at sigma=8 and KL falls with n", criterion7());
    add(8, "golden-ratio sampler passes the KS normality check", criterion8());
    add(9, "wiretap secure region zeroes and expands correctly", criterion9());
    add(10, "attack mix is fully rejected with exact per-reason counts", criterion10());
    add(11, "llama-scoped tokens cannot reach bert", criterion11());
    add(12, "retries reconnect on the third attempt over [500, 1000] ms", criterion12());
    add(13, "LRU cache evicts in order and holds a 0.90 hit rate", criterion13());
    add(14, "criteria 1, 3, 5, 7, 8 rerun byte-identical", criterion14(reports));
    add(15, "encrypt time grows superlinearly in the dimension", criterion15());

    int failures = 0;
    for (const auto& e : entries) {
        std::cout << (e.result.pass ? "[PASS]" : "[FAIL]") << " criterion " << e.k << ": "
                  << e.title << " -- " << e.result.detail << "\n";
        if (!e.result.pass) ++failures;
    }
    std::cout << (15 - failures) << "/15 criteria passed\n";
    return failures == 0 ? 0 : 1;
}
