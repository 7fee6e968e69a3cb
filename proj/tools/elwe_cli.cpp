// elwe: command-line surface over the engel/lwe/agility/noise/wiretap/ztnet stack.
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "elwe/agility.hpp"
#include "elwe/engel.hpp"
#include "elwe/errors.hpp"
#include "elwe/lwe.hpp"
#include "elwe/noise.hpp"
#include "elwe/rational.hpp"
#include "elwe/serial.hpp"
#include "elwe/stats.hpp"
#include "elwe/wiretap.hpp"
#include "elwe/ztnet.hpp"

namespace {

using nlohmann::json;
using namespace elwe;

enum class LogLevel { error = 0, info = 1, debug = 2 };

LogLevel g_log_level = LogLevel::error;

void init_logging() {
    const char* env = std::getenv("ELWE_LOG");
    if (env == nullptr) return;
    std::string level = env;
    if (level == "debug") g_log_level = LogLevel::debug;
    else if (level == "info") g_log_level = LogLevel::info;
    else g_log_level = LogLevel::error;
}

void log_info(const std::string& msg) {
    if (g_log_level >= LogLevel::info) std::cerr << "[info] " << msg << "\n";
}

void log_debug(const std::string& msg) {
    if (g_log_level >= LogLevel::debug) std::cerr << "[debug] " << msg << "\n";
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

// Reports go through the atomic writer; stdout is used when no --out is given.
void emit_text(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    serial::atomic_write_text(out_path, content);
    log_info("wrote " + out_path);
}

void emit_json(const std::string& out_path, const json& j) {
    emit_text(out_path, j.dump(2) + "\n");
}

std::vector<std::uint32_t> parse_u32_list(const std::string& text, const char* what) {
    std::vector<std::uint32_t> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (part.empty()) throw ConfigError(std::string(what) + ": empty grid entry");
        char* end = nullptr;
        unsigned long v = std::strtoul(part.c_str(), &end, 10);
        if (end == nullptr || *end != '\0') throw ConfigError(std::string(what) + ": bad integer " + part);
        out.push_back(static_cast<std::uint32_t>(v));
    }
    if (out.empty()) throw ConfigError(std::string(what) + ": empty grid");
    return out;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (part.empty()) throw ConfigError(std::string(what) + ": empty grid entry");
        char* end = nullptr;
        double v = std::strtod(part.c_str(), &end);
        if (end == nullptr || *end != '\0') throw ConfigError(std::string(what) + ": bad number " + part);
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError(std::string(what) + ": empty grid");
    return out;
}

agility::ParamTriple parse_triple(const std::string& text, const char* what) {
    auto parts = parse_double_list(text, what);
    if (parts.size() != 3) throw ConfigError(std::string(what) + ": expected n,q,sigma");
    agility::ParamTriple t{static_cast<std::uint32_t>(parts[0]), static_cast<std::uint32_t>(parts[1]),
                           parts[2]};
    agility::validate(t);
    return t;
}

std::vector<std::uint8_t> read_input_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open input file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
}

json params_json(const lwe::Params& p) {
    return {{"n", p.n}, {"q", p.q}, {"p", p.p}, {"sigma", p.sigma}, {"alpha", p.alpha}};
}

json triple_json(const agility::ParamTriple& t) {
    return {{"n", t.n}, {"q", t.q}, {"sigma", t.sigma}};
}

// ---------------------------------------------------------------- engel ----

struct EngelExpandOpts {
    std::string seed;
    std::size_t terms = 100000;
    std::string format = "text";
    std::string out;
};

void run_engel_expand(const EngelExpandOpts& o) {
    EngelSequence seq = engel_expand(parse_seed(o.seed), o.terms);
    if (o.format == "json") {
        json j = {{"seed", o.seed}, {"terminated", seq.terminated}, {"coefficients", json::array()}};
        for (const auto& a : seq.coefficients) j["coefficients"].push_back(a.get_str());
        emit_json(o.out, j);
        return;
    }
    std::string text;
    for (const auto& a : seq.coefficients) text += a.get_str() + "\n";
    emit_text(o.out, text);
}

struct EngelStreamOpts {
    std::string seed;
    std::size_t count = 16;
    unsigned max_bits = 64;
    std::string format = "text";
    std::string out;
};

void run_engel_stream(const EngelStreamOpts& o) {
    if (o.count == 0) throw ConfigError("stream count must be positive");
    StreamConfig cfg;
    cfg.max_coefficient_bits = o.max_bits;
    CoefficientStream stream(parse_seed(o.seed), cfg);
    std::vector<std::uint64_t> values = stream.next_block(o.count);
    if (o.format == "json") {
        emit_json(o.out, {{"seed", o.seed}, {"count", o.count}, {"coefficients", values}});
        return;
    }
    std::string text;
    for (auto v : values) text += std::to_string(v) + "\n";
    emit_text(o.out, text);
}

// ------------------------------------------------------------------ lwe ----

struct LweKeygenOpts {
    std::uint32_t n = 256, q = 4096, p = 13;
    double sigma = 3.2;
    std::uint64_t alpha = 0;
    std::string seed;
    std::string out_public, out_secret, out_seed;
    bool quantized = false;
};

void run_lwe_keygen(const LweKeygenOpts& o) {
    lwe::Params params{o.n, o.q, o.p, o.sigma, o.alpha};
    lwe::validate(params);
    Rational seed = parse_seed(o.seed);
    lwe::KeyPair kp = lwe::keygen(params, seed);
    if (o.out_public.empty() && o.out_secret.empty() && o.out_seed.empty()) {
        throw ConfigError("keygen: provide --out-public, --out-secret, or --out-seed");
    }
    if (!o.out_public.empty()) serial::write_public(o.out_public, lwe::public_part(kp), o.quantized);
    if (!o.out_secret.empty()) serial::write_secret(o.out_secret, lwe::secret_part(kp));
    if (!o.out_seed.empty()) serial::write_seed(o.out_seed, params, o.seed);
    log_info("keygen fingerprint " + std::to_string(kp.seed_fingerprint));
}

struct LweEncryptOpts {
    std::string key;
    std::string message;
    std::string in;
    std::string seed;
    std::string out;
};

void run_lwe_encrypt(const LweEncryptOpts& o) {
    serial::KeyRecord rec = serial::load_key(o.key);
    lwe::PublicKey pk = serial::as_public(rec);
    std::vector<std::uint8_t> plain;
    if (!o.in.empty()) {
        plain = read_input_bytes(o.in);
    } else {
        plain.assign(o.message.begin(), o.message.end());
    }
    if (plain.empty()) throw ConfigError("encrypt: empty message (use --message or --in)");
    auto cts = lwe::encrypt_bytes(pk, plain, parse_seed(o.seed));
    serial::write_ciphertexts(o.out, cts);
    log_info("encrypted " + std::to_string(plain.size()) + " bytes into " +
             std::to_string(cts.size()) + " ciphertexts");
}

struct LweDecryptOpts {
    std::string key;
    std::string in;
    std::string out;
};

void run_lwe_decrypt(const LweDecryptOpts& o) {
    serial::KeyRecord rec = serial::load_key(o.key);
    lwe::SecretKey sk = serial::as_secret(rec);
    auto cts = serial::load_ciphertexts(o.in);
    std::vector<std::uint8_t> plain = lwe::decrypt_bytes(sk, cts);
    if (o.out.empty()) {
        std::cout.write(reinterpret_cast<const char*>(plain.data()),
                        static_cast<std::streamsize>(plain.size()));
        return;
    }
    serial::atomic_write(o.out, plain);
    log_info("wrote " + o.out);
}

// -------------------------------------------------------------- agility ----

struct AgilityCheckOpts {
    std::string from, to;
    std::string format = "text";
    std::string out;
};

void run_agility_check(const AgilityCheckOpts& o) {
    auto check = agility::check_morphism(parse_triple(o.from, "--from"), parse_triple(o.to, "--to"));
    if (o.format == "json") {
        emit_json(o.out, {{"ok", check.ok},
                          {"reason", check.reason},
                          {"from", triple_json(check.morphism.from)},
                          {"to", triple_json(check.morphism.to)}});
        return;
    }
    emit_text(o.out, check.ok ? "valid\n" : "invalid: " + check.reason + "\n");
}

struct AgilityScoreOpts {
    std::string from, to;
    std::uint32_t trials = 1000;
    std::uint32_t p = 13;
    std::string seed = "3/7";
    std::string out;
};

void run_agility_score(const AgilityScoreOpts& o) {
    agility::ParamTriple from = parse_triple(o.from, "--from");
    agility::ParamTriple to = parse_triple(o.to, "--to");
    auto report = agility::consistency_score(from, to, o.trials, parse_seed(o.seed), o.p);
    emit_json(o.out, {{"from", triple_json(from)},
                      {"to", triple_json(to)},
                      {"trials", o.trials},
                      {"seed", o.seed},
                      {"score", report.score},
                      {"wasserstein", report.wasserstein},
                      {"error_rate", report.error_rate},
                      {"epsilon_bound", report.epsilon_bound},
                      {"deviation_score", report.deviation_score},
                      {"messages_tested", report.messages_tested}});
}

struct AgilityTransitionOpts {
    std::string from, to;
    std::uint32_t items = 8;
    std::uint32_t p = 13;
    std::string seed = "3/7";
    std::string out;
};

void run_agility_transition(const AgilityTransitionOpts& o) {
    if (o.items == 0) throw ConfigError("transition: items must be positive");
    agility::ParamTriple from = parse_triple(o.from, "--from");
    agility::ParamTriple to = parse_triple(o.to, "--to");
    Rational key_seed = parse_seed(o.seed);

    agility::SchemeRegistry registry;
    registry.register_scheme(agility::make_lwe_scheme("from", from, o.p, key_seed));
    registry.register_scheme(agility::make_lwe_scheme("to", to, o.p, successor_seed(key_seed)));

    // Rebuild the source keypair (keygen is deterministic) to mint items.
    lwe::Params src_params{from.n, from.q, o.p, from.sigma, 0};
    lwe::KeyPair kp = lwe::keygen(src_params, key_seed);
    lwe::PublicKey pk = lwe::public_part(kp);
    Rational enc_seed = successor_seed(successor_seed(key_seed));
    std::vector<agility::InFlightItem> items;
    std::vector<int> bits;
    for (std::uint32_t i = 0; i < o.items; ++i) {
        int bit = static_cast<int>(i & 1u);
        lwe::Ciphertext ct = lwe::encrypt_bit(pk, bit, enc_seed);
        enc_seed = successor_seed(enc_seed);
        items.push_back(agility::InFlightItem{serial::ciphertexts_to_bytes({ct}), kp.s});
        bits.push_back(bit);
    }

    auto report = agility::transition_scheme(registry, "from", "to", items);
    json item_rows = json::array();
    for (std::size_t i = 0; i < report.items.size(); ++i) {
        item_rows.push_back({{"path", report.items[i].path},
                             {"verified", report.items[i].verified},
                             {"bit", bits[i]},
                             {"blob_bytes", report.items[i].blob.size()}});
    }
    emit_json(o.out, {{"from", triple_json(from)},
                      {"to", triple_json(to)},
                      {"transported", report.transported},
                      {"reencrypted", report.reencrypted},
                      {"all_verified", report.all_verified},
                      {"items", item_rows}});
}

// ---------------------------------------------------------------- noise ----

struct NoiseSweepOpts {
    std::string n_grid = "128,256,512";
    std::string q_grid = "1024";
    std::string sigma_grid = "2,4,8,16,32";
    std::size_t per_cell = 300;
    std::uint64_t seed = 1;
    std::string gen_a = "gaussian";
    std::string gen_b = "engel_diff";
    std::string out;
};

std::string sweep_csv(const noise::SweepReport& report) {
    std::string csv = "n,q,sigma,wasserstein,kl,samples,error\n";
    for (const auto& cell : report.cells) {
        std::string error = cell.error;
        for (char& c : error) {
            if (c == ',' || c == '\n') c = ';';
        }
        csv += std::to_string(cell.n) + "," + std::to_string(cell.q) + "," + fmt_double(cell.sigma) +
               "," + (cell.ok() ? fmt_double(cell.wasserstein) : "") + "," +
               (cell.ok() ? fmt_double(cell.kl) : "") + "," + std::to_string(cell.samples) + "," +
               error + "\n";
    }
    return csv;
}

void run_noise_sweep(const NoiseSweepOpts& o) {
    auto report = noise::divergence_sweep(parse_u32_list(o.n_grid, "--n-grid"),
                                          parse_u32_list(o.q_grid, "--q-grid"),
                                          parse_double_list(o.sigma_grid, "--sigma-grid"), o.per_cell,
                                          o.seed, noise::parse_generator(o.gen_a),
                                          noise::parse_generator(o.gen_b));
    emit_text(o.out, sweep_csv(report));
}

struct NoiseCompareOpts {
    std::uint32_t n = 256, q = 1024;
    double sigma = 8.0;
    std::size_t count = 300;
    std::uint64_t seed = 1;
    std::string gen_a = "gaussian";
    std::string gen_b = "engel_diff";
    std::string out;
};

void run_noise_compare(const NoiseCompareOpts& o) {
    auto cell = noise::divergence_cell(o.n, o.q, o.sigma, noise::parse_generator(o.gen_a),
                                       noise::parse_generator(o.gen_b), o.count, o.seed);
    json j = {{"n", cell.n},           {"q", cell.q},
              {"sigma", cell.sigma},   {"gen_a", o.gen_a},
              {"gen_b", o.gen_b},      {"samples", cell.samples},
              {"wasserstein", cell.wasserstein}, {"kl", cell.kl}};
    if (!cell.ok()) j["error"] = cell.error;
    emit_json(o.out, j);
}

// -------------------------------------------------------------- wiretap ----

struct WiretapRegionOpts {
    std::string main_grid = "0,2,4,6,8,10,12,14,16,18,20";
    std::string eve_grid = "0,2,4,6,8,10,12,14,16,18,20";
    std::string delta_grid = "0,4,8";
    std::string out;
};

void run_wiretap_region(const WiretapRegionOpts& o) {
    auto points = wiretap::security_region(parse_double_list(o.main_grid, "--main-grid"),
                                           parse_double_list(o.eve_grid, "--eve-grid"),
                                           parse_double_list(o.delta_grid, "--delta-grid"));
    std::string csv = "main_db,eve_db,delta_db,rate\n";
    for (const auto& pt : points) {
        csv += fmt_double(pt.main_db) + "," + fmt_double(pt.eve_db) + "," + fmt_double(pt.delta_db) +
               "," + fmt_double(pt.rate) + "\n";
    }
    emit_text(o.out, csv);
}

struct WiretapItsOpts {
    std::uint32_t n = 64, q = 4096, p = 13;
    double sigma = 3.2;
    double adv_sigma = 2.0;
    double delta = 1.0;
    std::uint32_t trials = 200;
    std::string mode = "categorical";
    std::uint64_t rng_seed = 1;
    std::string out;
};

void run_wiretap_its(const WiretapItsOpts& o) {
    wiretap::ItsConfig cfg;
    cfg.params = lwe::Params{o.n, o.q, o.p, o.sigma, 0};
    cfg.adv_sigma = o.adv_sigma;
    cfg.delta = o.delta;
    cfg.trials = o.trials;
    cfg.mode = wiretap::parse_its_mode(o.mode);
    cfg.rng_seed = o.rng_seed;
    auto report = wiretap::its_simulate(cfg);
    emit_json(o.out, {{"params", params_json(cfg.params)},
                      {"adv_sigma", o.adv_sigma},
                      {"delta", o.delta},
                      {"mode", o.mode},
                      {"rng_seed", o.rng_seed},
                      {"trials", report.trials},
                      {"accepted", report.accepted},
                      {"rejected", report.rejected},
                      {"errors", report.errors},
                      {"rejection_rate", report.rejection_rate},
                      {"error_rate", report.error_rate}});
}

// ---------------------------------------------------------------- ztnet ----

ztnet::AgentPolicy default_agent_policy(const ztnet::Policy& policy, int window_start, int window_end) {
    ztnet::AgentPolicy ap;
    ztnet::RoleRule rule;
    for (const auto& [model, scope] : policy.model_acl) {
        (void)scope;
        rule.models.insert(model);
    }
    rule.window_start_min = window_start;
    rule.window_end_min = window_end;
    ap.role_rules[ap.default_role] = rule;
    return ap;
}

ztnet::Policy load_policy_or_demo(const std::string& config_path, std::int64_t now_ms) {
    if (config_path.empty()) {
        log_info("no --config given; using the built-in demo policy");
        return ztnet::make_demo_policy(now_ms);
    }
    std::ifstream in(config_path);
    if (!in) throw IoError("cannot open policy config: " + config_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("policy config is not valid JSON: ") + e.what());
    }
    return ztnet::policy_from_json(j);
}

struct ZtBrokerOpts {
    std::string config;
    std::string listen = "127.0.0.1:7070";
    std::string out_public;
    std::int64_t now = 0;
    int window_start = 0, window_end = 1440;
};

void run_zt_broker(const ZtBrokerOpts& o) {
    ztnet::SystemClock sys_clock;
    ztnet::SimClock sim_clock(o.now);
    ztnet::Clock& clock = o.now > 0 ? static_cast<ztnet::Clock&>(sim_clock) : sys_clock;
    ztnet::Policy policy = load_policy_or_demo(o.config, clock.now_ms());
    ztnet::Broker broker(policy, default_agent_policy(policy, o.window_start, o.window_end), clock);
    if (!o.out_public.empty()) serial::write_public(o.out_public, broker.public_key());
    ztnet::TcpServer server(ztnet::parse_address(o.listen),
                            [&broker](const ztnet::Request& r) { return broker.handle(r); });
    std::cout << "broker listening on port " << server.port() << "\n" << std::flush;
    for (;;) std::this_thread::sleep_for(std::chrono::seconds(60));
}

struct ZtAgentOpts {
    std::string listen = "127.0.0.1:7071";
    std::string models = "gpt,bert";
    std::int64_t now = 0;
    int window_start = 0, window_end = 1440;
};

void run_zt_agent(const ZtAgentOpts& o) {
    ztnet::SystemClock sys_clock;
    ztnet::SimClock sim_clock(o.now);
    ztnet::Clock& clock = o.now > 0 ? static_cast<ztnet::Clock&>(sim_clock) : sys_clock;
    ztnet::AgentPolicy ap;
    ztnet::RoleRule rule;
    std::stringstream ss(o.models);
    std::string model;
    std::vector<std::string> model_list;
    while (std::getline(ss, model, ',')) {
        if (!model.empty()) model_list.push_back(model);
    }
    if (model_list.empty()) throw ConfigError("agent: --models must name at least one model");
    for (const auto& m : model_list) rule.models.insert(m);
    rule.window_start_min = o.window_start;
    rule.window_end_min = o.window_end;
    ap.role_rules[ap.default_role] = rule;
    auto agent = std::make_shared<ztnet::Agent>(ap);
    for (const auto& m : model_list) agent->models().register_model(m);
    ztnet::TcpServer server(
        ztnet::parse_address(o.listen), [agent, &clock](const ztnet::Request& r) {
            std::string grant;
            ztnet::Decision d = agent->admit(r, clock.now_ms(), &grant);
            if (!d.accepted()) return ztnet::make_response(d, {}, 0);
            std::string prompt(r.payload.begin(), r.payload.end());
            ztnet::Decision replay;
            std::string body = agent->respond(grant, r.model, prompt, clock, &replay);
            if (replay.reason == ztnet::Reason::expired_token) return ztnet::make_response(replay, {}, 0);
            return ztnet::make_response(d, ztnet::Bytes(body.begin(), body.end()), 0);
        });
    std::cout << "agent listening on port " << server.port() << "\n" << std::flush;
    for (;;) std::this_thread::sleep_for(std::chrono::seconds(60));
}

struct ZtClientOpts {
    std::string to = "127.0.0.1:7070";
    std::string client_id = "cli";
    std::string token_id;
    std::string secret_hex;
    std::string model = "gpt";
    std::string prompt = "hello";
    std::string key;   // broker public key file; payload is encrypted when given
    std::string seed = "3/7";
    std::int64_t now = 0;
    int retries = 3;
    std::uint64_t rng_seed = 1;
};

void run_zt_client(const ZtClientOpts& o) {
    ztnet::SystemClock clock;
    std::int64_t ts = o.now > 0 ? o.now : clock.now_ms();
    ztnet::Request req;
    req.client_id = o.client_id;
    req.source_ip = "10.0.0.1";
    req.token_id = o.token_id;
    req.ts = ts;
    req.model = o.model;
    if (!o.key.empty()) {
        serial::KeyRecord rec = serial::load_key(o.key);
        lwe::PublicKey pk = serial::as_public(rec);
        std::vector<std::uint8_t> plain(o.prompt.begin(), o.prompt.end());
        req.payload = serial::ciphertexts_to_bytes(lwe::encrypt_bytes(pk, plain, parse_seed(o.seed)));
    } else {
        req.payload = ztnet::detail::placeholder_payload();
    }
    if (o.secret_hex.empty()) throw ConfigError("client: --secret-hex is required to sign the request");
    req.proof = ztnet::compute_proof(ztnet::hex_decode(o.secret_hex), req);

    ztnet::TcpTransport transport(ztnet::parse_address(o.to));
    ztnet::RetryPolicy retry;
    retry.max_retries = o.retries;
    auto outcome = ztnet::client_send(transport, req, retry, ztnet::ReconnectPolicy{}, clock, nullptr,
                                      o.rng_seed);
    if (!outcome.success) {
        throw IoError("client: delivery failed after " + std::to_string(outcome.attempts.size()) +
                      " attempts");
    }
    std::cout << "status: " << outcome.response.status << "\n"
              << "reason: " << ztnet::reason_name(outcome.response.reason) << "\n"
              << "epoch: " << outcome.response.epoch << "\n"
              << "body: " << std::string(outcome.response.body.begin(), outcome.response.body.end())
              << "\n";
}

struct ZtAttackOpts {
    std::string mix = "350,420,230";
    std::size_t legit = 0;
    std::uint64_t rng_seed = 1;
    std::int64_t now = 1'700'000'000'000;
    std::string config;
    std::string out;
};

void run_zt_attack(const ZtAttackOpts& o) {
    auto counts = parse_u32_list(o.mix, "--mix");
    if (counts.size() != 3) throw ConfigError("--mix expects invalid,ip,expired counts");
    ztnet::AttackMix mix{counts[0], counts[1], counts[2]};
    ztnet::Policy policy = load_policy_or_demo(o.config, o.now);
    auto outcome = ztnet::run_attack_suite(policy, mix, o.rng_seed, o.legit, o.now);
    json ledger = outcome.ledger.to_json();
    ledger["attack"] = {{"mix",
                         {{"invalid_token", mix.invalid_token},
                          {"ip_not_whitelisted", mix.ip_not_whitelisted},
                          {"expired_token", mix.expired_token}}},
                        {"legit", o.legit},
                        {"rng_seed", o.rng_seed},
                        {"now", o.now},
                        {"requests", outcome.requests},
                        {"ground_truth_mismatches", outcome.ground_truth_mismatches}};
    emit_json(o.out, ledger);
    log_info("rejection rate " + fmt_double(outcome.ledger.rejection_rate()));
}

struct ZtReportOpts {
    std::string in;
    std::string out;
    bool cpa = false;
    std::size_t cpa_trials = 100;
    std::string cpa_seed = "3/7";
};

void run_zt_report(const ZtReportOpts& o) {
    std::ifstream in(o.in);
    if (!in) throw IoError("cannot open ledger: " + o.in);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("ledger is not valid JSON: ") + e.what());
    }
    ztnet::MetricsLedger ledger = ztnet::MetricsLedger::from_json(j);
    json report = ztnet::metrics_report(ledger);
    if (j.contains("attack")) report["attack"] = j["attack"];
    if (o.cpa) {
        auto probe = ztnet::cpa_probe(lwe::Params{32, 3329, 13, 3.2, 0}, o.cpa_trials, o.cpa_seed);
        report["cpa"] = {{"trials", probe.trials},
                         {"distinct_pairs", probe.distinct_pairs},
                         {"distinct_fraction", probe.distinct_fraction}};
    }
    emit_json(o.out, report);
}

}  // namespace

int main(int argc, char** argv) {
    init_logging();
    CLI::App app{"Engel-seeded LWE toolkit: chaotic keying, crypto-agility, zero-trust serving"};
    app.require_subcommand(1);

    // engel
    auto* engel = app.add_subcommand("engel", "Engel expansions and coefficient streams");
    engel->require_subcommand(1);
    auto expand_opts = std::make_shared<EngelExpandOpts>();
    auto* expand = engel->add_subcommand("expand", "Expand a rational seed");
    expand->add_option("--seed", expand_opts->seed, "Seed in ]0,1], e.g. 3/10 or 0.3")->required();
    expand->add_option("--terms", expand_opts->terms, "Maximum coefficients");
    expand->add_option("--format", expand_opts->format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
    expand->add_option("--out", expand_opts->out, "Output file (default stdout)");
    expand->callback([expand_opts] { run_engel_expand(*expand_opts); });

    auto stream_opts = std::make_shared<EngelStreamOpts>();
    auto* stream = engel->add_subcommand("stream", "Bounded re-seeding coefficient stream");
    stream->add_option("--seed", stream_opts->seed, "Seed in ]0,1]")->required();
    stream->add_option("--count", stream_opts->count, "Coefficients to emit");
    stream->add_option("--max-bits", stream_opts->max_bits, "Per-coefficient bit bound (<= 64)");
    stream->add_option("--format", stream_opts->format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
    stream->add_option("--out", stream_opts->out, "Output file (default stdout)");
    stream->callback([stream_opts] { run_engel_stream(*stream_opts); });

    // lwe
    auto* lwe_cmd = app.add_subcommand("lwe", "Key generation and bitwise encryption");
    lwe_cmd->require_subcommand(1);
    auto keygen_opts = std::make_shared<LweKeygenOpts>();
    auto* keygen = lwe_cmd->add_subcommand("keygen", "Generate a keypair from a seed");
    keygen->add_option("--n", keygen_opts->n, "Dimension");
    keygen->add_option("--q", keygen_opts->q, "Ciphertext modulus");
    keygen->add_option("--p", keygen_opts->p, "Matrix residue modulus");
    keygen->add_option("--sigma", keygen_opts->sigma, "Noise width");
    keygen->add_option("--alpha", keygen_opts->alpha, "Rejection threshold for A draws (0 = off)");
    keygen->add_option("--seed", keygen_opts->seed, "Rational seed text")->required();
    keygen->add_option("--out-public", keygen_opts->out_public, "Public key file");
    keygen->add_option("--out-secret", keygen_opts->out_secret, "Secret key file");
    keygen->add_option("--out-seed", keygen_opts->out_seed, "Seed-only record file");
    keygen->add_flag("--quantized", keygen_opts->quantized, "Write the A matrix as 16-bit");
    keygen->callback([keygen_opts] { run_lwe_keygen(*keygen_opts); });

    auto encrypt_opts = std::make_shared<LweEncryptOpts>();
    auto* encrypt = lwe_cmd->add_subcommand("encrypt", "Encrypt bytes under a public key");
    encrypt->add_option("--key", encrypt_opts->key, "Public key file")->required();
    encrypt->add_option("--message", encrypt_opts->message, "Inline message text");
    encrypt->add_option("--in", encrypt_opts->in, "Message file (binary)");
    encrypt->add_option("--seed", encrypt_opts->seed, "Rational seed text")->required();
    encrypt->add_option("--out", encrypt_opts->out, "Ciphertext file")->required();
    encrypt->callback([encrypt_opts] { run_lwe_encrypt(*encrypt_opts); });

    auto decrypt_opts = std::make_shared<LweDecryptOpts>();
    auto* decrypt = lwe_cmd->add_subcommand("decrypt", "Decrypt a ciphertext file");
    decrypt->add_option("--key", decrypt_opts->key, "Secret key file")->required();
    decrypt->add_option("--in", decrypt_opts->in, "Ciphertext file")->required();
    decrypt->add_option("--out", decrypt_opts->out, "Plaintext file (default stdout)");
    decrypt->callback([decrypt_opts] { run_lwe_decrypt(*decrypt_opts); });

    // agility
    auto* agility_cmd = app.add_subcommand("agility", "Morphism checks and scheme transitions");
    agility_cmd->require_subcommand(1);
    auto check_opts = std::make_shared<AgilityCheckOpts>();
    auto* check = agility_cmd->add_subcommand("check", "Validate a parameter morphism");
    check->add_option("--from", check_opts->from, "Source triple n,q,sigma")->required();
    check->add_option("--to", check_opts->to, "Target triple n,q,sigma")->required();
    check->add_option("--format", check_opts->format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
    check->add_option("--out", check_opts->out, "Output file (default stdout)");
    check->callback([check_opts] { run_agility_check(*check_opts); });

    auto score_opts = std::make_shared<AgilityScoreOpts>();
    auto* score = agility_cmd->add_subcommand("score", "Monte-Carlo consistency score");
    score->add_option("--from", score_opts->from, "Source triple n,q,sigma")->required();
    score->add_option("--to", score_opts->to, "Target triple n,q,sigma")->required();
    score->add_option("--trials", score_opts->trials, "Messages to test");
    score->add_option("--p", score_opts->p, "Matrix residue modulus");
    score->add_option("--seed", score_opts->seed, "Rational seed text");
    score->add_option("--out", score_opts->out, "Report file (default stdout)");
    score->callback([score_opts] { run_agility_score(*score_opts); });

    auto transition_opts = std::make_shared<AgilityTransitionOpts>();
    auto* transition = agility_cmd->add_subcommand("transition", "Move in-flight items across schemes");
    transition->add_option("--from", transition_opts->from, "Source triple n,q,sigma")->required();
    transition->add_option("--to", transition_opts->to, "Target triple n,q,sigma")->required();
    transition->add_option("--items", transition_opts->items, "In-flight items to mint");
    transition->add_option("--p", transition_opts->p, "Matrix residue modulus");
    transition->add_option("--seed", transition_opts->seed, "Rational seed text");
    transition->add_option("--out", transition_opts->out, "Report file (default stdout)");
    transition->callback([transition_opts] { run_agility_transition(*transition_opts); });

    // noise
    auto* noise_cmd = app.add_subcommand("noise", "Noise-source divergence experiments");
    noise_cmd->require_subcommand(1);
    auto sweep_opts = std::make_shared<NoiseSweepOpts>();
    auto* sweep = noise_cmd->add_subcommand("sweep", "Grid sweep of W1/KL divergences");
    sweep->add_option("--n-grid", sweep_opts->n_grid, "Comma list of dimensions");
    sweep->add_option("--q-grid", sweep_opts->q_grid, "Comma list of moduli");
    sweep->add_option("--sigma-grid", sweep_opts->sigma_grid, "Comma list of widths");
    sweep->add_option("--per-cell", sweep_opts->per_cell, "Encryptions per cell");
    sweep->add_option("--seed", sweep_opts->seed, "Integer RNG seed");
    sweep->add_option("--gen-a", sweep_opts->gen_a, "gaussian, engel_diff, or engel_phi");
    sweep->add_option("--gen-b", sweep_opts->gen_b, "gaussian, engel_diff, or engel_phi");
    sweep->add_option("--out", sweep_opts->out, "CSV file (default stdout)");
    sweep->callback([sweep_opts] { run_noise_sweep(*sweep_opts); });

    auto compare_opts = std::make_shared<NoiseCompareOpts>();
    auto* compare = noise_cmd->add_subcommand("compare", "Single-cell divergence comparison");
    compare->add_option("--n", compare_opts->n, "Dimension");
    compare->add_option("--q", compare_opts->q, "Modulus");
    compare->add_option("--sigma", compare_opts->sigma, "Noise width");
    compare->add_option("--count", compare_opts->count, "Encryptions per generator");
    compare->add_option("--seed", compare_opts->seed, "Integer RNG seed");
    compare->add_option("--gen-a", compare_opts->gen_a, "gaussian, engel_diff, or engel_phi");
    compare->add_option("--gen-b", compare_opts->gen_b, "gaussian, engel_diff, or engel_phi");
    compare->add_option("--out", compare_opts->out, "Report file (default stdout)");
    compare->callback([compare_opts] { run_noise_compare(*compare_opts); });

    // wiretap
    auto* wiretap_cmd = app.add_subcommand("wiretap", "Secrecy rates and ITS simulation");
    wiretap_cmd->require_subcommand(1);
    auto region_opts = std::make_shared<WiretapRegionOpts>();
    auto* region = wiretap_cmd->add_subcommand("region", "Secure-rate region over SNR grids");
    region->add_option("--main-grid", region_opts->main_grid, "Main-channel SNRs (dB)");
    region->add_option("--eve-grid", region_opts->eve_grid, "Eavesdropper SNRs (dB)");
    region->add_option("--delta-grid", region_opts->delta_grid, "Noise advantages (dB)");
    region->add_option("--out", region_opts->out, "CSV file (default stdout)");
    region->callback([region_opts] { run_wiretap_region(*region_opts); });

    auto its_opts = std::make_shared<WiretapItsOpts>();
    auto* its = wiretap_cmd->add_subcommand("its-sim", "Adversarial-noise acceptance simulation");
    its->add_option("--n", its_opts->n, "Dimension");
    its->add_option("--q", its_opts->q, "Modulus");
    its->add_option("--p", its_opts->p, "Matrix residue modulus");
    its->add_option("--sigma", its_opts->sigma, "Legitimate noise width");
    its->add_option("--adv-sigma", its_opts->adv_sigma, "Adversarial noise scale");
    its->add_option("--delta", its_opts->delta, "Epsilon-security slack");
    its->add_option("--trials", its_opts->trials, "Simulation trials");
    its->add_option("--mode", its_opts->mode, "categorical or traditional")
        ->check(CLI::IsMember({"categorical", "traditional"}));
    its->add_option("--rng-seed", its_opts->rng_seed, "Integer RNG seed");
    its->add_option("--out", its_opts->out, "Report file (default stdout)");
    its->callback([its_opts] { run_wiretap_its(*its_opts); });

    // ztnet
    auto* zt = app.add_subcommand("ztnet", "Zero-trust broker, agent, client, attacks");
    zt->require_subcommand(1);
    auto broker_opts = std::make_shared<ZtBrokerOpts>();
    auto* broker = zt->add_subcommand("broker", "Serve the validation pipeline over TCP");
    broker->add_option("--config", broker_opts->config, "policy.json (default: demo policy)");
    broker->add_option("--listen", broker_opts->listen, "host:port");
    broker->add_option("--out-public", broker_opts->out_public, "Write the payload public key here");
    broker->add_option("--now", broker_opts->now, "Simulated start time (ms); 0 = wall clock");
    broker->add_option("--window-start", broker_opts->window_start, "Agent window start (minute)");
    broker->add_option("--window-end", broker_opts->window_end, "Agent window end (minute)");
    broker->callback([broker_opts] { run_zt_broker(*broker_opts); });

    auto agent_opts = std::make_shared<ZtAgentOpts>();
    auto* agent = zt->add_subcommand("agent", "Serve agent validation and the model stub");
    agent->add_option("--listen", agent_opts->listen, "host:port");
    agent->add_option("--models", agent_opts->models, "Comma list of served models");
    agent->add_option("--now", agent_opts->now, "Simulated start time (ms); 0 = wall clock");
    agent->add_option("--window-start", agent_opts->window_start, "Window start (minute)");
    agent->add_option("--window-end", agent_opts->window_end, "Window end (minute)");
    agent->callback([agent_opts] { run_zt_agent(*agent_opts); });

    auto client_opts = std::make_shared<ZtClientOpts>();
    auto* client = zt->add_subcommand("client", "Send one signed request");
    client->add_option("--to", client_opts->to, "Broker host:port");
    client->add_option("--client-id", client_opts->client_id, "Client identifier");
    client->add_option("--token-id", client_opts->token_id, "Token id")->required();
    client->add_option("--secret-hex", client_opts->secret_hex, "Token secret (hex)")->required();
    client->add_option("--model", client_opts->model, "Requested model");
    client->add_option("--prompt", client_opts->prompt, "Prompt text");
    client->add_option("--key", client_opts->key, "Broker public key file (encrypts the payload)");
    client->add_option("--seed", client_opts->seed, "Encryption seed text");
    client->add_option("--now", client_opts->now, "Timestamp override (ms)");
    client->add_option("--retries", client_opts->retries, "Maximum retries");
    client->add_option("--rng-seed", client_opts->rng_seed, "Jitter seed");
    client->callback([client_opts] { run_zt_client(*client_opts); });

    auto attack_opts = std::make_shared<ZtAttackOpts>();
    auto* attack = zt->add_subcommand("attack", "Synthesized attack mix through the broker checks");
    attack->add_option("--mix", attack_opts->mix, "invalid,ip,expired counts");
    attack->add_option("--legit", attack_opts->legit, "Legitimate requests to interleave");
    attack->add_option("--rng-seed", attack_opts->rng_seed, "Integer RNG seed");
    attack->add_option("--now", attack_opts->now, "Fixed timestamp (ms)");
    attack->add_option("--config", attack_opts->config, "policy.json (default: demo policy)");
    attack->add_option("--out", attack_opts->out, "Ledger file (default stdout)");
    attack->callback([attack_opts] { run_zt_attack(*attack_opts); });

    auto report_opts = std::make_shared<ZtReportOpts>();
    auto* report = zt->add_subcommand("report", "Statistics document from a ledger");
    report->add_option("--in", report_opts->in, "Ledger JSON file")->required();
    report->add_option("--out", report_opts->out, "Report file (default stdout)");
    report->add_flag("--cpa", report_opts->cpa, "Append a chosen-plaintext distinctness probe");
    report->add_option("--cpa-trials", report_opts->cpa_trials, "Probe trials");
    report->add_option("--cpa-seed", report_opts->cpa_seed, "Probe seed text");
    report->callback([report_opts] { run_zt_report(*report_opts); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: params-invalid: " << e.what() << "\n";
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "error: domain-error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: io-error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 1;
    }
    log_debug("done");
    return 0;
}
