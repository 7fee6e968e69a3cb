// End-to-end checks of the elwe binary: exit codes, formats, file round trips.
#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("elwe-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct CliRun {
    int exit_code = -1;
    std::string out;
    std::string err;
};

// Runs the built binary through the shell, capturing both streams.
CliRun run_cli(const TempDir& dir, const std::string& args) {
    static int serial = 0;
    std::string out_path = dir.file("run-" + std::to_string(serial) + ".out");
    std::string err_path = dir.file("run-" + std::to_string(serial) + ".err");
    ++serial;
    std::string cmd = std::string("\"") + ELWE_CLI_PATH + "\" " + args + " >" + out_path +
                      " 2>" + err_path;
    int status = std::system(cmd.c_str());
    CliRun r;
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    r.exit_code = WEXITSTATUS(status);
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    return r;
}

}  // namespace

TEST_CASE("expand prints one coefficient per line", "[cli]") {
    TempDir dir;
    CliRun r = run_cli(dir, "engel expand --seed 3/10 --terms 10");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "4\n5\n");
    CHECK(r.err.empty());

    // Decimal seed text is the same rational.
    CliRun decimal = run_cli(dir, "engel expand --seed 0.3 --terms 10");
    CHECK(decimal.out == "4\n5\n");
}

TEST_CASE("expand json reports termination and coefficients", "[cli]") {
    TempDir dir;
    CliRun r = run_cli(dir, "engel expand --seed 7/10 --format json");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["terminated"] == true);
    CHECK(j["coefficients"] == json::array({"2", "3", "5"}));
}

TEST_CASE("missing subcommands and bad flags exit with 2", "[cli]") {
    TempDir dir;
    CHECK(run_cli(dir, "").exit_code == 2);
    CHECK(run_cli(dir, "engel").exit_code == 2);
    CHECK(run_cli(dir, "engel expand").exit_code == 2);  // --seed is required
    CHECK(run_cli(dir, "frobnicate").exit_code == 2);
    CHECK(run_cli(dir, "engel expand --seed 1/2 --no-such-flag").exit_code == 2);
}

TEST_CASE("help exits cleanly", "[cli]") {
    TempDir dir;
    CliRun r = run_cli(dir, "--help");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("engel") != std::string::npos);
    CHECK(r.out.find("ztnet") != std::string::npos);
}

TEST_CASE("invalid parameters exit with 1 and a tagged message", "[cli]") {
    TempDir dir;
    CliRun r = run_cli(dir, "lwe keygen --n 32 --q 13 --p 13 --seed 3/7 --out-public " +
                                dir.file("pk.bin"));
    CHECK(r.exit_code == 1);
    CHECK(r.out.empty());
    CHECK(r.err.find("error: params-invalid:") != std::string::npos);

    CliRun zero_seed = run_cli(dir, "engel expand --seed 0/5");
    CHECK(zero_seed.exit_code == 1);
    CHECK(zero_seed.err.find("error:") != std::string::npos);
}

TEST_CASE("keygen, encrypt and decrypt round-trip through files", "[cli]") {
    TempDir dir;
    std::string keygen = "lwe keygen --n 32 --q 3329 --p 13 --sigma 3.2 --seed 3/7 --out-public " +
                         dir.file("pk.bin") + " --out-secret " + dir.file("sk.bin") +
                         " --out-seed " + dir.file("seed.bin");
    REQUIRE(run_cli(dir, keygen).exit_code == 0);
    CHECK(fs::exists(dir.file("pk.bin")));
    CHECK(fs::exists(dir.file("sk.bin")));
    CHECK(fs::exists(dir.file("seed.bin")));

    std::string encrypt = "lwe encrypt --key " + dir.file("pk.bin") +
                          " --message \"hello world\" --seed 2/7 --out " + dir.file("ct.bin");
    REQUIRE(run_cli(dir, encrypt).exit_code == 0);

    std::string decrypt = "lwe decrypt --key " + dir.file("sk.bin") + " --in " + dir.file("ct.bin");
    CliRun r = run_cli(dir, decrypt);
    CHECK(r.exit_code == 0);
    CHECK(r.out == "hello world");

    std::string to_file = decrypt + " --out " + dir.file("msg.txt");
    REQUIRE(run_cli(dir, to_file).exit_code == 0);
    CHECK(slurp(dir.file("msg.txt")) == "hello world");

    // Decrypting with the public key record is a usage error.
    CliRun wrong = run_cli(dir, "lwe decrypt --key " + dir.file("pk.bin") + " --in " + dir.file("ct.bin"));
    CHECK(wrong.exit_code == 1);
}

TEST_CASE("keygen requires at least one output file", "[cli]") {
    TempDir dir;
    CliRun r = run_cli(dir, "lwe keygen --n 32 --q 3329 --seed 3/7");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("error: params-invalid:") != std::string::npos);
}

TEST_CASE("stream output files are byte-identical across runs", "[cli]") {
    TempDir dir;
    std::string base = "engel stream --seed 3/10 --count 5 --format json --out ";
    REQUIRE(run_cli(dir, base + dir.file("a.json")).exit_code == 0);
    REQUIRE(run_cli(dir, base + dir.file("b.json")).exit_code == 0);
    std::string a = slurp(dir.file("a.json"));
    CHECK(a == slurp(dir.file("b.json")));
    json j = json::parse(a);
    CHECK(j["coefficients"] == json::array({4, 5, 2, 4, 9}));
}

TEST_CASE("agility check names the failing law", "[cli]") {
    TempDir dir;
    CliRun ok = run_cli(dir, "agility check --from 256,4096,3.2 --to 512,8192,3.2");
    CHECK(ok.exit_code == 0);
    CHECK(ok.out == "valid\n");

    CliRun shrink = run_cli(dir, "agility check --from 512,8192,3.2 --to 256,4096,3.2");
    CHECK(shrink.exit_code == 0);
    CHECK(shrink.out.rfind("invalid: modulus-shrink", 0) == 0);

    CliRun as_json = run_cli(dir, "agility check --from 256,4096,3.2 --to 512,8192,9.0 --format json");
    CHECK(as_json.exit_code == 0);
    json j = json::parse(as_json.out);
    CHECK(j["ok"] == false);
    CHECK(j["reason"].get<std::string>().rfind("sigma-growth", 0) == 0);

    CHECK(run_cli(dir, "agility check --from 256,4096 --to 512,8192,3.2").exit_code == 1);
}

TEST_CASE("agility transition reports a verified path per item", "[cli]") {
    TempDir dir;
    CliRun r = run_cli(dir, "agility transition --from 32,4096,3.2 --to 48,8192,3.2 --items 3");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    REQUIRE(j["items"].size() == 3);
    for (const auto& item : j["items"]) {
        CHECK(item["path"] == "transport");
        CHECK(item["verified"] == true);
    }
}

TEST_CASE("noise compare emits one divergence cell", "[cli]") {
    TempDir dir;
    CliRun r = run_cli(dir, "noise compare --n 32 --q 1024 --sigma 4 --count 60 --seed 1");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["n"] == 32);
    CHECK(j["q"] == 1024);
    CHECK(j["samples"] == 60);
    CHECK(j["wasserstein"].is_number());
    CHECK(j["kl"].is_number());
    CHECK_FALSE(j.contains("error"));

    // An infeasible cell carries its error in place of a silent zero.
    CliRun bad = run_cli(dir, "noise compare --n 512 --q 1024 --sigma 3.2 --count 10 --seed 1");
    REQUIRE(bad.exit_code == 0);
    json b = json::parse(bad.out);
    CHECK(b.contains("error"));
}

TEST_CASE("noise sweep prints a csv grid in row-major order", "[cli]") {
    TempDir dir;
    CliRun r = run_cli(dir,
                       "noise sweep --n-grid 16,32 --q-grid 1024 --sigma-grid 4,8 --per-cell 40 --seed 1");
    REQUIRE(r.exit_code == 0);
    std::vector<std::string> lines;
    std::string line;
    std::istringstream in(r.out);
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "n,q,sigma,wasserstein,kl,samples,error");
    CHECK(lines[1].rfind("16,1024,4", 0) == 0);
    CHECK(lines[2].rfind("16,1024,8", 0) == 0);
    CHECK(lines[3].rfind("32,1024,4", 0) == 0);
    CHECK(lines[4].rfind("32,1024,8", 0) == 0);
}

TEST_CASE("wiretap region rate matches the closed form", "[cli]") {
    TempDir dir;
    CliRun r = run_cli(dir, "wiretap region --main-grid 10 --eve-grid 5 --delta-grid 0");
    REQUIRE(r.exit_code == 0);
    std::istringstream in(r.out);
    std::string header, row;
    REQUIRE(std::getline(in, header));
    REQUIRE(std::getline(in, row));
    CHECK(header == "main_db,eve_db,delta_db,rate");
    auto last_comma = row.rfind(',');
    double rate = std::stod(row.substr(last_comma + 1));
    CHECK(rate == Catch::Approx(0.7010292051).epsilon(1e-6));
}

TEST_CASE("attack ledgers are deterministic and carry the mix", "[cli]") {
    TempDir dir;
    std::string base = "ztnet attack --mix 5,6,4 --legit 3 --rng-seed 9 --now 1700000000000 --out ";
    REQUIRE(run_cli(dir, base + dir.file("a.json")).exit_code == 0);
    REQUIRE(run_cli(dir, base + dir.file("b.json")).exit_code == 0);
    std::string a = slurp(dir.file("a.json"));
    CHECK(a == slurp(dir.file("b.json")));

    json j = json::parse(a);
    CHECK(j["totals"]["requests"] == 18);
    CHECK(j["totals"]["accepted"] == 3);
    CHECK(j["totals"]["rejected"] == 15);
    CHECK(j["by_reason"]["invalid_token"] == 5);
    CHECK(j["by_reason"]["ip_not_whitelisted"] == 6);
    CHECK(j["by_reason"]["expired_token"] == 4);
    CHECK(j["attack"]["ground_truth_mismatches"] == 0);
}

TEST_CASE("report renders statistics from a saved ledger", "[cli]") {
    TempDir dir;
    REQUIRE(run_cli(dir, "ztnet attack --mix 4,3,2 --legit 2 --rng-seed 1 --now 1700000000000 --out " +
                             dir.file("ledger.json"))
                .exit_code == 0);
    CliRun r = run_cli(dir, "ztnet report --in " + dir.file("ledger.json") +
                                " --cpa --cpa-trials 20 --cpa-seed 3/7");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    for (const auto& key : {"totals", "by_reason", "components", "cache", "reconnect", "attack", "cpa"}) {
        CHECK(j.contains(key));
    }
    CHECK(j["cpa"]["distinct_fraction"] == 1.0);
    CHECK(j["totals"]["rejection_rate"] == Catch::Approx(9.0 / 11.0));

    CHECK(run_cli(dir, "ztnet report --in " + dir.file("missing.json")).exit_code == 1);
}
