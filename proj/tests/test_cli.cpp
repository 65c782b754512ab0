#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "faith/bytes.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(FAITH_CLI_PATH) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    RunResult r;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int status = pclose(p);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path work_root() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "faith_test_cli";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string realm_arg(const fs::path& realm) { return "--realm " + realm.string() + " "; }

void write_sample(const fs::path& p, size_t n, uint8_t seed) {
    std::ofstream out(p, std::ios::binary);
    uint64_t x = seed * 0x9e3779b97f4a7c15ull + 1;
    for (size_t i = 0; i < n; ++i) {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        out.put(char(uint8_t(x)));
    }
}

bool files_equal(const fs::path& a, const fs::path& b) {
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    std::string sa((std::istreambuf_iterator<char>(fa)), {});
    std::string sb((std::istreambuf_iterator<char>(fb)), {});
    return sa == sb;
}

}  // namespace

TEST_CASE("cli: happy path from setup to audited retrieval") {
    fs::path realm = work_root() / "realm_ok";
    std::string R = realm_arg(realm);

    auto r = run(R + "setup --chunk-size 4096");
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(realm / "params/params.json"));

    CHECK(run(R + "keygen --name owner").exit_code == 0);
    CHECK(run(R + "keygen --name user").exit_code == 0);
    CHECK(fs::exists(realm / "keys/owner.key"));
    CHECK(fs::exists(realm / "keys/user.pub"));

    fs::path sample = work_root() / "sample.bin";
    write_sample(sample, 200 * 1024 + 5, 1);
    r = run(R + "upload --owner owner --file " + sample.string() + " --id doc-1");
    CHECK(r.exit_code == 0);

    r = run(R + "grant --owner owner --user user --id doc-1");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("grant-1") != std::string::npos);

    CHECK(run(R + "process --grant grant-1").exit_code == 0);
    CHECK(run(R + "verify --grant grant-1").exit_code == 0);

    fs::path got = work_root() / "doc-1.out";
    r = run(R + "retrieve --user user --grant grant-1 --out " + got.string());
    CHECK(r.exit_code == 0);
    CHECK(files_equal(sample, got));

    CHECK(run(R + "audit").exit_code == 0);

    // json mode emits a parseable object
    r = run(R + "--json verify --grant grant-1");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"ok\"") != std::string::npos);
}

TEST_CASE("cli: a corrupted object is rejected before decryption") {
    fs::path realm = work_root() / "realm_bad";
    std::string R = realm_arg(realm);
    REQUIRE(run(R + "setup --chunk-size 4096").exit_code == 0);
    REQUIRE(run(R + "keygen --name owner").exit_code == 0);
    REQUIRE(run(R + "keygen --name user").exit_code == 0);

    fs::path sample = work_root() / "sample2.bin";
    write_sample(sample, 50 * 1024, 2);
    REQUIRE(run(R + "upload --owner owner --file " + sample.string() +
                " --id doc-bad --fault corrupt_data")
                .exit_code == 0);
    REQUIRE(run(R + "grant --owner owner --user user --id doc-bad").exit_code == 0);
    REQUIRE(run(R + "process --grant grant-1").exit_code == 0);

    fs::path got = work_root() / "doc-bad.out";
    auto r = run(R + "retrieve --user user --grant grant-1 --out " + got.string());
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("integrity") != std::string::npos);
    CHECK_FALSE(fs::exists(got));

    r = run(R + "verify --grant grant-1");
    CHECK(r.exit_code == 2);
}

TEST_CASE("cli: audit flags a tampered block log") {
    fs::path realm = work_root() / "realm_tamper";
    std::string R = realm_arg(realm);
    REQUIRE(run(R + "setup --chunk-size 4096").exit_code == 0);
    REQUIRE(run(R + "keygen --name owner").exit_code == 0);

    fs::path sample = work_root() / "sample3.bin";
    write_sample(sample, 10 * 1024, 3);
    REQUIRE(run(R + "upload --owner owner --file " + sample.string() + " --id doc-t")
                .exit_code == 0);
    REQUIRE(run(R + "audit").exit_code == 0);

    fs::path log = realm / "ledger/blocks.jsonl";
    std::string text;
    {
        std::ifstream in(log, std::ios::binary);
        text.assign(std::istreambuf_iterator<char>(in), {});
    }
    auto pos = text.find("\"file_id\":\"doc-t\"");
    REQUIRE(pos != std::string::npos);
    text[pos + 12] ^= 1;
    {
        std::ofstream out(log, std::ios::binary | std::ios::trunc);
        out << text;
    }
    auto r = run(R + "audit");
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("height") != std::string::npos);
}

TEST_CASE("cli: bad invocations fail without side effects") {
    fs::path realm = work_root() / "realm_usage";
    std::string R = realm_arg(realm);
    CHECK(run(R + "no-such-command").exit_code != 0);
    // operating on a realm that was never set up
    CHECK(run(R + "upload --owner owner --file /nonexistent --id x").exit_code == 1);
    CHECK(run(R + "verify --grant grant-1").exit_code == 1);
    // setup refuses a chunk size outside the supported band
    CHECK(run(R + "setup --chunk-size 1000").exit_code == 1);
}
