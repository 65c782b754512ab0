#include "doctest.h"

#include <algorithm>
#include <filesystem>

#include "faith/bench.hpp"

using namespace faith;
namespace fs = std::filesystem;

namespace {

std::vector<bench::BenchResult> sample_results() {
    std::vector<bench::BenchResult> rs;
    for (uint64_t mib : {1, 16, 64, 256}) {
        bench::BenchResult r;
        r.scenario = "se_enc";
        r.size_bytes = mib * 1024 * 1024;
        r.reps = 5;
        r.mean_ms = 3.25 * double(mib);
        r.median_ms = 3.2 * double(mib);
        r.stddev_ms = 0.113;
        r.machine = "test machine x1";
        rs.push_back(r);

        r.scenario = "proof_size";
        r.proof_bytes = 1071;
        r.mean_ms = 4.5;
        r.median_ms = 4.4;
        rs.push_back(r);
    }
    return rs;
}

}  // namespace

TEST_CASE("csv round trips at its stated precision") {
    auto rs = sample_results();
    std::string csv = bench::to_csv(rs);
    CHECK(csv.rfind("# " + std::string(bench::CSV_VERSION), 0) == 0);
    auto back = bench::from_csv(csv);
    REQUIRE(back.size() == rs.size());
    for (size_t i = 0; i < rs.size(); ++i) {
        CHECK(back[i].scenario == rs[i].scenario);
        CHECK(back[i].size_bytes == rs[i].size_bytes);
        CHECK(back[i].reps == rs[i].reps);
        CHECK(back[i].mean_ms == doctest::Approx(rs[i].mean_ms).epsilon(1e-4));
        CHECK(back[i].proof_bytes == rs[i].proof_bytes);
        CHECK(back[i].machine == rs[i].machine);
    }
    // a second pass through the text form is exact
    CHECK(bench::to_csv(back) == csv);
}

TEST_CASE("csv parsing rejects damaged rows") {
    CHECK_THROWS_AS(bench::from_csv("se_enc,notanumber,5,1,1,0,0,1,m\n"), InvalidEncoding);
    CHECK_THROWS_AS(bench::from_csv("se_enc,1048576,5,1.0,1.0\n"), InvalidEncoding);
    CHECK(bench::from_csv("").empty());
    CHECK(bench::from_csv("# comment only\n").empty());
}

TEST_CASE("plots are a pure function of the results") {
    auto rs = sample_results();
    auto plots = bench::render_plots(rs);
    REQUIRE(!plots.empty());
    for (const auto& p : plots) {
        CHECK(!p.filename.empty());
        CHECK(p.svg.rfind("<svg", 0) == 0);
        CHECK(p.svg.find("</svg>") != std::string::npos);
    }

    // rendering from the csv round trip is byte-identical
    auto back = bench::from_csv(bench::to_csv(rs));
    auto plots2 = bench::render_plots(back);
    REQUIRE(plots2.size() == plots.size());
    for (size_t i = 0; i < plots.size(); ++i) {
        CHECK(plots2[i].filename == plots[i].filename);
        CHECK(plots2[i].svg == plots[i].svg);
    }
}

TEST_CASE("the scenario list is closed and spell-checked") {
    const auto& all = bench::all_scenarios();
    CHECK(all.size() == 14);
    for (const char* want : {"se_enc", "se_dec", "pre_keygen", "pre_enc", "pre_rekeygen",
                             "pre_reenc", "pre_dec", "prove_time", "verify_time", "proof_size",
                             "zkp_verify", "flat_hash_recompute", "ledger_put", "ledger_get"})
        CHECK(std::find(all.begin(), all.end(), want) != all.end());

    bench::BenchConfig cfg;
    cfg.scenarios = {"no_such_scenario"};
    cfg.work_dir = (fs::temp_directory_path() / "faith_test_bench").string();
    auto out = bench::run_suite(cfg);
    CHECK(out.results.empty());
    REQUIRE(!out.errors.empty());
    CHECK(out.errors[0].find("no_such_scenario") != std::string::npos);
}

TEST_CASE("a fast scenario subset runs end to end") {
    bench::BenchConfig cfg;
    cfg.scenarios = {"pre_keygen", "ledger_put", "ledger_get"};
    cfg.reps = 5;
    cfg.work_dir = (fs::temp_directory_path() / "faith_test_bench").string();
    auto out = bench::run_suite(cfg);
    CHECK(out.errors.empty());
    REQUIRE(out.results.size() == 3);
    for (const auto& r : out.results) {
        CHECK(r.mean_ms > 0.0);
        CHECK(r.reps >= 5);
        CHECK(!r.machine.empty());
    }
}
