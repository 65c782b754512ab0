#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "faith/commitment.hpp"

namespace faith::bench {

inline constexpr const char* CSV_VERSION = "faith-bench-csv v1";

struct BenchResult {
    std::string scenario;
    uint64_t size_bytes = 0;  // 0 for scenarios without a size axis
    uint32_t reps = 0;
    double mean_ms = 0.0;
    double median_ms = 0.0;
    double stddev_ms = 0.0;
    uint64_t proof_bytes = 0;  // 0 unless the scenario produces a proof
    uint32_t threads = 1;
    std::string machine;
};

struct BenchConfig {
    std::vector<uint64_t> sizes;        // bytes; empty means {1,16,64,256} MiB
    uint32_t reps = 5;                  // floor of 5 per measured point
    bool large = false;                 // adds a 5 GiB point to streaming scenarios
    commitment::HashAlg alg = commitment::HashAlg::poseidon2;
    std::filesystem::path work_dir;     // scratch space for data files and fixtures
    std::vector<std::string> scenarios;  // empty means all; "pre_ops" expands
    uint64_t seed = 1;                  // drives the deterministic data files
};

// every runnable scenario name, in report order
const std::vector<std::string>& all_scenarios();

std::string machine_fingerprint();

struct SuiteOutcome {
    std::vector<BenchResult> results;
    std::vector<std::string> errors;  // scenario failures; the suite keeps going
};

SuiteOutcome run_suite(const BenchConfig& config, std::ostream* log = nullptr);

std::string to_csv(const std::vector<BenchResult>& results);
std::vector<BenchResult> from_csv(const std::string& text);

struct Plot {
    std::string filename;
    std::string svg;
};

// deterministic: the same results always render byte-identical files
std::vector<Plot> render_plots(const std::vector<BenchResult>& results);

}  // namespace faith::bench
