// Acceptance suite: one line per criterion, pass/fail decided at fixed
// tolerances. Run with --large to add the 5 GiB recompute comparison.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "faith/bench.hpp"
#include "faith/ledger.hpp"
#include "faith/proofs.hpp"
#include "faith/protocol.hpp"

using namespace faith;
namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

namespace {

constexpr uint64_t MIB = 1024 * 1024;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(const char* pattern, ...) {
    va_list args;
    va_start(args, pattern);
    char buf[512];
    vsnprintf(buf, sizeof buf, pattern, args);
    va_end(args);
    return buf;
}

void fill_pattern(Bytes& b, uint64_t seed) {
    uint64_t x = seed * 0x9e3779b97f4a7c15ull + 1;
    for (auto& v : b) {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        v = uint8_t(x);
    }
}

void write_pattern_file(const fs::path& p, uint64_t total, uint64_t seed) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    Bytes block(1 * MIB);
    uint64_t written = 0;
    uint64_t chunk_seed = seed;
    while (written < total) {
        uint64_t n = std::min<uint64_t>(block.size(), total - written);
        block.resize(n);
        fill_pattern(block, chunk_seed++);
        out.write(reinterpret_cast<const char*>(block.data()), std::streamsize(n));
        written += n;
    }
}

Digest32 file_digest(const fs::path& p) {
    Sha256Stream h;
    std::ifstream in(p, std::ios::binary);
    Bytes buf(1 * MIB);
    while (in) {
        in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size()));
        auto got = size_t(in.gcount());
        if (got == 0) break;
        h.update(ByteView(buf.data(), got));
    }
    return h.finish();
}

const bench::BenchResult* find_result(const std::vector<bench::BenchResult>& rs,
                                      const std::string& scenario, uint64_t size_bytes) {
    for (const auto& r : rs)
        if (r.scenario == scenario && r.size_bytes == size_bytes) return &r;
    return nullptr;
}

uint32_t ceil_log2(uint64_t n) {
    if (n <= 1) return 0;
    return uint32_t(std::bit_width(n - 1));
}

double r_squared(const std::vector<std::pair<double, double>>& pts) {
    double n = double(pts.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double a = (sy - b * sx) / n;
    double ybar = sy / n, ss_res = 0, ss_tot = 0;
    for (auto [x, y] : pts) {
        ss_res += (y - (a + b * x)) * (y - (a + b * x));
        ss_tot += (y - ybar) * (y - ybar);
    }
    return ss_tot == 0 ? 1.0 : 1.0 - ss_res / ss_tot;
}

struct Reporter {
    int failures = 0;
    void line(int id, bool pass, const std::string& detail) {
        std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
    }
    void note(const std::string& text) {
        std::printf("              %s\n", text.c_str());
        std::fflush(stdout);
    }
};

// ---- criterion 1: 64 MiB end to end inside ten minutes --------------------

void criterion_1(Reporter& rep, const fs::path& work) {
    auto t0 = clock_type::now();
    fs::path dir = work / "c1";
    fs::create_directories(dir);
    fs::path src = dir / "input.bin";
    write_pattern_file(src, 64 * MIB, 101);

    protocol::SystemParams params = protocol::ta_setup({});
    ledger::Ledger led(dir / "blocks.jsonl");
    protocol::StorageProvider sp(params, led, dir / "sp");
    SystemRng rng;
    protocol::DataOwner owner(params, rng);
    protocol::DataUser user(params, rng);

    auto up = owner.upload(sp, led, src, "big-file");
    std::string gid = owner.grant(sp, user.public_key(), "big-file");
    sp.process_grant(gid);
    fs::path out = dir / "output.bin";
    auto res = user.retrieve_to_file(sp, led, gid, out);

    double secs = seconds_since(t0);
    bool intact = res.ok && file_digest(src) == file_digest(out);
    bool pass = intact && secs < 600.0;
    rep.line(1, pass,
             fmt("64 MiB upload/grant/process/retrieve in %.1f s (limit 600 s), "
                 "%llu chunks, plaintext %s",
                 secs, (unsigned long long)up.commitment.n_chunks,
                 intact ? "intact" : "DAMAGED"));
}

// ---- criterion 2: small-group delegation algebra ---------------------------

void criterion_2(Reporter& rep) {
    using Toy = pairing_core::ToyBackend;
    bool trace_ok = true;

    auto ctx = pairing_core::toy_oracle_ctx(101);
    pre::KeyPair<Toy> owner, user;
    owner.s1 = Toy::scalar_from_u64(ctx, 3);
    owner.s2 = Toy::scalar_from_u64(ctx, 5);
    owner.pk.pkT = Toy::gt_pow(ctx, ctx.gT, owner.s1);
    owner.pk.pk2 = Toy::g2_pow(ctx, ctx.h2, owner.s2);
    user.s1 = Toy::scalar_from_u64(ctx, 7);
    user.s2 = Toy::scalar_from_u64(ctx, 11);
    user.pk.pkT = Toy::gt_pow(ctx, ctx.gT, user.s1);
    user.pk.pk2 = Toy::g2_pow(ctx, ctx.h2, user.s2);

    Toy::Gt m = Toy::gt_pow(ctx, ctx.gT, Toy::scalar_from_u64(ctx, 20));
    auto c = pre::detail::enc_with_scalar<Toy>(ctx, owner.pk, m, Toy::scalar_from_u64(ctx, 13));
    trace_ok &= c.c2.v == (20 + 39) % 101;  // mask exponent s1*r = 39
    auto rk = pre::rekeygen<Toy>(ctx, owner, user.pk);
    trace_ok &= rk.rk.v == 33;
    auto cp = pre::reenc<Toy>(ctx, rk, c);
    trace_ok &= cp.c1p.v == 25;
    auto inv = Toy::scalar_inverse(ctx, user.s2);
    trace_ok &= inv.v == 46;
    auto unmask = Toy::gt_pow(ctx, Toy::gt_inverse(ctx, cp.c1p), inv);
    trace_ok &= unmask.v == 62;
    trace_ok &= (39 + unmask.v) % 101 == 0;
    trace_ok &= pre::dec_user<Toy>(ctx, user, cp).v == m.v;

    // randomized round trips across several group sizes
    uint32_t primes[] = {101, 257, 4099, 65521};
    std::vector<Toy::Ctx> ctxs;
    for (uint32_t p : primes) ctxs.push_back(Toy::make_ctx(p));
    TestRng rng(2024);
    int total = 10000, good = 0;
    for (int i = 0; i < total; ++i) {
        const auto& cx = ctxs[size_t(i) % ctxs.size()];
        auto o = pre::keygen<Toy>(cx, rng);
        auto u = pre::keygen<Toy>(cx, rng);
        Toy::Gt msg = Toy::gt_pow(cx, cx.gT, Toy::scalar_random(cx, rng));
        auto c2 = pre::enc<Toy>(cx, o.pk, msg, rng);
        auto cp2 = pre::reenc<Toy>(cx, pre::rekeygen<Toy>(cx, o, u.pk), c2);
        if (pre::dec_owner<Toy>(cx, o, c2).v == msg.v &&
            pre::dec_user<Toy>(cx, u, cp2).v == msg.v)
            ++good;
    }
    rep.line(2, trace_ok && good == total,
             fmt("exponent trace 39 + 62 = 0 mod 101 %s; %d/%d randomized delegation "
                 "round trips over 4 group sizes",
                 trace_ok ? "holds" : "BROKEN", good, total));
}

// ---- criterion 3: every fault type caught, with its reason, pre-plaintext --

void criterion_3(Reporter& rep, const fs::path& work) {
    struct Case {
        protocol::Fault fault;
        proofs::VerifyFailure reason;
    };
    Case cases[] = {
        {protocol::Fault::corrupt_data, proofs::VerifyFailure::integrity},
        {protocol::Fault::corrupt_reenc, proofs::VerifyFailure::reenc},
        {protocol::Fault::statement_mismatch, proofs::VerifyFailure::binding},
        {protocol::Fault::stale_proof, proofs::VerifyFailure::integrity},
    };
    const int trials = 100;
    protocol::SystemParams params = protocol::ta_setup({4096, commitment::HashAlg::poseidon2});
    SystemRng sys_rng;
    TestRng data_rng(31337);
    protocol::DataOwner owner(params, sys_rng);
    protocol::DataUser user(params, sys_rng);

    int good = 0, total = 0;
    std::string first_bad;
    for (const Case& tc : cases) {
        fs::path dir = work / (std::string("c3_") + protocol::fault_name(tc.fault));
        ledger::Ledger led(dir / "blocks.jsonl");
        for (int t = 0; t < trials; ++t) {
            ++total;
            protocol::StorageProvider sp(params, led, dir / ("sp" + std::to_string(t)),
                                         {tc.fault});
            std::string id = "f-" + std::to_string(t);
            Bytes pt(1 + data_rng.below(50000));
            data_rng.fill(pt);
            owner.upload_bytes(sp, led, pt, id);
            std::string gid = owner.grant(sp, user.public_key(), id);
            sp.process_grant(gid);
            auto rb = user.retrieve_bytes(sp, led, gid);
            bool ok = !rb.result.ok && rb.result.reason == tc.reason && rb.plaintext.empty();
            if (ok)
                ++good;
            else if (first_bad.empty())
                first_bad = fmt(" (first miss: %s trial %d got %s)",
                                protocol::fault_name(tc.fault), t,
                                proofs::failure_name(rb.result.reason));
        }
    }
    rep.line(3, good == total,
             fmt("%d/%d faulty deliveries rejected with the expected reason and "
                 "zero plaintext bytes released%s",
                 good, total, first_bad.c_str()));
}

// ---- criteria 4, 5, 8(size): one shared fixed-size benchmark run -----------

struct FixedSuite {
    bench::SuiteOutcome outcome;
    std::vector<uint64_t> sizes;
};

FixedSuite run_fixed_suite(const fs::path& work) {
    FixedSuite fsuite;
    fsuite.sizes = {1 * MIB, 16 * MIB, 64 * MIB, 256 * MIB};
    bench::BenchConfig cfg;
    cfg.scenarios = {"verify_time", "zkp_verify", "flat_hash_recompute", "proof_size"};
    cfg.sizes = fsuite.sizes;
    cfg.reps = 5;
    cfg.work_dir = work / "bench_fixed";
    fsuite.outcome = bench::run_suite(cfg);
    return fsuite;
}

void criterion_4(Reporter& rep, const FixedSuite& fsuite) {
    double lo = 1e300, hi = 0;
    int found = 0;
    for (uint64_t s : fsuite.sizes)
        if (const auto* r = find_result(fsuite.outcome.results, "verify_time", s)) {
            ++found;
            lo = std::min(lo, r->mean_ms);
            hi = std::max(hi, r->mean_ms);
        }
    if (found != 4) {
        rep.line(4, false, "verification timings missing from the benchmark run");
        return;
    }
    double ratio = hi / lo;
    rep.line(4, ratio < 2.0,
             fmt("proof verification wall time over 1/16/64/256 MiB: %.2f..%.2f ms, "
                 "max/min %.3f (limit 2.0)",
                 lo, hi, ratio));
}

void criterion_5(Reporter& rep, const FixedSuite& fsuite, bool large, const fs::path& work) {
    const auto* zkp = find_result(fsuite.outcome.results, "zkp_verify", 256 * MIB);
    const auto* flat = find_result(fsuite.outcome.results, "flat_hash_recompute", 256 * MIB);
    if (!zkp || !flat) {
        rep.line(5, false, "256 MiB recompute comparison missing from the benchmark run");
        return;
    }
    double pct = 100.0 * zkp->mean_ms / flat->mean_ms;
    rep.line(5, pct <= 10.0,
             fmt("verifying the served proof at 256 MiB costs %.2f ms = %.1f%% of a "
                 "full hash recompute (%.2f ms, limit 10%%)",
                 zkp->mean_ms, pct, flat->mean_ms));

    if (!large) {
        rep.note("5 GiB recompute comparison skipped; run with --large to include it");
        return;
    }
    bench::BenchConfig cfg;
    cfg.scenarios = {"zkp_verify", "flat_hash_recompute"};
    cfg.sizes = {5ull * 1024 * MIB};
    cfg.reps = 5;
    cfg.alg = commitment::HashAlg::sha256;  // keeps the one-off fixture build tractable
    cfg.work_dir = work / "bench_large";
    auto out = bench::run_suite(cfg);
    const auto* z5 = find_result(out.results, "zkp_verify", cfg.sizes[0]);
    const auto* f5 = find_result(out.results, "flat_hash_recompute", cfg.sizes[0]);
    if (!z5 || !f5) {
        rep.note("5 GiB leg failed to produce timings");
        return;
    }
    double pct5 = 100.0 * z5->mean_ms / f5->mean_ms;
    rep.note(fmt("5 GiB leg: proof check %.2f ms = %.2f%% of recompute (%.0f ms); "
                 "2%% target %s",
                 z5->mean_ms, pct5, f5->mean_ms, pct5 <= 2.0 ? "met" : "missed"));
}

// ---- criterion 6: key-handling operations stay interactive -----------------

void criterion_6(Reporter& rep, const fs::path& work) {
    bench::BenchConfig cfg;
    cfg.scenarios = {"pre_ops"};
    cfg.reps = 1000;
    cfg.work_dir = work / "bench_pre";
    auto out = bench::run_suite(cfg);

    const char* ops[] = {"pre_keygen", "pre_enc", "pre_rekeygen", "pre_reenc", "pre_dec"};
    bool pass = true;
    std::string detail = "mean over 1000 reps:";
    for (const char* op : ops) {
        const auto* r = find_result(out.results, op, 0);
        if (!r) {
            pass = false;
            detail += fmt(" %s missing", op);
            continue;
        }
        pass &= r->mean_ms < 50.0;
        detail += fmt(" %s %.2f ms", op + 4, r->mean_ms);
    }
    detail += " (limit 50 ms each)";
    rep.line(6, pass, detail);
}

// ---- criterion 7: sealing scales linearly, opening keeps up ----------------

void criterion_7(Reporter& rep, const fs::path& work) {
    std::vector<uint64_t> sizes = {64 * MIB, 128 * MIB, 256 * MIB, 512 * MIB};
    bench::BenchConfig cfg;
    cfg.scenarios = {"se_enc", "se_dec"};
    cfg.sizes = sizes;
    cfg.reps = 5;
    cfg.work_dir = work / "bench_linear";
    auto out = bench::run_suite(cfg);

    std::vector<std::pair<double, double>> pts;
    bool dec_ok = true, have_all = true;
    double worst_dec_ratio = 0;
    for (uint64_t s : sizes) {
        const auto* e = find_result(out.results, "se_enc", s);
        const auto* d = find_result(out.results, "se_dec", s);
        if (!e || !d) {
            have_all = false;
            continue;
        }
        pts.push_back({double(s) / double(MIB), e->mean_ms});
        double ratio = d->mean_ms / e->mean_ms;
        worst_dec_ratio = std::max(worst_dec_ratio, ratio);
        dec_ok &= ratio <= 2.0;
    }
    if (!have_all || pts.size() != sizes.size()) {
        rep.line(7, false, "sealing timings missing from the benchmark run");
        return;
    }
    double r2 = r_squared(pts);
    rep.line(7, r2 > 0.9 && dec_ok,
             fmt("sealing time vs size over 64..512 MiB fits a line with R^2 = %.4f "
                 "(floor 0.9); opening at worst %.2fx sealing (limit 2x)",
                 r2, worst_dec_ratio));
}

// ---- criterion 8: aggregation shape and size-independent proofs ------------

void criterion_8(Reporter& rep, const FixedSuite& fsuite) {
    proofs::SetupParams sp;
    sp.chunk_size = 4096;
    auto prk_int = proofs::setup(proofs::CircuitId::integrity, sp);
    auto prk_agg = proofs::setup(proofs::CircuitId::aggregate, sp);

    TestRng rng(88);
    bool shape_ok = true;
    std::string shape_bad;
    for (uint64_t n : {1, 2, 3, 4, 5, 8, 16, 33}) {
        std::vector<proofs::LeafProof> leaves;
        for (uint64_t i = 0; i < n; ++i) {
            Bytes c(64 + rng.below(128));
            rng.fill(c);
            leaves.push_back(proofs::prove_chunk(prk_int, c, i));
        }
        proofs::AggregationStats st;
        proofs::aggregate_root(prk_agg, leaves, &st);
        bool ok = st.pair_aggregations == n - 1 && st.depth == ceil_log2(n);
        shape_ok &= ok;
        if (!ok && shape_bad.empty())
            shape_bad = fmt(" (n=%llu gave %llu merges depth %u)", (unsigned long long)n,
                            (unsigned long long)st.pair_aggregations, st.depth);
    }

    uint64_t lo = UINT64_MAX, hi = 0;
    int found = 0;
    for (uint64_t s : fsuite.sizes)
        if (const auto* r = find_result(fsuite.outcome.results, "proof_size", s)) {
            ++found;
            lo = std::min(lo, r->proof_bytes);
            hi = std::max(hi, r->proof_bytes);
        }
    bool size_ok = found == 4 && lo > 0 && double(hi - lo) / double(lo) <= 0.10;
    rep.line(8, shape_ok && size_ok,
             fmt("n-1 merges and ceil(log2 n) depth for n in {1..33}%s; served proof "
                 "%llu..%llu bytes across 1..256 MiB (spread limit 10%%)",
                 shape_bad.c_str(), (unsigned long long)lo, (unsigned long long)hi));
}

// ---- criterion 9: transform proofs are unforgeable and complete ------------

void criterion_9(Reporter& rep) {
    using Bls = pairing_core::BlsBackend;
    const auto& ctx = Bls::ctx();
    TestRng rng(404);
    auto owner = pre::keygen<Bls>(ctx, rng);
    auto user = pre::keygen<Bls>(ctx, rng);
    auto rk = pre::rekeygen<Bls>(ctx, owner, user.pk);

    const int n = 1000;
    int honest_ok = 0, forged_rejected = 0;
    auto m = Bls::gt_pow(ctx, ctx.gT, Bls::scalar_random_nonzero(ctx, rng));
    auto c = pre::enc<Bls>(ctx, owner.pk, m, rng);
    auto cp = pre::reenc<Bls>(ctx, rk, c);
    for (int i = 0; i < n; ++i) {
        // refresh the statement every 50 rounds
        if (i % 50 == 0) {
            m = Bls::gt_pow(ctx, ctx.gT, Bls::scalar_random_nonzero(ctx, rng));
            c = pre::enc<Bls>(ctx, owner.pk, m, rng);
            cp = pre::reenc<Bls>(ctx, rk, c);
        }
        auto sigma = proofs::prove_reenc<Bls>(ctx, c, cp, rk, rng);
        if (proofs::verify_reenc<Bls>(ctx, c, cp, sigma)) ++honest_ok;

        proofs::BlsReEncProof forged;
        forged.A = Bls::gt_pow(ctx, ctx.gT, Bls::scalar_random_nonzero(ctx, rng));
        forged.z = Bls::g2_pow(ctx, ctx.h2, Bls::scalar_random_nonzero(ctx, rng));
        if (!proofs::verify_reenc<Bls>(ctx, c, cp, forged)) ++forged_rejected;
    }
    rep.line(9, honest_ok == n && forged_rejected == n,
             fmt("%d/%d honest transform proofs accepted, %d/%d forgeries rejected",
                 honest_ok, n, forged_rejected, n));
}

// ---- criterion 10: the block log pins any single-byte edit -----------------

void criterion_10(Reporter& rep, const fs::path& work) {
    fs::path dir = work / "c10";
    fs::create_directories(dir);
    fs::path log = dir / "blocks.jsonl";
    {
        ledger::Ledger led(log);
        ledger::HashRecord r;
        r.root.alg = commitment::HashAlg::poseidon2;
        for (int i = 0; i < 10000; ++i) {
            r.file_id = "blk-" + std::to_string(i);
            r.root.bytes.fill(uint8_t(i));
            r.owner.fill(uint8_t(i >> 8));
            led.put_hash(r);
        }
    }

    std::string clean;
    {
        std::ifstream in(log, std::ios::binary);
        clean.assign(std::istreambuf_iterator<char>(in), {});
    }
    std::vector<size_t> line_start = {0};
    for (size_t i = 0; i < clean.size(); ++i)
        if (clean[i] == '\n' && i + 1 < clean.size()) line_start.push_back(i + 1);

    ledger::Ledger led(log);  // audit always re-reads the file from disk
    std::mt19937_64 rng(12021);
    const int trials = 100;
    int exact = 0;
    for (int t = 0; t < trials; ++t) {
        size_t pos;
        char flipped;
        do {
            pos = rng() % clean.size();
            flipped = char(clean[pos] ^ char(1 + rng() % 255));
        } while (clean[pos] == '\n' || flipped == '\n');
        std::string bad = clean;
        bad[pos] = flipped;
        {
            std::ofstream out(log, std::ios::binary | std::ios::trunc);
            out << bad;
        }
        uint64_t edited_height = uint64_t(
            std::upper_bound(line_start.begin(), line_start.end(), pos) - line_start.begin());
        auto repn = led.audit();
        if (!repn.clean && repn.first_bad_height == edited_height) ++exact;
    }
    {
        std::ofstream out(log, std::ios::binary | std::ios::trunc);
        out << clean;
    }
    rep.line(10, exact == trials,
             fmt("%d/%d random single-byte edits in a 10000-block log flagged at the "
                 "exact block height",
                 exact, trials));
}

}  // namespace

int main(int argc, char** argv) {
    bool large = false;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--large") == 0) large = true;

    fs::path work = fs::temp_directory_path() / "faith_acceptance";
    fs::remove_all(work);
    fs::create_directories(work);

    Reporter rep;
    criterion_1(rep, work);
    criterion_2(rep);
    criterion_3(rep, work);
    FixedSuite fsuite = run_fixed_suite(work);
    for (const auto& e : fsuite.outcome.errors)
        rep.note("benchmark error: " + e);
    criterion_4(rep, fsuite);
    criterion_5(rep, fsuite, large, work);
    criterion_6(rep, work);
    criterion_7(rep, work);
    criterion_8(rep, fsuite);
    criterion_9(rep);
    criterion_10(rep, work);

    if (rep.failures == 0) {
        std::printf("all criteria passed\n");
        fs::remove_all(work);
        return 0;
    }
    std::printf("%d criterion(s) failed; artifacts kept in %s\n", rep.failures,
                work.string().c_str());
    return 1;
}
