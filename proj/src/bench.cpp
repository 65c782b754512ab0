#include "faith/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include "faith/envelope.hpp"
#include "faith/errors.hpp"
#include "faith/ledger.hpp"
#include "faith/pre.hpp"
#include "faith/proofs.hpp"
#include "faith/protocol.hpp"
#include "faith/rng.hpp"
#include "faith/sha256.hpp"

namespace faith::bench {

namespace fs = std::filesystem;
using protocol::Backend;

namespace {

constexpr uint64_t MIB = uint64_t(1) << 20;
constexpr uint64_t GIB = uint64_t(1) << 30;
constexpr uint64_t LARGE_SIZE = 5 * GIB;
constexpr size_t IO_BUF = size_t(1) << 20;

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Stats {
    double mean = 0, median = 0, stddev = 0;
};

Stats summarize(std::vector<double> xs) {
    Stats s;
    if (xs.empty()) return s;
    double sum = 0;
    for (double x : xs) sum += x;
    s.mean = sum / double(xs.size());
    std::sort(xs.begin(), xs.end());
    size_t n = xs.size();
    s.median = (n % 2) ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
    double var = 0;
    for (double x : xs) var += (x - s.mean) * (x - s.mean);
    s.stddev = n > 1 ? std::sqrt(var / double(n - 1)) : 0.0;
    return s;
}

// xorshift64*, good enough to defeat any compression in the cipher path
uint64_t next_word(uint64_t& state) {
    state ^= state >> 12;
    state ^= state << 25;
    state ^= state >> 27;
    return state * 0x2545f4914f6cdd1dULL;
}

void ensure_random_file(const fs::path& p, uint64_t size, uint64_t seed) {
    std::error_code ec;
    if (fs::exists(p, ec) && fs::file_size(p, ec) == size) return;
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + p.string());
    uint64_t state = seed | 1;
    std::vector<uint8_t> buf(IO_BUF);
    uint64_t left = size;
    while (left > 0) {
        size_t take = size_t(std::min<uint64_t>(left, buf.size()));
        for (size_t i = 0; i + 8 <= take; i += 8) {
            uint64_t w = next_word(state);
            std::memcpy(buf.data() + i, &w, 8);
        }
        for (size_t i = take & ~size_t(7); i < take; ++i)
            buf[i] = uint8_t(next_word(state));
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(take));
        left -= take;
    }
    out.flush();
    if (!out) throw ConfigError("short write on " + p.string());
}

envelope::ByteSource file_source(std::ifstream& in) {
    return [&in](std::span<uint8_t> buf) -> size_t {
        in.read(reinterpret_cast<char*>(buf.data()),
                static_cast<std::streamsize>(buf.size()));
        return static_cast<size_t>(in.gcount());
    };
}

std::string human_size(uint64_t bytes) {
    char buf[32];
    if (bytes >= GIB && bytes % GIB == 0)
        std::snprintf(buf, sizeof buf, "%" PRIu64 "GiB", bytes / GIB);
    else if (bytes >= MIB && bytes % MIB == 0)
        std::snprintf(buf, sizeof buf, "%" PRIu64 "MiB", bytes / MIB);
    else
        std::snprintf(buf, sizeof buf, "%" PRIu64 "B", bytes);
    return buf;
}

struct EnvFixture {
    fs::path pt;
    fs::path env;
    envelope::FileKey key;
    uint64_t pt_size = 0;
};

struct PipeFixture {
    fs::path env;
    Bytes proof;
    Bytes c;
    Bytes c_prime;
    commitment::Digest h;
};

class Suite {
public:
    Suite(const BenchConfig& config, std::ostream* log)
        : cfg_(config), log_(log), machine_(machine_fingerprint()) {
        if (cfg_.sizes.empty()) cfg_.sizes = {1 * MIB, 16 * MIB, 64 * MIB, 256 * MIB};
        std::sort(cfg_.sizes.begin(), cfg_.sizes.end());
        cfg_.sizes.erase(std::unique(cfg_.sizes.begin(), cfg_.sizes.end()), cfg_.sizes.end());
        cfg_.reps = std::max<uint32_t>(cfg_.reps, 5);
        if (cfg_.work_dir.empty()) cfg_.work_dir = fs::temp_directory_path() / "faith-bench";
        fs::create_directories(cfg_.work_dir);
        protocol::SetupConfig sc;
        sc.alg = cfg_.alg;
        params_ = protocol::ta_setup(sc);
    }

    SuiteOutcome run() {
        std::set<std::string> wanted;
        if (cfg_.scenarios.empty()) {
            for (const auto& s : all_scenarios()) wanted.insert(s);
        } else {
            for (const auto& s : cfg_.scenarios) {
                if (s == "pre_ops") {
                    for (const auto& p :
                         {"pre_keygen", "pre_enc", "pre_rekeygen", "pre_reenc", "pre_dec"})
                        wanted.insert(p);
                } else if (std::find(all_scenarios().begin(), all_scenarios().end(), s) !=
                           all_scenarios().end()) {
                    wanted.insert(s);
                } else {
                    out_.errors.push_back(s + ": unknown scenario");
                }
            }
        }
        auto want = [&](const char* s) { return wanted.count(s) > 0; };

        if (want("se_enc")) guarded("se_enc", [&] { run_se_enc(); });
        if (want("se_dec")) guarded("se_dec", [&] { run_se_dec(); });
        if (want("pre_keygen") || want("pre_enc") || want("pre_rekeygen") ||
            want("pre_reenc") || want("pre_dec"))
            guarded("pre_ops", [&] { run_pre_ops(wanted); });
        if (want("prove_time")) guarded("prove_time", [&] { run_prove_time(); });
        if (want("verify_time")) guarded("verify_time", [&] { run_verify_time(); });
        if (want("proof_size")) guarded("proof_size", [&] { run_proof_size(); });
        if (want("zkp_verify")) guarded("zkp_verify", [&] { run_zkp_verify(); });
        if (want("flat_hash_recompute"))
            guarded("flat_hash_recompute", [&] { run_flat_hash(); });
        if (want("ledger_put")) guarded("ledger_put", [&] { run_ledger_put(); });
        if (want("ledger_get")) guarded("ledger_get", [&] { run_ledger_get(); });
        return std::move(out_);
    }

private:
    BenchConfig cfg_;
    std::ostream* log_;
    std::string machine_;
    SystemRng rng_;
    protocol::SystemParams params_;
    std::map<uint64_t, EnvFixture> envs_;
    std::map<uint64_t, PipeFixture> pipes_;
    SuiteOutcome out_;

    void note(const std::string& line) {
        if (log_) *log_ << "[bench] " << line << std::endl;
    }

    template <class F>
    void guarded(const char* name, F&& f) {
        try {
            f();
        } catch (const std::exception& e) {
            out_.errors.push_back(std::string(name) + ": " + e.what());
            note(std::string(name) + " failed: " + e.what());
        }
    }

    void add(const std::string& scenario, uint64_t size, const std::vector<double>& samples,
             uint64_t proof_bytes) {
        Stats st = summarize(samples);
        BenchResult r;
        r.scenario = scenario;
        r.size_bytes = size;
        r.reps = uint32_t(samples.size());
        r.mean_ms = st.mean;
        r.median_ms = st.median;
        r.stddev_ms = st.stddev;
        r.proof_bytes = proof_bytes;
        r.machine = machine_;
        out_.results.push_back(std::move(r));
        char line[160];
        std::snprintf(line, sizeof line, "%s %s: mean %.3f ms (median %.3f, sd %.3f, n=%zu)",
                      scenario.c_str(), human_size(size).c_str(), st.mean, st.median, st.stddev,
                      samples.size());
        note(line);
    }

    std::vector<uint64_t> sizes(bool wide) const {
        std::vector<uint64_t> s = cfg_.sizes;
        if (wide && cfg_.large) s.push_back(LARGE_SIZE);
        return s;
    }

    EnvFixture& env_fixture(uint64_t size) {
        auto it = envs_.find(size);
        if (it != envs_.end()) return it->second;
        EnvFixture fx;
        fx.pt_size = size;
        fx.pt = cfg_.work_dir / "data" / ("pt-" + std::to_string(size) + ".bin");
        fx.env = cfg_.work_dir / "data" / ("env-" + std::to_string(size) + ".bin");
        ensure_random_file(fx.pt, size, cfg_.seed ^ size);
        Bytes seed_tag = {uint8_t('b'), uint8_t('k')};
        append_u64le(seed_tag, cfg_.seed ^ size);
        fx.key = envelope::kem_derive_raw(seed_tag);
        note("encrypting fixture " + human_size(size));
        std::ifstream in(fx.pt, std::ios::binary);
        std::ofstream out(fx.env, std::ios::binary | std::ios::trunc);
        if (!in || !out) throw ConfigError("cannot stage fixture for " + human_size(size));
        auto src = file_source(in);
        auto sink = [&out](ByteView b) {
            out.write(reinterpret_cast<const char*>(b.data()),
                      static_cast<std::streamsize>(b.size()));
        };
        envelope::se_encrypt(fx.key, params_.config.chunk_size, size, src, sink, rng_);
        out.flush();
        if (!out) throw ConfigError("fixture write failed for " + human_size(size));
        return envs_.emplace(size, std::move(fx)).first->second;
    }

    PipeFixture& pipe_fixture(uint64_t size) {
        auto it = pipes_.find(size);
        if (it != pipes_.end()) return it->second;
        fs::path pt = cfg_.work_dir / "data" / ("pt-" + std::to_string(size) + ".bin");
        ensure_random_file(pt, size, cfg_.seed ^ size);
        fs::path dir = cfg_.work_dir / ("pipeline-" + std::to_string(size));
        fs::remove_all(dir);
        fs::create_directories(dir);
        note("building pipeline fixture " + human_size(size));
        ledger::Ledger led(dir / "blocks.jsonl");
        protocol::StorageProvider sp(params_, led, dir / "sp");
        protocol::DataOwner owner(params_, rng_);
        protocol::DataUser user(params_, rng_);
        std::string file_id = "bench-" + std::to_string(size);
        auto up = owner.upload(sp, led, pt, file_id);
        std::string gid = owner.grant(sp, user.public_key(), file_id);
        sp.process_grant(gid);
        protocol::Grant g = sp.grant(gid);
        if (g.status != protocol::GrantStatus::published)
            throw ProvingError("pipeline fixture grant " + gid + " is " +
                               grant_status_name(g.status));
        const protocol::StoredObject& obj = sp.object(file_id);
        PipeFixture fx;
        fx.env = obj.envelope_path;
        fx.proof = g.proof;
        fx.c = obj.c_bytes;
        fx.c_prime = g.c_prime;
        fx.h = up.commitment.root;
        return pipes_.emplace(size, std::move(fx)).first->second;
    }

    void run_se_enc() {
        for (uint64_t size : sizes(true)) {
            EnvFixture& fx = env_fixture(size);
            fs::path out_path = cfg_.work_dir / "data" / "enc-out.tmp";
            std::vector<double> samples;
            for (uint32_t rep = 0; rep < cfg_.reps; ++rep) {
                std::ifstream in(fx.pt, std::ios::binary);
                std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
                if (!in || !out) throw ConfigError("se_enc io setup failed");
                auto src = file_source(in);
                auto sink = [&out](ByteView b) {
                    out.write(reinterpret_cast<const char*>(b.data()),
                              static_cast<std::streamsize>(b.size()));
                };
                auto t0 = Clock::now();
                envelope::se_encrypt(fx.key, params_.config.chunk_size, size, src, sink, rng_);
                out.flush();
                samples.push_back(ms_since(t0));
            }
            std::error_code ec;
            fs::remove(out_path, ec);
            add("se_enc", size, samples, 0);
        }
    }

    void run_se_dec() {
        for (uint64_t size : sizes(true)) {
            EnvFixture& fx = env_fixture(size);
            std::vector<double> samples;
            for (uint32_t rep = 0; rep < cfg_.reps; ++rep) {
                std::ifstream in(fx.env, std::ios::binary);
                if (!in) throw ConfigError("se_dec io setup failed");
                auto src = file_source(in);
                uint64_t seen = 0;
                auto sink = [&seen](ByteView b) { seen += b.size(); };
                auto t0 = Clock::now();
                envelope::se_decrypt(fx.key, src, sink);
                samples.push_back(ms_since(t0));
                if (seen != size) throw ProvingError("se_dec length mismatch");
            }
            add("se_dec", size, samples, 0);
        }
    }

    void run_pre_ops(const std::set<std::string>& wanted) {
        const auto& ctx = *params_.ctx;
        std::vector<double> kg, en, rkg, re, de;
        for (uint32_t rep = 0; rep < cfg_.reps; ++rep) {
            auto t0 = Clock::now();
            auto owner = pre::keygen<Backend>(ctx, rng_);
            kg.push_back(ms_since(t0));
            auto user = pre::keygen<Backend>(ctx, rng_);
            auto t = Backend::scalar_random_nonzero(ctx, rng_);
            auto m = Backend::gt_pow(ctx, ctx.gT, t);

            t0 = Clock::now();
            auto c = pre::enc<Backend>(ctx, owner.pk, m, rng_);
            en.push_back(ms_since(t0));

            t0 = Clock::now();
            auto rk = pre::rekeygen<Backend>(ctx, owner, user.pk);
            rkg.push_back(ms_since(t0));

            t0 = Clock::now();
            auto c1 = pre::reenc<Backend>(ctx, rk, c);
            re.push_back(ms_since(t0));

            t0 = Clock::now();
            auto m2 = pre::dec_user<Backend>(ctx, user, c1);
            de.push_back(ms_since(t0));

            if (Backend::gt_serialize(ctx, m2) != Backend::gt_serialize(ctx, m))
                throw ProvingError("re-encryption round trip diverged");
        }
        if (wanted.count("pre_keygen")) add("pre_keygen", 0, kg, 0);
        if (wanted.count("pre_enc")) add("pre_enc", 0, en, 0);
        if (wanted.count("pre_rekeygen")) add("pre_rekeygen", 0, rkg, 0);
        if (wanted.count("pre_reenc")) add("pre_reenc", 0, re, 0);
        if (wanted.count("pre_dec")) add("pre_dec", 0, de, 0);
    }

    void run_prove_time() {
        for (uint64_t size : sizes(false)) {
            EnvFixture& fx = env_fixture(size);
            size_t frame_size = commitment::frame_size_for(params_.config.chunk_size);
            std::vector<double> samples;
            uint64_t root_bytes = 0;
            for (uint32_t rep = 0; rep < cfg_.reps; ++rep) {
                std::ifstream in(fx.env, std::ios::binary);
                if (!in) throw ConfigError("prove_time io setup failed");
                in.seekg(envelope::HEADER_BYTES);
                std::vector<uint8_t> frame(frame_size);
                auto t0 = Clock::now();
                std::vector<proofs::LeafProof> leaves;
                uint64_t index = 0;
                for (;;) {
                    in.read(reinterpret_cast<char*>(frame.data()),
                            static_cast<std::streamsize>(frame.size()));
                    size_t got = static_cast<size_t>(in.gcount());
                    if (got == 0) break;
                    leaves.push_back(proofs::prove_chunk(
                        params_.int_keys, ByteView(frame.data(), got), index++));
                }
                proofs::RootProof root = proofs::aggregate_root(params_.agg_keys, leaves);
                samples.push_back(ms_since(t0));
                root_bytes = proofs::root_proof_serialize(root).size();
            }
            add("prove_time", size, samples, root_bytes);
        }
    }

    void run_verify_time() {
        const auto& ctx = *params_.ctx;
        for (uint64_t size : sizes(true)) {
            PipeFixture& fx = pipe_fixture(size);
            auto proof = proofs::aggregated_proof_deserialize(ctx, fx.proof);
            auto c = pre::deserialize_level2<Backend>(ctx, fx.c);
            auto cp = pre::deserialize_level1<Backend>(ctx, fx.c_prime);
            std::vector<proofs::FileStatement> stmts{{fx.h, cp, c}};
            std::vector<double> samples;
            for (uint32_t rep = 0; rep < cfg_.reps; ++rep) {
                auto t0 = Clock::now();
                auto outcome = proofs::verify_aggregated(ctx, params_.agg_keys, stmts, proof);
                samples.push_back(ms_since(t0));
                if (!outcome.ok) throw ProvingError("verify_time rejected a valid proof");
            }
            add("verify_time", size, samples, fx.proof.size());
        }
    }

    void run_proof_size() {
        const auto& ctx = *params_.ctx;
        for (uint64_t size : sizes(true)) {
            PipeFixture& fx = pipe_fixture(size);
            auto proof = proofs::aggregated_proof_deserialize(ctx, fx.proof);
            std::vector<double> samples;
            for (uint32_t rep = 0; rep < cfg_.reps; ++rep) {
                auto t0 = Clock::now();
                Bytes b = proofs::aggregated_proof_serialize(ctx, proof);
                samples.push_back(ms_since(t0));
                if (b.size() != fx.proof.size())
                    throw ProvingError("proof reserialization changed size");
            }
            add("proof_size", size, samples, fx.proof.size());
        }
    }

    void run_zkp_verify() {
        const auto& ctx = *params_.ctx;
        for (uint64_t size : sizes(true)) {
            PipeFixture& fx = pipe_fixture(size);
            std::vector<double> samples;
            for (uint32_t rep = 0; rep < cfg_.reps; ++rep) {
                // the user's whole check: parse what arrived, then verify
                auto t0 = Clock::now();
                auto proof = proofs::aggregated_proof_deserialize(ctx, fx.proof);
                auto c = pre::deserialize_level2<Backend>(ctx, fx.c);
                auto cp = pre::deserialize_level1<Backend>(ctx, fx.c_prime);
                std::vector<proofs::FileStatement> stmts{{fx.h, cp, c}};
                auto outcome = proofs::verify_aggregated(ctx, params_.agg_keys, stmts, proof);
                samples.push_back(ms_since(t0));
                if (!outcome.ok) throw ProvingError("zkp_verify rejected a valid proof");
            }
            add("zkp_verify", size, samples, fx.proof.size());
        }
    }

    void run_flat_hash() {
        for (uint64_t size : sizes(true)) {
            EnvFixture& fx = env_fixture(size);
            std::vector<double> samples;
            Digest32 last{};
            for (uint32_t rep = 0; rep < cfg_.reps; ++rep) {
                std::ifstream in(fx.env, std::ios::binary);
                if (!in) throw ConfigError("flat_hash io setup failed");
                std::vector<uint8_t> buf(IO_BUF);
                auto t0 = Clock::now();
                Sha256Stream h;
                for (;;) {
                    in.read(reinterpret_cast<char*>(buf.data()),
                            static_cast<std::streamsize>(buf.size()));
                    size_t got = static_cast<size_t>(in.gcount());
                    if (got == 0) break;
                    h.update(ByteView(buf.data(), got));
                }
                Digest32 d = h.finish();
                samples.push_back(ms_since(t0));
                if (rep > 0 && d != last) throw ProvingError("flat hash not stable");
                last = d;
            }
            add("flat_hash_recompute", size, samples, 0);
        }
    }

    void run_ledger_put() {
        uint32_t n = std::max<uint32_t>(cfg_.reps, 1000);
        fs::path dir = cfg_.work_dir / "ledger-put";
        fs::remove_all(dir);
        fs::create_directories(dir);
        ledger::Ledger led(dir / "blocks.jsonl");
        Digest32 owner = sha256(Bytes{1, 2, 3});
        std::vector<double> samples;
        samples.reserve(n);
        for (uint32_t i = 0; i < n; ++i) {
            ledger::HashRecord rec;
            rec.file_id = "f-" + std::to_string(i);
            Bytes seed{uint8_t(i), uint8_t(i >> 8), uint8_t(i >> 16)};
            rec.root = commitment::Digest{cfg_.alg, sha256(seed)};
            rec.owner = owner;
            auto t0 = Clock::now();
            led.put_hash(rec);
            samples.push_back(ms_since(t0));
        }
        add("ledger_put", 0, samples, 0);
    }

    void run_ledger_get() {
        uint32_t n = std::max<uint32_t>(cfg_.reps, 1000);
        fs::path dir = cfg_.work_dir / "ledger-get";
        fs::remove_all(dir);
        fs::create_directories(dir);
        ledger::Ledger led(dir / "blocks.jsonl");
        Digest32 owner = sha256(Bytes{4, 5, 6});
        for (uint32_t i = 0; i < n; ++i) {
            ledger::HashRecord rec;
            rec.file_id = "f-" + std::to_string(i);
            Bytes seed{uint8_t(i), uint8_t(i >> 8), uint8_t(i >> 16)};
            rec.root = commitment::Digest{cfg_.alg, sha256(seed)};
            rec.owner = owner;
            led.put_hash(rec);
        }
        uint64_t state = cfg_.seed | 1;
        std::vector<double> samples;
        samples.reserve(n);
        for (uint32_t i = 0; i < n; ++i) {
            std::string id = "f-" + std::to_string(next_word(state) % n);
            auto t0 = Clock::now();
            auto q = led.get(id);
            samples.push_back(ms_since(t0));
            if (q.hashes.size() != 1) throw ProvingError("ledger_get lookup failed");
        }
        add("ledger_get", 0, samples, 0);
    }
};

}  // namespace

const std::vector<std::string>& all_scenarios() {
    static const std::vector<std::string> names = {
        "se_enc",      "se_dec",     "pre_keygen", "pre_enc",
        "pre_rekeygen", "pre_reenc",  "pre_dec",    "prove_time",
        "verify_time", "proof_size", "zkp_verify", "flat_hash_recompute",
        "ledger_put",  "ledger_get",
    };
    return names;
}

std::string machine_fingerprint() {
    std::string model = "unknown-cpu";
    std::ifstream info("/proc/cpuinfo");
    std::string line;
    while (std::getline(info, line)) {
        if (line.rfind("model name", 0) == 0) {
            auto pos = line.find(':');
            if (pos != std::string::npos) {
                model = line.substr(pos + 1);
                while (!model.empty() && model.front() == ' ') model.erase(model.begin());
            }
            break;
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    std::string fp = model + " x" + std::to_string(hw);
    std::replace(fp.begin(), fp.end(), ',', ';');
    return fp;
}

SuiteOutcome run_suite(const BenchConfig& config, std::ostream* log) {
    return Suite(config, log).run();
}

std::string to_csv(const std::vector<BenchResult>& results) {
    std::string out = std::string("# ") + CSV_VERSION + "\n";
    out += "scenario,size_bytes,reps,mean_ms,median_ms,stddev_ms,proof_bytes,threads,machine\n";
    char buf[512];
    for (const auto& r : results) {
        std::snprintf(buf, sizeof buf, "%s,%" PRIu64 ",%u,%.4f,%.4f,%.4f,%" PRIu64 ",%u,%s\n",
                      r.scenario.c_str(), r.size_bytes, r.reps, r.mean_ms, r.median_ms,
                      r.stddev_ms, r.proof_bytes, r.threads, r.machine.c_str());
        out += buf;
    }
    return out;
}

std::vector<BenchResult> from_csv(const std::string& text) {
    std::vector<BenchResult> results;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t eol = text.find('\n', pos);
        std::string line = text.substr(pos, eol == std::string::npos ? eol : eol - pos);
        pos = eol == std::string::npos ? text.size() : eol + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#' || line.rfind("scenario,", 0) == 0) continue;

        std::vector<std::string> fields;
        size_t start = 0;
        for (size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                fields.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        }
        if (fields.size() != 9) throw InvalidEncoding("bad bench csv row: " + line);
        try {
            BenchResult r;
            r.scenario = fields[0];
            r.size_bytes = std::stoull(fields[1]);
            r.reps = uint32_t(std::stoul(fields[2]));
            r.mean_ms = std::stod(fields[3]);
            r.median_ms = std::stod(fields[4]);
            r.stddev_ms = std::stod(fields[5]);
            r.proof_bytes = std::stoull(fields[6]);
            r.threads = uint32_t(std::stoul(fields[7]));
            r.machine = fields[8];
            results.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw InvalidEncoding("bad bench csv row: " + line);
        }
    }
    return results;
}

namespace {

struct SeriesSpec {
    const char* scenario;
    const char* label;
    const char* color;
};

struct PlotSpec {
    const char* filename;
    const char* title;
    const char* ylabel;
    bool y_is_proof_bytes;
    std::vector<SeriesSpec> series;
};

struct Pt {
    double x;
    double y;
    uint64_t size;
};

std::string num2(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string render_one(const PlotSpec& spec,
                       const std::vector<std::pair<SeriesSpec, std::vector<Pt>>>& series) {
    constexpr double W = 640, H = 400, ML = 80, MR = 24, MT = 44, MB = 56;
    double xmin = 1e300, xmax = -1e300, ymax = 0;
    std::vector<uint64_t> ticks;
    for (const auto& [sp, pts] : series) {
        for (const auto& p : pts) {
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
            ymax = std::max(ymax, p.y);
            if (std::find(ticks.begin(), ticks.end(), p.size) == ticks.end())
                ticks.push_back(p.size);
        }
    }
    std::sort(ticks.begin(), ticks.end());
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= 0) ymax = 1;
    ymax *= 1.08;
    auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
    auto py = [&](double y) { return H - MB - y / ymax * (H - MT - MB); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
           "viewBox=\"0 0 640 400\">\n";
    svg += "<rect width=\"640\" height=\"400\" fill=\"#ffffff\"/>\n";
    svg += std::string("<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"monospace\" "
                       "font-size=\"15\" fill=\"#222222\">") +
           spec.title + "</text>\n";

    for (int i = 0; i <= 5; ++i) {
        double v = ymax * i / 5.0;
        std::string y = num2(py(v));
        svg += "<line x1=\"80.00\" x2=\"616.00\" y1=\"" + y + "\" y2=\"" + y +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        char lbl[48];
        std::snprintf(lbl, sizeof lbl, "%.3g", v);
        svg += "<text x=\"74.00\" y=\"" + num2(py(v) + 4) +
               "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\" "
               "fill=\"#444444\">" + lbl + "</text>\n";
    }
    for (uint64_t t : ticks) {
        std::string x = num2(px(std::log2(double(t))));
        svg += "<line y1=\"344.00\" y2=\"350.00\" x1=\"" + x + "\" x2=\"" + x +
               "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
        svg += "<text y=\"366.00\" x=\"" + x +
               "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"11\" "
               "fill=\"#444444\">" + human_size(t) + "</text>\n";
    }
    svg += "<line x1=\"80.00\" x2=\"616.00\" y1=\"344.00\" y2=\"344.00\" stroke=\"#444444\" "
           "stroke-width=\"1\"/>\n";
    svg += "<line x1=\"80.00\" x2=\"80.00\" y1=\"44.00\" y2=\"344.00\" stroke=\"#444444\" "
           "stroke-width=\"1\"/>\n";
    svg += std::string("<text x=\"16\" y=\"194\" transform=\"rotate(-90 16 194)\" "
                       "text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\" "
                       "fill=\"#444444\">") +
           spec.ylabel + "</text>\n";
    svg += "<text x=\"348\" y=\"388\" text-anchor=\"middle\" font-family=\"monospace\" "
           "font-size=\"12\" fill=\"#444444\">file size</text>\n";

    double legend_y = 56;
    for (const auto& [sp, pts] : series) {
        std::string poly;
        for (const auto& p : pts) poly += num2(px(p.x)) + "," + num2(py(p.y)) + " ";
        if (!poly.empty()) poly.pop_back();
        svg += std::string("<polyline fill=\"none\" stroke=\"") + sp.color +
               "\" stroke-width=\"2\" points=\"" + poly + "\"/>\n";
        for (const auto& p : pts)
            svg += std::string("<circle r=\"3\" fill=\"") + sp.color + "\" cx=\"" +
                   num2(px(p.x)) + "\" cy=\"" + num2(py(p.y)) + "\"/>\n";
        svg += std::string("<rect width=\"10\" height=\"10\" x=\"500.00\" y=\"") +
               num2(legend_y) + "\" fill=\"" + sp.color + "\"/>\n";
        svg += std::string("<text x=\"516.00\" y=\"") + num2(legend_y + 9) +
               "\" font-family=\"monospace\" font-size=\"12\" fill=\"#222222\">" + sp.label +
               "</text>\n";
        legend_y += 18;
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace

std::vector<Plot> render_plots(const std::vector<BenchResult>& results) {
    const std::vector<PlotSpec> specs = {
        {"bench_envelope.svg", "envelope encrypt / decrypt", "ms", false,
         {{"se_enc", "encrypt", "#1f77b4"}, {"se_dec", "decrypt", "#d62728"}}},
        {"bench_prove_time.svg", "proof construction", "ms", false,
         {{"prove_time", "prove", "#1f77b4"}}},
        {"bench_verify_time.svg", "aggregated verification", "ms", false,
         {{"verify_time", "verify", "#1f77b4"}}},
        {"bench_proof_size.svg", "served proof size", "bytes", true,
         {{"proof_size", "aggregated proof", "#1f77b4"}}},
        {"bench_recompute.svg", "full rehash vs proof check", "ms", false,
         {{"flat_hash_recompute", "flat sha-256", "#1f77b4"},
          {"zkp_verify", "proof check", "#d62728"}}},
    };

    std::vector<Plot> plots;
    for (const auto& spec : specs) {
        std::vector<std::pair<SeriesSpec, std::vector<Pt>>> series;
        for (const auto& sp : spec.series) {
            std::vector<Pt> pts;
            for (const auto& r : results) {
                if (r.scenario != sp.scenario || r.size_bytes == 0) continue;
                double y = spec.y_is_proof_bytes ? double(r.proof_bytes) : r.mean_ms;
                // quantize to csv precision so a re-render from csv is identical
                y = std::round(y * 1e4) / 1e4;
                pts.push_back({std::log2(double(r.size_bytes)), y, r.size_bytes});
            }
            std::sort(pts.begin(), pts.end(),
                      [](const Pt& a, const Pt& b) { return a.size < b.size; });
            pts.erase(std::unique(pts.begin(), pts.end(),
                                  [](const Pt& a, const Pt& b) { return a.size == b.size; }),
                      pts.end());
            if (pts.size() >= 2) series.emplace_back(sp, std::move(pts));
        }
        if (series.empty()) continue;
        plots.push_back({spec.filename, render_one(spec, series)});
    }
    return plots;
}

}  // namespace faith::bench
