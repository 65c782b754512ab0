#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "faith/bench.hpp"
#include "faith/envelope.hpp"
#include "faith/errors.hpp"
#include "faith/ledger.hpp"
#include "faith/pre.hpp"
#include "faith/proofs.hpp"
#include "faith/protocol.hpp"
#include "faith/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace faith;
using protocol::Backend;

namespace {

constexpr int EXIT_REJECTED = 2;  // a proof or audit check said no

// the provider keeps a pointer to the params object, so both live on the heap
struct Realm {
    fs::path root;
    std::unique_ptr<protocol::SystemParams> params;
    std::unique_ptr<ledger::Ledger> led;
    std::unique_ptr<protocol::StorageProvider> sp;
};

fs::path params_dir(const fs::path& root) { return root / "params"; }
fs::path ledger_path(const fs::path& root) { return root / "ledger" / "blocks.jsonl"; }
fs::path keys_dir(const fs::path& root) { return root / "keys"; }

Realm open_realm(const fs::path& root, protocol::Fault fault = protocol::Fault::none) {
    Realm r;
    r.root = root;
    r.params = std::make_unique<protocol::SystemParams>(protocol::load_params(params_dir(root)));
    fs::create_directories(ledger_path(root).parent_path());
    r.led = std::make_unique<ledger::Ledger>(ledger_path(root));
    r.sp = std::make_unique<protocol::StorageProvider>(*r.params, *r.led, root / "sp",
                                                       protocol::FaultConfig{fault});
    return r;
}

void write_file(const fs::path& p, ByteView data) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    if (!out) throw ConfigError("cannot write " + p.string());
}

Bytes read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + p.string());
    return Bytes(std::istreambuf_iterator<char>(in), {});
}

protocol::BlsKeyPair load_keypair(const Realm& r, const std::string& name) {
    return protocol::keypair_deserialize(*r.params->ctx,
                                         read_file(keys_dir(r.root) / (name + ".key")));
}

pre::PublicKey<Backend> load_public_key(const Realm& r, const std::string& name) {
    return pre::deserialize_public_key<Backend>(*r.params->ctx,
                                                read_file(keys_dir(r.root) / (name + ".pub")));
}

commitment::HashAlg parse_alg(const std::string& s) {
    if (s == "poseidon2") return commitment::HashAlg::poseidon2;
    if (s == "sha256") return commitment::HashAlg::sha256;
    throw ConfigError("unknown hash alg: " + s + " (try poseidon2 or sha256)");
}

protocol::Fault parse_fault(const std::string& s) {
    for (auto f : {protocol::Fault::none, protocol::Fault::corrupt_data,
                   protocol::Fault::corrupt_reenc, protocol::Fault::statement_mismatch,
                   protocol::Fault::stale_proof})
        if (s == protocol::fault_name(f)) return f;
    throw ConfigError("unknown fault: " + s);
}

void emit(bool as_json, const json& j, const std::string& text) {
    if (as_json)
        std::cout << j.dump(2) << "\n";
    else
        std::cout << text << "\n";
}

// the read-only check a user can run against a published grant at any time
int run_verify(const Realm& r, const std::string& grant_id, bool as_json) {
    const auto& ctx = *r.params->ctx;
    protocol::Grant g = r.sp->grant(grant_id);
    if (g.c_prime.empty())
        throw ConfigError("grant " + grant_id + " has no published re-encryption yet");
    const protocol::StoredObject& obj = r.sp->object(g.file_id);

    auto q = r.led->get(g.file_id);
    const ledger::HashRecord* hash_rec = nullptr;
    for (const auto& rec : q.hashes)
        if (rec.owner == obj.owner) hash_rec = &rec;
    if (!hash_rec) throw NotFound("hash record for " + g.file_id);
    auto gq = r.led->get(grant_id);
    if (gq.proofs.empty()) throw NotFound("proof record for " + grant_id);

    proofs::VerifyOutcome outcome;
    try {
        auto proof = proofs::aggregated_proof_deserialize(ctx, gq.proofs.back().proof);
        auto c = pre::deserialize_level2<Backend>(ctx, obj.c_bytes);
        auto cp = pre::deserialize_level1<Backend>(ctx, g.c_prime);
        std::vector<proofs::FileStatement> stmts{{hash_rec->root, cp, c}};
        outcome = proofs::verify_aggregated(ctx, r.params->agg_keys, stmts, proof);
    } catch (const InvalidEncoding& e) {
        outcome.ok = false;
        outcome.reason = proofs::VerifyFailure::encoding;
        outcome.detail = e.what();
    }

    json j{{"grant", grant_id},
           {"file", g.file_id},
           {"ok", outcome.ok},
           {"reason", proofs::failure_name(outcome.reason)},
           {"detail", outcome.detail}};
    if (outcome.ok) {
        emit(as_json, j, "grant " + grant_id + ": proof accepted");
        return 0;
    }
    emit(as_json, j,
         "grant " + grant_id + ": proof rejected (" +
             proofs::failure_name(outcome.reason) + ": " + outcome.detail + ")");
    return EXIT_REJECTED;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"authenticated sharing of encrypted files with verifiable storage proofs"};
    app.require_subcommand(1);

    std::string realm = "realm";
    app.add_option("--realm", realm, "realm directory (params, ledger, storage, keys)")
        ->capture_default_str();
    bool as_json = false;
    app.add_flag("--json", as_json, "machine-readable output");

    // setup
    auto* cmd_setup = app.add_subcommand("setup", "create a realm: params, empty ledger, storage");
    uint32_t chunk_size = envelope::DEFAULT_CHUNK_SIZE;
    std::string alg_name = "poseidon2";
    cmd_setup->add_option("--chunk-size", chunk_size, "envelope chunk size in bytes")
        ->capture_default_str();
    cmd_setup->add_option("--alg", alg_name, "leaf hash: poseidon2 or sha256")
        ->capture_default_str();

    // keygen
    auto* cmd_keygen = app.add_subcommand("keygen", "create a named keypair in the realm");
    std::string key_name;
    cmd_keygen->add_option("--name", key_name, "key name")->required();

    // upload
    auto* cmd_upload = app.add_subcommand("upload", "encrypt, store, and anchor a file");
    std::string owner_name, file_arg, file_id, fault_name_arg = "none";
    cmd_upload->add_option("--owner", owner_name, "owner key name")->required();
    cmd_upload->add_option("--file", file_arg, "plaintext path")->required();
    cmd_upload->add_option("--id", file_id, "file id")->required();
    cmd_upload->add_option("--fault", fault_name_arg, "storage fault to inject (corrupt_data)");

    // grant
    auto* cmd_grant = app.add_subcommand("grant", "delegate a stored file to another key");
    std::string user_name;
    cmd_grant->add_option("--owner", owner_name, "owner key name")->required();
    cmd_grant->add_option("--user", user_name, "recipient key name")->required();
    cmd_grant->add_option("--id", file_id, "file id")->required();

    // process
    auto* cmd_process = app.add_subcommand(
        "process", "re-encrypt, prove, and publish a pending grant (provider side)");
    std::string grant_id;
    cmd_process->add_option("--grant", grant_id, "grant id")->required();
    cmd_process->add_option("--fault", fault_name_arg,
                            "provider fault to inject (corrupt_reenc, stale_proof)");

    // retrieve
    auto* cmd_retrieve = app.add_subcommand("retrieve", "verify a grant and decrypt the file");
    std::string out_path;
    cmd_retrieve->add_option("--user", user_name, "recipient key name")->required();
    cmd_retrieve->add_option("--grant", grant_id, "grant id")->required();
    cmd_retrieve->add_option("--out", out_path, "plaintext output path")->required();
    cmd_retrieve->add_option("--fault", fault_name_arg,
                             "provider fault to inject (statement_mismatch)");

    // verify
    auto* cmd_verify = app.add_subcommand("verify", "check a published proof without decrypting");
    cmd_verify->add_option("--grant", grant_id, "grant id")->required();

    // audit
    auto* cmd_audit = app.add_subcommand("audit", "re-check every block in the ledger log");

    // bench
    auto* cmd_bench = app.add_subcommand("bench", "run the measurement suite");
    std::string sizes_arg = "1,16,64,256";
    uint32_t reps = 5;
    bool large = false;
    std::string scenarios_arg, bench_out = "bench-out";
    uint64_t seed = 1;
    cmd_bench->add_option("--sizes", sizes_arg, "file sizes in MiB, comma separated")
        ->capture_default_str();
    cmd_bench->add_option("--reps", reps, "repetitions per point (min 5)")
        ->capture_default_str();
    cmd_bench->add_flag("--large", large, "add a 5 GiB point to streaming scenarios");
    cmd_bench->add_option("--alg", alg_name, "leaf hash: poseidon2 or sha256")
        ->capture_default_str();
    cmd_bench->add_option("--scenarios", scenarios_arg,
                          "comma separated scenario filter (default: all)");
    cmd_bench->add_option("--out-dir", bench_out, "output directory for csv and plots")
        ->capture_default_str();
    cmd_bench->add_option("--seed", seed, "data generator seed")->capture_default_str();

    // plot
    auto* cmd_plot = app.add_subcommand("plot", "re-render plots from a bench csv");
    std::string csv_path;
    cmd_plot->add_option("--csv", csv_path, "bench csv path")->required();
    cmd_plot->add_option("--out-dir", bench_out, "output directory for plots")
        ->capture_default_str();

    // lets --realm / --json appear after the subcommand name too
    for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_setup) {
            protocol::SetupConfig config{chunk_size, parse_alg(alg_name)};
            auto params = protocol::ta_setup(config);
            protocol::publish_params(params, params_dir(realm));
            fs::create_directories(ledger_path(realm).parent_path());
            ledger::Ledger led(ledger_path(realm));  // writes nothing; genesis is implicit
            fs::create_directories(fs::path(realm) / "sp");
            fs::create_directories(keys_dir(realm));
            json j{{"realm", realm},
                   {"chunk_size", config.chunk_size},
                   {"alg", alg_name},
                   {"params_digest", to_hex(params.params_digest)}};
            emit(as_json, j,
                 "realm " + realm + " ready  params=" + to_hex(params.params_digest));
            return 0;
        }

        if (*cmd_keygen) {
            Realm r = open_realm(realm);
            SystemRng rng;
            auto kp = pre::keygen<Backend>(*r.params->ctx, rng);
            Bytes pk_bytes = pre::serialize_public_key<Backend>(*r.params->ctx, kp.pk);
            write_file(keys_dir(r.root) / (key_name + ".key"),
                       protocol::keypair_serialize(*r.params->ctx, kp));
            write_file(keys_dir(r.root) / (key_name + ".pub"), pk_bytes);
            json j{{"name", key_name}, {"key_digest", to_hex(sha256(pk_bytes))}};
            emit(as_json, j, "key " + key_name + "  digest=" + to_hex(sha256(pk_bytes)));
            return 0;
        }

        if (*cmd_upload) {
            Realm r = open_realm(realm, parse_fault(fault_name_arg));
            SystemRng rng;
            protocol::DataOwner owner(*r.params, load_keypair(r, owner_name), rng);
            auto up = owner.upload(*r.sp, *r.led, file_arg, file_id);
            json j{{"file", up.file_id},
                   {"root", to_hex(commitment::digest_serialize(up.commitment.root))},
                   {"chunks", up.commitment.n_chunks},
                   {"height", up.ledger_height},
                   {"envelope_bytes", up.envelope_bytes}};
            emit(as_json, j,
                 "stored " + up.file_id + "  chunks=" + std::to_string(up.commitment.n_chunks) +
                     " height=" + std::to_string(up.ledger_height) +
                     " root=" + to_hex(commitment::digest_serialize(up.commitment.root)));
            return 0;
        }

        if (*cmd_grant) {
            Realm r = open_realm(realm);
            SystemRng rng;
            protocol::DataOwner owner(*r.params, load_keypair(r, owner_name), rng);
            std::string gid = owner.grant(*r.sp, load_public_key(r, user_name), file_id);
            json j{{"grant", gid}, {"file", file_id}, {"user", user_name}};
            emit(as_json, j, "grant " + gid + "  file=" + file_id + " user=" + user_name);
            return 0;
        }

        if (*cmd_process) {
            Realm r = open_realm(realm, parse_fault(fault_name_arg));
            const protocol::Grant& g = r.sp->process_grant(grant_id);
            json j{{"grant", g.grant_id},
                   {"status", protocol::grant_status_name(g.status)},
                   {"proof_height", g.proof_height},
                   {"failure", g.failure}};
            if (g.status == protocol::GrantStatus::published) {
                emit(as_json, j,
                     "grant " + g.grant_id +
                         " published  proof_height=" + std::to_string(g.proof_height));
                return 0;
            }
            emit(as_json, j, "grant " + g.grant_id + " failed: " + g.failure);
            return 1;
        }

        if (*cmd_retrieve) {
            Realm r = open_realm(realm, parse_fault(fault_name_arg));
            protocol::DataUser user(*r.params, load_keypair(r, user_name));
            auto res = user.retrieve_to_file(*r.sp, *r.led, grant_id, out_path);
            json j{{"grant", grant_id},
                   {"ok", res.ok},
                   {"reason", proofs::failure_name(res.reason)},
                   {"detail", res.detail},
                   {"plaintext_bytes", res.plaintext_bytes},
                   {"pairings", res.pairings}};
            if (res.ok) {
                emit(as_json, j,
                     "retrieved " + std::to_string(res.plaintext_bytes) + " bytes to " +
                         out_path + "  (pairings=" + std::to_string(res.pairings) + ")");
                return 0;
            }
            emit(as_json, j,
                 std::string("rejected before decryption  reason=") +
                     proofs::failure_name(res.reason) + ": " + res.detail);
            return EXIT_REJECTED;
        }

        if (*cmd_verify) {
            Realm r = open_realm(realm);
            return run_verify(r, grant_id, as_json);
        }

        if (*cmd_audit) {
            Realm r = open_realm(realm);
            ledger::AuditReport rep = r.led->audit();
            json j{{"clean", rep.clean},
                   {"blocks_checked", rep.blocks_checked},
                   {"first_bad_height", rep.first_bad_height},
                   {"detail", rep.detail}};
            if (rep.clean) {
                emit(as_json, j,
                     "ledger clean  blocks=" + std::to_string(rep.blocks_checked));
                return 0;
            }
            emit(as_json, j,
                 "ledger damaged at height " + std::to_string(rep.first_bad_height) + ": " +
                     rep.detail);
            return EXIT_REJECTED;
        }

        if (*cmd_bench) {
            bench::BenchConfig cfg;
            for (size_t start = 0; start < sizes_arg.size();) {
                size_t comma = sizes_arg.find(',', start);
                std::string tok = sizes_arg.substr(start, comma - start);
                if (!tok.empty()) cfg.sizes.push_back(std::stoull(tok) << 20);
                start = comma == std::string::npos ? sizes_arg.size() : comma + 1;
            }
            cfg.reps = reps;
            cfg.large = large;
            cfg.alg = parse_alg(alg_name);
            cfg.work_dir = fs::path(bench_out) / "work";
            cfg.seed = seed;
            for (size_t start = 0; start < scenarios_arg.size();) {
                size_t comma = scenarios_arg.find(',', start);
                std::string tok = scenarios_arg.substr(start, comma - start);
                if (!tok.empty()) cfg.scenarios.push_back(tok);
                start = comma == std::string::npos ? scenarios_arg.size() : comma + 1;
            }
            if (large && cfg.alg == commitment::HashAlg::poseidon2)
                std::cerr << "[bench] note: --large fixtures hash 5 GiB through the sponge; "
                             "--alg sha256 prepares them much faster\n";
            auto outcome = bench::run_suite(cfg, &std::cerr);
            fs::create_directories(bench_out);
            std::string csv = bench::to_csv(outcome.results);
            write_file(fs::path(bench_out) / "bench.csv", Bytes(csv.begin(), csv.end()));
            for (const auto& p : bench::render_plots(outcome.results))
                write_file(fs::path(bench_out) / p.filename, Bytes(p.svg.begin(), p.svg.end()));
            std::cout << csv;
            for (const auto& e : outcome.errors) std::cerr << "[bench] failed: " << e << "\n";
            return outcome.errors.empty() ? 0 : 1;
        }

        if (*cmd_plot) {
            Bytes text = read_file(csv_path);
            auto results = bench::from_csv(std::string(text.begin(), text.end()));
            fs::create_directories(bench_out);
            size_t n = 0;
            for (const auto& p : bench::render_plots(results)) {
                write_file(fs::path(bench_out) / p.filename, Bytes(p.svg.begin(), p.svg.end()));
                ++n;
            }
            std::cout << "rendered " << n << " plots to " << bench_out << "\n";
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
