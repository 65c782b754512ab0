#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "faith/commitment.hpp"
#include "faith/envelope.hpp"
#include "faith/ledger.hpp"
#include "faith/pre.hpp"
#include "faith/proofs.hpp"
#include "faith/rng.hpp"

namespace faith::protocol {

using Backend = pairing_core::BlsBackend;
using Ctx = Backend::Ctx;
using BlsPublicKey = pre::PublicKey<Backend>;
using BlsKeyPair = pre::KeyPair<Backend>;

struct SetupConfig {
    uint32_t chunk_size = 64 * 1024;
    commitment::HashAlg alg = commitment::HashAlg::poseidon2;
};

// One-time transparent setup. Everything is derived from the config, so two
// runs with the same config agree bit for bit.
struct SystemParams {
    SetupConfig config;
    Digest32 params_digest{};
    proofs::CircuitKeys int_keys;
    proofs::CircuitKeys pre_keys;
    proofs::CircuitKeys agg_keys;
    const Ctx* ctx = nullptr;
};

// chunk_size must be a power of two within the envelope's accepted range.
SystemParams ta_setup(const SetupConfig& config);

// params.json plus one verifying-key file per circuit.
void publish_params(const SystemParams& params, const std::filesystem::path& dir);
SystemParams load_params(const std::filesystem::path& dir);

Bytes keypair_serialize(const Ctx& ctx, const BlsKeyPair& kp);
BlsKeyPair keypair_deserialize(const Ctx& ctx, ByteView b);

enum class GrantStatus : uint8_t {
    requested = 0,
    rekeyed,
    proven,
    published,
    served,
    verified,
    failed,  // absorbing
};
const char* grant_status_name(GrantStatus s);

// Injectable storage-provider misbehaviors.
//   corrupt_data:       flips a stored frame byte at ingest; proving runs over
//                       the corrupted frame, so the proved root disagrees with
//                       the on-chain hash.
//   corrupt_reenc:      flips c' after the sigma proof is computed and rebinds
//                       the proof to the flipped statement.
//   statement_mismatch: serves a c' that differs from the one the published
//                       proof binds.
//   stale_proof:        rewrites stored data at grant time and re-proves over
//                       the rewrite; the on-chain hash still names the
//                       original.
enum class Fault : uint8_t { none = 0, corrupt_data, corrupt_reenc, statement_mismatch, stale_proof };
const char* fault_name(Fault f);

struct FaultConfig {
    Fault fault = Fault::none;
};

struct Grant {
    std::string grant_id;
    std::string file_id;
    Bytes du_pk;    // serialized user public key
    Bytes rekey;    // serialized delegation token
    Bytes c_prime;  // serialized transformed key ciphertext, set by the SP
    Bytes proof;    // serialized aggregated proof, as published
    GrantStatus status = GrantStatus::requested;
    std::string failure;  // cause, once failed
    uint64_t proof_height = 0;
};

struct StoredObject {
    std::string id;
    std::filesystem::path envelope_path;
    Bytes c_bytes;  // serialized level-2 key ciphertext
    Digest32 owner{};
    commitment::FileCommitment commitment;  // computed from stored frames
    std::vector<proofs::LeafProof> leaf_proofs;
    std::optional<proofs::RootProof> root_proof;  // aggregated at first grant
    proofs::AggregationStats agg_stats{};
};

struct ServedBundle {
    std::string grant_id;
    std::string file_id;
    Digest32 owner{};
    std::filesystem::path envelope_path;
    Bytes c_bytes;
    Bytes c_prime_bytes;
};

// Stores envelopes on disk, proves integrity eagerly per frame, transforms key
// ciphertexts per grant, and publishes aggregated proofs. Thread safe; grant
// processing runs outside the state lock.
class StorageProvider {
public:
    StorageProvider(const SystemParams& params, ledger::Ledger& led,
                    std::filesystem::path storage_dir, FaultConfig fault = {});
    ~StorageProvider();

    // Upload ingestion: begin, one call per frame in order, finish.
    void begin_store(const std::string& file_id);
    void ingest_frame(const std::string& file_id, uint64_t index, ByteView frame);
    void finish_store(const std::string& file_id, ByteView header_bytes, ByteView c_bytes,
                      const Digest32& owner);

    // requested -> rekeyed. The file must exist here.
    std::string accept_grant(const std::string& file_id, ByteView du_pk, ByteView rekey);

    // rekeyed -> proven -> published. On proving failure the grant fails with
    // the cause and the failed grant is returned.
    const Grant& process_grant(const std::string& grant_id);

    // published -> served.
    ServedBundle serve(const std::string& grant_id);

    // served -> verified | failed, reported back by the data user.
    void confirm(const std::string& grant_id, bool ok, const std::string& cause);

    Grant grant(const std::string& grant_id) const;
    const StoredObject& object(const std::string& file_id) const;
    const std::filesystem::path& storage_dir() const { return dir_; }

private:
    struct PendingStore;

    const StoredObject& object_locked(const std::string& file_id) const;
    void ensure_root(StoredObject& obj);
    void persist_grant(const Grant& g) const;
    void load_state();

    const SystemParams* params_;
    ledger::Ledger* ledger_;
    std::filesystem::path dir_;
    FaultConfig fault_;
    SystemRng rng_;

    mutable std::mutex mutex_;
    std::map<std::string, std::unique_ptr<PendingStore>> pending_;
    std::map<std::string, StoredObject> objects_;
    std::map<std::string, Grant> grants_;
    uint64_t next_grant_ = 1;
};

class DataOwner {
public:
    DataOwner(const SystemParams& params, RngSource& rng);
    DataOwner(const SystemParams& params, BlsKeyPair kp, RngSource& rng);

    const BlsPublicKey& public_key() const { return kp_.pk; }
    const BlsKeyPair& keypair() const { return kp_; }
    Digest32 key_digest() const;

    struct UploadResult {
        std::string file_id;
        uint64_t ledger_height = 0;
        commitment::FileCommitment commitment;
        uint64_t envelope_bytes = 0;
    };

    // Single streaming pass: encrypt, commit, hand frames to the SP, anchor
    // the commitment root on the ledger.
    UploadResult upload(StorageProvider& sp, ledger::Ledger& led,
                        const std::filesystem::path& plaintext, const std::string& file_id);
    UploadResult upload_bytes(StorageProvider& sp, ledger::Ledger& led, ByteView plaintext,
                              const std::string& file_id);

    // One delegation-token exponentiation; no per-grant secret is kept.
    std::string grant(StorageProvider& sp, const BlsPublicKey& user_pk,
                      const std::string& file_id);

private:
    UploadResult upload_source(StorageProvider& sp, ledger::Ledger& led,
                               const envelope::ByteSource& src, uint64_t plaintext_len,
                               const std::string& file_id);

    const SystemParams* params_;
    BlsKeyPair kp_;
    RngSource* rng_;
};

class DataUser {
public:
    DataUser(const SystemParams& params, RngSource& rng);
    DataUser(const SystemParams& params, BlsKeyPair kp);

    const BlsPublicKey& public_key() const { return kp_.pk; }
    const BlsKeyPair& keypair() const { return kp_; }

    struct RetrieveResult {
        bool ok = false;
        proofs::VerifyFailure reason = proofs::VerifyFailure::none;
        std::string detail;
        uint64_t plaintext_bytes = 0;
        // group-operation counts spent on verification, for the
        // size-independence checks
        uint64_t pairings = 0;
        uint64_t gt_exps = 0;
    };

    // Fetches hash and proof from the ledger, verifies, and only then unwraps
    // the key and decrypts into `out`. On verification failure nothing is
    // decrypted. A tampered envelope behind a valid proof still dies on the
    // envelope's own authentication.
    RetrieveResult retrieve(StorageProvider& sp, ledger::Ledger& led,
                            const std::string& grant_id, const envelope::ByteSink& out);
    RetrieveResult retrieve_to_file(StorageProvider& sp, ledger::Ledger& led,
                                    const std::string& grant_id,
                                    const std::filesystem::path& out_path);
    struct RetrievedBytes {
        RetrieveResult result;
        Bytes plaintext;
    };
    RetrievedBytes retrieve_bytes(StorageProvider& sp, ledger::Ledger& led,
                                  const std::string& grant_id);

private:
    const SystemParams* params_;
    BlsKeyPair kp_;
};

}  // namespace faith::protocol
