#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "faith/bytes.hpp"
#include "faith/commitment.hpp"
#include "faith/sha256.hpp"

namespace faith::ledger {

// Anchors a file's commitment root under its owner. Height and timestamp are
// assigned on append; caller-provided values are ignored.
struct HashRecord {
    std::string file_id;
    commitment::Digest root;
    Digest32 owner{};  // digest of the owner's public key
    uint64_t height = 0;
    uint64_t timestamp_ms = 0;
};

// Published proof for one grant. `proof` is stored verbatim and returned
// bit-exactly.
struct ProofRecord {
    std::string file_id;
    std::string grant_id;
    Digest32 binding{};
    Bytes proof;
    uint64_t height = 0;
    uint64_t timestamp_ms = 0;
};

struct Block {
    uint64_t height = 0;
    Digest32 prev{};
    std::vector<Digest32> record_digests;
    Digest32 digest{};
};

struct QueryResult {
    std::vector<HashRecord> hashes;   // append order
    std::vector<ProofRecord> proofs;  // append order
};

struct AuditReport {
    bool clean = true;
    uint64_t blocks_checked = 0;
    uint64_t first_bad_height = 0;  // 0 when clean
    std::string detail;
};

struct OpMetric {
    std::string op;
    uint64_t count = 0;
    double total_ms = 0.0;
    uint64_t bytes = 0;
};

// Digest every chain starts from.
Digest32 genesis_digest();

// Append-only block log, one JSON object per line (see docs/formats.md).
// Single serialized writer, concurrent readers. Heights start at 1; each block
// binds the previous block's digest.
class Ledger {
public:
    // Opens or creates the log, replaying existing blocks into the indexes.
    // A log that fails to replay cleanly still opens for get() and audit(),
    // but rejects further appends.
    explicit Ledger(std::filesystem::path block_log);

    Ledger(const Ledger&) = delete;
    Ledger& operator=(const Ledger&) = delete;

    // (owner, file_id) must be fresh.
    uint64_t put_hash(HashRecord rec);

    // file_id must already carry a hash record.
    uint64_t put_proof(ProofRecord rec);

    // Matches hash records by file id and proof records by file id or grant
    // id, in append order.
    QueryResult get(const std::string& id) const;

    std::optional<HashRecord> find_hash(const Digest32& owner,
                                        const std::string& file_id) const;

    // Re-reads the log from disk and recomputes the digest chain end-to-end.
    AuditReport audit() const;

    uint64_t height() const;
    const std::filesystem::path& path() const { return path_; }
    std::vector<OpMetric> metrics() const;

private:
    void append_block(const std::string& records_json, uint64_t height);
    void note_metric(const std::string& op, double ms, uint64_t bytes) const;

    std::filesystem::path path_;
    std::ofstream out_;

    mutable std::shared_mutex state_mutex_;
    std::vector<Block> blocks_;
    Digest32 prev_digest_;
    uint64_t load_error_height_ = 0;  // 0 when the replay was clean

    std::vector<HashRecord> hash_records_;
    std::vector<ProofRecord> proof_records_;
    std::unordered_map<std::string, size_t> hash_by_owner_file_;
    std::unordered_map<std::string, std::vector<size_t>> hashes_by_file_;
    std::unordered_map<std::string, std::vector<size_t>> proofs_by_file_;
    std::unordered_map<std::string, std::vector<size_t>> proofs_by_grant_;

    mutable std::mutex metrics_mutex_;
    mutable std::unordered_map<std::string, OpMetric> metrics_;
};

}  // namespace faith::ledger
