#include "faith/ledger.hpp"

#include <algorithm>
#include <chrono>

#include "faith/errors.hpp"
#include "json.hpp"

namespace faith::ledger {

using nlohmann::json;

namespace {

uint64_t now_ms() {
    auto now = std::chrono::system_clock::now().time_since_epoch();
    return static_cast<uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(now).count());
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    std::chrono::duration<double, std::milli> d = std::chrono::steady_clock::now() - t0;
    return d.count();
}

Digest32 digest32_from_hex(const std::string& hex) {
    Bytes b = from_hex(hex);
    if (b.size() != 32) throw InvalidEncoding("expected a 32-byte hex digest");
    Digest32 d;
    std::copy(b.begin(), b.end(), d.begin());
    return d;
}

json hash_record_json(const HashRecord& rec) {
    json j;
    j["type"] = "hash";
    j["file_id"] = rec.file_id;
    j["root"] = to_hex(commitment::digest_serialize(rec.root));
    j["alg"] = static_cast<uint64_t>(rec.root.alg);
    j["owner"] = to_hex(rec.owner);
    j["height"] = rec.height;
    j["ts"] = rec.timestamp_ms;
    return j;
}

json proof_record_json(const ProofRecord& rec) {
    json j;
    j["type"] = "proof";
    j["file_id"] = rec.file_id;
    j["grant_id"] = rec.grant_id;
    j["binding"] = to_hex(rec.binding);
    j["proof"] = to_hex(rec.proof);
    j["height"] = rec.height;
    j["ts"] = rec.timestamp_ms;
    return j;
}

HashRecord hash_record_from_json(const json& j) {
    HashRecord rec;
    rec.file_id = j.at("file_id").get<std::string>();
    rec.root = commitment::digest_deserialize(from_hex(j.at("root").get<std::string>()));
    if (j.at("alg").get<uint64_t>() != static_cast<uint64_t>(rec.root.alg))
        throw InvalidEncoding("hash record alg disagrees with its root");
    rec.owner = digest32_from_hex(j.at("owner").get<std::string>());
    rec.height = j.at("height").get<uint64_t>();
    rec.timestamp_ms = j.at("ts").get<uint64_t>();
    return rec;
}

ProofRecord proof_record_from_json(const json& j) {
    ProofRecord rec;
    rec.file_id = j.at("file_id").get<std::string>();
    rec.grant_id = j.at("grant_id").get<std::string>();
    rec.binding = digest32_from_hex(j.at("binding").get<std::string>());
    rec.proof = from_hex(j.at("proof").get<std::string>());
    rec.height = j.at("height").get<uint64_t>();
    rec.timestamp_ms = j.at("ts").get<uint64_t>();
    return rec;
}

// digest = H(tag, height, prev, record digests in order)
Digest32 block_digest(uint64_t height, const Digest32& prev,
                      const std::vector<Digest32>& record_digests) {
    TaggedHash h("FAITH-BLOCK-v1");
    h.add_u64(height);
    h.add(prev);
    for (const Digest32& rd : record_digests) h.add(rd);
    return h.finish();
}

std::string owner_file_key(const Digest32& owner, const std::string& file_id) {
    return to_hex(owner) + "/" + file_id;
}

}  // namespace

Digest32 genesis_digest() { return TaggedHash("FAITH-GENESIS-v1").finish(); }

Ledger::Ledger(std::filesystem::path block_log) : path_(std::move(block_log)) {
    prev_digest_ = genesis_digest();
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());

    std::ifstream in(path_);
    std::string line;
    uint64_t expected = 1;
    while (in && std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            json jb = json::parse(line);
            Block b;
            b.height = jb.at("height").get<uint64_t>();
            if (b.height != expected) throw InvalidEncoding("height out of sequence");
            b.prev = digest32_from_hex(jb.at("prev").get<std::string>());
            b.digest = digest32_from_hex(jb.at("digest").get<std::string>());
            for (const auto& rd : jb.at("record_digests"))
                b.record_digests.push_back(digest32_from_hex(rd.get<std::string>()));

            for (const auto& jr : jb.at("records")) {
                std::string type = jr.at("type").get<std::string>();
                if (type == "hash") {
                    HashRecord rec = hash_record_from_json(jr);
                    size_t idx = hash_records_.size();
                    hash_by_owner_file_[owner_file_key(rec.owner, rec.file_id)] = idx;
                    hashes_by_file_[rec.file_id].push_back(idx);
                    hash_records_.push_back(std::move(rec));
                } else if (type == "proof") {
                    ProofRecord rec = proof_record_from_json(jr);
                    size_t idx = proof_records_.size();
                    proofs_by_file_[rec.file_id].push_back(idx);
                    proofs_by_grant_[rec.grant_id].push_back(idx);
                    proof_records_.push_back(std::move(rec));
                } else {
                    throw InvalidEncoding("unknown record type");
                }
            }
            prev_digest_ = b.digest;
            blocks_.push_back(std::move(b));
            ++expected;
        } catch (const std::exception&) {
            // Replay stops at the first block it cannot trust; the log stays
            // readable and auditable but refuses appends.
            load_error_height_ = expected;
            break;
        }
    }
    in.close();

    if (load_error_height_ == 0) {
        out_.open(path_, std::ios::app);
        if (!out_) throw ConfigError("cannot open block log " + path_.string());
    }
}

void Ledger::append_block(const std::string& records_json, uint64_t height) {
    json records = json::parse(records_json);
    Block b;
    b.height = height;
    b.prev = prev_digest_;
    for (const auto& jr : records) {
        std::string dump = jr.dump();
        b.record_digests.push_back(sha256(Bytes(dump.begin(), dump.end())));
    }
    b.digest = block_digest(b.height, b.prev, b.record_digests);

    json jb;
    jb["height"] = b.height;
    jb["prev"] = to_hex(b.prev);
    jb["record_digests"] = json::array();
    for (const Digest32& rd : b.record_digests) jb["record_digests"].push_back(to_hex(rd));
    jb["records"] = records;
    jb["digest"] = to_hex(b.digest);

    out_ << jb.dump() << "\n";
    out_.flush();
    if (!out_) throw Error("block log write failed: " + path_.string());

    prev_digest_ = b.digest;
    blocks_.push_back(std::move(b));
}

uint64_t Ledger::put_hash(HashRecord rec) {
    auto t0 = std::chrono::steady_clock::now();
    uint64_t height;
    size_t line_bytes;
    {
        std::unique_lock lk(state_mutex_);
        if (load_error_height_ != 0)
            throw ConfigError("block log replay failed at height " +
                              std::to_string(load_error_height_));
        std::string key = owner_file_key(rec.owner, rec.file_id);
        if (hash_by_owner_file_.count(key)) throw DuplicateId(rec.file_id);

        height = blocks_.size() + 1;
        rec.height = height;
        rec.timestamp_ms = now_ms();

        json records = json::array({hash_record_json(rec)});
        std::string records_json = records.dump();
        line_bytes = records_json.size();
        append_block(records_json, height);

        size_t idx = hash_records_.size();
        hash_by_owner_file_[key] = idx;
        hashes_by_file_[rec.file_id].push_back(idx);
        hash_records_.push_back(std::move(rec));
    }
    note_metric("put_hash", elapsed_ms(t0), line_bytes);
    return height;
}

uint64_t Ledger::put_proof(ProofRecord rec) {
    auto t0 = std::chrono::steady_clock::now();
    uint64_t height;
    size_t line_bytes;
    {
        std::unique_lock lk(state_mutex_);
        if (load_error_height_ != 0)
            throw ConfigError("block log replay failed at height " +
                              std::to_string(load_error_height_));
        if (!hashes_by_file_.count(rec.file_id)) throw DanglingReference(rec.file_id);

        height = blocks_.size() + 1;
        rec.height = height;
        rec.timestamp_ms = now_ms();

        json records = json::array({proof_record_json(rec)});
        std::string records_json = records.dump();
        line_bytes = records_json.size();
        append_block(records_json, height);

        size_t idx = proof_records_.size();
        proofs_by_file_[rec.file_id].push_back(idx);
        proofs_by_grant_[rec.grant_id].push_back(idx);
        proof_records_.push_back(std::move(rec));
    }
    note_metric("put_proof", elapsed_ms(t0), line_bytes);
    return height;
}

QueryResult Ledger::get(const std::string& id) const {
    auto t0 = std::chrono::steady_clock::now();
    QueryResult result;
    uint64_t bytes = 0;
    {
        std::shared_lock lk(state_mutex_);
        if (auto it = hashes_by_file_.find(id); it != hashes_by_file_.end()) {
            for (size_t idx : it->second) result.hashes.push_back(hash_records_[idx]);
        }
        std::vector<size_t> proof_idx;
        if (auto it = proofs_by_file_.find(id); it != proofs_by_file_.end())
            proof_idx.insert(proof_idx.end(), it->second.begin(), it->second.end());
        if (auto it = proofs_by_grant_.find(id); it != proofs_by_grant_.end())
            proof_idx.insert(proof_idx.end(), it->second.begin(), it->second.end());
        std::sort(proof_idx.begin(), proof_idx.end());
        proof_idx.erase(std::unique(proof_idx.begin(), proof_idx.end()), proof_idx.end());
        for (size_t idx : proof_idx) result.proofs.push_back(proof_records_[idx]);
    }
    if (result.hashes.empty() && result.proofs.empty()) throw NotFound(id);
    for (const HashRecord& h : result.hashes) bytes += 33 + h.file_id.size();
    for (const ProofRecord& p : result.proofs) bytes += p.proof.size();
    note_metric("get", elapsed_ms(t0), bytes);
    return result;
}

std::optional<HashRecord> Ledger::find_hash(const Digest32& owner,
                                            const std::string& file_id) const {
    std::shared_lock lk(state_mutex_);
    auto it = hash_by_owner_file_.find(owner_file_key(owner, file_id));
    if (it == hash_by_owner_file_.end()) return std::nullopt;
    return hash_records_[it->second];
}

AuditReport Ledger::audit() const {
    auto t0 = std::chrono::steady_clock::now();
    AuditReport report;
    Digest32 prev = genesis_digest();
    uint64_t expected = 1;
    uint64_t bytes = 0;

    std::ifstream in;
    {
        // Snapshot the path under the lock; the scan itself reads from disk so
        // that edits to persisted state are what get checked.
        std::shared_lock lk(state_mutex_);
        in.open(path_);
    }
    std::string line;
    auto fail = [&](const std::string& what) {
        report.clean = false;
        report.first_bad_height = expected;
        report.detail = what;
    };
    while (report.clean && in && std::getline(in, line)) {
        if (line.empty()) continue;
        bytes += line.size();
        json jb = json::parse(line, nullptr, false);
        if (jb.is_discarded() || !jb.is_object()) {
            fail("unparseable block line");
            break;
        }
        try {
            uint64_t height = jb.at("height").get<uint64_t>();
            Digest32 block_prev = digest32_from_hex(jb.at("prev").get<std::string>());
            Digest32 stored = digest32_from_hex(jb.at("digest").get<std::string>());
            const json& stored_rds = jb.at("record_digests");
            const json& records = jb.at("records");
            if (!stored_rds.is_array() || !records.is_array() ||
                stored_rds.size() != records.size()) {
                fail("record digest list disagrees with records");
                break;
            }
            if (height != expected) {
                fail("height out of sequence");
                break;
            }
            if (block_prev != prev) {
                fail("previous-block digest mismatch");
                break;
            }
            std::vector<Digest32> rds;
            bool rd_ok = true;
            for (size_t i = 0; i < records.size(); ++i) {
                std::string dump = records[i].dump();
                Digest32 rd = sha256(Bytes(dump.begin(), dump.end()));
                if (rd != digest32_from_hex(stored_rds[i].get<std::string>())) {
                    rd_ok = false;
                    break;
                }
                rds.push_back(rd);
            }
            if (!rd_ok) {
                fail("record digest mismatch");
                break;
            }
            if (block_digest(height, block_prev, rds) != stored) {
                fail("block digest mismatch");
                break;
            }
            prev = stored;
        } catch (const std::exception&) {
            fail("malformed block");
            break;
        }
        ++report.blocks_checked;
        ++expected;
    }
    note_metric("audit", elapsed_ms(t0), bytes);
    return report;
}

uint64_t Ledger::height() const {
    std::shared_lock lk(state_mutex_);
    return blocks_.size();
}

std::vector<OpMetric> Ledger::metrics() const {
    std::lock_guard lk(metrics_mutex_);
    std::vector<OpMetric> out;
    out.reserve(metrics_.size());
    for (const auto& [op, m] : metrics_) out.push_back(m);
    std::sort(out.begin(), out.end(),
              [](const OpMetric& a, const OpMetric& b) { return a.op < b.op; });
    return out;
}

void Ledger::note_metric(const std::string& op, double ms, uint64_t bytes) const {
    std::lock_guard lk(metrics_mutex_);
    OpMetric& m = metrics_[op];
    m.op = op;
    ++m.count;
    m.total_ms += ms;
    m.bytes += bytes;
}

}  // namespace faith::ledger
