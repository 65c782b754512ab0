#include "faith/protocol.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <cstring>

#include "faith/errors.hpp"
#include "json.hpp"

namespace faith::protocol {

using nlohmann::json;

namespace {

inline constexpr uint8_t TAG_KEYPAIR = 0x05;

const char* PARAMS_FILE = "params.json";

std::string vrk_filename(proofs::CircuitId id) {
    return std::string("vrk_") + proofs::circuit_name(id) + ".bin";
}

void write_file(const std::filesystem::path& p, ByteView data) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    if (!out) throw ConfigError("cannot write " + p.string());
}

Bytes read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + p.string());
    return Bytes(std::istreambuf_iterator<char>(in), {});
}

GrantStatus status_from_name(const std::string& name) {
    for (int i = 0; i <= static_cast<int>(GrantStatus::failed); ++i) {
        auto s = static_cast<GrantStatus>(i);
        if (name == grant_status_name(s)) return s;
    }
    throw ConfigError("unknown grant status: " + name);
}

// the merge counts a reload would otherwise lose are a function of the leaf
// count alone
proofs::AggregationStats stats_for(uint64_t n_leaves) {
    proofs::AggregationStats st;
    uint64_t level = n_leaves;
    while (level > 1) {
        st.pair_aggregations += level / 2;
        st.duplicate_merges += level % 2;
        level = (level + 1) / 2;
        ++st.depth;
    }
    return st;
}

// status values are ordered; the only legal moves are one step forward or a
// drop into failed
void advance(Grant& g, GrantStatus next, const std::string& cause = {}) {
    if (g.status == GrantStatus::failed) throw ConfigError("grant " + g.grant_id + " already failed");
    if (next == GrantStatus::failed) {
        g.status = GrantStatus::failed;
        g.failure = cause;
        return;
    }
    if (static_cast<int>(next) != static_cast<int>(g.status) + 1)
        throw ConfigError("grant " + g.grant_id + " cannot move from " +
                          grant_status_name(g.status) + " to " + grant_status_name(next));
    g.status = next;
}

}  // namespace

const char* grant_status_name(GrantStatus s) {
    switch (s) {
        case GrantStatus::requested: return "requested";
        case GrantStatus::rekeyed: return "rekeyed";
        case GrantStatus::proven: return "proven";
        case GrantStatus::published: return "published";
        case GrantStatus::served: return "served";
        case GrantStatus::verified: return "verified";
        case GrantStatus::failed: return "failed";
    }
    return "unknown";
}

const char* fault_name(Fault f) {
    switch (f) {
        case Fault::none: return "none";
        case Fault::corrupt_data: return "corrupt_data";
        case Fault::corrupt_reenc: return "corrupt_reenc";
        case Fault::statement_mismatch: return "statement_mismatch";
        case Fault::stale_proof: return "stale_proof";
    }
    return "unknown";
}

SystemParams ta_setup(const SetupConfig& config) {
    if (!std::has_single_bit(config.chunk_size) ||
        config.chunk_size < envelope::MIN_CHUNK_SIZE ||
        config.chunk_size > envelope::MAX_CHUNK_SIZE) {
        throw ConfigError("chunk_size must be a power of two in [" +
                          std::to_string(envelope::MIN_CHUNK_SIZE) + ", " +
                          std::to_string(envelope::MAX_CHUNK_SIZE) + "]");
    }
    proofs::SetupParams sp{config.chunk_size, config.alg};
    SystemParams params;
    params.config = config;
    params.params_digest = proofs::setup_params_digest(sp);
    params.int_keys = proofs::setup(proofs::CircuitId::integrity, sp);
    params.pre_keys = proofs::setup(proofs::CircuitId::reenc, sp);
    params.agg_keys = proofs::setup(proofs::CircuitId::aggregate, sp);
    params.ctx = &Backend::ctx();
    return params;
}

void publish_params(const SystemParams& params, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    json j;
    j["chunk_size"] = params.config.chunk_size;
    j["alg"] = static_cast<uint64_t>(params.config.alg);
    std::string text = j.dump(2);
    text.push_back('\n');
    write_file(dir / PARAMS_FILE, Bytes(text.begin(), text.end()));
    write_file(dir / vrk_filename(proofs::CircuitId::integrity), params.int_keys.vrk);
    write_file(dir / vrk_filename(proofs::CircuitId::reenc), params.pre_keys.vrk);
    write_file(dir / vrk_filename(proofs::CircuitId::aggregate), params.agg_keys.vrk);
}

SystemParams load_params(const std::filesystem::path& dir) {
    Bytes text = read_file(dir / PARAMS_FILE);
    json j = json::parse(text.begin(), text.end(), nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw ConfigError("unparseable " + (dir / PARAMS_FILE).string());
    SetupConfig config;
    config.chunk_size = j.at("chunk_size").get<uint32_t>();
    config.alg = static_cast<commitment::HashAlg>(j.at("alg").get<uint64_t>());
    SystemParams params = ta_setup(config);
    for (auto [id, keys] :
         {std::pair{proofs::CircuitId::integrity, &params.int_keys},
          std::pair{proofs::CircuitId::reenc, &params.pre_keys},
          std::pair{proofs::CircuitId::aggregate, &params.agg_keys}}) {
        Bytes stored = read_file(dir / vrk_filename(id));
        if (stored != keys->vrk)
            throw ConfigError("verifying key file disagrees with params: " + vrk_filename(id));
    }
    return params;
}

Bytes keypair_serialize(const Ctx& ctx, const BlsKeyPair& kp) {
    TaggedWriter w(TAG_KEYPAIR);
    w.field(Backend::scalar_serialize(ctx, kp.s1));
    w.field(Backend::scalar_serialize(ctx, kp.s2));
    return w.take();
}

BlsKeyPair keypair_deserialize(const Ctx& ctx, ByteView b) {
    TaggedReader r(b, TAG_KEYPAIR);
    BlsKeyPair kp;
    kp.s1 = Backend::scalar_deserialize(ctx, r.field());
    kp.s2 = Backend::scalar_deserialize(ctx, r.field());
    r.expect_done();
    kp.pk.pkT = Backend::gt_pow(ctx, ctx.gT, kp.s1);
    kp.pk.pk2 = Backend::g2_pow(ctx, ctx.h2, kp.s2);
    return kp;
}

// ---- storage provider ----

struct StorageProvider::PendingStore {
    std::filesystem::path env_path;
    std::fstream file;
    commitment::CommitmentBuilder builder;
    std::vector<proofs::LeafProof> leaves;
    uint64_t next_index = 0;

    PendingStore(std::filesystem::path p, uint32_t chunk_size, commitment::HashAlg alg)
        : env_path(std::move(p)),
          file(env_path, std::ios::binary | std::ios::trunc | std::ios::in | std::ios::out),
          builder(chunk_size, alg) {}
};

StorageProvider::StorageProvider(const SystemParams& params, ledger::Ledger& led,
                                 std::filesystem::path storage_dir, FaultConfig fault)
    : params_(&params), ledger_(&led), dir_(std::move(storage_dir)), fault_(fault) {
    std::filesystem::create_directories(dir_ / "grants");
    load_state();
}

void StorageProvider::load_state() {
    const std::string meta_suffix = ".meta.json";
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        if (!name.ends_with(meta_suffix)) continue;
        std::string id = name.substr(0, name.size() - meta_suffix.size());

        Bytes meta_text = read_file(entry.path());
        json meta = json::parse(meta_text.begin(), meta_text.end(), nullptr, false);
        if (meta.is_discarded() || !meta.is_object())
            throw ConfigError("unparseable " + entry.path().string());

        StoredObject obj;
        obj.id = id;
        obj.envelope_path = dir_ / (id + ".env");
        obj.c_bytes = from_hex(meta.at("c").get<std::string>());
        Bytes owner = from_hex(meta.at("owner").get<std::string>());
        if (owner.size() != obj.owner.size())
            throw ConfigError("bad owner digest in " + entry.path().string());
        std::copy(owner.begin(), owner.end(), obj.owner.begin());

        Bytes sidecar = read_file(dir_ / (id + ".commitment.json"));
        obj.commitment =
            commitment::parse_sidecar(std::string(sidecar.begin(), sidecar.end()));

        Bytes leaves_blob = read_file(dir_ / (id + ".leaves.bin"));
        TaggedReader lr(leaves_blob, proofs::TAG_LEAF_PROOF);
        uint64_t count = lr.field_u64();
        obj.leaf_proofs.reserve(count);
        for (uint64_t i = 0; i < count; ++i)
            obj.leaf_proofs.push_back(proofs::leaf_proof_deserialize(lr.field()));
        lr.expect_done();

        auto root_path = dir_ / (id + ".root.bin");
        if (std::filesystem::exists(root_path)) {
            obj.root_proof = proofs::root_proof_deserialize(read_file(root_path));
            obj.agg_stats = stats_for(obj.leaf_proofs.size());
        }
        objects_.emplace(id, std::move(obj));
    }

    for (const auto& entry : std::filesystem::directory_iterator(dir_ / "grants")) {
        if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
        Bytes text = read_file(entry.path());
        json j = json::parse(text.begin(), text.end(), nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw ConfigError("unparseable " + entry.path().string());
        Grant g;
        g.grant_id = j.at("grant_id").get<std::string>();
        g.file_id = j.at("file_id").get<std::string>();
        g.du_pk = from_hex(j.at("du_pk").get<std::string>());
        g.rekey = from_hex(j.at("rekey").get<std::string>());
        g.c_prime = from_hex(j.at("c_prime").get<std::string>());
        g.proof_height = j.at("proof_height").get<uint64_t>();
        g.status = status_from_name(j.at("status").get<std::string>());
        g.failure = j.at("failure").get<std::string>();
        // proofs are not cached here; the ledger holds the published bytes
        std::string num = g.grant_id;
        if (auto pos = num.rfind('-'); pos != std::string::npos) num = num.substr(pos + 1);
        uint64_t n = std::strtoull(num.c_str(), nullptr, 10);
        next_grant_ = std::max(next_grant_, n + 1);
        grants_.emplace(g.grant_id, std::move(g));
    }
}

void StorageProvider::persist_grant(const Grant& g) const {
    json j;
    j["grant_id"] = g.grant_id;
    j["file_id"] = g.file_id;
    j["du_pk"] = to_hex(g.du_pk);
    j["rekey"] = to_hex(g.rekey);
    j["c_prime"] = to_hex(g.c_prime);
    j["proof_height"] = g.proof_height;
    j["status"] = grant_status_name(g.status);
    j["failure"] = g.failure;
    std::string text = j.dump(2);
    text.push_back('\n');
    write_file(dir_ / "grants" / (g.grant_id + ".json"), Bytes(text.begin(), text.end()));
}

StorageProvider::~StorageProvider() = default;

void StorageProvider::begin_store(const std::string& file_id) {
    std::lock_guard lk(mutex_);
    if (objects_.count(file_id) || pending_.count(file_id)) throw DuplicateId(file_id);
    auto ps = std::make_unique<PendingStore>(dir_ / (file_id + ".env"),
                                             params_->config.chunk_size, params_->config.alg);
    if (!ps->file) throw ConfigError("cannot create envelope file for " + file_id);
    // header placeholder; the real header lands in finish_store
    std::array<char, envelope::HEADER_BYTES> zero{};
    ps->file.write(zero.data(), zero.size());
    pending_.emplace(file_id, std::move(ps));
}

void StorageProvider::ingest_frame(const std::string& file_id, uint64_t index, ByteView frame) {
    std::lock_guard lk(mutex_);
    auto it = pending_.find(file_id);
    if (it == pending_.end()) throw NotFound(file_id);
    PendingStore& ps = *it->second;
    if (index != ps.next_index)
        throw ConfigError("frame " + std::to_string(index) + " arrived out of order");

    Bytes stored(frame.begin(), frame.end());
    if (fault_.fault == Fault::corrupt_data && index == 0 && !stored.empty())
        stored[stored.size() / 2] ^= 0x01;

    ps.builder.add_frame(stored);
    ps.leaves.push_back(proofs::prove_chunk(params_->int_keys, stored, index));
    ps.file.write(reinterpret_cast<const char*>(stored.data()),
                  static_cast<std::streamsize>(stored.size()));
    ++ps.next_index;
}

void StorageProvider::finish_store(const std::string& file_id, ByteView header_bytes,
                                   ByteView c_bytes, const Digest32& owner) {
    std::lock_guard lk(mutex_);
    auto it = pending_.find(file_id);
    if (it == pending_.end()) throw NotFound(file_id);
    PendingStore& ps = *it->second;

    // a zero-length plaintext has no frames; commit and prove the one padded
    // empty chunk the commitment rules give it
    if (ps.next_index == 0) ps.leaves.push_back(proofs::prove_chunk(params_->int_keys, {}, 0));

    ps.file.seekp(0);
    ps.file.write(reinterpret_cast<const char*>(header_bytes.data()),
                  static_cast<std::streamsize>(header_bytes.size()));
    ps.file.flush();
    if (!ps.file) throw ConfigError("envelope write failed for " + file_id);
    ps.file.close();

    StoredObject obj;
    obj.id = file_id;
    obj.envelope_path = ps.env_path;
    obj.c_bytes = Bytes(c_bytes.begin(), c_bytes.end());
    obj.owner = owner;
    obj.commitment = ps.builder.finish();
    obj.leaf_proofs = std::move(ps.leaves);
    pending_.erase(it);

    write_file(dir_ / (file_id + ".commitment.json"), [&] {
        std::string s = commitment::sidecar_json(obj.commitment);
        return Bytes(s.begin(), s.end());
    }());
    TaggedWriter lw(proofs::TAG_LEAF_PROOF);
    lw.field_u64(obj.leaf_proofs.size());
    for (const auto& leaf : obj.leaf_proofs) lw.field(proofs::leaf_proof_serialize(leaf));
    write_file(dir_ / (file_id + ".leaves.bin"), lw.take());

    json meta;
    meta["c"] = to_hex(obj.c_bytes);
    meta["owner"] = to_hex(obj.owner);
    std::string meta_text = meta.dump(2);
    meta_text.push_back('\n');
    write_file(dir_ / (file_id + ".meta.json"), Bytes(meta_text.begin(), meta_text.end()));

    objects_.emplace(file_id, std::move(obj));
}

std::string StorageProvider::accept_grant(const std::string& file_id, ByteView du_pk,
                                          ByteView rekey) {
    std::lock_guard lk(mutex_);
    if (!objects_.count(file_id)) throw NotFound(file_id);
    Grant g;
    g.grant_id = "grant-" + std::to_string(next_grant_++);
    g.file_id = file_id;
    g.status = GrantStatus::requested;
    g.du_pk = Bytes(du_pk.begin(), du_pk.end());
    g.rekey = Bytes(rekey.begin(), rekey.end());
    advance(g, GrantStatus::rekeyed);
    persist_grant(g);
    std::string id = g.grant_id;
    grants_.emplace(id, std::move(g));
    return id;
}

void StorageProvider::ensure_root(StoredObject& obj) {
    if (obj.root_proof) return;
    obj.root_proof = proofs::aggregate_root(params_->agg_keys, obj.leaf_proofs, &obj.agg_stats);
    write_file(dir_ / (obj.id + ".root.bin"), proofs::root_proof_serialize(*obj.root_proof));
}

const Grant& StorageProvider::process_grant(const std::string& grant_id) {
    const Ctx& ctx = *params_->ctx;

    // stage the work under the lock, prove outside it
    Bytes rekey_bytes, c_bytes;
    std::string file_id;
    proofs::RootProof root = [&] {
        std::lock_guard lk(mutex_);
        auto git = grants_.find(grant_id);
        if (git == grants_.end()) throw NotFound(grant_id);
        Grant& g = git->second;
        if (g.status != GrantStatus::rekeyed)
            throw ConfigError("grant " + grant_id + " is " + grant_status_name(g.status) +
                              ", expected rekeyed");
        auto oit = objects_.find(g.file_id);
        if (oit == objects_.end()) throw NotFound(g.file_id);
        StoredObject& obj = oit->second;

        if (fault_.fault == Fault::stale_proof) {
            // rewrite one stored byte, then recommit and re-prove so the
            // served object is internally coherent but no longer the one the
            // chain anchors
            Bytes env = read_file(obj.envelope_path);
            if (env.size() > envelope::HEADER_BYTES) {
                env[envelope::HEADER_BYTES + (env.size() - envelope::HEADER_BYTES) / 2] ^= 0x01;
                write_file(obj.envelope_path, env);
                envelope::Header hdr = envelope::header_deserialize(
                    ByteView(env.data(), envelope::HEADER_BYTES));
                size_t frame_size = commitment::frame_size_for(hdr.chunk_size);
                commitment::CommitmentBuilder builder(hdr.chunk_size, params_->config.alg);
                std::vector<proofs::LeafProof> leaves;
                size_t off = envelope::HEADER_BYTES;
                uint64_t index = 0;
                while (off < env.size()) {
                    size_t take = std::min(frame_size, env.size() - off);
                    ByteView frame(env.data() + off, take);
                    builder.add_frame(frame);
                    leaves.push_back(proofs::prove_chunk(params_->int_keys, frame, index));
                    off += take;
                    ++index;
                }
                obj.commitment = builder.finish();
                obj.leaf_proofs = std::move(leaves);
                obj.root_proof.reset();
            }
        }

        ensure_root(obj);
        rekey_bytes = g.rekey;
        c_bytes = obj.c_bytes;
        file_id = g.file_id;
        return *obj.root_proof;
    }();

    Digest32 owner;
    {
        std::lock_guard lk(mutex_);
        owner = objects_.at(file_id).owner;
    }
    auto hash_rec = ledger_->find_hash(owner, file_id);

    auto fail = [&](const std::string& cause) -> const Grant& {
        std::lock_guard lk(mutex_);
        Grant& g = grants_.at(grant_id);
        advance(g, GrantStatus::failed, cause);
        persist_grant(g);
        return g;
    };
    if (!hash_rec) return fail("no hash record on the ledger for " + file_id);

    try {
        auto rk = pre::deserialize_rekey<Backend>(ctx, rekey_bytes);
        auto c = pre::deserialize_level2<Backend>(ctx, c_bytes);
        auto c_prime = pre::reenc<Backend>(ctx, rk, c);
        auto sigma = proofs::prove_reenc<Backend>(ctx, c, c_prime, rk, rng_);

        if (fault_.fault == Fault::corrupt_reenc)
            c_prime.c1p = Backend::gt_mul(ctx, c_prime.c1p, ctx.gT);

        proofs::FileStatement stmt{hash_rec->root, c_prime, c};
        proofs::AggregatedProof agg;
        bool coherent = root.digest() == hash_rec->root && fault_.fault != Fault::corrupt_reenc;
        if (coherent) {
            agg = proofs::aggregate_final(ctx, params_->agg_keys, {root}, {sigma}, {stmt});
        } else {
            // the honest assembler refuses inconsistent inputs; a misbehaving
            // provider just glues the pieces together itself
            agg.params_digest = params_->params_digest;
            agg.roots = {root};
            agg.reencs = {sigma};
            agg.binding = proofs::binding_digest(ctx, {stmt});
        }
        Bytes proof_bytes = proofs::aggregated_proof_serialize(ctx, agg);
        Bytes c_prime_bytes = pre::serialize_level1<Backend>(ctx, c_prime);

        {
            std::lock_guard lk(mutex_);
            Grant& g = grants_.at(grant_id);
            advance(g, GrantStatus::proven);
            g.c_prime = c_prime_bytes;
            g.proof = proof_bytes;
            persist_grant(g);
        }

        ledger::ProofRecord rec;
        rec.file_id = file_id;
        rec.grant_id = grant_id;
        rec.binding = agg.binding;
        rec.proof = proof_bytes;
        uint64_t height = ledger_->put_proof(rec);

        std::lock_guard lk(mutex_);
        Grant& g = grants_.at(grant_id);
        advance(g, GrantStatus::published);
        g.proof_height = height;
        persist_grant(g);
        return g;
    } catch (const ProvingError& e) {
        return fail(e.what());
    } catch (const StatementMismatch& e) {
        return fail(e.what());
    } catch (const InvalidEncoding& e) {
        return fail(e.what());
    }
}

ServedBundle StorageProvider::serve(const std::string& grant_id) {
    const Ctx& ctx = *params_->ctx;
    std::lock_guard lk(mutex_);
    auto git = grants_.find(grant_id);
    if (git == grants_.end()) throw NotFound(grant_id);
    Grant& g = git->second;
    if (g.status != GrantStatus::published)
        throw ConfigError("grant " + grant_id + " is " + grant_status_name(g.status) +
                          ", expected published");
    const StoredObject& obj = objects_.at(g.file_id);

    ServedBundle bundle;
    bundle.grant_id = grant_id;
    bundle.file_id = g.file_id;
    bundle.owner = obj.owner;
    bundle.envelope_path = obj.envelope_path;
    bundle.c_bytes = obj.c_bytes;
    bundle.c_prime_bytes = g.c_prime;
    if (fault_.fault == Fault::statement_mismatch) {
        // hand out a transformed ciphertext the published proof never covered
        auto cp = pre::deserialize_level1<Backend>(ctx, bundle.c_prime_bytes);
        cp.c2p = Backend::gt_mul(ctx, cp.c2p, ctx.gT);
        bundle.c_prime_bytes = pre::serialize_level1<Backend>(ctx, cp);
    }
    advance(g, GrantStatus::served);
    persist_grant(g);
    return bundle;
}

void StorageProvider::confirm(const std::string& grant_id, bool ok, const std::string& cause) {
    std::lock_guard lk(mutex_);
    auto git = grants_.find(grant_id);
    if (git == grants_.end()) throw NotFound(grant_id);
    if (ok)
        advance(git->second, GrantStatus::verified);
    else
        advance(git->second, GrantStatus::failed, cause);
    persist_grant(git->second);
}

Grant StorageProvider::grant(const std::string& grant_id) const {
    std::lock_guard lk(mutex_);
    auto git = grants_.find(grant_id);
    if (git == grants_.end()) throw NotFound(grant_id);
    return git->second;
}

const StoredObject& StorageProvider::object(const std::string& file_id) const {
    std::lock_guard lk(mutex_);
    return object_locked(file_id);
}

const StoredObject& StorageProvider::object_locked(const std::string& file_id) const {
    auto it = objects_.find(file_id);
    if (it == objects_.end()) throw NotFound(file_id);
    return it->second;
}

// ---- data owner ----

DataOwner::DataOwner(const SystemParams& params, RngSource& rng)
    : params_(&params), kp_(pre::keygen<Backend>(*params.ctx, rng)), rng_(&rng) {}

DataOwner::DataOwner(const SystemParams& params, BlsKeyPair kp, RngSource& rng)
    : params_(&params), kp_(std::move(kp)), rng_(&rng) {}

Digest32 DataOwner::key_digest() const {
    return sha256(pre::serialize_public_key<Backend>(*params_->ctx, kp_.pk));
}

DataOwner::UploadResult DataOwner::upload_source(StorageProvider& sp, ledger::Ledger& led,
                                                 const envelope::ByteSource& src,
                                                 uint64_t plaintext_len,
                                                 const std::string& file_id) {
    const Ctx& ctx = *params_->ctx;
    sp.begin_store(file_id);

    // fresh file key, wrapped for the owner
    auto t = Backend::scalar_random_nonzero(ctx, *rng_);
    auto m = Backend::gt_pow(ctx, ctx.gT, t);
    envelope::FileKey key = envelope::kem_derive<Backend>(ctx, m);
    auto c = pre::enc<Backend>(ctx, kp_.pk, m, *rng_);
    Bytes c_bytes = pre::serialize_level2<Backend>(ctx, c);

    commitment::CommitmentBuilder builder(params_->config.chunk_size, params_->config.alg);
    uint64_t envelope_bytes = 0;
    auto sink = [&](ByteView b) { envelope_bytes += b.size(); };
    auto observer = [&](uint64_t index, ByteView frame) {
        builder.add_frame(frame);
        sp.ingest_frame(file_id, index, frame);
    };
    envelope::Header hdr = envelope::se_encrypt(key, params_->config.chunk_size, plaintext_len,
                                                src, sink, *rng_, nullptr, observer);

    UploadResult result;
    result.file_id = file_id;
    result.commitment = builder.finish();
    result.envelope_bytes = envelope_bytes;

    sp.finish_store(file_id, envelope::header_serialize(hdr), c_bytes, key_digest());

    ledger::HashRecord rec;
    rec.file_id = file_id;
    rec.root = result.commitment.root;
    rec.owner = key_digest();
    result.ledger_height = led.put_hash(rec);
    return result;
}

DataOwner::UploadResult DataOwner::upload(StorageProvider& sp, ledger::Ledger& led,
                                          const std::filesystem::path& plaintext,
                                          const std::string& file_id) {
    uint64_t len = std::filesystem::file_size(plaintext);
    std::ifstream in(plaintext, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + plaintext.string());
    auto src = [&in](std::span<uint8_t> out) -> size_t {
        in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(out.size()));
        return static_cast<size_t>(in.gcount());
    };
    return upload_source(sp, led, src, len, file_id);
}

DataOwner::UploadResult DataOwner::upload_bytes(StorageProvider& sp, ledger::Ledger& led,
                                                ByteView plaintext, const std::string& file_id) {
    size_t pos = 0;
    auto src = [&](std::span<uint8_t> out) -> size_t {
        size_t take = std::min(out.size(), plaintext.size() - pos);
        std::memcpy(out.data(), plaintext.data() + pos, take);
        pos += take;
        return take;
    };
    return upload_source(sp, led, src, plaintext.size(), file_id);
}

std::string DataOwner::grant(StorageProvider& sp, const BlsPublicKey& user_pk,
                             const std::string& file_id) {
    const Ctx& ctx = *params_->ctx;
    auto rk = pre::rekeygen<Backend>(ctx, kp_, user_pk);
    return sp.accept_grant(file_id, pre::serialize_public_key<Backend>(ctx, user_pk),
                           pre::serialize_rekey<Backend>(ctx, rk));
}

// ---- data user ----

DataUser::DataUser(const SystemParams& params, RngSource& rng)
    : params_(&params), kp_(pre::keygen<Backend>(*params.ctx, rng)) {}

DataUser::DataUser(const SystemParams& params, BlsKeyPair kp)
    : params_(&params), kp_(std::move(kp)) {}

DataUser::RetrieveResult DataUser::retrieve(StorageProvider& sp, ledger::Ledger& led,
                                            const std::string& grant_id,
                                            const envelope::ByteSink& out) {
    const Ctx& ctx = *params_->ctx;
    ServedBundle bundle = sp.serve(grant_id);

    auto file_q = led.get(bundle.file_id);
    const ledger::HashRecord* hash_rec = nullptr;
    for (const auto& r : file_q.hashes)
        if (r.owner == bundle.owner) hash_rec = &r;
    if (!hash_rec) throw NotFound("hash record for " + bundle.file_id);

    auto grant_q = led.get(grant_id);
    if (grant_q.proofs.empty()) throw NotFound("proof record for " + grant_id);
    const Bytes& proof_bytes = grant_q.proofs.back().proof;

    RetrieveResult result;
    proofs::AggregatedProof proof;
    pre::Level2Ciphertext<Backend> c;
    pre::Level1Ciphertext<Backend> c_prime;
    try {
        proof = proofs::aggregated_proof_deserialize(ctx, proof_bytes);
        c = pre::deserialize_level2<Backend>(ctx, bundle.c_bytes);
        c_prime = pre::deserialize_level1<Backend>(ctx, bundle.c_prime_bytes);
    } catch (const InvalidEncoding& e) {
        result.reason = proofs::VerifyFailure::encoding;
        result.detail = e.what();
        sp.confirm(grant_id, false, result.detail);
        return result;
    }

    auto& counters = Backend::counters();
    uint64_t pairings0 = counters.pairings.load();
    uint64_t gt0 = counters.gt_exps.load();
    std::vector<proofs::FileStatement> stmts{{hash_rec->root, c_prime, c}};
    proofs::VerifyOutcome outcome = proofs::verify_aggregated(ctx, params_->agg_keys, stmts, proof);
    result.pairings = counters.pairings.load() - pairings0;
    result.gt_exps = counters.gt_exps.load() - gt0;

    if (!outcome.ok) {
        result.reason = outcome.reason;
        result.detail = outcome.detail;
        sp.confirm(grant_id, false,
                   std::string(proofs::failure_name(outcome.reason)) + ": " + outcome.detail);
        return result;
    }

    // proof accepted; only now unwrap the key and touch the envelope
    auto m = pre::dec_user<Backend>(ctx, kp_, c_prime);
    envelope::FileKey key = envelope::kem_derive<Backend>(ctx, m);

    std::ifstream in(bundle.envelope_path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + bundle.envelope_path.string());
    auto src = [&in](std::span<uint8_t> buf) -> size_t {
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        return static_cast<size_t>(in.gcount());
    };
    envelope::Header hdr;
    try {
        hdr = envelope::se_decrypt(key, src, out);
    } catch (const Error& e) {
        sp.confirm(grant_id, false, e.what());
        throw;
    }
    sp.confirm(grant_id, true, {});
    result.ok = true;
    result.plaintext_bytes = hdr.plaintext_len;
    return result;
}

DataUser::RetrieveResult DataUser::retrieve_to_file(StorageProvider& sp, ledger::Ledger& led,
                                                    const std::string& grant_id,
                                                    const std::filesystem::path& out_path) {
    // The file is created only once verification has passed and plaintext
    // starts flowing; a rejected grant leaves nothing behind.
    std::ofstream out;
    auto open_out = [&] {
        out.open(out_path, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + out_path.string());
    };
    auto sink = [&](ByteView b) {
        if (!out.is_open()) open_out();
        out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
    };
    RetrieveResult result = retrieve(sp, led, grant_id, sink);
    if (result.ok && !out.is_open()) open_out();  // zero-length plaintext
    out.flush();
    if (out.is_open() && !out) throw ConfigError("write failed: " + out_path.string());
    return result;
}

DataUser::RetrievedBytes DataUser::retrieve_bytes(StorageProvider& sp, ledger::Ledger& led,
                                                  const std::string& grant_id) {
    RetrievedBytes rb;
    auto sink = [&rb](ByteView b) { rb.plaintext.insert(rb.plaintext.end(), b.begin(), b.end()); };
    rb.result = retrieve(sp, led, grant_id, sink);
    return rb;
}

}  // namespace faith::protocol
