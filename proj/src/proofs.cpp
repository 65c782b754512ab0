#include "faith/proofs.hpp"

#include <cstring>

namespace faith::proofs {

namespace {

const char* circuit_description(CircuitId id) {
    switch (id) {
        case CircuitId::integrity:
            return "leaf: digest = hash_chunk(pack_chunk(chunk)); transcript binds "
                   "challenge-sampled packed elements";
        case CircuitId::reenc:
            return "sigma: pairing(c1, z) == A * c1p^ch with ch = "
                   "H(FAITH-PRE-v1 || x_pre || A)";
        case CircuitId::aggregate:
            return "node: parent = node_hash(left, right), transcripts chained; "
                   "binding = H(FAITH-AGG-v1 || x_agg)";
    }
    throw ConfigError("unknown circuit id");
}

Bytes samples_bytes(const std::vector<SampleEntry>& samples) {
    Bytes out;
    out.reserve(samples.size() * 12);
    for (const auto& s : samples) {
        append_u32le(out, s.elem_index);
        append_u64le(out, s.value);
    }
    return out;
}

std::vector<uint32_t> sample_positions(const Digest32& params_digest,
                                       const commitment::Digest& digest, uint64_t index,
                                       size_t n_elems) {
    std::vector<uint32_t> out;
    out.reserve(SAMPLE_COUNT);
    Bytes digest_ser = commitment::digest_serialize(digest);
    uint64_t counter = 0;
    while (out.size() < SAMPLE_COUNT) {
        TaggedHash h("FAITH-INT-SAMPLE-v1");
        h.add(params_digest).add(digest_ser).add_u64(index).add_u64(counter++);
        Digest32 block = h.finish();
        for (size_t i = 0; i < 8 && out.size() < SAMPLE_COUNT; ++i) {
            out.push_back(read_u32le(block, 4 * i) % uint32_t(n_elems));
        }
    }
    return out;
}

Digest32 leaf_transcript(const Digest32& params_digest, uint64_t index,
                         const commitment::Digest& digest,
                         const std::vector<SampleEntry>& samples) {
    TaggedHash h("FAITH-INT-LEAF-v1");
    h.add(params_digest).add_u64(index).add(commitment::digest_serialize(digest));
    h.add(samples_bytes(samples));
    return h.finish();
}

Digest32 node_transcript(const NodeProof& p) {
    TaggedHash h("FAITH-INT-NODE-v1");
    h.add(p.params_digest).add_u64(p.depth).add_u64(p.n_leaves);
    h.add(commitment::digest_serialize(p.parent));
    h.add(commitment::digest_serialize(p.left));
    h.add(commitment::digest_serialize(p.right));
    h.add(p.left_transcript).add(p.right_transcript);
    return h.finish();
}

// Structural check shared by verification and aggregation preconditions:
// the transcript matches and the samples sit at the challenge positions,
// which are recomputable from public data alone.
bool leaf_well_formed(const CircuitKeys& keys, const LeafProof& p) {
    if (p.params_digest != keys.params_digest) return false;
    if (p.samples.size() != SAMPLE_COUNT) return false;
    if (p.transcript != leaf_transcript(p.params_digest, p.index, p.digest, p.samples))
        return false;
    size_t frame = commitment::frame_size_for(keys.params.chunk_size);
    std::vector<uint32_t> positions = sample_positions(
        p.params_digest, p.digest, p.index, commitment::packed_element_count(frame));
    for (size_t i = 0; i < SAMPLE_COUNT; ++i) {
        if (p.samples[i].elem_index != positions[i]) return false;
    }
    return true;
}

bool node_well_formed(const Digest32& params_digest, const NodeProof& p) {
    if (p.params_digest != params_digest) return false;
    if (p.depth == 0 || p.n_leaves < 2) return false;
    if (p.parent != commitment::node_hash(p.left, p.right)) return false;
    return p.transcript == node_transcript(p);
}

void require_key(const CircuitKeys& keys, CircuitId id, bool prover) {
    if (keys.id != id) throw ConfigError("wrong circuit key");
    if (prover && keys.prk.empty()) throw ProvingError("missing proving key");
}

}  // namespace

const char* circuit_name(CircuitId id) {
    switch (id) {
        case CircuitId::integrity: return "int";
        case CircuitId::reenc: return "pre";
        case CircuitId::aggregate: return "agg";
    }
    throw ConfigError("unknown circuit id");
}

Digest32 setup_params_digest(const SetupParams& params) {
    TaggedHash h("FAITH-PARAMS-v1");
    h.add_u64(params.chunk_size);
    h.add_u64(static_cast<uint64_t>(params.alg));
    Bytes backend = {'b', 'l', 's', '1', '2', '-', '3', '8', '1'};
    h.add(backend);
    return h.finish();
}

CircuitKeys setup(CircuitId id, const SetupParams& params) {
    if (params.chunk_size == 0) throw ConfigError("chunk_size must be positive");
    if (params.alg != commitment::HashAlg::poseidon2 &&
        params.alg != commitment::HashAlg::sha256) {
        throw ConfigError("unsupported hash algorithm");
    }
    CircuitKeys keys;
    keys.id = id;
    keys.params = params;
    keys.params_digest = setup_params_digest(params);

    const char* desc = circuit_description(id);
    ByteView desc_view(reinterpret_cast<const uint8_t*>(desc), std::strlen(desc));

    TaggedWriter vrk(TAG_VRK);
    vrk.field_u64(static_cast<uint64_t>(id));
    vrk.field_u64(1);  // key format version
    vrk.field_u64(params.chunk_size);
    vrk.field_u64(static_cast<uint64_t>(params.alg));
    vrk.field(keys.params_digest);
    vrk.field(desc_view);
    keys.vrk = vrk.take();

    TaggedWriter prk(TAG_PRK);
    prk.field(keys.vrk);
    prk.field_u64(SAMPLE_COUNT);
    keys.prk = prk.take();
    return keys;
}

CircuitKeys keys_from_vrk(ByteView vrk) {
    TaggedReader r(vrk, TAG_VRK);
    uint64_t id = r.field_u64();
    uint64_t version = r.field_u64();
    if (version != 1) throw InvalidEncoding("unsupported key format version");
    SetupParams params;
    params.chunk_size = static_cast<uint32_t>(r.field_u64());
    params.alg = static_cast<commitment::HashAlg>(r.field_u64());
    Bytes digest = r.field();
    r.field();  // description, informational
    r.expect_done();
    if (id < 1 || id > 3) throw InvalidEncoding("bad circuit id");

    CircuitKeys keys = setup(static_cast<CircuitId>(id), params);
    bool digest_ok = digest.size() == 32 &&
                     std::equal(digest.begin(), digest.end(), keys.params_digest.begin());
    if (!digest_ok || keys.vrk != Bytes(vrk.begin(), vrk.end()))
        throw InvalidEncoding("verifying key does not match its parameters");
    keys.prk.clear();  // verifier side
    return keys;
}

LeafProof prove_chunk(const CircuitKeys& prk_int, ByteView chunk, uint64_t index) {
    require_key(prk_int, CircuitId::integrity, true);
    size_t frame = commitment::frame_size_for(prk_int.params.chunk_size);
    if (chunk.size() > frame) {
        throw ProvingError("chunk " + std::to_string(index) + " exceeds frame size");
    }
    LeafProof p;
    p.params_digest = prk_int.params_digest;
    p.index = index;
    p.digest = commitment::hash_chunk(chunk, frame, prk_int.params.alg);

    std::vector<uint64_t> elems = commitment::pack_chunk(chunk, frame);
    std::vector<uint32_t> positions =
        sample_positions(p.params_digest, p.digest, index, elems.size());
    p.samples.reserve(SAMPLE_COUNT);
    for (uint32_t pos : positions) p.samples.push_back({pos, elems[pos]});
    p.transcript = leaf_transcript(p.params_digest, p.index, p.digest, p.samples);
    return p;
}

bool verify_leaf(const CircuitKeys& vrk_int, const LeafProof& proof,
                 const commitment::Digest& expected) {
    if (vrk_int.id != CircuitId::integrity) return false;
    return leaf_well_formed(vrk_int, proof) && proof.digest == expected;
}

NodeProof aggregate_pair(const CircuitKeys& prk_agg, const LeafProof& left,
                         const LeafProof& right) {
    require_key(prk_agg, CircuitId::aggregate, true);
    if (!leaf_well_formed(prk_agg, left) || !leaf_well_formed(prk_agg, right)) {
        throw ProvingError("child leaf proof failed verification");
    }
    NodeProof p;
    p.params_digest = prk_agg.params_digest;
    p.depth = 1;
    p.n_leaves = 2;
    p.left = left.digest;
    p.right = right.digest;
    p.parent = commitment::node_hash(p.left, p.right);
    p.left_transcript = left.transcript;
    p.right_transcript = right.transcript;
    p.transcript = node_transcript(p);
    return p;
}

NodeProof aggregate_pair(const CircuitKeys& prk_agg, const NodeProof& left,
                         const NodeProof& right) {
    require_key(prk_agg, CircuitId::aggregate, true);
    if (!node_well_formed(prk_agg.params_digest, left) ||
        !node_well_formed(prk_agg.params_digest, right)) {
        throw ProvingError("child node proof failed verification");
    }
    if (left.depth != right.depth) throw ProvingError("aggregating nodes of unequal depth");
    NodeProof p;
    p.params_digest = prk_agg.params_digest;
    p.depth = left.depth + 1;
    p.n_leaves = left.n_leaves + right.n_leaves;
    p.left = left.parent;
    p.right = right.parent;
    p.parent = commitment::node_hash(p.left, p.right);
    p.left_transcript = left.transcript;
    p.right_transcript = right.transcript;
    p.transcript = node_transcript(p);
    return p;
}

bool verify_node(const CircuitKeys& vrk_agg, const NodeProof& proof,
                 const commitment::Digest& expected_parent) {
    if (vrk_agg.id != CircuitId::aggregate) return false;
    if (!node_well_formed(vrk_agg.params_digest, proof)) return false;
    return proof.parent == expected_parent;
}

const Digest32& RootProof::params_digest() const {
    return std::visit([](const auto& v) -> const Digest32& { return v.params_digest; }, p);
}

const commitment::Digest& RootProof::digest() const {
    if (const auto* leaf = std::get_if<LeafProof>(&p)) return leaf->digest;
    return std::get<NodeProof>(p).parent;
}

const Digest32& RootProof::transcript() const {
    return std::visit([](const auto& v) -> const Digest32& { return v.transcript; }, p);
}

uint32_t RootProof::depth() const {
    if (std::holds_alternative<LeafProof>(p)) return 0;
    return std::get<NodeProof>(p).depth;
}

RootProof aggregate_root(const CircuitKeys& prk_agg, const std::vector<LeafProof>& leaves,
                         AggregationStats* stats) {
    require_key(prk_agg, CircuitId::aggregate, true);
    if (leaves.empty()) throw ProvingError("no leaf proofs to aggregate");
    AggregationStats st;
    if (leaves.size() == 1) {
        if (!leaf_well_formed(prk_agg, leaves[0])) {
            throw ProvingError("child leaf proof failed verification");
        }
        if (stats) *stats = st;
        return RootProof{leaves[0]};
    }

    std::vector<NodeProof> level;
    level.reserve((leaves.size() + 1) / 2);
    for (size_t i = 0; i < leaves.size(); i += 2) {
        bool dup = i + 1 == leaves.size();
        const LeafProof& r = dup ? leaves[i] : leaves[i + 1];
        level.push_back(aggregate_pair(prk_agg, leaves[i], r));
        dup ? ++st.duplicate_merges : ++st.pair_aggregations;
    }
    while (level.size() > 1) {
        std::vector<NodeProof> next;
        next.reserve((level.size() + 1) / 2);
        for (size_t i = 0; i < level.size(); i += 2) {
            bool dup = i + 1 == level.size();
            const NodeProof& r = dup ? level[i] : level[i + 1];
            next.push_back(aggregate_pair(prk_agg, level[i], r));
            dup ? ++st.duplicate_merges : ++st.pair_aggregations;
        }
        level = std::move(next);
    }
    st.depth = level[0].depth;
    if (stats) *stats = st;
    return RootProof{level[0]};
}

bool verify_root(const CircuitKeys& vrk_agg, const RootProof& proof,
                 const commitment::Digest& expected_root) {
    if (vrk_agg.id != CircuitId::aggregate) return false;
    if (const auto* leaf = std::get_if<LeafProof>(&proof.p)) {
        return leaf_well_formed(vrk_agg, *leaf) && leaf->digest == expected_root;
    }
    return verify_node(vrk_agg, std::get<NodeProof>(proof.p), expected_root);
}

Bytes leaf_proof_serialize(const LeafProof& p) {
    TaggedWriter w(TAG_LEAF_PROOF);
    w.field(p.params_digest);
    w.field_u64(p.index);
    w.field(commitment::digest_serialize(p.digest));
    w.field(samples_bytes(p.samples));
    w.field(p.transcript);
    return w.take();
}

namespace {

Digest32 digest32_field(TaggedReader& r) {
    Bytes b = r.field();
    if (b.size() != 32) throw InvalidEncoding("expected a 32-byte field");
    Digest32 d;
    std::memcpy(d.data(), b.data(), 32);
    return d;
}

}  // namespace

LeafProof leaf_proof_deserialize(ByteView b) {
    TaggedReader r(b, TAG_LEAF_PROOF);
    LeafProof p;
    p.params_digest = digest32_field(r);
    p.index = r.field_u64();
    p.digest = commitment::digest_deserialize(r.field());
    Bytes s = r.field();
    if (s.size() != SAMPLE_COUNT * 12) throw InvalidEncoding("bad sample section size");
    p.samples.reserve(SAMPLE_COUNT);
    for (size_t i = 0; i < SAMPLE_COUNT; ++i) {
        SampleEntry e;
        e.elem_index = read_u32le(s, 12 * i);
        e.value = read_u64le(s, 12 * i + 4);
        p.samples.push_back(e);
    }
    p.transcript = digest32_field(r);
    r.expect_done();
    return p;
}

Bytes node_proof_serialize(const NodeProof& p) {
    TaggedWriter w(TAG_NODE_PROOF);
    w.field(p.params_digest);
    w.field_u64(p.depth);
    w.field_u64(p.n_leaves);
    w.field(commitment::digest_serialize(p.parent));
    w.field(commitment::digest_serialize(p.left));
    w.field(commitment::digest_serialize(p.right));
    w.field(p.left_transcript);
    w.field(p.right_transcript);
    w.field(p.transcript);
    return w.take();
}

NodeProof node_proof_deserialize(ByteView b) {
    TaggedReader r(b, TAG_NODE_PROOF);
    NodeProof p;
    p.params_digest = digest32_field(r);
    p.depth = static_cast<uint32_t>(r.field_u64());
    p.n_leaves = r.field_u64();
    p.parent = commitment::digest_deserialize(r.field());
    p.left = commitment::digest_deserialize(r.field());
    p.right = commitment::digest_deserialize(r.field());
    p.left_transcript = digest32_field(r);
    p.right_transcript = digest32_field(r);
    p.transcript = digest32_field(r);
    r.expect_done();
    return p;
}

Bytes root_proof_serialize(const RootProof& p) {
    TaggedWriter w(TAG_ROOT_PROOF);
    if (const auto* leaf = std::get_if<LeafProof>(&p.p)) {
        w.field_u64(0);
        w.field(leaf_proof_serialize(*leaf));
    } else {
        w.field_u64(1);
        w.field(node_proof_serialize(std::get<NodeProof>(p.p)));
    }
    return w.take();
}

RootProof root_proof_deserialize(ByteView b) {
    TaggedReader r(b, TAG_ROOT_PROOF);
    uint64_t kind = r.field_u64();
    Bytes body = r.field();
    r.expect_done();
    if (kind == 0) return RootProof{leaf_proof_deserialize(body)};
    if (kind == 1) return RootProof{node_proof_deserialize(body)};
    throw InvalidEncoding("bad root proof kind");
}

Bytes reenc_proof_serialize(const Backend::Ctx& ctx, const BlsReEncProof& p) {
    TaggedWriter w(TAG_REENC_PROOF);
    w.field(Backend::gt_serialize(ctx, p.A));
    w.field(Backend::g2_serialize(ctx, p.z));
    return w.take();
}

BlsReEncProof reenc_proof_deserialize(const Backend::Ctx& ctx, ByteView b) {
    TaggedReader r(b, TAG_REENC_PROOF);
    BlsReEncProof p{Backend::gt_deserialize(ctx, r.field()),
                    Backend::g2_deserialize(ctx, r.field())};
    r.expect_done();
    return p;
}

Bytes x_agg_bytes(const Backend::Ctx& ctx, const std::vector<FileStatement>& statements) {
    Bytes x;
    for (const auto& st : statements) {
        Bytes h = commitment::digest_serialize(st.h);
        Bytes cp = pre::serialize_level1(ctx, st.c_prime);
        Bytes c = pre::serialize_level2(ctx, st.c);
        x.insert(x.end(), h.begin(), h.end());
        x.insert(x.end(), cp.begin(), cp.end());
        x.insert(x.end(), c.begin(), c.end());
    }
    return x;
}

Digest32 binding_digest(const Backend::Ctx& ctx,
                        const std::vector<FileStatement>& statements) {
    TaggedHash h("FAITH-AGG-v1");
    h.add(x_agg_bytes(ctx, statements));
    return h.finish();
}

AggregatedProof aggregate_final(const Backend::Ctx& ctx, const CircuitKeys& prk_agg,
                                const std::vector<RootProof>& roots,
                                const std::vector<BlsReEncProof>& reencs,
                                const std::vector<FileStatement>& statements) {
    require_key(prk_agg, CircuitId::aggregate, true);
    if (statements.empty()) throw StatementMismatch("no statements to aggregate");
    if (roots.size() != statements.size() || reencs.size() != statements.size()) {
        throw StatementMismatch("component count mismatch");
    }
    for (size_t i = 0; i < statements.size(); ++i) {
        if (!verify_root(prk_agg, roots[i], statements[i].h)) {
            throw StatementMismatch("root proof " + std::to_string(i) +
                                    " does not attest the statement's h");
        }
        if (!verify_reenc<Backend>(ctx, statements[i].c, statements[i].c_prime, reencs[i])) {
            throw StatementMismatch("re-encryption proof " + std::to_string(i) +
                                    " does not verify against the statement");
        }
    }
    AggregatedProof p;
    p.params_digest = roots[0].params_digest();
    p.roots = roots;
    p.reencs = reencs;
    p.binding = binding_digest(ctx, statements);
    return p;
}

const char* failure_name(VerifyFailure f) {
    switch (f) {
        case VerifyFailure::none: return "none";
        case VerifyFailure::encoding: return "encoding";
        case VerifyFailure::binding: return "binding";
        case VerifyFailure::integrity: return "integrity";
        case VerifyFailure::reenc: return "reenc";
    }
    return "unknown";
}

VerifyOutcome verify_aggregated(const Backend::Ctx& ctx, const CircuitKeys& vrk_agg,
                                const std::vector<FileStatement>& statements,
                                const AggregatedProof& proof) {
    VerifyOutcome out;
    if (vrk_agg.id != CircuitId::aggregate) {
        out.reason = VerifyFailure::encoding;
        out.detail = "wrong verifying key circuit";
        return out;
    }
    if (statements.empty() || proof.roots.size() != statements.size() ||
        proof.reencs.size() != statements.size()) {
        out.reason = VerifyFailure::encoding;
        out.detail = "proof shape does not match statement count";
        return out;
    }
    if (proof.params_digest != vrk_agg.params_digest) {
        out.reason = VerifyFailure::encoding;
        out.detail = "proof was produced under different parameters";
        return out;
    }
    if (proof.binding != binding_digest(ctx, statements)) {
        out.reason = VerifyFailure::binding;
        out.detail = "binding digest does not match x_agg";
        return out;
    }
    for (size_t i = 0; i < statements.size(); ++i) {
        if (!verify_root(vrk_agg, proof.roots[i], statements[i].h)) {
            out.reason = VerifyFailure::integrity;
            out.detail = "integrity proof " + std::to_string(i) +
                         " does not chain to the recorded root";
            return out;
        }
    }
    for (size_t i = 0; i < statements.size(); ++i) {
        if (!verify_reenc<Backend>(ctx, statements[i].c, statements[i].c_prime,
                                   proof.reencs[i])) {
            out.reason = VerifyFailure::reenc;
            out.detail = "re-encryption proof " + std::to_string(i) + " rejected";
            return out;
        }
    }
    out.ok = true;
    return out;
}

Bytes aggregated_proof_serialize(const Backend::Ctx& ctx, const AggregatedProof& p) {
    TaggedWriter w(TAG_AGG_PROOF);
    w.field(p.params_digest);
    w.field_u64(p.roots.size());
    for (size_t i = 0; i < p.roots.size(); ++i) {
        w.field(root_proof_serialize(p.roots[i]));
        w.field(reenc_proof_serialize(ctx, p.reencs[i]));
    }
    w.field(p.binding);
    return w.take();
}

AggregatedProof aggregated_proof_deserialize(const Backend::Ctx& ctx, ByteView b) {
    TaggedReader r(b, TAG_AGG_PROOF);
    AggregatedProof p;
    p.params_digest = digest32_field(r);
    uint64_t n = r.field_u64();
    if (n == 0 || n > 1'000'000) throw InvalidEncoding("bad aggregated proof arity");
    for (uint64_t i = 0; i < n; ++i) {
        p.roots.push_back(root_proof_deserialize(r.field()));
        p.reencs.push_back(reenc_proof_deserialize(ctx, r.field()));
    }
    p.binding = digest32_field(r);
    r.expect_done();
    return p;
}

}  // namespace faith::proofs
