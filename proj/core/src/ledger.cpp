#include "dronechain/ledger.hpp"

#include <algorithm>
#include <set>

namespace dronechain {

namespace {

constexpr std::uint8_t kLeafPrefix = 0x00;
constexpr std::uint8_t kNodePrefix = 0x01;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Digest leaf_hash(const Digest& id, const Provider& crypto) {
    Bytes buf;
    buf.reserve(1 + kDigestSize);
    buf.push_back(kLeafPrefix);
    buf.insert(buf.end(), id.bytes.begin(), id.bytes.end());
    return crypto.hash(buf);
}

Digest node_hash(const Digest& left, const Digest& right, const Provider& crypto) {
    Bytes buf;
    buf.reserve(1 + 2 * kDigestSize);
    buf.push_back(kNodePrefix);
    buf.insert(buf.end(), left.bytes.begin(), left.bytes.end());
    buf.insert(buf.end(), right.bytes.begin(), right.bytes.end());
    return crypto.hash(buf);
}

void encode_payload(Encoder& enc, const TxPayload& payload) {
    std::visit(Overloaded{
                   [&](const CoinbasePayload& p) {
                       enc.bytes(p.recipient.bytes);
                       enc.u64(p.amount);
                   },
                   [&](const TokenTransferPayload& p) {
                       enc.bytes(p.recipient.bytes);
                       enc.u64(p.amount);
                   },
                   [&](const EntityPayload& p) {
                       enc.str(p.identity_name);
                       enc.u8(static_cast<std::uint8_t>(p.entity_type));
                       enc.bytes(p.auth_public_key);
                       enc.bytes(p.possession_sig.bytes);
                   },
                   [&](const RevokeEntityPayload&) {},
                   [&](const ConfirmationPayload& p) {
                       enc.bytes(p.subject.bytes);
                       enc.u8(p.max_path_len);
                   },
                   [&](const RevocationPayload& p) { enc.bytes(p.subject.bytes); },
               },
               payload);
}

TxPayload decode_payload(Decoder& dec, std::uint8_t tag) {
    switch (static_cast<TxType>(tag)) {
        case TxType::Coinbase: {
            CoinbasePayload p;
            p.recipient.bytes = dec.bytes();
            p.amount = dec.u64();
            return p;
        }
        case TxType::TokenTransfer: {
            TokenTransferPayload p;
            p.recipient.bytes = dec.bytes();
            p.amount = dec.u64();
            return p;
        }
        case TxType::Entity: {
            EntityPayload p;
            p.identity_name = dec.str();
            auto type = entity_type_from_byte(dec.u8());
            if (!type) throw DecodeError("unknown entity type");
            p.entity_type = *type;
            p.auth_public_key = dec.bytes();
            p.possession_sig.bytes = dec.bytes();
            return p;
        }
        case TxType::RevokeEntity: return RevokeEntityPayload{};
        case TxType::Confirmation: {
            ConfirmationPayload p;
            p.subject.bytes = dec.bytes();
            p.max_path_len = dec.u8();
            if (p.max_path_len == 0) throw DecodeError("confirmation with max_path_len 0");
            return p;
        }
        case TxType::Revocation: {
            RevocationPayload p;
            p.subject.bytes = dec.bytes();
            return p;
        }
    }
    throw DecodeError("unknown transaction type tag");
}

Result<void, BlockError> check_quorum(const BlockHeader& header, const Validators& validators,
                                      const Provider& crypto) {
    std::set<PublicKey> seen;
    for (const auto& vote : header.quorum_cert) {
        if (std::find(validators.begin(), validators.end(), vote.validator) == validators.end()) {
            return fail(BlockError{BlockErrorKind::BadQuorum, "signer is not a validator"});
        }
        if (!seen.insert(vote.validator).second) {
            return fail(BlockError{BlockErrorKind::BadQuorum, "duplicate signer"});
        }
        if (!verify_vote(header, vote, crypto)) {
            return fail(BlockError{BlockErrorKind::BadQuorum, "vote signature does not verify"});
        }
    }
    if (seen.size() < quorum_threshold(validators.size())) {
        return fail(BlockError{BlockErrorKind::BadQuorum, "certificate below quorum"});
    }
    return {};
}

Result<void, BlockError> check_link(const BlockHeader& parent, const BlockHeader& header) {
    if (header.height != parent.height + 1) {
        return fail(BlockError{BlockErrorKind::LinkMismatch, "height does not follow parent"});
    }
    if (header.parent_digest != parent.header_digest) {
        return fail(BlockError{BlockErrorKind::LinkMismatch, "parent digest mismatch"});
    }
    return {};
}

Result<void, BlockError> check_body(const Block& block, const Provider& crypto) {
    std::set<Digest> ids;
    for (const auto& tx : block.transactions) {
        if (compute_tx_id(tx, crypto) != tx.id) {
            return fail(BlockError{BlockErrorKind::BadTransaction, "transaction id does not recompute"});
        }
        if (!ids.insert(tx.id).second) {
            return fail(BlockError{BlockErrorKind::CommitmentMismatch, "duplicate transaction id"});
        }
    }
    if (merkle_root(transaction_ids(block), crypto) != block.header.tx_commitment) {
        return fail(BlockError{BlockErrorKind::CommitmentMismatch, "tx commitment mismatch"});
    }
    if (compute_header_digest(block.header, crypto) != block.header.header_digest) {
        return fail(BlockError{BlockErrorKind::BadDigest, "header digest mismatch"});
    }
    for (const auto& tx : block.transactions) {
        if (tx.is_coinbase()) {
            if (!tx.sender.empty() || !tx.signature.empty()) {
                return fail(BlockError{BlockErrorKind::BadTransaction, "coinbase carries a sender or signature"});
            }
            continue;
        }
        if (!crypto.verify(tx.sender, encode_canonical(tx), tx.signature)) {
            return fail(BlockError{BlockErrorKind::BadTransaction, "transaction signature does not verify"});
        }
    }
    return {};
}

}  // namespace

std::string_view to_string(TxType t) noexcept {
    switch (t) {
        case TxType::Coinbase: return "Coinbase";
        case TxType::TokenTransfer: return "TokenTransfer";
        case TxType::Entity: return "Entity";
        case TxType::RevokeEntity: return "RevokeEntity";
        case TxType::Confirmation: return "Confirmation";
        case TxType::Revocation: return "Revocation";
    }
    return "Unknown";
}

std::string_view to_string(BlockErrorKind k) noexcept {
    switch (k) {
        case BlockErrorKind::LinkMismatch: return "LinkMismatch";
        case BlockErrorKind::CommitmentMismatch: return "CommitmentMismatch";
        case BlockErrorKind::BadDigest: return "BadDigest";
        case BlockErrorKind::BadQuorum: return "BadQuorum";
        case BlockErrorKind::BadTransaction: return "BadTransaction";
    }
    return "Unknown";
}

Bytes encode_canonical(const Transaction& tx) {
    Encoder enc;
    enc.u8(static_cast<std::uint8_t>(tx.type()));
    enc.bytes(tx.sender.bytes);
    enc.u64(tx.seq);
    enc.u64(tx.fee);
    encode_payload(enc, tx.payload);
    return std::move(enc).take();
}

void encode_full(Encoder& enc, const Transaction& tx) {
    enc.raw(encode_canonical(tx));
    enc.bytes(tx.signature.bytes);
}

Bytes encode_full(const Transaction& tx) {
    Encoder enc;
    encode_full(enc, tx);
    return std::move(enc).take();
}

Transaction decode_transaction(Decoder& dec, const Provider& crypto) {
    Transaction tx;
    auto tag = dec.u8();
    tx.sender.bytes = dec.bytes();
    tx.seq = dec.u64();
    tx.fee = dec.u64();
    tx.payload = decode_payload(dec, tag);
    tx.signature.bytes = dec.bytes();
    tx.id = compute_tx_id(tx, crypto);
    return tx;
}

Digest compute_tx_id(const Transaction& tx, const Provider& crypto) {
    return crypto.hash(encode_canonical(tx));
}

Transaction sign_transaction(TxPayload payload, std::uint64_t seq, std::uint64_t fee, const KeyPair& sender,
                             const Provider& crypto) {
    Transaction tx;
    tx.sender = sender.public_key;
    tx.seq = seq;
    tx.fee = fee;
    tx.payload = std::move(payload);
    auto bytes = encode_canonical(tx);
    tx.id = crypto.hash(bytes);
    tx.signature = crypto.sign(sender.private_key, bytes);
    return tx;
}

Transaction make_coinbase(const PublicKey& recipient, std::uint64_t amount, std::uint64_t height,
                          const Provider& crypto) {
    Transaction tx;
    tx.seq = height;
    tx.payload = CoinbasePayload{recipient, amount};
    tx.id = compute_tx_id(tx, crypto);
    return tx;
}

EntityPayload make_entity_payload(std::string name, EntityType type, const KeyPair& auth_key,
                                  const PublicKey& account, const Provider& crypto) {
    EntityPayload p;
    p.identity_name = std::move(name);
    p.entity_type = type;
    p.auth_public_key = auth_key.public_key.bytes;
    p.possession_sig = crypto.sign(auth_key.private_key, account.bytes);
    return p;
}

bool transaction_well_formed(const Transaction& tx, const Provider& crypto) {
    auto bytes = encode_canonical(tx);
    if (crypto.hash(bytes) != tx.id) return false;
    if (tx.is_coinbase()) return tx.sender.empty();
    return crypto.verify(tx.sender, bytes, tx.signature);
}

Bytes encode_canonical(const BlockHeader& header) {
    Encoder enc;
    enc.u64(header.height);
    enc.raw(header.parent_digest.bytes);
    enc.raw(header.tx_commitment.bytes);
    enc.u64(header.timestamp);
    enc.bytes(header.proposer.bytes);
    return std::move(enc).take();
}

void encode_full(Encoder& enc, const BlockHeader& header) {
    enc.raw(encode_canonical(header));
    enc.u32(static_cast<std::uint32_t>(header.quorum_cert.size()));
    for (const auto& vote : header.quorum_cert) {
        enc.bytes(vote.validator.bytes);
        enc.bytes(vote.signature.bytes);
    }
    enc.raw(header.header_digest.bytes);
}

BlockHeader decode_header(Decoder& dec) {
    BlockHeader h;
    h.height = dec.u64();
    h.parent_digest = Digest::from_view(dec.raw(kDigestSize));
    h.tx_commitment = Digest::from_view(dec.raw(kDigestSize));
    h.timestamp = dec.u64();
    h.proposer.bytes = dec.bytes();
    auto votes = dec.u32();
    // Each vote needs at least its two length prefixes.
    if (votes > dec.remaining() / 8) throw DecodeError("quorum certificate count exceeds input");
    h.quorum_cert.reserve(votes);
    for (std::uint32_t i = 0; i < votes; ++i) {
        QuorumVote v;
        v.validator.bytes = dec.bytes();
        v.signature.bytes = dec.bytes();
        h.quorum_cert.push_back(std::move(v));
    }
    h.header_digest = Digest::from_view(dec.raw(kDigestSize));
    return h;
}

Digest compute_header_digest(const BlockHeader& header, const Provider& crypto) {
    return crypto.hash(encode_canonical(header));
}

void encode_full(Encoder& enc, const Block& block) {
    encode_full(enc, block.header);
    enc.u32(static_cast<std::uint32_t>(block.transactions.size()));
    for (const auto& tx : block.transactions) encode_full(enc, tx);
}

Bytes encode_full(const Block& block) {
    Encoder enc;
    encode_full(enc, block);
    return std::move(enc).take();
}

Block decode_block(Decoder& dec, const Provider& crypto) {
    Block b;
    b.header = decode_header(dec);
    auto count = dec.u32();
    if (count > dec.remaining()) throw DecodeError("transaction count exceeds input");
    b.transactions.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) b.transactions.push_back(decode_transaction(dec, crypto));
    return b;
}

Digest merkle_root(std::span<const Digest> ids, const Provider& crypto) {
    if (ids.empty()) return crypto.hash({});
    std::vector<Digest> layer;
    layer.reserve(ids.size());
    for (const auto& id : ids) layer.push_back(leaf_hash(id, crypto));
    while (layer.size() > 1) {
        std::vector<Digest> next;
        next.reserve((layer.size() + 1) / 2);
        for (std::size_t i = 0; i < layer.size(); i += 2) {
            const auto& right = i + 1 < layer.size() ? layer[i + 1] : layer[i];
            next.push_back(node_hash(layer[i], right, crypto));
        }
        layer = std::move(next);
    }
    return layer.front();
}

std::vector<Digest> transaction_ids(const Block& block) {
    std::vector<Digest> ids;
    ids.reserve(block.transactions.size());
    for (const auto& tx : block.transactions) ids.push_back(tx.id);
    return ids;
}

Block build_block(const BlockHeader& parent, std::vector<Transaction> txs, const KeyPair& proposer,
                  std::uint64_t timestamp, const Provider& crypto) {
    std::set<Digest> seen;
    for (const auto& tx : txs) {
        if (!transaction_well_formed(tx, crypto)) throw LedgerError("malformed or unsigned transaction");
        if (!seen.insert(tx.id).second) throw LedgerError("duplicate transaction in block");
    }
    Block block;
    block.transactions = std::move(txs);
    block.header.height = parent.height + 1;
    block.header.parent_digest = parent.header_digest;
    block.header.tx_commitment = merkle_root(transaction_ids(block), crypto);
    block.header.timestamp = timestamp;
    block.header.proposer = proposer.public_key;
    block.header.header_digest = compute_header_digest(block.header, crypto);
    return block;
}

Block build_genesis(std::span<const std::pair<PublicKey, std::uint64_t>> allocations, const Provider& crypto) {
    Block block;
    std::uint64_t index = 0;
    for (const auto& [recipient, amount] : allocations) {
        // seq = allocation index keeps ids distinct within the genesis body.
        block.transactions.push_back(make_coinbase(recipient, amount, index++, crypto));
    }
    block.header.tx_commitment = merkle_root(transaction_ids(block), crypto);
    block.header.header_digest = compute_header_digest(block.header, crypto);
    return block;
}

std::size_t quorum_threshold(std::size_t validator_count) noexcept {
    return (2 * validator_count) / 3 + 1;
}

Result<void, BlockError> validate_proposal(const BlockHeader& parent, const Block& block, const Provider& crypto) {
    if (auto r = check_link(parent, block.header); !r) return r;
    return check_body(block, crypto);
}

Result<void, BlockError> validate_block(const BlockHeader& parent, const Block& block, const Validators& validators,
                                        const Provider& crypto) {
    if (auto r = validate_proposal(parent, block, crypto); !r) return r;
    return check_quorum(block.header, validators, crypto);
}

Result<void, BlockError> validate_header(const BlockHeader& parent, const BlockHeader& header,
                                         const Validators& validators, const Provider& crypto) {
    if (auto r = check_link(parent, header); !r) return r;
    if (compute_header_digest(header, crypto) != header.header_digest) {
        return fail(BlockError{BlockErrorKind::BadDigest, "header digest mismatch"});
    }
    return check_quorum(header, validators, crypto);
}

Result<void, BlockError> validate_genesis(const Block& genesis, const Provider& crypto) {
    const auto& h = genesis.header;
    if (h.height != 0 || !h.parent_digest.is_zero()) {
        return fail(BlockError{BlockErrorKind::LinkMismatch, "genesis must have height 0 and zero parent"});
    }
    if (!h.quorum_cert.empty() || !h.proposer.empty()) {
        return fail(BlockError{BlockErrorKind::BadQuorum, "genesis carries no proposer or certificate"});
    }
    for (const auto& tx : genesis.transactions) {
        if (!tx.is_coinbase() || !tx.sender.empty() || tx.fee != 0) {
            return fail(BlockError{BlockErrorKind::BadTransaction, "genesis body must be coinbase allocations"});
        }
    }
    return check_body(genesis, crypto);
}

QuorumVote sign_vote(const BlockHeader& header, const KeyPair& validator, const Provider& crypto) {
    return {validator.public_key, crypto.sign(validator.private_key, encode_canonical(header))};
}

bool verify_vote(const BlockHeader& header, const QuorumVote& vote, const Provider& crypto) {
    return crypto.verify(vote.validator, encode_canonical(header), vote.signature);
}

void encode_full(Encoder& enc, const InclusionProof& proof) {
    enc.raw(proof.tx_id.bytes);
    enc.u64(proof.index);
    enc.u32(static_cast<std::uint32_t>(proof.path.size()));
    for (const auto& step : proof.path) {
        enc.raw(step.sibling.bytes);
        enc.u8(static_cast<std::uint8_t>(step.side));
    }
}

InclusionProof decode_proof(Decoder& dec) {
    InclusionProof p;
    p.tx_id = Digest::from_view(dec.raw(kDigestSize));
    p.index = dec.u64();
    auto n = dec.u32();
    if (n > 64) throw DecodeError("inclusion proof path too long");
    for (std::uint32_t i = 0; i < n; ++i) {
        ProofStep s;
        s.sibling = Digest::from_view(dec.raw(kDigestSize));
        auto side = dec.u8();
        if (side > 1) throw DecodeError("bad proof side flag");
        s.side = static_cast<ProofSide>(side);
        p.path.push_back(s);
    }
    return p;
}

Result<InclusionProof, AbsentTx> prove_inclusion(const Block& block, const Digest& tx_id, const Provider& crypto) {
    auto ids = transaction_ids(block);
    auto it = std::find(ids.begin(), ids.end(), tx_id);
    if (it == ids.end()) return fail(AbsentTx{});

    InclusionProof proof;
    proof.tx_id = tx_id;
    proof.index = static_cast<std::uint64_t>(it - ids.begin());

    std::vector<Digest> layer;
    for (const auto& id : ids) layer.push_back(leaf_hash(id, crypto));
    std::size_t pos = proof.index;
    while (layer.size() > 1) {
        bool is_right = pos % 2 == 1;
        std::size_t sibling = is_right ? pos - 1 : std::min(pos + 1, layer.size() - 1);
        proof.path.push_back({layer[sibling], is_right ? ProofSide::Left : ProofSide::Right});

        std::vector<Digest> next;
        for (std::size_t i = 0; i < layer.size(); i += 2) {
            const auto& right = i + 1 < layer.size() ? layer[i + 1] : layer[i];
            next.push_back(node_hash(layer[i], right, crypto));
        }
        layer = std::move(next);
        pos /= 2;
    }
    return proof;
}

bool verify_inclusion(const BlockHeader& header, const Digest& tx_id, const InclusionProof& proof,
                      const Provider& crypto) noexcept {
    try {
        if (proof.tx_id != tx_id || proof.path.size() > 64) return false;
        // Side flags must agree with the claimed leaf index.
        if (proof.path.size() < 64 && (proof.index >> proof.path.size()) != 0) return false;
        auto current = leaf_hash(tx_id, crypto);
        for (std::size_t level = 0; level < proof.path.size(); ++level) {
            const auto& step = proof.path[level];
            bool index_says_right_child = ((proof.index >> level) & 1u) == 1u;
            if (index_says_right_child != (step.side == ProofSide::Left)) return false;
            current = step.side == ProofSide::Left ? node_hash(step.sibling, current, crypto)
                                                   : node_hash(current, step.sibling, crypto);
        }
        return current == header.tx_commitment;
    } catch (...) {
        return false;
    }
}

}  // namespace dronechain
