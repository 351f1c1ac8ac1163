#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dronechain/bytes.hpp"
#include "dronechain/crypto.hpp"
#include "dronechain/result.hpp"
#include "dronechain/trust_graph.hpp"

namespace dronechain {

enum class TxType : std::uint8_t {
    Coinbase = 0,
    TokenTransfer = 1,
    Entity = 2,
    RevokeEntity = 3,
    Confirmation = 4,
    Revocation = 5,
};

std::string_view to_string(TxType t) noexcept;

struct CoinbasePayload {
    PublicKey recipient;
    std::uint64_t amount = 0;
    friend bool operator==(const CoinbasePayload&, const CoinbasePayload&) = default;
};

struct TokenTransferPayload {
    PublicKey recipient;
    std::uint64_t amount = 0;
    friend bool operator==(const TokenTransferPayload&, const TokenTransferPayload&) = default;
};

// possession_sig: signature by the auth key over the sender's account key,
// proving the registrant controls the auth private key.
struct EntityPayload {
    std::string identity_name;
    EntityType entity_type = EntityType::Other;
    Bytes auth_public_key;
    Signature possession_sig;
    friend bool operator==(const EntityPayload&, const EntityPayload&) = default;
};

struct RevokeEntityPayload {
    friend bool operator==(const RevokeEntityPayload&, const RevokeEntityPayload&) = default;
};

struct ConfirmationPayload {
    PublicKey subject;
    std::uint8_t max_path_len = 1;  // >= 1
    friend bool operator==(const ConfirmationPayload&, const ConfirmationPayload&) = default;
};

struct RevocationPayload {
    PublicKey subject;
    friend bool operator==(const RevocationPayload&, const RevocationPayload&) = default;
};

// Alternative index equals the TxType tag.
using TxPayload = std::variant<CoinbasePayload, TokenTransferPayload, EntityPayload, RevokeEntityPayload,
                               ConfirmationPayload, RevocationPayload>;

struct Transaction {
    Digest id;
    PublicKey sender;  // empty for coinbase
    std::uint64_t seq = 0;
    std::uint64_t fee = 0;
    TxPayload payload;
    Signature signature;

    TxType type() const noexcept { return static_cast<TxType>(payload.index()); }
    bool is_coinbase() const noexcept { return type() == TxType::Coinbase; }

    friend bool operator==(const Transaction&, const Transaction&) = default;
};

// Bytes covered by the id and the signature: every field but id/signature.
Bytes encode_canonical(const Transaction& tx);
// Wire/persistence form: canonical bytes followed by the signature.
void encode_full(Encoder& enc, const Transaction& tx);
Bytes encode_full(const Transaction& tx);
// Recomputes the id. Throws DecodeError on malformed input.
Transaction decode_transaction(Decoder& dec, const Provider& crypto);

Digest compute_tx_id(const Transaction& tx, const Provider& crypto);

// Fills sender, id and signature.
Transaction sign_transaction(TxPayload payload, std::uint64_t seq, std::uint64_t fee, const KeyPair& sender,
                             const Provider& crypto);
// Coinbase has no sender; seq carries the block height so ids stay unique
// across the chain.
Transaction make_coinbase(const PublicKey& recipient, std::uint64_t amount, std::uint64_t height,
                          const Provider& crypto);
EntityPayload make_entity_payload(std::string name, EntityType type, const KeyPair& auth_key,
                                  const PublicKey& account, const Provider& crypto);

// id recomputes and (except for coinbase) the signature verifies.
bool transaction_well_formed(const Transaction& tx, const Provider& crypto);

struct QuorumVote {
    PublicKey validator;
    Signature signature;
    friend bool operator==(const QuorumVote&, const QuorumVote&) = default;
};

struct BlockHeader {
    std::uint64_t height = 0;
    Digest parent_digest;
    Digest tx_commitment;
    std::uint64_t timestamp = 0;
    PublicKey proposer;  // empty for genesis
    std::vector<QuorumVote> quorum_cert;
    Digest header_digest;

    friend bool operator==(const BlockHeader&, const BlockHeader&) = default;
};

// Header fields without quorum_cert and header_digest. header_digest hashes
// these bytes and validators sign them, so the digest is fixed before the
// certificate exists.
Bytes encode_canonical(const BlockHeader& header);
void encode_full(Encoder& enc, const BlockHeader& header);
BlockHeader decode_header(Decoder& dec);

Digest compute_header_digest(const BlockHeader& header, const Provider& crypto);

struct Block {
    BlockHeader header;
    std::vector<Transaction> transactions;

    friend bool operator==(const Block&, const Block&) = default;
};

void encode_full(Encoder& enc, const Block& block);
Bytes encode_full(const Block& block);
Block decode_block(Decoder& dec, const Provider& crypto);

// Empty -> H(""); single leaf -> H(0x00 ++ id); interior -> H(0x01 ++ l ++ r);
// an odd layer pairs its last node with itself.
Digest merkle_root(std::span<const Digest> ids, const Provider& crypto);
std::vector<Digest> transaction_ids(const Block& block);

class LedgerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Throws LedgerError if any transaction fails transaction_well_formed or ids
// repeat. The quorum certificate is left empty.
Block build_block(const BlockHeader& parent, std::vector<Transaction> txs, const KeyPair& proposer,
                  std::uint64_t timestamp, const Provider& crypto);

// Height 0, all-zero parent, coinbase allocations, no certificate.
Block build_genesis(std::span<const std::pair<PublicKey, std::uint64_t>> allocations, const Provider& crypto);

enum class BlockErrorKind : std::uint8_t {
    LinkMismatch,
    CommitmentMismatch,
    BadDigest,
    BadQuorum,
    BadTransaction,
};

std::string_view to_string(BlockErrorKind k) noexcept;

struct BlockError {
    BlockErrorKind kind = BlockErrorKind::LinkMismatch;
    std::string detail;
};

using Validators = std::vector<PublicKey>;

// Minimum number of distinct validator signatures: strictly more than 2/3.
std::size_t quorum_threshold(std::size_t validator_count) noexcept;

// Checks height, parent link, tx commitment, header digest and transaction
// signatures; the certificate is not inspected.
Result<void, BlockError> validate_proposal(const BlockHeader& parent, const Block& block, const Provider& crypto);

// validate_proposal plus the quorum certificate.
Result<void, BlockError> validate_block(const BlockHeader& parent, const Block& block, const Validators& validators,
                                        const Provider& crypto);

// Header-only variant for light clients: link, digest, certificate.
Result<void, BlockError> validate_header(const BlockHeader& parent, const BlockHeader& header,
                                         const Validators& validators, const Provider& crypto);

// Checks the genesis shape: height 0, zero parent, coinbase-only body,
// matching commitment and digest, no certificate.
Result<void, BlockError> validate_genesis(const Block& genesis, const Provider& crypto);

QuorumVote sign_vote(const BlockHeader& header, const KeyPair& validator, const Provider& crypto);
bool verify_vote(const BlockHeader& header, const QuorumVote& vote, const Provider& crypto);

enum class ProofSide : std::uint8_t { Left = 0, Right = 1 };

struct ProofStep {
    Digest sibling;
    ProofSide side = ProofSide::Right;  // where the sibling sits
    friend bool operator==(const ProofStep&, const ProofStep&) = default;
};

struct InclusionProof {
    Digest tx_id;
    std::uint64_t index = 0;
    std::vector<ProofStep> path;
    friend bool operator==(const InclusionProof&, const InclusionProof&) = default;
};

void encode_full(Encoder& enc, const InclusionProof& proof);
InclusionProof decode_proof(Decoder& dec);

struct AbsentTx {};

Result<InclusionProof, AbsentTx> prove_inclusion(const Block& block, const Digest& tx_id, const Provider& crypto);
bool verify_inclusion(const BlockHeader& header, const Digest& tx_id, const InclusionProof& proof,
                      const Provider& crypto) noexcept;

}  // namespace dronechain
