#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "dronechain/auth.hpp"
#include "dronechain/ledger.hpp"

namespace dronechain {

struct SubmitTx {
    Transaction tx;
};

// Proposal when the certificate is empty, certified block otherwise.
// `pol_round` is set when the proposer re-proposes a block that gathered a
// prevote quorum in that earlier round.
struct NewBlock {
    Block block;
    std::uint64_t round = 0;
    std::optional<std::uint64_t> pol_round;
};

enum class VoteKind : std::uint8_t { Prevote = 1, Precommit = 2 };

// Precommit signatures cover the header and end up in the quorum
// certificate; prevote signatures cover (height, round, digest).
struct Vote {
    std::uint64_t height = 0;
    std::uint64_t round = 0;
    VoteKind kind = VoteKind::Prevote;
    Digest header_digest;
    QuorumVote vote;
};

Bytes prevote_signing_bytes(std::uint64_t height, std::uint64_t round, const Digest& digest);

struct HeaderRequest {
    std::uint64_t from_height = 0;
};

struct HeaderResponse {
    std::vector<BlockHeader> headers;
};

struct BlockRequest {
    std::uint64_t from_height = 0;
};

struct BlockResponse {
    std::vector<Block> blocks;
};

struct EntityQuery {
    std::uint64_t query_id = 0;
    std::optional<PublicKey> target;
    std::vector<PublicKey> anchors;
    std::uint64_t known_height = 0;  // highest header the light node holds
};

// A graph transaction together with the evidence tying it to a certified
// header the light node holds (or receives in the same response).
struct BackedTx {
    std::uint64_t height = 0;
    Transaction tx;
    InclusionProof proof;
};

struct EntityResponse {
    std::uint64_t query_id = 0;
    std::vector<BlockHeader> headers;  // known_height + 1 .. tip
    std::vector<BackedTx> backing;
};

struct AuthChallengeMsg {
    Challenge challenge;
};

struct AuthResponseMsg {
    AuthResponse response;
};

using WireMessage = std::variant<SubmitTx, NewBlock, Vote, HeaderRequest, HeaderResponse, BlockRequest,
                                 BlockResponse, EntityQuery, EntityResponse, AuthChallengeMsg, AuthResponseMsg>;

std::string_view message_name(const WireMessage& msg) noexcept;

// 1-byte tag (variant index + 1) followed by the body in canonical form.
Bytes encode_message(const WireMessage& msg);
// Throws DecodeError on malformed input.
WireMessage decode_message(ByteView bytes, const Provider& crypto);

}  // namespace dronechain
