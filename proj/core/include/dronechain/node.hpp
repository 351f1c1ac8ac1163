#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "dronechain/chain_file.hpp"
#include "dronechain/ledger.hpp"
#include "dronechain/state.hpp"
#include "dronechain/trust_graph.hpp"
#include "dronechain/wire.hpp"

namespace dronechain {

enum class NodeRole : std::uint8_t { Full, Light };

std::string_view to_string(NodeRole r) noexcept;

using NodeId = std::uint32_t;

struct Peer {
    NodeId id = 0;
    NodeRole role = NodeRole::Full;
    friend bool operator==(const Peer&, const Peer&) = default;
};

// A message leaving a node. `to` empty means every full-node peer.
struct Outbound {
    std::optional<NodeId> to;
    WireMessage msg;
};

struct NodeConfig {
    NodeId id = 0;
    NodeRole role = NodeRole::Full;
    KeyPair account;
    ChainConfig chain;
    Block genesis;
    AnchorSet anchors;
    std::vector<Peer> peers;  // directly linked nodes, ascending id
    std::size_t max_block_txs = 100;
};

struct NoPeer {};
using SubmitError = std::variant<TxError, NoPeer>;

struct CommitRecord {
    std::uint64_t height = 0;
    std::uint64_t time = 0;
    Digest header_digest;
};

struct NodeCounters {
    std::uint64_t malformed_dropped = 0;
    std::uint64_t rejected_proposals = 0;
    std::uint64_t rejected_headers = 0;
    std::uint64_t rejected_deltas = 0;
    std::uint64_t rejected_txs = 0;
    friend bool operator==(const NodeCounters&, const NodeCounters&) = default;
};

enum class RefreshError : std::uint8_t { UnverifiableDelta };

// Tamper-proof storage service for one participant. Full nodes keep the
// whole chain, a ledger state and a mempool, and take part in consensus.
//
// Consensus is a crash-fault variant of locked two-phase voting. Time is cut
// into slots, n per round of round_length_ms, numbered globally; the
// proposer of height h in slot k is validators[(h + k) mod n]. A validator
// prevotes the slot's proposal unless it is locked on another block that the
// proposer cannot justify with a later prevote quorum. A prevote quorum in
// the current slot makes it lock on the block and precommit; a precommit
// quorum from one slot commits. Height h + 1 opens at the round boundary
// after the commit. Lost messages are recovered by the next slot's proposer
// re-proposing the latest block that reached a prevote quorum.
//
// Light nodes keep certified headers and a trust subgraph rebuilt from
// inclusion-proven transactions.
//
// Every transition is deterministic in (state, input, now).
class Node {
public:
    Node(NodeConfig config, std::shared_ptr<const Provider> crypto);

    // Full node rebuilt from its persisted chain file image. Throws
    // std::runtime_error if the image fails verification or belongs to a
    // different chain.
    static Node restore(NodeConfig config, std::shared_ptr<const Provider> crypto, ByteView chain_bytes,
                        std::uint64_t now);

    NodeId id() const noexcept { return config_.id; }
    NodeRole role() const noexcept { return config_.role; }
    const NodeConfig& config() const noexcept { return config_; }
    const KeyPair& account() const noexcept { return config_.account; }
    bool is_validator() const noexcept { return is_validator_; }

    std::uint64_t height() const noexcept;
    const BlockHeader& tip_header() const;
    std::vector<BlockHeader> headers() const;

    // Full only.
    const std::vector<Block>& blocks() const { return blocks_; }
    const LedgerState& ledger_state() const { return state_; }
    const LedgerState& pending_state() const { return pending_; }
    const std::vector<Transaction>& mempool() const { return mempool_; }
    Digest state_digest() const;
    Bytes persisted_chain() const;

    // Full: the ledger's trust graph. Light: the last verified local view.
    const TrustGraph& trust_view() const;
    const AnchorSet& anchors() const noexcept { return config_.anchors; }
    std::optional<std::uint64_t> last_refresh_height() const noexcept { return last_refresh_height_; }

    const std::vector<CommitRecord>& commits() const noexcept { return commits_; }
    const NodeCounters& counters() const noexcept { return counters_; }

    // Full: admits into the mempool and gossips to full peers. Light:
    // forwards to the first full peer.
    Result<std::vector<Outbound>, SubmitError> submit_transaction(const Transaction& tx);

    // Proposer duty for the current slot.
    std::vector<Outbound> consensus_step(std::uint64_t now);

    // Next time consensus_step has something to do (full validators only).
    std::optional<std::uint64_t> next_wakeup(std::uint64_t now) const;

    std::vector<Outbound> handle_message(NodeId from, const WireMessage& msg, std::uint64_t now);

    // Light only: query for headers and the trust subgraph relevant to
    // `anchors`. The reply is processed by handle_message.
    Outbound light_refresh(NodeId peer, AnchorSet anchors);

    // Light only: validates an EntityResponse and, if everything checks,
    // adopts its headers and rebuilt view. The stale view stays otherwise.
    Result<void, RefreshError> apply_entity_response(const EntityResponse& response);

    // Full only: answer to an EntityQuery.
    EntityResponse answer_entity_query(const EntityQuery& query) const;

    Digest trust_view_digest() const;

private:
    struct TxLocation {
        std::uint64_t height = 0;
        std::size_t index = 0;
    };

    struct VoteEntry {
        Signature signature;
        std::optional<bool> verified;
    };

    using Ballot = std::map<Digest, std::map<PublicKey, VoteEntry>>;

    struct RoundVotes {
        Ballot prevotes;
        Ballot precommits;
    };

    struct RoundLock {
        Digest digest;
        std::uint64_t round = 0;
    };

    void reset_round_state(std::uint64_t now);
    std::uint64_t round_start() const noexcept;
    std::uint64_t slot_start(std::uint64_t slot) const noexcept;
    std::uint64_t slot_at(std::uint64_t now) const noexcept;
    std::optional<std::uint64_t> current_slot(std::uint64_t now) const noexcept;
    const PublicKey& proposer_for(std::uint64_t height, std::uint64_t slot) const;

    Block build_proposal(std::uint64_t now) const;
    void commit(Block block, std::uint64_t now);
    void index_block(const Block& block);
    void rebuild_pending();
    bool admit(const Transaction& tx, std::optional<TxError>* error);
    std::vector<Outbound> gossip_tx(const Transaction& tx) const;

    std::vector<Outbound> on_proposal(NodeId from, const NewBlock& proposal, std::uint64_t now);
    std::vector<Outbound> on_certified(NodeId from, const Block& block, std::uint64_t now);
    std::vector<Outbound> on_vote(NodeId from, const Vote& vote, std::uint64_t now);
    std::vector<Outbound> on_block_response(const BlockResponse& r, std::uint64_t now);
    std::vector<Outbound> request_sync(NodeId from, std::uint64_t now);
    void defer(NodeId from, WireMessage msg);
    std::vector<Outbound> replay_deferred(std::uint64_t now);
    std::vector<Outbound> consider_prevote(const NewBlock& proposal, std::uint64_t now);
    std::vector<Outbound> progress(std::uint64_t now);
    std::size_t count_valid(Ballot& ballot, const Digest& digest, std::uint64_t round, VoteKind kind);

    std::vector<Outbound> light_on_headers(const std::vector<BlockHeader>& headers);

    NodeConfig config_;
    std::shared_ptr<const Provider> crypto_;
    bool is_validator_ = false;

    // Full node storage.
    std::vector<Block> blocks_;
    LedgerState state_;
    std::vector<Transaction> mempool_;
    std::set<Digest> mempool_ids_;
    LedgerState pending_;
    std::map<PublicKey, TxLocation> latest_entity_;
    std::map<EdgeKey, TxLocation> latest_confirmation_;
    std::vector<TxLocation> removals_;

    // Consensus for height() + 1.
    std::uint64_t height_start_round_ = 1;
    std::map<Digest, Block> proposals_;
    std::map<std::uint64_t, RoundVotes> rounds_;
    std::optional<RoundLock> locked_;
    std::optional<RoundLock> valid_;
    std::optional<std::uint64_t> proposed_slot_;
    std::optional<std::uint64_t> prevoted_slot_;
    std::optional<std::uint64_t> precommitted_slot_;
    std::optional<std::uint64_t> retransmitted_slot_;
    std::optional<std::uint64_t> last_sync_request_;
    // Proposals and votes for heights above tip + 1, replayed after a sync.
    std::vector<std::pair<NodeId, WireMessage>> deferred_;

    // Light node storage.
    std::vector<BlockHeader> light_headers_;
    TrustGraph local_view_;
    std::optional<std::uint64_t> last_refresh_height_;
    std::uint64_t next_query_id_ = 1;

    std::vector<CommitRecord> commits_;
    NodeCounters counters_;
};

}  // namespace dronechain
