#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>

#include "dronechain/ledger.hpp"
#include "dronechain/result.hpp"
#include "dronechain/trust_graph.hpp"

namespace dronechain {

struct FeeParams {
    std::uint64_t tx_fee = 1;  // default fee attached by transaction builders
    std::uint64_t entity_reserve = 5;
    std::uint64_t confirmation_reserve = 5;
    std::uint64_t block_reward = 10;

    friend bool operator==(const FeeParams&, const FeeParams&) = default;
};

struct AccountState {
    std::uint64_t balance = 0;
    std::uint64_t reserved_entity = 0;
    // subject -> tokens locked by this account's confirmation edge.
    std::map<PublicKey, std::uint64_t> reserved_confirmations;
    bool has_entity = false;
    std::uint64_t seq = 0;  // next expected sequence number

    std::uint64_t reserved_total() const noexcept;

    friend bool operator==(const AccountState&, const AccountState&) = default;
};

struct LedgerState {
    std::map<PublicKey, AccountState> accounts;
    TrustGraph graph;
    std::uint64_t total_minted = 0;
    std::uint64_t total_burned_fees = 0;

    const AccountState* find(const PublicKey& key) const;
    // Next sequence number the account must use (0 for unknown accounts).
    std::uint64_t next_seq(const PublicKey& key) const;

    friend bool operator==(const LedgerState&, const LedgerState&) = default;
};

enum class TxError : std::uint8_t {
    BadSignature,
    BadSeq,
    InsufficientBalance,
    DuplicateEntity,
    NoEntity,
    UnknownSubject,
    NoSuchEdge,
    SelfConfirmation,
    BadPossessionProof,
};

std::string_view to_string(TxError e) noexcept;

// All-or-nothing: on error the input state is untouched.
Result<LedgerState, TxError> apply_transaction(const LedgerState& state, const Transaction& tx,
                                               const FeeParams& params, const Provider& crypto);

// Ok iff apply_transaction would succeed. Never mutates.
Result<void, TxError> validate_candidate(const LedgerState& state, const Transaction& tx, const FeeParams& params,
                                         const Provider& crypto);

// In-place form used by block application and the mempool; the state is
// unchanged when an error is returned.
std::optional<TxError> apply_transaction_in_place(LedgerState& state, const Transaction& tx,
                                                  const FeeParams& params, const Provider& crypto);

enum class BlockApplyErrorKind : std::uint8_t { InvalidCoinbasePosition, Tx };

struct BlockApplyError {
    BlockApplyErrorKind kind = BlockApplyErrorKind::Tx;
    std::size_t tx_index = 0;
    TxError tx_error = TxError::BadSignature;
};

std::string describe(const BlockApplyError& e);

// The first transaction must be the coinbase paying block_reward to the
// header's proposer; no other coinbase may appear. Any failure aborts the
// whole block.
Result<LedgerState, BlockApplyError> apply_block(const LedgerState& state, const Block& block,
                                                 const FeeParams& params, const Provider& crypto);

// State after the genesis allocations. The genesis body is trusted: callers
// run validate_genesis first.
LedgerState apply_genesis(const Block& genesis);

// Accounts in key order, then graph nodes and edges in key order.
Bytes encode_state(const LedgerState& state);
Digest state_digest(const LedgerState& state, const Provider& crypto);

}  // namespace dronechain
