#include "dronechain/state.hpp"

#include <numeric>

namespace dronechain {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const AccountState kEmptyAccount{};

const AccountState& account_or_empty(const LedgerState& s, const PublicKey& key) {
    auto* a = s.find(key);
    return a ? *a : kEmptyAccount;
}

// spend <= available, where available may be a sum of two u64 values.
bool affordable(std::uint64_t available, std::uint64_t extra, std::uint64_t spend_a, std::uint64_t spend_b) {
    std::uint64_t have = 0;
    std::uint64_t need = 0;
    const bool have_overflows = __builtin_add_overflow(available, extra, &have);
    if (__builtin_add_overflow(spend_a, spend_b, &need)) return have_overflows && need <= have;
    return have_overflows || need <= have;
}

std::optional<TxError> check(const LedgerState& state, const Transaction& tx, const FeeParams& params,
                             const Provider& crypto) {
    if (tx.is_coinbase()) {
        if (!tx.sender.empty() || tx.fee != 0 || compute_tx_id(tx, crypto) != tx.id) return TxError::BadSignature;
        return std::nullopt;
    }
    if (tx.sender.empty() || !transaction_well_formed(tx, crypto)) return TxError::BadSignature;

    const auto& sender = account_or_empty(state, tx.sender);
    if (tx.seq != sender.seq) return TxError::BadSeq;

    return std::visit(
        Overloaded{
            [](const CoinbasePayload&) -> std::optional<TxError> { return TxError::BadSignature; },
            [&](const TokenTransferPayload& p) -> std::optional<TxError> {
                if (!affordable(sender.balance, 0, p.amount, tx.fee)) return TxError::InsufficientBalance;
                return std::nullopt;
            },
            [&](const EntityPayload& p) -> std::optional<TxError> {
                if (sender.has_entity) return TxError::DuplicateEntity;
                if (!crypto.verify(PublicKey{p.auth_public_key}, tx.sender.bytes, p.possession_sig)) {
                    return TxError::BadPossessionProof;
                }
                if (!affordable(sender.balance, 0, tx.fee, params.entity_reserve)) return TxError::InsufficientBalance;
                return std::nullopt;
            },
            [&](const RevokeEntityPayload&) -> std::optional<TxError> {
                if (!sender.has_entity) return TxError::NoEntity;
                auto credit = sender.reserved_total();
                if (!affordable(sender.balance, credit, tx.fee, 0)) return TxError::InsufficientBalance;
                return std::nullopt;
            },
            [&](const ConfirmationPayload& p) -> std::optional<TxError> {
                if (p.subject == tx.sender) return TxError::SelfConfirmation;
                if (!sender.has_entity) return TxError::NoEntity;
                if (!state.graph.has_node(p.subject)) return TxError::UnknownSubject;
                bool exists = state.graph.edge_limit(tx.sender, p.subject).has_value();
                auto reserve = exists ? 0 : params.confirmation_reserve;
                if (!affordable(sender.balance, 0, tx.fee, reserve)) return TxError::InsufficientBalance;
                return std::nullopt;
            },
            [&](const RevocationPayload& p) -> std::optional<TxError> {
                if (!state.graph.edge_limit(tx.sender, p.subject)) return TxError::NoSuchEdge;
                auto it = sender.reserved_confirmations.find(p.subject);
                auto reserved = it == sender.reserved_confirmations.end() ? 0 : it->second;
                if (!affordable(sender.balance, reserved, tx.fee, 0)) return TxError::InsufficientBalance;
                return std::nullopt;
            },
        },
        tx.payload);
}

// Preconditions established by check(); nothing here can fail.
void mutate(LedgerState& state, const Transaction& tx, const FeeParams& params) {
    if (const auto* cb = std::get_if<CoinbasePayload>(&tx.payload)) {
        state.accounts[cb->recipient].balance += cb->amount;
        state.total_minted += cb->amount;
        return;
    }

    std::visit(
        Overloaded{
            [](const CoinbasePayload&) {},
            [&](const TokenTransferPayload& p) {
                state.accounts[tx.sender].balance -= p.amount + tx.fee;
                state.accounts[p.recipient].balance += p.amount;
            },
            [&](const EntityPayload& p) {
                auto& acct = state.accounts[tx.sender];
                acct.balance -= tx.fee + params.entity_reserve;
                acct.reserved_entity = params.entity_reserve;
                acct.has_entity = true;
                state.graph.add_node({tx.sender, p.auth_public_key, p.identity_name, p.entity_type});
            },
            [&](const RevokeEntityPayload&) {
                // Confirmers of this node get their reservations back in full.
                for (const auto& [confirmer, limit] : state.graph.in_edges(tx.sender)) {
                    auto& other = state.accounts[confirmer];
                    auto it = other.reserved_confirmations.find(tx.sender);
                    other.balance += it->second;
                    other.reserved_confirmations.erase(it);
                }
                auto& acct = state.accounts[tx.sender];
                acct.balance = acct.balance + acct.reserved_total() - tx.fee;
                acct.reserved_entity = 0;
                acct.reserved_confirmations.clear();
                acct.has_entity = false;
                state.graph.remove_node(tx.sender);
            },
            [&](const ConfirmationPayload& p) {
                auto& acct = state.accounts[tx.sender];
                if (state.graph.edge_limit(tx.sender, p.subject)) {
                    acct.balance -= tx.fee;
                } else {
                    acct.balance -= tx.fee + params.confirmation_reserve;
                    acct.reserved_confirmations[p.subject] = params.confirmation_reserve;
                }
                state.graph.set_edge(tx.sender, p.subject, p.max_path_len);
            },
            [&](const RevocationPayload& p) {
                auto& acct = state.accounts[tx.sender];
                auto it = acct.reserved_confirmations.find(p.subject);
                acct.balance = acct.balance + it->second - tx.fee;
                acct.reserved_confirmations.erase(it);
                state.graph.remove_edge(tx.sender, p.subject);
            },
        },
        tx.payload);

    state.accounts[tx.sender].seq += 1;
    state.total_burned_fees += tx.fee;
}

}  // namespace

std::uint64_t AccountState::reserved_total() const noexcept {
    return std::accumulate(reserved_confirmations.begin(), reserved_confirmations.end(), reserved_entity,
                           [](std::uint64_t acc, const auto& kv) { return acc + kv.second; });
}

const AccountState* LedgerState::find(const PublicKey& key) const {
    auto it = accounts.find(key);
    return it == accounts.end() ? nullptr : &it->second;
}

std::uint64_t LedgerState::next_seq(const PublicKey& key) const {
    auto* a = find(key);
    return a ? a->seq : 0;
}

std::string_view to_string(TxError e) noexcept {
    switch (e) {
        case TxError::BadSignature: return "BadSignature";
        case TxError::BadSeq: return "BadSeq";
        case TxError::InsufficientBalance: return "InsufficientBalance";
        case TxError::DuplicateEntity: return "DuplicateEntity";
        case TxError::NoEntity: return "NoEntity";
        case TxError::UnknownSubject: return "UnknownSubject";
        case TxError::NoSuchEdge: return "NoSuchEdge";
        case TxError::SelfConfirmation: return "SelfConfirmation";
        case TxError::BadPossessionProof: return "BadPossessionProof";
    }
    return "Unknown";
}

std::optional<TxError> apply_transaction_in_place(LedgerState& state, const Transaction& tx,
                                                  const FeeParams& params, const Provider& crypto) {
    if (auto err = check(state, tx, params, crypto)) return err;
    mutate(state, tx, params);
    return std::nullopt;
}

Result<LedgerState, TxError> apply_transaction(const LedgerState& state, const Transaction& tx,
                                               const FeeParams& params, const Provider& crypto) {
    if (auto err = check(state, tx, params, crypto)) return fail(*err);
    LedgerState next = state;
    mutate(next, tx, params);
    return next;
}

Result<void, TxError> validate_candidate(const LedgerState& state, const Transaction& tx, const FeeParams& params,
                                         const Provider& crypto) {
    if (auto err = check(state, tx, params, crypto)) return fail(*err);
    return {};
}

std::string describe(const BlockApplyError& e) {
    if (e.kind == BlockApplyErrorKind::InvalidCoinbasePosition) {
        return "InvalidCoinbasePosition at tx " + std::to_string(e.tx_index);
    }
    return std::string(to_string(e.tx_error)) + " at tx " + std::to_string(e.tx_index);
}

Result<LedgerState, BlockApplyError> apply_block(const LedgerState& state, const Block& block,
                                                 const FeeParams& params, const Provider& crypto) {
    const auto& txs = block.transactions;
    if (txs.empty()) return fail(BlockApplyError{BlockApplyErrorKind::InvalidCoinbasePosition, 0, {}});
    const auto* cb = std::get_if<CoinbasePayload>(&txs.front().payload);
    if (cb == nullptr || cb->recipient != block.header.proposer || cb->amount != params.block_reward ||
        txs.front().seq != block.header.height) {
        return fail(BlockApplyError{BlockApplyErrorKind::InvalidCoinbasePosition, 0, {}});
    }

    LedgerState next = state;
    for (std::size_t i = 0; i < txs.size(); ++i) {
        if (i > 0 && txs[i].is_coinbase()) {
            return fail(BlockApplyError{BlockApplyErrorKind::InvalidCoinbasePosition, i, {}});
        }
        if (auto err = apply_transaction_in_place(next, txs[i], params, crypto)) {
            return fail(BlockApplyError{BlockApplyErrorKind::Tx, i, *err});
        }
    }
    return next;
}

LedgerState apply_genesis(const Block& genesis) {
    LedgerState state;
    for (const auto& tx : genesis.transactions) {
        if (const auto* cb = std::get_if<CoinbasePayload>(&tx.payload)) {
            state.accounts[cb->recipient].balance += cb->amount;
            state.total_minted += cb->amount;
        }
    }
    return state;
}

Bytes encode_state(const LedgerState& state) {
    Encoder enc;
    enc.u32(static_cast<std::uint32_t>(state.accounts.size()));
    for (const auto& [key, acct] : state.accounts) {
        enc.bytes(key.bytes);
        enc.u64(acct.balance);
        enc.u64(acct.reserved_entity);
        enc.boolean(acct.has_entity);
        enc.u64(acct.seq);
        enc.u32(static_cast<std::uint32_t>(acct.reserved_confirmations.size()));
        for (const auto& [subject, amount] : acct.reserved_confirmations) {
            enc.bytes(subject.bytes);
            enc.u64(amount);
        }
    }
    const auto& nodes = state.graph.nodes();
    enc.u32(static_cast<std::uint32_t>(nodes.size()));
    for (const auto& [key, rec] : nodes) {
        enc.bytes(key.bytes);
        enc.bytes(rec.auth_public_key);
        enc.str(rec.identity_name);
        enc.u8(static_cast<std::uint8_t>(rec.entity_type));
    }
    const auto& edges = state.graph.edges();
    enc.u32(static_cast<std::uint32_t>(edges.size()));
    for (const auto& [edge, limit] : edges) {
        enc.bytes(edge.first.bytes);
        enc.bytes(edge.second.bytes);
        enc.u8(limit);
    }
    enc.u64(state.total_minted);
    enc.u64(state.total_burned_fees);
    return std::move(enc).take();
}

Digest state_digest(const LedgerState& state, const Provider& crypto) {
    return crypto.hash(encode_state(state));
}

}  // namespace dronechain
