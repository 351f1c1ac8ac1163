#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dronechain/chain_file.hpp"
#include "dronechain/crypto.hpp"
#include "dronechain/ledger.hpp"
#include "dronechain/node.hpp"
#include "dronechain/state.hpp"
#include "dronechain/trust_graph.hpp"

namespace dctest {

using namespace dronechain;

std::shared_ptr<const Provider> provider(std::string_view name);
inline std::shared_ptr<const Provider> mock() { return provider(kMockProvider); }
inline std::shared_ptr<const Provider> ed() { return provider(kEdCurveProvider); }

KeyPair keypair(const Provider& crypto, std::string_view label, std::uint64_t i);

// key=value lines from tests/golden/<name>.
std::map<std::string, std::string> read_golden(const std::string& name);
std::filesystem::path golden_path(const std::string& name);
std::filesystem::path scenarios_dir();
std::filesystem::path scratch_dir(const std::string& name);

// Independent SHA-256 (OpenSSL), for oracles that must not share code with
// the library.
Digest openssl_sha256(ByteView data);

// A certified chain built block by block with every validator signing.
class ChainBuilder {
public:
    ChainBuilder(std::shared_ptr<const Provider> crypto, std::size_t validators, std::size_t accounts,
                 std::uint64_t balance = 1000, FeeParams fees = {});

    const Provider& crypto() const { return *crypto_; }
    std::shared_ptr<const Provider> crypto_ptr() const { return crypto_; }
    const ChainConfig& config() const { return config_; }
    const std::vector<KeyPair>& validator_keys() const { return validator_keys_; }
    const KeyPair& account(std::size_t i) const { return accounts_.at(i); }
    const KeyPair& auth_key(std::size_t i) const { return auth_keys_.at(i); }
    std::size_t account_count() const { return accounts_.size(); }
    const std::vector<Block>& blocks() const { return blocks_; }
    const LedgerState& state() const { return state_; }
    const Block& genesis() const { return blocks_.front(); }

    // Signs with the next free sequence number of the sender.
    Transaction sign(TxPayload payload, const KeyPair& sender, std::optional<std::uint64_t> fee = {});
    Transaction entity(std::size_t account, EntityType type = EntityType::Drone);
    Transaction confirm(std::size_t from, std::size_t to, std::uint8_t limit);
    Transaction revoke(std::size_t from, std::size_t to);
    Transaction revoke_entity(std::size_t account);
    Transaction transfer(std::size_t from, std::size_t to, std::uint64_t amount);

    // Builds, certifies and applies a block; the coinbase is prepended.
    // Throws if the block does not apply.
    const Block& append(std::vector<Transaction> txs);

    Block certify(Block block) const;
    Bytes bytes() const { return encode_chain(config_, blocks_); }

private:
    std::shared_ptr<const Provider> crypto_;
    ChainConfig config_;
    std::vector<KeyPair> validator_keys_;
    std::vector<KeyPair> accounts_;
    std::vector<KeyPair> auth_keys_;
    std::vector<Block> blocks_;
    LedgerState state_;
    std::map<PublicKey, std::uint64_t> next_seq_;
};

// Five certified blocks, about twenty transactions: entities, confirmations,
// a revocation and transfers.
ChainBuilder sample_chain(std::shared_ptr<const Provider> crypto);

// Random graph of `n` nodes keyed by mock public keys, edge limits in
// [1, max_limit], each ordered pair present with probability p.
TrustGraph random_graph(std::mt19937_64& rng, std::size_t n, double p, std::uint8_t max_limit);
PublicKey graph_key(std::size_t i);

// Brute-force trust oracle: enumerates every simple path from every anchor
// and applies the chain rule literally.
TrustDecision oracle_trust(const TrustGraph& g, const AnchorSet& anchors, const PublicKey& target,
                           std::uint8_t cap);

// Nodes and edges on any valid path, plus registered anchors.
TrustGraph oracle_subgraph(const TrustGraph& g, const AnchorSet& anchors, std::uint8_t cap);

// Recursive Merkle definition over OpenSSL SHA-256.
Digest oracle_merkle(const std::vector<Digest>& ids);

// Naive replay of the token rules with its own bookkeeping. Returns whether
// the transaction applies.
class LedgerOracle {
public:
    explicit LedgerOracle(FeeParams fees) : fees_(fees) {}

    void mint(const PublicKey& to, std::uint64_t amount);
    bool apply(const Transaction& tx);

    std::uint64_t balance(const PublicKey& k) const;
    std::uint64_t reserved(const PublicKey& k) const;
    std::uint64_t minted() const { return minted_; }
    std::uint64_t burned() const { return burned_; }
    std::size_t edge_count() const { return edges_.size(); }

private:
    struct Acct {
        std::int64_t balance = 0;
        std::int64_t entity_reserve = 0;
        bool entity = false;
        std::uint64_t seq = 0;
    };

    FeeParams fees_;
    std::map<std::string, Acct> accts_;
    // (from, to) hex -> reservation
    std::map<std::pair<std::string, std::string>, std::int64_t> edges_;
    std::uint64_t minted_ = 0;
    std::uint64_t burned_ = 0;
};

// Σ balances + Σ reservations.
std::uint64_t held_tokens(const LedgerState& s);
bool conserved(const LedgerState& s);

// Picks a random transaction among the six user types for a random account.
// It may or may not be valid in `state`.
Transaction random_transaction(std::mt19937_64& rng, const LedgerState& state, const std::vector<KeyPair>& accounts,
                               const std::vector<KeyPair>& auth_keys, const Provider& crypto,
                               const FeeParams& fees);

// Nodes wired together in memory; messages are delivered instantly in FIFO
// order. Nodes listed in `silent` neither send nor receive.
class MemoryNet {
public:
    struct Member {
        NodeConfig config;
        std::unique_ptr<Node> node;
    };

    MemoryNet(std::shared_ptr<const Provider> crypto, std::size_t full, std::size_t light,
              std::uint64_t round_length_ms = 1000);

    Node& node(NodeId id) { return *members_.at(id).node; }
    const KeyPair& key(NodeId id) const { return members_.at(id).config.account; }
    std::size_t size() const { return members_.size(); }
    std::vector<NodeId> full_ids() const;
    std::vector<NodeId> light_ids() const;
    const ChainConfig& chain() const { return chain_; }
    const Provider& crypto() const { return *crypto_; }

    void silence(NodeId id) { silent_.insert(id); }
    void revive(NodeId id) { silent_.erase(id); }

    void deliver(NodeId from, std::vector<Outbound> out);
    // Steps full nodes at each consensus wakeup up to `t`.
    void run_until(std::uint64_t t);
    std::uint64_t now() const { return now_; }

    // Submits to full node `via` and lets gossip spread.
    bool submit(NodeId via, const Transaction& tx);
    Transaction sign(NodeId sender, TxPayload payload);
    Transaction entity(NodeId sender, EntityType type = EntityType::GroundStation);
    KeyPair auth_key(NodeId id) const;

    void refresh(NodeId light, NodeId peer);

    // Optional tamper hook for messages in flight.
    std::function<void(NodeId from, NodeId to, WireMessage&)> tamper;

private:
    std::shared_ptr<const Provider> crypto_;
    ChainConfig chain_;
    std::vector<Member> members_;
    std::set<NodeId> silent_;
    std::map<NodeId, std::uint64_t> seq_;
    std::uint64_t now_ = 0;
};

}  // namespace dctest
