#include "support.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include <openssl/sha.h>

#ifndef DC_SOURCE_DIR
#error "DC_SOURCE_DIR must point at the repository root"
#endif

namespace dctest {

std::shared_ptr<const Provider> provider(std::string_view name) {
    // Providers are stateless; share one per name.
    static const auto m = make_provider(kMockProvider);
    static const auto e = make_provider(kEdCurveProvider);
    if (name == kMockProvider) return m;
    if (name == kEdCurveProvider) return e;
    return make_provider(name);
}

KeyPair keypair(const Provider& crypto, std::string_view label, std::uint64_t i) {
    return crypto.generate_keypair(derive_seed(label, i));
}

std::filesystem::path golden_path(const std::string& name) {
    return std::filesystem::path(DC_SOURCE_DIR) / "tests" / "golden" / name;
}

std::filesystem::path scenarios_dir() { return std::filesystem::path(DC_SOURCE_DIR) / "scenarios"; }

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("dronechain-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::map<std::string, std::string> read_golden(const std::string& name) {
    std::ifstream in(golden_path(name));
    if (!in) throw std::runtime_error("missing golden file " + name);
    std::map<std::string, std::string> out;
    std::string key, value;
    while (in >> key >> value) out[key] = value;
    return out;
}

Digest openssl_sha256(ByteView data) {
    Digest d;
    SHA256(data.data(), data.size(), d.bytes.data());
    return d;
}

// ---------------------------------------------------------------------------

ChainBuilder::ChainBuilder(std::shared_ptr<const Provider> crypto, std::size_t validators, std::size_t accounts,
                           std::uint64_t balance, FeeParams fees)
    : crypto_(std::move(crypto)) {
    config_.provider = std::string(crypto_->name());
    config_.fees = fees;
    for (std::size_t i = 0; i < validators; ++i) {
        validator_keys_.push_back(keypair(*crypto_, "validator", i));
        config_.validators.push_back(validator_keys_.back().public_key);
    }
    std::vector<std::pair<PublicKey, std::uint64_t>> alloc;
    for (std::size_t i = 0; i < accounts; ++i) {
        accounts_.push_back(keypair(*crypto_, "account", i));
        auth_keys_.push_back(keypair(*crypto_, "auth", i));
        alloc.emplace_back(accounts_.back().public_key, balance);
    }
    blocks_.push_back(build_genesis(alloc, *crypto_));
    state_ = apply_genesis(blocks_.front());
}

Transaction ChainBuilder::sign(TxPayload payload, const KeyPair& sender, std::optional<std::uint64_t> fee) {
    auto& seq = next_seq_[sender.public_key];
    return sign_transaction(std::move(payload), seq++, fee.value_or(config_.fees.tx_fee), sender, *crypto_);
}

Transaction ChainBuilder::entity(std::size_t i, EntityType type) {
    auto p = make_entity_payload("entity-" + std::to_string(i), type, auth_keys_.at(i), accounts_.at(i).public_key,
                                 *crypto_);
    return sign(std::move(p), accounts_.at(i));
}

Transaction ChainBuilder::confirm(std::size_t from, std::size_t to, std::uint8_t limit) {
    return sign(ConfirmationPayload{accounts_.at(to).public_key, limit}, accounts_.at(from));
}

Transaction ChainBuilder::revoke(std::size_t from, std::size_t to) {
    return sign(RevocationPayload{accounts_.at(to).public_key}, accounts_.at(from));
}

Transaction ChainBuilder::revoke_entity(std::size_t i) { return sign(RevokeEntityPayload{}, accounts_.at(i)); }

Transaction ChainBuilder::transfer(std::size_t from, std::size_t to, std::uint64_t amount) {
    return sign(TokenTransferPayload{accounts_.at(to).public_key, amount}, accounts_.at(from));
}

Block ChainBuilder::certify(Block block) const {
    block.header.quorum_cert.clear();
    for (const auto& v : validator_keys_) block.header.quorum_cert.push_back(sign_vote(block.header, v, *crypto_));
    return block;
}

const Block& ChainBuilder::append(std::vector<Transaction> txs) {
    const auto& parent = blocks_.back().header;
    const auto height = parent.height + 1;
    const auto& proposer = validator_keys_.at(height % validator_keys_.size());
    txs.insert(txs.begin(), make_coinbase(proposer.public_key, config_.fees.block_reward, height, *crypto_));
    auto block = certify(build_block(parent, std::move(txs), proposer, height * 1000, *crypto_));
    auto next = apply_block(state_, block, config_.fees, *crypto_);
    if (!next) throw std::runtime_error("test chain block rejected: " + describe(next.error()));
    state_ = std::move(next).value();
    blocks_.push_back(std::move(block));
    return blocks_.back();
}

ChainBuilder sample_chain(std::shared_ptr<const Provider> crypto) {
    ChainBuilder c(std::move(crypto), 3, 5, 100);
    c.append({c.entity(0, EntityType::GroundStation), c.entity(1), c.entity(2), c.transfer(3, 4, 7)});
    c.append({c.confirm(0, 1, 2), c.confirm(1, 2, 1), c.confirm(0, 2, 1), c.transfer(4, 3, 2)});
    c.append({c.entity(3, EntityType::Other), c.confirm(2, 3, 1), c.transfer(0, 4, 5), c.transfer(1, 4, 3)});
    c.append({c.revoke(0, 2), c.confirm(0, 1, 3), c.transfer(2, 0, 4), c.entity(4)});
    c.append({c.confirm(4, 0, 1), c.revoke_entity(3), c.transfer(4, 1, 1), c.transfer(0, 2, 2)});
    return c;
}

// ---------------------------------------------------------------------------

PublicKey graph_key(std::size_t i) {
    // Distinct, deterministic and ordered unlike the index, so tie-breaks
    // are exercised against key order.
    auto d = openssl_sha256(as_bytes("graph-node-" + std::to_string(i)));
    return PublicKey{Bytes(d.bytes.begin(), d.bytes.end())};
}

TrustGraph random_graph(std::mt19937_64& rng, std::size_t n, double p, std::uint8_t max_limit) {
    TrustGraph g;
    for (std::size_t i = 0; i < n; ++i) {
        auto k = graph_key(i);
        g.add_node({k, k.bytes, "n" + std::to_string(i), EntityType::Drone});
    }
    std::bernoulli_distribution edge(p);
    std::uniform_int_distribution<int> limit(1, max_limit);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (a != b && edge(rng)) g.set_edge(graph_key(a), graph_key(b), static_cast<std::uint8_t>(limit(rng)));
        }
    }
    return g;
}

namespace {

// Calls visit(path) for every simple path starting at `from` with at most
// `max_edges` edges, including the trivial path.
void enumerate_paths(const TrustGraph& g, std::vector<PublicKey>& path, std::size_t max_edges,
                     const std::function<void(const std::vector<PublicKey>&)>& visit) {
    visit(path);
    if (path.size() - 1 == max_edges) return;
    for (const auto& [edge, limit] : g.edges()) {
        if (edge.first != path.back()) continue;
        if (std::find(path.begin(), path.end(), edge.second) != path.end()) continue;
        path.push_back(edge.second);
        enumerate_paths(g, path, max_edges, visit);
        path.pop_back();
    }
}

bool path_valid(const TrustGraph& g, const std::vector<PublicKey>& path, std::uint8_t cap) {
    const std::size_t k = path.size() - 1;
    if (k == 0 || k > cap) return false;
    for (std::size_t i = 1; i <= k; ++i) {
        auto limit = g.edge_limit(path[i - 1], path[i]);
        if (!limit || *limit < k - i + 1) return false;
    }
    return true;
}

}  // namespace

TrustDecision oracle_trust(const TrustGraph& g, const AnchorSet& anchors, const PublicKey& target, std::uint8_t cap) {
    if (anchors.contains(target)) return {true, {}, TrustReason::DirectAnchor};
    if (!g.has_node(target)) return {false, {}, TrustReason::UnknownTarget};
    std::optional<std::vector<PublicKey>> best;
    for (const auto& a : anchors) {
        if (!g.has_node(a)) continue;
        std::vector<PublicKey> path{a};
        enumerate_paths(g, path, cap, [&](const std::vector<PublicKey>& p) {
            if (p.back() != target || !path_valid(g, p, cap)) return;
            if (!best || p.size() < best->size() || (p.size() == best->size() && p < *best)) best = p;
        });
    }
    if (!best) return {false, {}, TrustReason::NoPath};
    return {true, *best, TrustReason::PathFound};
}

TrustGraph oracle_subgraph(const TrustGraph& g, const AnchorSet& anchors, std::uint8_t cap) {
    std::set<PublicKey> nodes;
    std::set<EdgeKey> edges;
    for (const auto& a : anchors) {
        if (!g.has_node(a)) continue;
        nodes.insert(a);
        std::vector<PublicKey> path{a};
        enumerate_paths(g, path, cap, [&](const std::vector<PublicKey>& p) {
            if (!path_valid(g, p, cap)) return;
            for (std::size_t i = 0; i < p.size(); ++i) {
                nodes.insert(p[i]);
                if (i > 0) edges.insert({p[i - 1], p[i]});
            }
        });
    }
    TrustGraph out;
    for (const auto& k : nodes) out.add_node(*g.find_node(k));
    for (const auto& e : edges) out.set_edge(e.first, e.second, *g.edge_limit(e.first, e.second));
    return out;
}

Digest oracle_merkle(const std::vector<Digest>& ids) {
    if (ids.empty()) return openssl_sha256({});
    std::vector<Digest> layer;
    for (const auto& id : ids) {
        Bytes leaf{0x00};
        leaf.insert(leaf.end(), id.bytes.begin(), id.bytes.end());
        layer.push_back(openssl_sha256(leaf));
    }
    std::function<Digest(std::vector<Digest>)> up = [&](std::vector<Digest> nodes) -> Digest {
        if (nodes.size() == 1) return nodes[0];
        if (nodes.size() % 2 == 1) nodes.push_back(nodes.back());
        std::vector<Digest> parents;
        for (std::size_t i = 0; i < nodes.size(); i += 2) {
            Bytes inner{0x01};
            inner.insert(inner.end(), nodes[i].bytes.begin(), nodes[i].bytes.end());
            inner.insert(inner.end(), nodes[i + 1].bytes.begin(), nodes[i + 1].bytes.end());
            parents.push_back(openssl_sha256(inner));
        }
        return up(parents);
    };
    return up(layer);
}

// ---------------------------------------------------------------------------

void LedgerOracle::mint(const PublicKey& to, std::uint64_t amount) {
    accts_[to.hex()].balance += static_cast<std::int64_t>(amount);
    minted_ += amount;
}

bool LedgerOracle::apply(const Transaction& tx) {
    if (tx.is_coinbase()) {
        const auto& p = std::get<CoinbasePayload>(tx.payload);
        mint(p.recipient, p.amount);
        return true;
    }
    const auto me = tx.sender.hex();
    Acct a = accts_[me];
    if (tx.seq != a.seq) return false;
    const auto fee = static_cast<std::int64_t>(tx.fee);
    auto next_edges = edges_;
    auto next = accts_;

    switch (tx.type()) {
        case TxType::TokenTransfer: {
            const auto& p = std::get<TokenTransferPayload>(tx.payload);
            const auto amount = static_cast<std::int64_t>(p.amount);
            if (a.balance < amount + fee) return false;
            next[me].balance -= amount + fee;
            next[p.recipient.hex()].balance += amount;
            break;
        }
        case TxType::Entity: {
            if (a.entity) return false;
            const auto reserve = static_cast<std::int64_t>(fees_.entity_reserve);
            if (a.balance < fee + reserve) return false;
            next[me].balance -= fee + reserve;
            next[me].entity_reserve = reserve;
            next[me].entity = true;
            break;
        }
        case TxType::RevokeEntity: {
            if (!a.entity) return false;
            std::int64_t refund = a.entity_reserve;
            for (auto it = next_edges.begin(); it != next_edges.end();) {
                if (it->first.first == me) {
                    refund += it->second;
                    it = next_edges.erase(it);
                } else if (it->first.second == me) {
                    next[it->first.first].balance += it->second;
                    it = next_edges.erase(it);
                } else {
                    ++it;
                }
            }
            if (a.balance + refund < fee) return false;
            next[me].balance += refund - fee;
            next[me].entity_reserve = 0;
            next[me].entity = false;
            break;
        }
        case TxType::Confirmation: {
            const auto& p = std::get<ConfirmationPayload>(tx.payload);
            const auto them = p.subject.hex();
            if (them == me || !a.entity) return false;
            auto it = accts_.find(them);
            if (it == accts_.end() || !it->second.entity) return false;
            const bool exists = edges_.contains({me, them});
            const auto reserve = exists ? 0 : static_cast<std::int64_t>(fees_.confirmation_reserve);
            if (a.balance < fee + reserve) return false;
            next[me].balance -= fee + reserve;
            if (!exists) next_edges[{me, them}] = reserve;
            break;
        }
        case TxType::Revocation: {
            const auto& p = std::get<RevocationPayload>(tx.payload);
            auto it = edges_.find({me, p.subject.hex()});
            if (it == edges_.end()) return false;
            if (a.balance + it->second < fee) return false;
            next[me].balance += it->second - fee;
            next_edges.erase({me, p.subject.hex()});
            break;
        }
        case TxType::Coinbase: return false;
    }
    next[me].seq += 1;
    accts_ = std::move(next);
    edges_ = std::move(next_edges);
    burned_ += tx.fee;
    return true;
}

std::uint64_t LedgerOracle::balance(const PublicKey& k) const {
    auto it = accts_.find(k.hex());
    return it == accts_.end() ? 0 : static_cast<std::uint64_t>(it->second.balance);
}

std::uint64_t LedgerOracle::reserved(const PublicKey& k) const {
    auto it = accts_.find(k.hex());
    std::int64_t r = it == accts_.end() ? 0 : it->second.entity_reserve;
    for (const auto& [edge, amount] : edges_) {
        if (edge.first == k.hex()) r += amount;
    }
    return static_cast<std::uint64_t>(r);
}

std::uint64_t held_tokens(const LedgerState& s) {
    std::uint64_t total = 0;
    for (const auto& [k, a] : s.accounts) total += a.balance + a.reserved_total();
    return total;
}

bool conserved(const LedgerState& s) { return held_tokens(s) == s.total_minted - s.total_burned_fees; }

Transaction random_transaction(std::mt19937_64& rng, const LedgerState& state, const std::vector<KeyPair>& accounts,
                               const std::vector<KeyPair>& auth_keys, const Provider& crypto,
                               const FeeParams& fees) {
    std::uniform_int_distribution<std::size_t> pick(0, accounts.size() - 1);
    const auto i = pick(rng);
    auto j = pick(rng);
    const auto& sender = accounts[i];
    const auto& other = accounts[j].public_key;
    const auto seq = state.next_seq(sender.public_key);
    const auto* acct = state.find(sender.public_key);
    const auto balance = acct ? acct->balance : 0;

    TxPayload payload;
    switch (std::uniform_int_distribution<int>(0, 9)(rng)) {
        case 0:
        case 1:
        case 2: {
            std::uniform_int_distribution<std::uint64_t> amount(0, balance > 0 ? balance : 1);
            payload = TokenTransferPayload{other, amount(rng)};
            break;
        }
        case 3:
            payload = make_entity_payload("acct-" + std::to_string(i), EntityType::Drone, auth_keys[i],
                                          sender.public_key, crypto);
            break;
        case 4: payload = RevokeEntityPayload{}; break;
        case 5:
        case 6:
        case 7:
            payload = ConfirmationPayload{other, static_cast<std::uint8_t>(1 + rng() % 4)};
            break;
        default: {
            // Prefer an existing edge so revocations mostly succeed.
            if (acct && !acct->reserved_confirmations.empty()) {
                auto it = acct->reserved_confirmations.begin();
                std::advance(it, rng() % acct->reserved_confirmations.size());
                payload = RevocationPayload{it->first};
            } else {
                payload = RevocationPayload{other};
            }
        }
    }
    return sign_transaction(std::move(payload), seq, fees.tx_fee, sender, crypto);
}

// ---------------------------------------------------------------------------

MemoryNet::MemoryNet(std::shared_ptr<const Provider> crypto, std::size_t full, std::size_t light,
                     std::uint64_t round_length_ms)
    : crypto_(std::move(crypto)) {
    const auto n = full + light;
    std::vector<KeyPair> keys;
    std::vector<std::pair<PublicKey, std::uint64_t>> alloc;
    for (std::size_t i = 0; i < n; ++i) {
        keys.push_back(keypair(*crypto_, "net-account", i));
        alloc.emplace_back(keys.back().public_key, 1000);
    }
    chain_.provider = std::string(crypto_->name());
    chain_.round_length_ms = round_length_ms;
    for (std::size_t i = 0; i < full; ++i) chain_.validators.push_back(keys[i].public_key);
    const auto genesis = build_genesis(alloc, *crypto_);

    for (std::size_t i = 0; i < n; ++i) {
        NodeConfig c;
        c.id = static_cast<NodeId>(i);
        c.role = i < full ? NodeRole::Full : NodeRole::Light;
        c.account = keys[i];
        c.chain = chain_;
        c.genesis = genesis;
        c.anchors = AnchorSet(chain_.validators.begin(), chain_.validators.end());
        for (std::size_t j = 0; j < n; ++j) {
            // Full nodes form a clique; every light node links to every full node.
            if (j == i) continue;
            const bool j_full = j < full;
            if (c.role == NodeRole::Light && !j_full) continue;
            c.peers.push_back({static_cast<NodeId>(j), j_full ? NodeRole::Full : NodeRole::Light});
        }
        members_.push_back({c, std::make_unique<Node>(c, crypto_)});
    }
}

std::vector<NodeId> MemoryNet::full_ids() const {
    std::vector<NodeId> out;
    for (const auto& m : members_) {
        if (m.config.role == NodeRole::Full) out.push_back(m.config.id);
    }
    return out;
}

std::vector<NodeId> MemoryNet::light_ids() const {
    std::vector<NodeId> out;
    for (const auto& m : members_) {
        if (m.config.role == NodeRole::Light) out.push_back(m.config.id);
    }
    return out;
}

void MemoryNet::deliver(NodeId from, std::vector<Outbound> out) {
    struct InFlight {
        NodeId from;
        NodeId to;
        WireMessage msg;
    };
    std::deque<InFlight> queue;
    auto enqueue = [&](NodeId src, std::vector<Outbound> msgs) {
        if (silent_.contains(src)) return;
        const auto& peers = members_.at(src).config.peers;
        for (auto& o : msgs) {
            if (o.to) {
                queue.push_back({src, *o.to, o.msg});
                continue;
            }
            for (const auto& p : peers) {
                if (p.role == NodeRole::Full) queue.push_back({src, p.id, o.msg});
            }
        }
    };
    enqueue(from, std::move(out));
    while (!queue.empty()) {
        auto m = std::move(queue.front());
        queue.pop_front();
        if (silent_.contains(m.to)) continue;
        if (tamper) tamper(m.from, m.to, m.msg);
        enqueue(m.to, members_.at(m.to).node->handle_message(m.from, m.msg, now_));
    }
}

void MemoryNet::run_until(std::uint64_t t) {
    while (true) {
        std::optional<std::uint64_t> next;
        for (const auto& m : members_) {
            if (silent_.contains(m.config.id)) continue;
            if (auto w = m.node->next_wakeup(now_); w && (!next || *w < *next)) next = w;
        }
        if (!next || *next > t) break;
        now_ = *next;
        for (auto& m : members_) {
            if (silent_.contains(m.config.id) || m.config.role != NodeRole::Full) continue;
            deliver(m.config.id, m.node->consensus_step(now_));
        }
    }
    now_ = std::max(now_, t);
}

Transaction MemoryNet::sign(NodeId sender, TxPayload payload) {
    auto& seq = seq_[sender];
    return sign_transaction(std::move(payload), seq++, chain_.fees.tx_fee, key(sender), *crypto_);
}

KeyPair MemoryNet::auth_key(NodeId id) const { return keypair(*crypto_, "net-auth", id); }

Transaction MemoryNet::entity(NodeId sender, EntityType type) {
    return sign(sender, make_entity_payload("node-" + std::to_string(sender), type, auth_key(sender),
                                            key(sender).public_key, *crypto_));
}

bool MemoryNet::submit(NodeId via, const Transaction& tx) {
    auto r = members_.at(via).node->submit_transaction(tx);
    if (!r) return false;
    deliver(via, std::move(r).value());
    return true;
}

void MemoryNet::refresh(NodeId light, NodeId peer) {
    auto& n = node(light);
    deliver(light, {n.light_refresh(peer, n.anchors())});
}

}  // namespace dctest
