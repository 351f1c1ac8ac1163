#include "dronechain/node.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>
#include <utility>

namespace dronechain {

namespace {

constexpr std::size_t kMaxBlocksPerResponse = 64;
constexpr std::size_t kMaxHeadersPerResponse = 512;
constexpr std::size_t kMaxDeferred = 256;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool contains(const Validators& vs, const PublicKey& k) {
    return std::find(vs.begin(), vs.end(), k) != vs.end();
}

}  // namespace

std::string_view to_string(NodeRole r) noexcept {
    return r == NodeRole::Full ? "full" : "light";
}

Node::Node(NodeConfig config, std::shared_ptr<const Provider> crypto)
    : config_(std::move(config)), crypto_(std::move(crypto)) {
    if (!crypto_) throw std::invalid_argument("node requires a crypto provider");
    if (auto r = validate_genesis(config_.genesis, *crypto_); !r) {
        throw std::invalid_argument("invalid genesis block: " + r.error().detail);
    }
    if (config_.chain.validators.empty()) throw std::invalid_argument("validator set is empty");
    std::sort(config_.peers.begin(), config_.peers.end(), [](const Peer& a, const Peer& b) { return a.id < b.id; });

    if (config_.role == NodeRole::Full) {
        is_validator_ = contains(config_.chain.validators, config_.account.public_key);
        blocks_.push_back(config_.genesis);
        state_ = apply_genesis(config_.genesis);
        pending_ = state_;
    } else {
        light_headers_.push_back(config_.genesis.header);
    }
}

Node Node::restore(NodeConfig config, std::shared_ptr<const Provider> crypto, ByteView chain_bytes,
                   std::uint64_t now) {
    if (config.role != NodeRole::Full) throw std::invalid_argument("only full nodes restore from a chain file");
    auto verified = verify_chain_bytes(chain_bytes);
    if (!verified) throw std::runtime_error(verified.error().describe());
    auto image = std::move(verified).value();
    if (image.config != config.chain) throw std::runtime_error("chain file belongs to a different chain config");
    if (image.blocks.front() != config.genesis) throw std::runtime_error("chain file has a different genesis");

    Node node(std::move(config), std::move(crypto));
    node.blocks_ = std::move(image.blocks);
    node.state_ = std::move(image.tip_state);
    node.pending_ = node.state_;
    for (const auto& b : node.blocks_) node.index_block(b);
    node.reset_round_state(now);
    return node;
}

std::uint64_t Node::height() const noexcept {
    return config_.role == NodeRole::Full ? blocks_.back().header.height : light_headers_.back().height;
}

const BlockHeader& Node::tip_header() const {
    return config_.role == NodeRole::Full ? blocks_.back().header : light_headers_.back();
}

std::vector<BlockHeader> Node::headers() const {
    if (config_.role == NodeRole::Light) return light_headers_;
    std::vector<BlockHeader> out;
    out.reserve(blocks_.size());
    for (const auto& b : blocks_) out.push_back(b.header);
    return out;
}

Digest Node::state_digest() const {
    return dronechain::state_digest(state_, *crypto_);
}

Bytes Node::persisted_chain() const {
    return encode_chain(config_.chain, blocks_);
}

const TrustGraph& Node::trust_view() const {
    return config_.role == NodeRole::Full ? state_.graph : local_view_;
}

Digest Node::trust_view_digest() const {
    LedgerState only_graph;
    only_graph.graph = trust_view();
    return dronechain::state_digest(only_graph, *crypto_);
}

// ---------------------------------------------------------------------------
// Slot timing

std::uint64_t Node::round_start() const noexcept {
    return height_start_round_ * config_.chain.round_length_ms;
}

std::uint64_t Node::slot_start(std::uint64_t slot) const noexcept {
    const std::uint64_t n = config_.chain.validators.size();
    const std::uint64_t r = config_.chain.round_length_ms;
    return (slot / n) * r + ((slot % n) * r) / n;
}

std::uint64_t Node::slot_at(std::uint64_t now) const noexcept {
    const std::uint64_t n = config_.chain.validators.size();
    const std::uint64_t r = config_.chain.round_length_ms;
    const std::uint64_t within = now % r;
    std::uint64_t i = n - 1;
    while (i > 0 && (i * r) / n > within) --i;
    return (now / r) * n + i;
}

std::optional<std::uint64_t> Node::current_slot(std::uint64_t now) const noexcept {
    if (now < round_start()) return std::nullopt;
    return slot_at(now);
}

const PublicKey& Node::proposer_for(std::uint64_t height, std::uint64_t slot) const {
    const auto& vs = config_.chain.validators;
    return vs[(height + slot) % vs.size()];
}

void Node::reset_round_state(std::uint64_t now) {
    height_start_round_ = now / config_.chain.round_length_ms + 1;
    proposals_.clear();
    rounds_.clear();
    locked_.reset();
    valid_.reset();
    proposed_slot_.reset();
    prevoted_slot_.reset();
    precommitted_slot_.reset();
    retransmitted_slot_.reset();
}

std::optional<std::uint64_t> Node::next_wakeup(std::uint64_t now) const {
    if (config_.role != NodeRole::Full || !is_validator_) return std::nullopt;
    if (now < round_start()) return round_start();
    return slot_start(slot_at(now) + 1);
}

// ---------------------------------------------------------------------------
// Mempool

bool Node::admit(const Transaction& tx, std::optional<TxError>* error) {
    if (mempool_ids_.contains(tx.id)) return false;
    if (tx.is_coinbase()) {
        *error = TxError::BadSignature;
        return false;
    }
    if (auto err = apply_transaction_in_place(pending_, tx, config_.chain.fees, *crypto_)) {
        *error = *err;
        return false;
    }
    mempool_.push_back(tx);
    mempool_ids_.insert(tx.id);
    return true;
}

std::vector<Outbound> Node::gossip_tx(const Transaction& tx) const {
    return {Outbound{std::nullopt, SubmitTx{tx}}};
}

void Node::rebuild_pending() {
    pending_ = state_;
    std::vector<Transaction> kept;
    mempool_ids_.clear();
    for (auto& tx : mempool_) {
        if (!apply_transaction_in_place(pending_, tx, config_.chain.fees, *crypto_)) {
            mempool_ids_.insert(tx.id);
            kept.push_back(std::move(tx));
        }
    }
    mempool_ = std::move(kept);
}

Result<std::vector<Outbound>, SubmitError> Node::submit_transaction(const Transaction& tx) {
    if (config_.role == NodeRole::Light) {
        for (const auto& p : config_.peers) {
            if (p.role == NodeRole::Full) return std::vector<Outbound>{Outbound{p.id, SubmitTx{tx}}};
        }
        return fail(SubmitError{NoPeer{}});
    }
    std::optional<TxError> error;
    if (admit(tx, &error)) return gossip_tx(tx);
    if (error) return fail(SubmitError{*error});
    return std::vector<Outbound>{};  // already pending
}

// ---------------------------------------------------------------------------
// Consensus

Block Node::build_proposal(std::uint64_t now) const {
    std::vector<Transaction> txs;
    const auto h = height() + 1;
    txs.push_back(make_coinbase(config_.account.public_key, config_.chain.fees.block_reward, h, *crypto_));
    for (std::size_t i = 0; i < mempool_.size() && i < config_.max_block_txs; ++i) txs.push_back(mempool_[i]);
    return build_block(tip_header(), std::move(txs), config_.account, now, *crypto_);
}

std::vector<Outbound> Node::consensus_step(std::uint64_t now) {
    if (config_.role != NodeRole::Full || !is_validator_) return {};
    auto slot = current_slot(now);
    if (!slot) return {};
    std::vector<Outbound> out;
    if (locked_ && retransmitted_slot_ != slot) {
        // Lost precommits are the usual reason a quorum stalls; resend ours once per slot.
        retransmitted_slot_ = slot;
        const auto& own = rounds_.at(locked_->round).precommits.at(locked_->digest).at(config_.account.public_key);
        out.push_back({std::nullopt, Vote{height() + 1, locked_->round, VoteKind::Precommit, locked_->digest,
                                          QuorumVote{config_.account.public_key, own.signature}}});
    }
    if (proposed_slot_ == slot || proposer_for(height() + 1, *slot) != config_.account.public_key) return out;
    proposed_slot_ = slot;

    NewBlock proposal;
    proposal.round = *slot;
    if (valid_) {
        proposal.block = proposals_.at(valid_->digest);
        proposal.pol_round = valid_->round;
    } else {
        proposal.block = build_proposal(now);
        proposals_.emplace(proposal.block.header.header_digest, proposal.block);
    }
    out.push_back({std::nullopt, proposal});
    auto more = consider_prevote(proposal, now);
    out.insert(out.end(), more.begin(), more.end());
    more = progress(now);
    out.insert(out.end(), more.begin(), more.end());
    return out;
}

std::vector<Outbound> Node::consider_prevote(const NewBlock& proposal, std::uint64_t now) {
    if (!is_validator_ || current_slot(now) != proposal.round || prevoted_slot_ == proposal.round) return {};
    const auto& d = proposal.block.header.header_digest;
    const bool justified = proposal.pol_round && *proposal.pol_round < proposal.round &&
                           (!locked_ || *proposal.pol_round >= locked_->round);
    if (locked_ && locked_->digest != d && !justified) return {};

    prevoted_slot_ = proposal.round;
    const auto h = height() + 1;
    QuorumVote v{config_.account.public_key,
                 crypto_->sign(config_.account.private_key, prevote_signing_bytes(h, proposal.round, d))};
    rounds_[proposal.round].prevotes[d][v.validator] = VoteEntry{v.signature, true};
    return {Outbound{std::nullopt, Vote{h, proposal.round, VoteKind::Prevote, d, std::move(v)}}};
}

std::size_t Node::count_valid(Ballot& ballot, const Digest& digest, std::uint64_t round, VoteKind kind) {
    auto it = ballot.find(digest);
    if (it == ballot.end()) return 0;
    const auto quorum = quorum_threshold(config_.chain.validators.size());
    if (it->second.size() < quorum) return it->second.size();
    auto prop = proposals_.find(digest);
    if (prop == proposals_.end()) return 0;  // nothing to check precommits against yet

    const auto h = height() + 1;
    std::size_t valid = 0;
    for (auto e = it->second.begin(); e != it->second.end();) {
        auto& entry = e->second;
        if (!entry.verified) {
            entry.verified = kind == VoteKind::Prevote
                                 ? crypto_->verify(e->first, prevote_signing_bytes(h, round, digest), entry.signature)
                                 : verify_vote(prop->second.header, QuorumVote{e->first, entry.signature}, *crypto_);
        }
        if (!*entry.verified) {
            e = it->second.erase(e);
            continue;
        }
        ++valid;
        ++e;
    }
    return valid;
}

std::vector<Outbound> Node::progress(std::uint64_t now) {
    const auto quorum = quorum_threshold(config_.chain.validators.size());
    const auto slot = current_slot(now);

    for (auto& [round, votes] : rounds_) {
        for (auto& [digest, entries] : votes.precommits) {
            if (entries.size() < quorum || count_valid(votes.precommits, digest, round, VoteKind::Precommit) < quorum) {
                continue;
            }
            Block block = proposals_.at(digest);
            const auto& ballot = votes.precommits.at(digest);
            for (const auto& v : config_.chain.validators) {
                auto it = ballot.find(v);
                if (it != ballot.end()) block.header.quorum_cert.push_back({v, it->second.signature});
            }
            commit(std::move(block), now);
            return {};
        }
    }

    std::vector<Outbound> out;
    for (auto& [round, votes] : rounds_) {
        for (auto& [digest, entries] : votes.prevotes) {
            if (entries.size() < quorum || count_valid(votes.prevotes, digest, round, VoteKind::Prevote) < quorum) {
                continue;
            }
            if (!valid_ || round > valid_->round) valid_ = RoundLock{digest, round};
            if (!is_validator_ || slot != round || precommitted_slot_ == round) continue;

            precommitted_slot_ = round;
            locked_ = RoundLock{digest, round};
            auto v = sign_vote(proposals_.at(digest).header, config_.account, *crypto_);
            votes.precommits[digest][v.validator] = VoteEntry{v.signature, true};
            out.push_back({std::nullopt, Vote{height() + 1, round, VoteKind::Precommit, digest, std::move(v)}});
        }
    }
    if (!out.empty()) {
        // Our own precommit may complete a quorum.
        auto more = progress(now);
        out.insert(out.end(), more.begin(), more.end());
    }
    return out;
}

void Node::commit(Block block, std::uint64_t now) {
    auto next = apply_block(state_, block, config_.chain.fees, *crypto_);
    if (!next) throw std::logic_error("committing a block that does not apply: " + describe(next.error()));
    state_ = std::move(next).value();
    commits_.push_back({block.header.height, now, block.header.header_digest});
    index_block(block);
    blocks_.push_back(std::move(block));
    rebuild_pending();
    reset_round_state(now);
}

void Node::index_block(const Block& block) {
    const auto h = block.header.height;
    for (std::size_t i = 0; i < block.transactions.size(); ++i) {
        const auto& tx = block.transactions[i];
        TxLocation loc{h, i};
        std::visit(Overloaded{
                       [&](const EntityPayload&) { latest_entity_[tx.sender] = loc; },
                       [&](const ConfirmationPayload& p) { latest_confirmation_[{tx.sender, p.subject}] = loc; },
                       [&](const RevokeEntityPayload&) { removals_.push_back(loc); },
                       [&](const RevocationPayload&) { removals_.push_back(loc); },
                       [](const auto&) {},
                   },
                   tx.payload);
    }
}

std::vector<Outbound> Node::request_sync(NodeId from, std::uint64_t now) {
    const auto gap = std::max<std::uint64_t>(1, slot_start(1));
    if (last_sync_request_ && now < *last_sync_request_ + gap) return {};
    last_sync_request_ = now;
    return {Outbound{from, BlockRequest{height() + 1}}};
}

std::vector<Outbound> Node::on_proposal(NodeId from, const NewBlock& proposal, std::uint64_t now) {
    const auto& block = proposal.block;
    const auto h = block.header.height;
    if (h <= height()) return {};
    if (h > height() + 1) {
        defer(from, proposal);
        return request_sync(from, now);
    }

    const auto& d = block.header.header_digest;
    if (!proposals_.contains(d)) {
        if (!contains(config_.chain.validators, block.header.proposer) ||
            !validate_proposal(tip_header(), block, *crypto_) ||
            !apply_block(state_, block, config_.chain.fees, *crypto_)) {
            ++counters_.rejected_proposals;
            return {};
        }
        proposals_.emplace(d, block);
    }
    auto out = consider_prevote(proposal, now);
    auto more = progress(now);
    out.insert(out.end(), more.begin(), more.end());
    return out;
}

std::vector<Outbound> Node::on_certified(NodeId from, const Block& block, std::uint64_t now) {
    const auto h = block.header.height;
    if (h <= height()) return {};
    if (h > height() + 1) return request_sync(from, now);
    if (!validate_block(tip_header(), block, config_.chain.validators, *crypto_) ||
        !apply_block(state_, block, config_.chain.fees, *crypto_)) {
        ++counters_.rejected_proposals;
        return {};
    }
    commit(block, now);
    return {};
}

std::vector<Outbound> Node::on_vote(NodeId from, const Vote& vote, std::uint64_t now) {
    if (vote.height <= height()) return {};
    if (vote.height > height() + 1) {
        defer(from, vote);
        return request_sync(from, now);
    }
    if (!contains(config_.chain.validators, vote.vote.validator)) return {};
    auto& votes = rounds_[vote.round];
    auto& ballot = vote.kind == VoteKind::Prevote ? votes.prevotes : votes.precommits;
    ballot[vote.header_digest].try_emplace(vote.vote.validator, VoteEntry{vote.vote.signature, std::nullopt});
    return progress(now);
}

std::vector<Outbound> Node::on_block_response(const BlockResponse& r, std::uint64_t now) {
    for (const auto& b : r.blocks) {
        if (b.header.height != height() + 1) continue;
        if (!validate_block(tip_header(), b, config_.chain.validators, *crypto_) ||
            !apply_block(state_, b, config_.chain.fees, *crypto_)) {
            ++counters_.rejected_proposals;
            break;
        }
        commit(b, now);
    }
    return replay_deferred(now);
}

void Node::defer(NodeId from, WireMessage msg) {
    if (deferred_.size() >= kMaxDeferred) deferred_.erase(deferred_.begin());
    deferred_.emplace_back(from, std::move(msg));
}

std::vector<Outbound> Node::replay_deferred(std::uint64_t now) {
    auto pending = std::exchange(deferred_, {});
    std::vector<Outbound> out;
    for (auto& [from, msg] : pending) {
        const auto h = std::holds_alternative<Vote>(msg) ? std::get<Vote>(msg).height
                                                         : std::get<NewBlock>(msg).block.header.height;
        if (h <= height()) continue;
        if (h > height() + 1) {
            deferred_.emplace_back(from, std::move(msg));
            continue;
        }
        auto more = std::holds_alternative<Vote>(msg) ? on_vote(from, std::get<Vote>(msg), now)
                                                      : on_proposal(from, std::get<NewBlock>(msg), now);
        out.insert(out.end(), more.begin(), more.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Message dispatch

std::vector<Outbound> Node::handle_message(NodeId from, const WireMessage& msg, std::uint64_t now) {
    try {
        if (config_.role == NodeRole::Light) {
            return std::visit(Overloaded{
                                  [&](const NewBlock& m) -> std::vector<Outbound> {
                                      if (m.block.header.quorum_cert.empty()) return {};
                                      return light_on_headers({m.block.header});
                                  },
                                  [&](const HeaderResponse& m) { return light_on_headers(m.headers); },
                                  [&](const EntityResponse& m) -> std::vector<Outbound> {
                                      (void)apply_entity_response(m);
                                      return {};
                                  },
                                  [](const auto&) -> std::vector<Outbound> { return {}; },
                              },
                              msg);
        }
        return std::visit(
            Overloaded{
                [&](const SubmitTx& m) -> std::vector<Outbound> {
                    std::optional<TxError> error;
                    if (admit(m.tx, &error)) return gossip_tx(m.tx);
                    if (error) ++counters_.rejected_txs;
                    return {};
                },
                [&](const NewBlock& m) {
                    return m.block.header.quorum_cert.empty() ? on_proposal(from, m, now)
                                                              : on_certified(from, m.block, now);
                },
                [&](const Vote& m) { return on_vote(from, m, now); },
                [&](const HeaderRequest& m) -> std::vector<Outbound> {
                    HeaderResponse r;
                    for (auto h = m.from_height; h < blocks_.size() && r.headers.size() < kMaxHeadersPerResponse; ++h) {
                        r.headers.push_back(blocks_[h].header);
                    }
                    return {Outbound{from, std::move(r)}};
                },
                [&](const BlockRequest& m) -> std::vector<Outbound> {
                    BlockResponse r;
                    for (auto h = m.from_height; h < blocks_.size() && r.blocks.size() < kMaxBlocksPerResponse; ++h) {
                        r.blocks.push_back(blocks_[h]);
                    }
                    if (r.blocks.empty()) return {};
                    return {Outbound{from, std::move(r)}};
                },
                [&](const BlockResponse& m) { return on_block_response(m, now); },
                [&](const EntityQuery& m) -> std::vector<Outbound> {
                    return {Outbound{from, answer_entity_query(m)}};
                },
                [](const auto&) -> std::vector<Outbound> { return {}; },
            },
            msg);
    } catch (const std::exception&) {
        ++counters_.malformed_dropped;
        return {};
    }
}

// ---------------------------------------------------------------------------
// Light client

std::vector<Outbound> Node::light_on_headers(const std::vector<BlockHeader>& headers) {
    for (const auto& h : headers) {
        if (h.height <= height()) continue;
        if (!validate_header(light_headers_.back(), h, config_.chain.validators, *crypto_)) {
            ++counters_.rejected_headers;
            break;
        }
        light_headers_.push_back(h);
    }
    return {};
}

Outbound Node::light_refresh(NodeId peer, AnchorSet anchors) {
    if (config_.role != NodeRole::Light) throw std::logic_error("light_refresh on a full node");
    config_.anchors = std::move(anchors);
    EntityQuery q;
    q.query_id = next_query_id_++;
    q.anchors.assign(config_.anchors.begin(), config_.anchors.end());
    q.known_height = height();
    return {peer, std::move(q)};
}

EntityResponse Node::answer_entity_query(const EntityQuery& query) const {
    if (config_.role != NodeRole::Full) throw std::logic_error("entity queries are served by full nodes");
    EntityResponse r;
    r.query_id = query.query_id;
    for (auto h = query.known_height + 1; h < blocks_.size(); ++h) r.headers.push_back(blocks_[h].header);

    AnchorSet anchors(query.anchors.begin(), query.anchors.end());
    if (anchors.empty()) return r;
    auto subgraph = relevant_subgraph(state_.graph, anchors, config_.chain.global_cap);

    std::set<std::tuple<std::uint64_t, std::size_t>> wanted;
    for (const auto& [key, rec] : subgraph.nodes()) {
        const auto& loc = latest_entity_.at(key);
        wanted.emplace(loc.height, loc.index);
    }
    for (const auto& [edge, limit] : subgraph.edges()) {
        const auto& loc = latest_confirmation_.at(edge);
        wanted.emplace(loc.height, loc.index);
    }
    for (const auto& loc : removals_) {
        if (loc.height > query.known_height) wanted.emplace(loc.height, loc.index);
    }
    for (const auto& [h, i] : wanted) {
        const auto& block = blocks_[h];
        const auto& tx = block.transactions[i];
        r.backing.push_back({h, tx, prove_inclusion(block, tx.id, *crypto_).value()});
    }
    return r;
}

Result<void, RefreshError> Node::apply_entity_response(const EntityResponse& response) {
    if (config_.role != NodeRole::Light) throw std::logic_error("entity responses are consumed by light nodes");
    auto reject = [this]() -> Result<void, RefreshError> {
        ++counters_.rejected_deltas;
        return fail(RefreshError::UnverifiableDelta);
    };

    auto candidate = light_headers_;
    for (const auto& h : response.headers) {
        if (h.height <= candidate.back().height) continue;
        if (!validate_header(candidate.back(), h, config_.chain.validators, *crypto_)) return reject();
        candidate.push_back(h);
    }

    auto items = response.backing;
    for (const auto& item : items) {
        if (item.height == 0 || item.height >= candidate.size()) return reject();
        if (!transaction_well_formed(item.tx, *crypto_)) return reject();
        if (!verify_inclusion(candidate[item.height], item.tx.id, item.proof, *crypto_)) return reject();
    }
    std::sort(items.begin(), items.end(), [](const BackedTx& a, const BackedTx& b) {
        return std::tie(a.height, a.proof.index) < std::tie(b.height, b.proof.index);
    });

    TrustGraph rebuilt;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0 && items[i].height == items[i - 1].height && items[i].proof.index == items[i - 1].proof.index) {
            if (items[i].tx.id != items[i - 1].tx.id) return reject();
            continue;
        }
        const auto& tx = items[i].tx;
        bool consistent = std::visit(
            Overloaded{
                [&](const EntityPayload& p) {
                    if (rebuilt.has_node(tx.sender) || p.auth_public_key.empty()) return false;
                    rebuilt.add_node({tx.sender, p.auth_public_key, p.identity_name, p.entity_type});
                    return true;
                },
                [&](const ConfirmationPayload& p) {
                    if (p.max_path_len == 0 || p.subject == tx.sender || !rebuilt.has_node(tx.sender) ||
                        !rebuilt.has_node(p.subject)) {
                        return false;
                    }
                    rebuilt.set_edge(tx.sender, p.subject, p.max_path_len);
                    return true;
                },
                [&](const RevokeEntityPayload&) {
                    if (rebuilt.has_node(tx.sender)) rebuilt.remove_node(tx.sender);
                    return true;
                },
                [&](const RevocationPayload& p) {
                    if (rebuilt.edge_limit(tx.sender, p.subject)) rebuilt.remove_edge(tx.sender, p.subject);
                    return true;
                },
                [](const auto&) { return false; },
            },
            tx.payload);
        if (!consistent) return reject();
    }

    light_headers_ = std::move(candidate);
    local_view_ = config_.anchors.empty() ? TrustGraph{}
                                          : relevant_subgraph(rebuilt, config_.anchors, config_.chain.global_cap);
    last_refresh_height_ = height();
    return {};
}

}  // namespace dronechain
