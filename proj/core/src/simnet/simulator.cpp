#include "dronechain/simnet/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <map>
#include <queue>
#include <random>
#include <stdexcept>

namespace dronechain::simnet {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string seed_label(std::string_view purpose, std::uint64_t seed) {
    return std::string(purpose) + "/" + std::to_string(seed);
}

std::uint64_t stream_seed(std::string_view purpose, std::uint64_t master, NodeId a, NodeId b) {
    Encoder enc;
    enc.str(purpose);
    enc.u64(master);
    enc.u32(a);
    enc.u32(b);
    auto d = sha256(enc.view());
    std::uint64_t s = 0;
    for (int i = 0; i < 8; ++i) s = (s << 8) | d.bytes[i];
    return s;
}

// Uniform in [0, 1) from the top 53 bits.
double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t range_draw(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
    if (lo == hi) return lo;
    const std::uint64_t span = hi - lo + 1;
    // Rejection sampling keeps the draw unbiased.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x = rng();
    while (x >= limit) x = rng();
    return lo + x % span;
}

struct Deliver {
    NodeId from = 0;
    NodeId to = 0;
    Bytes bytes;
};
struct Tick {
    NodeId node = 0;
};
struct RunAction {
    std::size_t index = 0;
};
struct AuthTimeout {
    std::uint64_t attempt = 0;
};
struct PeriodicRefresh {
    NodeId node = 0;
};

using EventBody = std::variant<Deliver, Tick, RunAction, AuthTimeout, PeriodicRefresh>;

struct Event {
    std::uint64_t time = 0;
    std::uint64_t seq = 0;
    EventBody body;
};

struct Later {
    bool operator()(const Event& a, const Event& b) const noexcept {
        return std::tie(a.time, a.seq) > std::tie(b.time, b.seq);
    }
};

struct Host {
    NodeSpec spec;
    NodeConfig config;
    std::shared_ptr<CountingProvider> crypto;
    std::unique_ptr<Node> node;
    KeyPair auth_key;
    KeyPair forged_key;
    NonceSource nonces{0};
    bool up = true;
    std::optional<std::uint64_t> scheduled;
    std::uint64_t light_seq = 0;
    std::uint64_t seen_height = 0;
    std::uint64_t sent = 0;
    std::uint64_t received = 0;
    std::uint64_t bytes = 0;
    std::uint64_t restarts = 0;
    Bytes persisted;
    Digest persisted_digest;
};

struct LinkState {
    LinkSpec spec;
    bool dropped = false;
    std::mt19937_64 loss_rng;
    std::mt19937_64 latency_rng;
};

struct PendingAuth {
    AuthOutcome outcome;
    Challenge challenge;
    bool done = false;
};

std::pair<NodeId, NodeId> link_key(NodeId a, NodeId b) {
    return {std::min(a, b), std::max(a, b)};
}

}  // namespace

KeyPair account_keypair(const Provider& crypto, std::uint64_t seed, NodeId id) {
    return crypto.generate_keypair(derive_seed(seed_label("account", seed), id));
}

KeyPair auth_keypair(const Provider& crypto, std::uint64_t seed, NodeId id) {
    return crypto.generate_keypair(derive_seed(seed_label("auth", seed), id));
}

struct Simulation::Impl {
    Scenario scenario;
    SimOptions options;
    std::shared_ptr<const Provider> base;
    std::map<NodeId, Host> hosts;
    std::map<std::pair<NodeId, NodeId>, LinkState> links;
    std::priority_queue<Event, std::vector<Event>, Later> queue;
    std::uint64_t next_seq = 0;
    std::uint64_t now = 0;
    bool finished = false;

    std::vector<std::vector<NodeId>> partition;

    std::vector<PendingAuth> auths;
    std::vector<AuthOutcome> outcomes;
    std::map<Digest, std::uint64_t> pending_txs;
    std::vector<std::uint64_t> tx_latencies;

    std::uint64_t tx_submitted = 0;
    std::uint64_t tx_rejected = 0;
    std::uint64_t tx_committed = 0;
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::uint64_t lost = 0;
    std::uint64_t in_flight = 0;
    std::uint64_t bytes_sent = 0;
    std::uint64_t malformed = 0;
    std::uint64_t restart_mismatches = 0;
    double running_time_ms = 0.0;

    explicit Impl(Scenario s, SimOptions o) : scenario(std::move(s)), options(o) {
        validate_scenario(scenario);
        base = make_provider(scenario.genesis.crypto_provider);
        build_hosts();
        for (std::size_t i = 0; i < scenario.workload.size(); ++i) push(scenario.workload[i].at, RunAction{i});
        if (scenario.light_refresh_interval_ms > 0) {
            for (const auto& [id, h] : hosts) {
                if (h.spec.role == NodeRole::Light) push(scenario.light_refresh_interval_ms, PeriodicRefresh{id});
            }
        }
        for (auto& [id, h] : hosts) reschedule(h);
    }

    void build_hosts() {
        const auto& g = scenario.genesis;
        const auto seed = scenario.seed;
        std::map<NodeId, KeyPair> accounts;
        for (const auto& n : scenario.nodes) accounts[n.id] = account_keypair(*base, seed, n.id);

        std::vector<std::pair<PublicKey, std::uint64_t>> allocations;
        for (const auto& [id, amount] : g.initial_balances) {
            allocations.emplace_back(accounts.at(id).public_key, amount);
        }
        auto genesis = build_genesis(allocations, *base);

        ChainConfig chain;
        chain.provider = g.crypto_provider;
        for (auto v : g.validators) chain.validators.push_back(accounts.at(v).public_key);
        chain.fees = g.fees;
        chain.round_length_ms = g.round_length_ms;
        chain.global_cap = g.global_cap;

        for (const auto& l : scenario.links) {
            LinkState ls;
            ls.spec = l;
            auto [a, b] = link_key(l.a, l.b);
            ls.loss_rng.seed(stream_seed("link-loss", seed, a, b));
            ls.latency_rng.seed(stream_seed("link-latency", seed, a, b));
            links.emplace(link_key(a, b), std::move(ls));
        }

        for (const auto& n : scenario.nodes) {
            Host h;
            h.spec = n;
            h.crypto = std::make_shared<CountingProvider>(base);
            h.auth_key = auth_keypair(*base, seed, n.id);
            h.forged_key = base->generate_keypair(derive_seed(seed_label("forged", seed), n.id));
            h.nonces = NonceSource(stream_seed("nonce", seed, n.id, 0));

            auto& c = h.config;
            c.id = n.id;
            c.role = n.role;
            c.account = accounts.at(n.id);
            c.chain = chain;
            c.genesis = genesis;
            c.max_block_txs = g.max_block_txs;
            auto anchor_ids = g.anchors.contains(n.id) ? g.anchors.at(n.id) : g.validators;
            for (auto a : anchor_ids) c.anchors.insert(accounts.at(a).public_key);
            for (const auto& l : scenario.links) {
                if (l.a == n.id) c.peers.push_back({l.b, scenario.find_node(l.b)->role});
                if (l.b == n.id) c.peers.push_back({l.a, scenario.find_node(l.a)->role});
            }
            std::sort(c.peers.begin(), c.peers.end(), [](const Peer& x, const Peer& y) { return x.id < y.id; });
            h.node = std::make_unique<Node>(c, h.crypto);
            hosts.emplace(n.id, std::move(h));
        }
    }

    void push(std::uint64_t t, EventBody body) {
        if (std::holds_alternative<Deliver>(body)) ++in_flight;
        queue.push(Event{t, next_seq++, std::move(body)});
    }

    void trace(json ev) {
        if (!options.trace) return;
        ev["t"] = now;
        *options.trace << ev.dump() << '\n';
    }

    bool separated(NodeId a, NodeId b) const {
        if (partition.empty()) return false;
        auto group_of = [&](NodeId id) {
            for (std::size_t i = 0; i < partition.size(); ++i) {
                if (std::find(partition[i].begin(), partition[i].end(), id) != partition[i].end()) return i;
            }
            return partition.size();  // unlisted nodes share one extra group
        };
        return group_of(a) != group_of(b);
    }

    void send(Host& from, NodeId to, const WireMessage& msg) {
        auto it = links.find(link_key(from.spec.id, to));
        if (it == links.end()) return;
        auto& link = it->second;
        auto bytes = encode_message(msg);
        ++sent;
        ++from.sent;
        from.bytes += bytes.size();
        bytes_sent += bytes.size();

        const char* fate = nullptr;
        if (link.dropped) {
            fate = "link_down";
        } else if (separated(from.spec.id, to)) {
            fate = "partitioned";
        } else if (link.spec.loss > 0.0 && unit_draw(link.loss_rng) < link.spec.loss) {
            fate = "lost";
        }
        if (fate) {
            ++lost;
            trace({{"ev", "drop"}, {"from", from.spec.id}, {"to", to}, {"msg", message_name(msg)}, {"why", fate}});
            return;
        }
        auto latency = range_draw(link.latency_rng, link.spec.latency.min_ms, link.spec.latency.max_ms);
        trace({{"ev", "send"},
               {"from", from.spec.id},
               {"to", to},
               {"msg", message_name(msg)},
               {"bytes", bytes.size()},
               {"arrive", now + latency}});
        push(now + latency, Deliver{from.spec.id, to, std::move(bytes)});
    }

    void dispatch(Host& from, const std::vector<Outbound>& outs) {
        for (const auto& o : outs) {
            if (o.to) {
                send(from, *o.to, o.msg);
                continue;
            }
            for (const auto& p : from.config.peers) {
                if (p.role == NodeRole::Full) send(from, p.id, o.msg);
            }
        }
    }

    void reschedule(Host& h) {
        if (!h.up) return;
        auto w = h.node->next_wakeup(now);
        if (!w || h.scheduled == w) return;
        h.scheduled = w;
        push(*w, Tick{h.spec.id});
    }

    void observe_commits(Host& h) {
        if (h.spec.role != NodeRole::Full) return;
        const auto& blocks = h.node->blocks();
        for (auto height = h.seen_height + 1; height < blocks.size(); ++height) {
            for (const auto& tx : blocks[height].transactions) {
                auto it = pending_txs.find(tx.id);
                if (it == pending_txs.end()) continue;
                tx_latencies.push_back(now - it->second);
                ++tx_committed;
                pending_txs.erase(it);
            }
            trace({{"ev", "commit"}, {"node", h.spec.id}, {"height", height}});
        }
        h.seen_height = std::max<std::uint64_t>(h.seen_height, h.node->height());
    }

    void after_step(Host& h, const std::vector<Outbound>& outs) {
        dispatch(h, outs);
        observe_commits(h);
        reschedule(h);
    }

    // -- auth --------------------------------------------------------------

    void finish_auth(PendingAuth& p, bool accepted, std::string reason) {
        p.done = true;
        p.outcome.finished = now;
        p.outcome.accepted = accepted;
        p.outcome.reason = std::move(reason);
        outcomes.push_back(p.outcome);
        trace({{"ev", "auth_done"},
               {"attempt", p.outcome.attempt},
               {"accepted", accepted},
               {"reason", p.outcome.reason}});
    }

    void start_auth(const Action& a) {
        PendingAuth p;
        p.outcome.attempt = auths.size();
        p.outcome.verifier = a.node;
        p.outcome.target = a.peer;
        p.outcome.label = a.label;
        p.outcome.behavior = a.behavior;
        p.outcome.started = now;
        auto& v = hosts.at(a.node);
        const auto& t = hosts.at(a.peer);
        p.challenge = issue_challenge(v.config.account.public_key, t.config.account.public_key, now, v.nonces,
                                      scenario.genesis.auth_ttl_ms);
        auths.push_back(p);
        auto& stored = auths.back();
        trace({{"ev", "auth_start"}, {"attempt", stored.outcome.attempt}, {"verifier", a.node}, {"target", a.peer}});

        if (!v.up || !links.contains(link_key(a.node, a.peer))) {
            finish_auth(stored, false, "NoPeer");
            return;
        }
        send(v, a.peer, AuthChallengeMsg{stored.challenge});
        push(now + scenario.genesis.auth_ttl_ms + 1, AuthTimeout{stored.outcome.attempt});
    }

    void on_challenge(Host& responder, NodeId from, const Challenge& c) {
        auto behavior = ResponderBehavior::Honest;
        for (const auto& p : auths) {
            if (p.challenge.nonce == c.nonce) behavior = p.outcome.behavior;
        }
        AuthResponse r;
        switch (behavior) {
            case ResponderBehavior::Honest: r = respond(c, responder.auth_key, *responder.crypto); break;
            case ResponderBehavior::WrongKey: r = respond(c, responder.forged_key, *responder.crypto); break;
            case ResponderBehavior::WrongNonce: {
                // A replayed answer to some other challenge.
                auto stale = c;
                stale.nonce[0] ^= 0x01;
                r = respond(stale, responder.auth_key, *responder.crypto);
                break;
            }
        }
        send(responder, from, AuthResponseMsg{std::move(r)});
    }

    void on_response(Host& verifier, NodeId from, const AuthResponse& r) {
        PendingAuth* match = nullptr;
        for (auto& p : auths) {
            if (p.done || p.outcome.verifier != verifier.spec.id || p.outcome.target != from) continue;
            if (p.challenge.nonce == r.challenge.nonce) {
                match = &p;
                break;
            }
            if (!match) match = &p;
        }
        if (!match) return;
        const auto& node = *verifier.node;
        auto decision = verify_response(r, match->challenge, node.trust_view(), node.anchors(), now,
                                        scenario.genesis.global_cap, *verifier.crypto);
        finish_auth(*match, decision.accepted, std::string(to_string(decision.reason)));
    }

    // -- workload ------------------------------------------------------------

    void submit(Host& h, TxPayload payload) {
        if (!h.up) {
            ++tx_rejected;
            trace({{"ev", "tx_rejected"}, {"node", h.spec.id}, {"why", "node down"}});
            return;
        }
        const auto& account = h.config.account;
        auto seq = h.spec.role == NodeRole::Full ? h.node->pending_state().next_seq(account.public_key) : h.light_seq;
        auto tx = sign_transaction(std::move(payload), seq, scenario.genesis.fees.tx_fee, account, *h.crypto);
        auto r = h.node->submit_transaction(tx);
        if (!r) {
            ++tx_rejected;
            auto why = std::visit(Overloaded{[](TxError e) { return std::string(to_string(e)); },
                                             [](NoPeer) { return std::string("NoPeer"); }},
                                  r.error());
            trace({{"ev", "tx_rejected"}, {"node", h.spec.id}, {"type", to_string(tx.type())}, {"why", why}});
            return;
        }
        ++tx_submitted;
        if (h.spec.role == NodeRole::Light) ++h.light_seq;
        pending_txs.emplace(tx.id, now);
        trace({{"ev", "tx_submitted"}, {"node", h.spec.id}, {"type", to_string(tx.type())}, {"id", tx.id.hex()}});
        after_step(h, r.value());
    }

    void refresh(Host& h) {
        if (!h.up || h.spec.role != NodeRole::Light) return;
        for (const auto& p : h.config.peers) {
            if (p.role != NodeRole::Full || links.at(link_key(h.spec.id, p.id)).dropped) continue;
            auto out = h.node->light_refresh(p.id, h.node->anchors());
            after_step(h, {out});
            return;
        }
        trace({{"ev", "refresh_skipped"}, {"node", h.spec.id}});
    }

    void crash(Host& h) {
        if (!h.up) return;
        h.up = false;
        h.scheduled.reset();
        if (h.spec.role == NodeRole::Full) {
            h.persisted = h.node->persisted_chain();
            h.persisted_digest = h.node->state_digest();
            if (scenario.chain_dir) write_chain(h, h.persisted);
        }
        trace({{"ev", "crash"}, {"node", h.spec.id}});
    }

    void recover(Host& h) {
        if (h.up) return;
        h.up = true;
        if (h.spec.role == NodeRole::Full) {
            h.node = std::make_unique<Node>(Node::restore(h.config, h.crypto, h.persisted, now));
            ++h.restarts;
            if (h.node->state_digest() != h.persisted_digest) ++restart_mismatches;
        }
        trace({{"ev", "recover"}, {"node", h.spec.id}, {"height", h.node->height()}});
        reschedule(h);
    }

    void write_chain(const Host& h, const Bytes& bytes) const {
        std::filesystem::path dir(*scenario.chain_dir);
        std::filesystem::create_directories(dir);
        write_file_bytes(dir / ("node-" + std::to_string(h.spec.id) + ".chain"), bytes);
    }

    void run_action(const Action& a) {
        trace({{"ev", "action"}, {"action", to_string(a.kind)}, {"node", a.node}});
        const auto& accounts = [&](NodeId id) -> const PublicKey& { return hosts.at(id).config.account.public_key; };
        switch (a.kind) {
            case ActionKind::RegisterEntity: {
                auto& h = hosts.at(a.node);
                auto type = a.entity_type.value_or(h.spec.role == NodeRole::Full ? EntityType::GroundStation
                                                                                 : EntityType::Drone);
                auto name = a.name.empty() ? "node-" + std::to_string(a.node) : a.name;
                submit(h, make_entity_payload(name, type, h.auth_key, h.config.account.public_key, *h.crypto));
                break;
            }
            case ActionKind::Confirm:
                submit(hosts.at(a.node), ConfirmationPayload{accounts(a.peer), a.max_path_len});
                break;
            case ActionKind::Revoke: submit(hosts.at(a.node), RevocationPayload{accounts(a.peer)}); break;
            case ActionKind::RevokeEntity: submit(hosts.at(a.node), RevokeEntityPayload{}); break;
            case ActionKind::Transfer:
                submit(hosts.at(a.node), TokenTransferPayload{accounts(a.peer), a.amount});
                break;
            case ActionKind::Auth: start_auth(a); break;
            case ActionKind::Refresh: refresh(hosts.at(a.node)); break;
            case ActionKind::Crash: crash(hosts.at(a.node)); break;
            case ActionKind::Recover: recover(hosts.at(a.node)); break;
            case ActionKind::PartitionStart: partition = a.groups; break;
            case ActionKind::PartitionStop: partition.clear(); break;
            case ActionKind::DropLink: links.at(link_key(a.node, a.peer)).dropped = true; break;
            case ActionKind::RestoreLink: links.at(link_key(a.node, a.peer)).dropped = false; break;
        }
    }

    // -- loop ----------------------------------------------------------------

    void deliver(Deliver& d) {
        --in_flight;
        auto& h = hosts.at(d.to);
        if (!h.up) {
            ++lost;
            trace({{"ev", "drop"}, {"from", d.from}, {"to", d.to}, {"why", "receiver_down"}});
            return;
        }
        ++delivered;
        ++h.received;
        WireMessage msg;
        try {
            msg = decode_message(d.bytes, *h.crypto);
        } catch (const std::exception&) {
            ++malformed;
            trace({{"ev", "malformed"}, {"from", d.from}, {"to", d.to}});
            return;
        }
        trace({{"ev", "deliver"}, {"from", d.from}, {"to", d.to}, {"msg", message_name(msg)}});
        if (auto* c = std::get_if<AuthChallengeMsg>(&msg)) {
            on_challenge(h, d.from, c->challenge);
            return;
        }
        if (auto* r = std::get_if<AuthResponseMsg>(&msg)) {
            on_response(h, d.from, r->response);
            return;
        }
        auto outs = h.node->handle_message(d.from, msg, now);
        after_step(h, outs);
    }

    void handle(Event& ev) {
        std::visit(Overloaded{
                       [&](Deliver& d) { deliver(d); },
                       [&](Tick& t) {
                           auto& h = hosts.at(t.node);
                           if (!h.up || h.scheduled != now) return;  // superseded
                           h.scheduled.reset();
                           auto outs = h.node->consensus_step(now);
                           after_step(h, outs);
                       },
                       [&](RunAction& r) { run_action(scenario.workload[r.index]); },
                       [&](AuthTimeout& t) {
                           auto& p = auths[t.attempt];
                           if (!p.done) finish_auth(p, false, std::string(to_string(AuthReason::Expired)));
                       },
                       [&](PeriodicRefresh& r) {
                           refresh(hosts.at(r.node));
                           auto next = now + scenario.light_refresh_interval_ms;
                           if (next <= scenario.duration_ms) push(next, PeriodicRefresh{r.node});
                       },
                   },
                   ev.body);
    }

    void run_until(std::uint64_t t) {
        while (!queue.empty() && queue.top().time <= t) {
            Event ev = queue.top();
            queue.pop();
            now = ev.time;
            handle(ev);
        }
        now = std::max(now, t);
    }
};

Simulation::Simulation(Scenario scenario, SimOptions options)
    : impl_(std::make_unique<Impl>(std::move(scenario), options)) {}

Simulation::~Simulation() = default;

void Simulation::run_until(std::uint64_t t) {
    impl_->run_until(t);
}

void Simulation::run() {
    auto& s = *impl_;
    if (s.finished) return;
    auto start = std::chrono::steady_clock::now();
    s.run_until(s.scenario.duration_ms);
    for (auto& p : s.auths) {
        if (!p.done) s.finish_auth(p, false, std::string(to_string(AuthReason::Expired)));
    }
    if (s.scenario.chain_dir) {
        for (const auto& [id, h] : s.hosts) {
            if (h.spec.role == NodeRole::Full) s.write_chain(h, h.up ? h.node->persisted_chain() : h.persisted);
        }
    }
    s.finished = true;
    s.running_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::uint64_t Simulation::now() const noexcept {
    return impl_->now;
}

const Scenario& Simulation::scenario() const noexcept {
    return impl_->scenario;
}

std::vector<NodeId> Simulation::node_ids() const {
    std::vector<NodeId> ids;
    for (const auto& [id, h] : impl_->hosts) ids.push_back(id);
    return ids;
}

const Node& Simulation::node(NodeId id) const {
    return *impl_->hosts.at(id).node;
}

bool Simulation::is_up(NodeId id) const {
    return impl_->hosts.at(id).up;
}

const KeyPair& Simulation::account(NodeId id) const {
    return impl_->hosts.at(id).config.account;
}

const std::vector<AuthOutcome>& Simulation::auth_outcomes() const noexcept {
    return impl_->outcomes;
}

MetricsReport Simulation::report() const {
    const auto& s = *impl_;
    MetricsReport r;
    r.scenario = s.scenario.name;
    r.seed = s.scenario.seed;
    r.duration_ms = s.scenario.duration_ms;
    r.provider = s.scenario.genesis.crypto_provider;

    std::vector<std::uint64_t> auth_latencies;
    for (const auto& o : s.outcomes) {
        r.auth.record(o.accepted, o.reason);
        if (!o.label.empty()) r.auth_by_label[o.label].record(o.accepted, o.reason);
        const bool honest = o.behavior == ResponderBehavior::Honest;
        if (honest) {
            (o.accepted ? r.confusion.honest_accepted : r.confusion.honest_rejected)++;
        } else {
            (o.accepted ? r.confusion.attacker_accepted : r.confusion.attacker_rejected)++;
        }
        if (o.accepted) auth_latencies.push_back(o.finished - o.started);
    }
    r.auth_latency = summarize(std::move(auth_latencies));

    r.tx_submitted = s.tx_submitted;
    r.tx_rejected = s.tx_rejected;
    r.tx_committed = s.tx_committed;
    r.tx_commit_latency = summarize(s.tx_latencies);

    r.messages_sent = s.sent;
    r.messages_delivered = s.delivered;
    r.messages_lost = s.lost;
    r.messages_in_flight = s.in_flight;
    r.bytes_sent = s.bytes_sent;
    r.malformed_messages = s.malformed;
    r.restart_digest_mismatches = s.restart_mismatches;

    for (const auto& [id, h] : s.hosts) {
        NodeMetrics n;
        n.id = id;
        n.role = h.spec.role;
        n.up = h.up;
        n.height = h.node->height();
        // Digests go through the uncounted provider so reporting leaves the counters alone.
        if (h.spec.role == NodeRole::Full) {
            n.state_digest = state_digest(h.node->ledger_state(), *s.base).hex();
        } else {
            LedgerState view;
            view.graph = h.node->trust_view();
            n.state_digest = state_digest(view, *s.base).hex();
        }
        n.messages_sent = h.sent;
        n.messages_received = h.received;
        n.bytes_sent = h.bytes;
        n.signatures_created = h.crypto->signatures_created();
        n.signatures_verified = h.crypto->signatures_verified();
        n.hashes_computed = h.crypto->hashes_computed();
        n.restarts = h.restarts;
        n.counters = h.node->counters();
        r.signatures_created += n.signatures_created;
        r.signatures_verified += n.signatures_verified;
        r.hashes_computed += n.hashes_computed;
        r.restarts += n.restarts;
        r.nodes.push_back(std::move(n));
    }
    r.running_time_ms = s.running_time_ms;
    return r;
}

MetricsReport run_scenario(const Scenario& scenario, const SimOptions& options) {
    Simulation sim(scenario, options);
    sim.run();
    return sim.report();
}

}  // namespace dronechain::simnet
