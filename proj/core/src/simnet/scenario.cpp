#include "dronechain/simnet/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <set>

namespace dronechain::simnet {

using nlohmann::json;

namespace {

constexpr std::pair<ActionKind, std::string_view> kActionNames[] = {
    {ActionKind::RegisterEntity, "register_entity"},
    {ActionKind::Confirm, "confirm"},
    {ActionKind::Revoke, "revoke"},
    {ActionKind::RevokeEntity, "revoke_entity"},
    {ActionKind::Transfer, "transfer"},
    {ActionKind::Auth, "auth"},
    {ActionKind::Refresh, "refresh"},
    {ActionKind::Crash, "crash"},
    {ActionKind::Recover, "recover"},
    {ActionKind::PartitionStart, "partition_start"},
    {ActionKind::PartitionStop, "partition_stop"},
    {ActionKind::DropLink, "drop_link"},
    {ActionKind::RestoreLink, "restore_link"},
};

constexpr std::pair<ResponderBehavior, std::string_view> kBehaviorNames[] = {
    {ResponderBehavior::Honest, "honest"},
    {ResponderBehavior::WrongKey, "wrong_key"},
    {ResponderBehavior::WrongNonce, "wrong_nonce"},
};

std::string at_index(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
}

std::string at_key(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

const json& object_at(const json& parent, const std::string& key, const std::string& path) {
    if (!parent.contains(key)) throw SchemaError(at_key(path, key), "missing required field");
    const auto& v = parent.at(key);
    if (!v.is_object()) throw SchemaError(at_key(path, key), "expected an object");
    return v;
}

void only_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) throw SchemaError(path.empty() ? "$" : path, "expected an object");
    for (const auto& [k, v] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
            throw SchemaError(at_key(path, k), "unknown field");
        }
    }
}

std::uint64_t as_u64(const json& v, const std::string& path) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw SchemaError(path, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

std::uint64_t req_u64(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) throw SchemaError(at_key(path, key), "missing required field");
    return as_u64(obj.at(key), at_key(path, key));
}

std::uint64_t opt_u64(const json& obj, const std::string& key, const std::string& path, std::uint64_t fallback) {
    return obj.contains(key) ? as_u64(obj.at(key), at_key(path, key)) : fallback;
}

NodeId req_node(const json& obj, const std::string& key, const std::string& path) {
    auto v = req_u64(obj, key, path);
    if (v > UINT32_MAX) throw SchemaError(at_key(path, key), "node id out of range");
    return static_cast<NodeId>(v);
}

std::string req_string(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) throw SchemaError(at_key(path, key), "missing required field");
    const auto& v = obj.at(key);
    if (!v.is_string()) throw SchemaError(at_key(path, key), "expected a string");
    return v.get<std::string>();
}

std::string opt_string(const json& obj, const std::string& key, const std::string& path, std::string fallback) {
    return obj.contains(key) ? req_string(obj, key, path) : fallback;
}

double probability(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) return 0.0;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw SchemaError(at_key(path, key), "expected a number");
    auto p = v.get<double>();
    if (!(p >= 0.0 && p <= 1.0)) throw SchemaError(at_key(path, key), "probability must lie in [0, 1]");
    return p;
}

std::vector<NodeId> node_list(const json& v, const std::string& path) {
    if (!v.is_array()) throw SchemaError(path, "expected an array of node ids");
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        auto id = as_u64(v[i], at_index(path, i));
        if (id > UINT32_MAX) throw SchemaError(at_index(path, i), "node id out of range");
        out.push_back(static_cast<NodeId>(id));
    }
    return out;
}

std::vector<std::vector<NodeId>> group_list(const json& obj, const std::string& path) {
    const auto p = at_key(path, "groups");
    if (!obj.contains("groups")) throw SchemaError(p, "missing required field");
    const auto& v = obj.at("groups");
    if (!v.is_array()) throw SchemaError(p, "expected an array of node id arrays");
    std::vector<std::vector<NodeId>> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(node_list(v[i], at_index(p, i)));
    return out;
}

Latency parse_latency(const json& link, const std::string& path) {
    const auto p = at_key(path, "latency");
    if (!link.contains("latency")) return {};
    const auto& v = link.at("latency");
    if (!v.is_object()) throw SchemaError(p, "expected an object");
    if (v.contains("fixed")) {
        only_keys(v, p, {"fixed"});
        auto ms = req_u64(v, "fixed", p);
        return {ms, ms};
    }
    if (v.contains("uniform")) {
        only_keys(v, p, {"uniform"});
        const auto& u = v.at("uniform");
        const auto up = at_key(p, "uniform");
        if (!u.is_array() || u.size() != 2) throw SchemaError(up, "expected [min, max]");
        Latency l{as_u64(u[0], at_index(up, 0)), as_u64(u[1], at_index(up, 1))};
        if (l.min_ms > l.max_ms) throw SchemaError(up, "min exceeds max");
        return l;
    }
    throw SchemaError(p, "expected either 'fixed' or 'uniform'");
}

FeeParams parse_fees(const json& genesis, const std::string& path) {
    FeeParams f;
    if (!genesis.contains("fee_params")) return f;
    const auto p = at_key(path, "fee_params");
    const auto& v = genesis.at("fee_params");
    only_keys(v, p, {"tx_fee", "entity_reserve", "confirmation_reserve", "block_reward"});
    f.tx_fee = opt_u64(v, "tx_fee", p, f.tx_fee);
    f.entity_reserve = opt_u64(v, "entity_reserve", p, f.entity_reserve);
    f.confirmation_reserve = opt_u64(v, "confirmation_reserve", p, f.confirmation_reserve);
    f.block_reward = opt_u64(v, "block_reward", p, f.block_reward);
    return f;
}

GenesisSpec parse_genesis(const json& doc) {
    const std::string path = "genesis";
    const auto& g = object_at(doc, "genesis", "");
    only_keys(g, path,
              {"crypto_provider", "round_length_ms", "global_cap", "fee_params", "max_block_txs", "auth_ttl_ms",
               "initial_balances", "validators", "anchors"});
    GenesisSpec spec;
    spec.crypto_provider = opt_string(g, "crypto_provider", path, spec.crypto_provider);
    spec.round_length_ms = opt_u64(g, "round_length_ms", path, spec.round_length_ms);
    auto cap = opt_u64(g, "global_cap", path, spec.global_cap);
    if (cap == 0 || cap > 255) throw SchemaError(at_key(path, "global_cap"), "must lie in [1, 255]");
    spec.global_cap = static_cast<std::uint8_t>(cap);
    spec.fees = parse_fees(g, path);
    spec.max_block_txs = opt_u64(g, "max_block_txs", path, spec.max_block_txs);
    spec.auth_ttl_ms = opt_u64(g, "auth_ttl_ms", path, spec.auth_ttl_ms);

    if (g.contains("initial_balances")) {
        const auto p = at_key(path, "initial_balances");
        const auto& b = g.at("initial_balances");
        if (!b.is_object()) throw SchemaError(p, "expected an object keyed by node id");
        for (const auto& [k, v] : b.items()) {
            NodeId id = 0;
            try {
                std::size_t used = 0;
                auto parsed = std::stoull(k, &used);
                if (used != k.size() || parsed > UINT32_MAX) throw std::out_of_range(k);
                id = static_cast<NodeId>(parsed);
            } catch (const std::exception&) {
                throw SchemaError(at_key(p, k), "key is not a node id");
            }
            spec.initial_balances[id] = as_u64(v, at_key(p, k));
        }
    }
    if (!g.contains("validators")) throw SchemaError(at_key(path, "validators"), "missing required field");
    spec.validators = node_list(g.at("validators"), at_key(path, "validators"));
    if (g.contains("anchors")) {
        const auto p = at_key(path, "anchors");
        const auto& a = g.at("anchors");
        if (!a.is_object()) throw SchemaError(p, "expected an object keyed by node id");
        for (const auto& [k, v] : a.items()) {
            NodeId id = 0;
            try {
                std::size_t used = 0;
                auto parsed = std::stoull(k, &used);
                if (used != k.size() || parsed > UINT32_MAX) throw std::out_of_range(k);
                id = static_cast<NodeId>(parsed);
            } catch (const std::exception&) {
                throw SchemaError(at_key(p, k), "key is not a node id");
            }
            spec.anchors[id] = node_list(v, at_key(p, k));
        }
    }
    return spec;
}

Action parse_action(const json& v, const std::string& path) {
    Action a;
    if (!v.is_object()) throw SchemaError(path, "expected an object");
    a.at = req_u64(v, "at", path);
    auto name = req_string(v, "action", path);
    auto it = std::find_if(std::begin(kActionNames), std::end(kActionNames),
                           [&](const auto& p) { return p.second == name; });
    if (it == std::end(kActionNames)) throw SchemaError(at_key(path, "action"), "unknown action '" + name + "'");
    a.kind = it->first;

    switch (a.kind) {
        case ActionKind::RegisterEntity: {
            only_keys(v, path, {"at", "action", "node", "name", "entity_type"});
            a.node = req_node(v, "node", path);
            a.name = opt_string(v, "name", path, "");
            if (v.contains("entity_type")) {
                auto t = req_string(v, "entity_type", path);
                a.entity_type = entity_type_from_string(t);
                if (!a.entity_type) throw SchemaError(at_key(path, "entity_type"), "unknown entity type '" + t + "'");
            }
            break;
        }
        case ActionKind::Confirm: {
            only_keys(v, path, {"at", "action", "node", "subject", "max_path_len"});
            a.node = req_node(v, "node", path);
            a.peer = req_node(v, "subject", path);
            auto l = req_u64(v, "max_path_len", path);
            if (l == 0 || l > 255) throw SchemaError(at_key(path, "max_path_len"), "must lie in [1, 255]");
            a.max_path_len = static_cast<std::uint8_t>(l);
            break;
        }
        case ActionKind::Revoke:
            only_keys(v, path, {"at", "action", "node", "subject"});
            a.node = req_node(v, "node", path);
            a.peer = req_node(v, "subject", path);
            break;
        case ActionKind::Transfer:
            only_keys(v, path, {"at", "action", "node", "to", "amount"});
            a.node = req_node(v, "node", path);
            a.peer = req_node(v, "to", path);
            a.amount = req_u64(v, "amount", path);
            break;
        case ActionKind::Auth: {
            only_keys(v, path, {"at", "action", "verifier", "target", "responder_behavior", "label"});
            a.node = req_node(v, "verifier", path);
            a.peer = req_node(v, "target", path);
            auto b = opt_string(v, "responder_behavior", path, "honest");
            auto bit = std::find_if(std::begin(kBehaviorNames), std::end(kBehaviorNames),
                                    [&](const auto& p) { return p.second == b; });
            if (bit == std::end(kBehaviorNames)) {
                throw SchemaError(at_key(path, "responder_behavior"), "unknown behavior '" + b + "'");
            }
            a.behavior = bit->first;
            a.label = opt_string(v, "label", path, "");
            break;
        }
        case ActionKind::RevokeEntity:
        case ActionKind::Refresh:
        case ActionKind::Crash:
        case ActionKind::Recover:
            only_keys(v, path, {"at", "action", "node"});
            a.node = req_node(v, "node", path);
            break;
        case ActionKind::PartitionStart:
            only_keys(v, path, {"at", "action", "groups"});
            a.groups = group_list(v, path);
            break;
        case ActionKind::PartitionStop:
            only_keys(v, path, {"at", "action"});
            break;
        case ActionKind::DropLink:
        case ActionKind::RestoreLink:
            only_keys(v, path, {"at", "action", "a", "b"});
            a.node = req_node(v, "a", path);
            a.peer = req_node(v, "b", path);
            break;
    }
    return a;
}

void require_node(const Scenario& s, NodeId id, const std::string& path) {
    if (!s.find_node(id)) throw SchemaError(path, "unknown node " + std::to_string(id));
}

void validate_action(const Scenario& s, const Action& a, const std::string& path) {
    if (a.at > s.duration_ms) throw SchemaError(at_key(path, "at"), "time lies beyond duration_ms");
    switch (a.kind) {
        case ActionKind::RegisterEntity:
        case ActionKind::RevokeEntity:
        case ActionKind::Crash:
        case ActionKind::Recover:
            require_node(s, a.node, at_key(path, "node"));
            break;
        case ActionKind::Refresh:
            require_node(s, a.node, at_key(path, "node"));
            if (s.find_node(a.node)->role != NodeRole::Light) {
                throw SchemaError(at_key(path, "node"), "refresh applies to light nodes only");
            }
            break;
        case ActionKind::Confirm:
        case ActionKind::Revoke:
            require_node(s, a.node, at_key(path, "node"));
            require_node(s, a.peer, at_key(path, "subject"));
            if (a.node == a.peer) throw SchemaError(at_key(path, "subject"), "an entity cannot confirm itself");
            break;
        case ActionKind::Transfer:
            require_node(s, a.node, at_key(path, "node"));
            require_node(s, a.peer, at_key(path, "to"));
            break;
        case ActionKind::Auth:
            require_node(s, a.node, at_key(path, "verifier"));
            require_node(s, a.peer, at_key(path, "target"));
            if (a.node == a.peer) throw SchemaError(at_key(path, "target"), "verifier and target coincide");
            break;
        case ActionKind::PartitionStart: {
            std::set<NodeId> seen;
            for (std::size_t g = 0; g < a.groups.size(); ++g) {
                for (std::size_t i = 0; i < a.groups[g].size(); ++i) {
                    auto p = at_index(at_index(at_key(path, "groups"), g), i);
                    require_node(s, a.groups[g][i], p);
                    if (!seen.insert(a.groups[g][i]).second) throw SchemaError(p, "node listed in two groups");
                }
            }
            break;
        }
        case ActionKind::PartitionStop: break;
        case ActionKind::DropLink:
        case ActionKind::RestoreLink:
            require_node(s, a.node, at_key(path, "a"));
            require_node(s, a.peer, at_key(path, "b"));
            if (!s.find_link(a.node, a.peer)) throw SchemaError(path, "no such link");
            break;
    }
}

json action_json(const Action& a) {
    json j;
    j["at"] = a.at;
    j["action"] = std::string(to_string(a.kind));
    switch (a.kind) {
        case ActionKind::RegisterEntity:
            j["node"] = a.node;
            if (!a.name.empty()) j["name"] = a.name;
            if (a.entity_type) j["entity_type"] = std::string(to_string(*a.entity_type));
            break;
        case ActionKind::Confirm:
            j["node"] = a.node;
            j["subject"] = a.peer;
            j["max_path_len"] = a.max_path_len;
            break;
        case ActionKind::Revoke:
            j["node"] = a.node;
            j["subject"] = a.peer;
            break;
        case ActionKind::Transfer:
            j["node"] = a.node;
            j["to"] = a.peer;
            j["amount"] = a.amount;
            break;
        case ActionKind::Auth:
            j["verifier"] = a.node;
            j["target"] = a.peer;
            j["responder_behavior"] = std::string(to_string(a.behavior));
            if (!a.label.empty()) j["label"] = a.label;
            break;
        case ActionKind::RevokeEntity:
        case ActionKind::Refresh:
        case ActionKind::Crash:
        case ActionKind::Recover:
            j["node"] = a.node;
            break;
        case ActionKind::PartitionStart: j["groups"] = a.groups; break;
        case ActionKind::PartitionStop: break;
        case ActionKind::DropLink:
        case ActionKind::RestoreLink:
            j["a"] = a.node;
            j["b"] = a.peer;
            break;
    }
    return j;
}

}  // namespace

std::string_view to_string(ActionKind k) noexcept {
    for (const auto& [kind, name] : kActionNames) {
        if (kind == k) return name;
    }
    return "unknown";
}

std::string_view to_string(ResponderBehavior b) noexcept {
    for (const auto& [kind, name] : kBehaviorNames) {
        if (kind == b) return name;
    }
    return "unknown";
}

const NodeSpec* Scenario::find_node(NodeId id) const {
    auto it = std::find_if(nodes.begin(), nodes.end(), [&](const NodeSpec& n) { return n.id == id; });
    return it == nodes.end() ? nullptr : &*it;
}

const LinkSpec* Scenario::find_link(NodeId a, NodeId b) const {
    auto it = std::find_if(links.begin(), links.end(), [&](const LinkSpec& l) {
        return (l.a == a && l.b == b) || (l.a == b && l.b == a);
    });
    return it == links.end() ? nullptr : &*it;
}

Scenario parse_scenario(const json& doc) {
    if (!doc.is_object()) throw SchemaError("$", "scenario must be a JSON object");
    only_keys(doc, "",
              {"schema_version", "name", "seed", "duration_ms", "genesis", "topology", "workload",
               "light_refresh_interval_ms", "chain_dir"});
    Scenario s;
    s.schema_version = req_u64(doc, "schema_version", "");
    if (s.schema_version != kSchemaVersion) {
        throw SchemaError("schema_version", "unsupported version " + std::to_string(s.schema_version));
    }
    s.name = opt_string(doc, "name", "", "");
    s.seed = req_u64(doc, "seed", "");
    s.duration_ms = req_u64(doc, "duration_ms", "");
    s.light_refresh_interval_ms = opt_u64(doc, "light_refresh_interval_ms", "", 0);
    if (doc.contains("chain_dir")) s.chain_dir = req_string(doc, "chain_dir", "");
    s.genesis = parse_genesis(doc);

    const auto& topo = object_at(doc, "topology", "");
    only_keys(topo, "topology", {"nodes", "links"});
    if (!topo.contains("nodes") || !topo.at("nodes").is_array()) {
        throw SchemaError("topology.nodes", "expected an array");
    }
    const auto& nodes = topo.at("nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        auto p = at_index("topology.nodes", i);
        only_keys(nodes[i], p, {"id", "role"});
        NodeSpec n;
        n.id = req_node(nodes[i], "id", p);
        auto role = req_string(nodes[i], "role", p);
        if (role == "full") {
            n.role = NodeRole::Full;
        } else if (role == "light") {
            n.role = NodeRole::Light;
        } else {
            throw SchemaError(at_key(p, "role"), "expected 'full' or 'light'");
        }
        s.nodes.push_back(n);
    }
    if (topo.contains("links")) {
        const auto& links = topo.at("links");
        if (!links.is_array()) throw SchemaError("topology.links", "expected an array");
        for (std::size_t i = 0; i < links.size(); ++i) {
            auto p = at_index("topology.links", i);
            only_keys(links[i], p, {"a", "b", "latency", "loss"});
            LinkSpec l;
            l.a = req_node(links[i], "a", p);
            l.b = req_node(links[i], "b", p);
            l.latency = parse_latency(links[i], p);
            l.loss = probability(links[i], "loss", p);
            s.links.push_back(l);
        }
    }
    if (doc.contains("workload")) {
        const auto& w = doc.at("workload");
        if (!w.is_array()) throw SchemaError("workload", "expected an array");
        for (std::size_t i = 0; i < w.size(); ++i) s.workload.push_back(parse_action(w[i], at_index("workload", i)));
    }
    validate_scenario(s);
    return s;
}

void validate_scenario(const Scenario& s) {
    if (s.schema_version != kSchemaVersion) throw SchemaError("schema_version", "unsupported version");
    if (s.duration_ms == 0) throw SchemaError("duration_ms", "must be positive");

    std::set<NodeId> ids;
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
        if (!ids.insert(s.nodes[i].id).second) {
            throw SchemaError(at_key(at_index("topology.nodes", i), "id"), "duplicate node id");
        }
    }
    if (s.nodes.empty()) throw SchemaError("topology.nodes", "at least one node is required");

    for (std::size_t i = 0; i < s.links.size(); ++i) {
        const auto& l = s.links[i];
        auto p = at_index("topology.links", i);
        require_node(s, l.a, at_key(p, "a"));
        require_node(s, l.b, at_key(p, "b"));
        if (l.a == l.b) throw SchemaError(p, "self link");
        if (!(l.loss >= 0.0 && l.loss <= 1.0)) throw SchemaError(at_key(p, "loss"), "probability must lie in [0, 1]");
        if (l.latency.min_ms > l.latency.max_ms) throw SchemaError(at_key(p, "latency"), "min exceeds max");
        for (std::size_t j = 0; j < i; ++j) {
            const auto& o = s.links[j];
            if ((o.a == l.a && o.b == l.b) || (o.a == l.b && o.b == l.a)) throw SchemaError(p, "duplicate link");
        }
    }

    const auto& g = s.genesis;
    if (g.crypto_provider != kMockProvider && g.crypto_provider != kEdCurveProvider) {
        throw SchemaError("genesis.crypto_provider", "unknown provider '" + g.crypto_provider + "'");
    }
    if (g.global_cap == 0) throw SchemaError("genesis.global_cap", "must be positive");
    if (g.auth_ttl_ms == 0) throw SchemaError("genesis.auth_ttl_ms", "must be positive");
    if (g.max_block_txs == 0) throw SchemaError("genesis.max_block_txs", "must be positive");
    if (g.validators.empty()) throw SchemaError("genesis.validators", "at least one validator is required");
    if (g.round_length_ms < g.validators.size()) {
        throw SchemaError("genesis.round_length_ms", "must be at least the number of validators");
    }
    std::set<NodeId> vset;
    for (std::size_t i = 0; i < g.validators.size(); ++i) {
        auto p = at_index("genesis.validators", i);
        require_node(s, g.validators[i], p);
        if (s.find_node(g.validators[i])->role != NodeRole::Full) throw SchemaError(p, "validators must be full nodes");
        if (!vset.insert(g.validators[i]).second) throw SchemaError(p, "duplicate validator");
    }
    for (auto a = vset.begin(); a != vset.end(); ++a) {
        for (auto b = std::next(a); b != vset.end(); ++b) {
            if (!s.find_link(*a, *b)) {
                throw SchemaError("topology.links", "validators " + std::to_string(*a) + " and " + std::to_string(*b) +
                                                        " need a direct link");
            }
        }
    }
    for (const auto& [id, amount] : g.initial_balances) {
        require_node(s, id, "genesis.initial_balances." + std::to_string(id));
    }
    for (const auto& [id, list] : g.anchors) {
        auto p = "genesis.anchors." + std::to_string(id);
        require_node(s, id, p);
        for (std::size_t i = 0; i < list.size(); ++i) require_node(s, list[i], at_index(p, i));
    }
    for (std::size_t i = 0; i < s.workload.size(); ++i) validate_action(s, s.workload[i], at_index("workload", i));
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("$", "cannot read " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("$", std::string("invalid JSON: ") + e.what());
    }
    return parse_scenario(doc);
}

json to_json(const Scenario& s) {
    json doc;
    doc["schema_version"] = s.schema_version;
    if (!s.name.empty()) doc["name"] = s.name;
    doc["seed"] = s.seed;
    doc["duration_ms"] = s.duration_ms;
    if (s.light_refresh_interval_ms) doc["light_refresh_interval_ms"] = s.light_refresh_interval_ms;
    if (s.chain_dir) doc["chain_dir"] = *s.chain_dir;

    const auto& g = s.genesis;
    json gj;
    gj["crypto_provider"] = g.crypto_provider;
    gj["round_length_ms"] = g.round_length_ms;
    gj["global_cap"] = g.global_cap;
    gj["fee_params"] = {{"tx_fee", g.fees.tx_fee},
                        {"entity_reserve", g.fees.entity_reserve},
                        {"confirmation_reserve", g.fees.confirmation_reserve},
                        {"block_reward", g.fees.block_reward}};
    gj["max_block_txs"] = g.max_block_txs;
    gj["auth_ttl_ms"] = g.auth_ttl_ms;
    gj["initial_balances"] = json::object();
    for (const auto& [id, amount] : g.initial_balances) gj["initial_balances"][std::to_string(id)] = amount;
    gj["validators"] = g.validators;
    if (!g.anchors.empty()) {
        gj["anchors"] = json::object();
        for (const auto& [id, list] : g.anchors) gj["anchors"][std::to_string(id)] = list;
    }
    doc["genesis"] = std::move(gj);

    json nodes = json::array();
    for (const auto& n : s.nodes) nodes.push_back({{"id", n.id}, {"role", std::string(to_string(n.role))}});
    json links = json::array();
    for (const auto& l : s.links) {
        json lj{{"a", l.a}, {"b", l.b}, {"loss", l.loss}};
        if (l.latency.min_ms == l.latency.max_ms) {
            lj["latency"] = {{"fixed", l.latency.min_ms}};
        } else {
            lj["latency"] = {{"uniform", {l.latency.min_ms, l.latency.max_ms}}};
        }
        links.push_back(std::move(lj));
    }
    doc["topology"] = {{"nodes", std::move(nodes)}, {"links", std::move(links)}};

    json work = json::array();
    for (const auto& a : s.workload) work.push_back(action_json(a));
    doc["workload"] = std::move(work);
    return doc;
}

namespace {

void insert_ordered(std::vector<Action>& workload, Action a) {
    auto pos = std::upper_bound(workload.begin(), workload.end(), a.at,
                                [](std::uint64_t t, const Action& x) { return t < x.at; });
    workload.insert(pos, std::move(a));
}

}  // namespace

ScenarioBuilder& ScenarioBuilder::add_action(Action action) {
    validate_action(scenario_, action, "workload[" + std::to_string(scenario_.workload.size()) + "]");
    insert_ordered(scenario_.workload, std::move(action));
    return *this;
}

ScenarioBuilder& ScenarioBuilder::inject_fault(const Fault& fault, std::uint64_t at) {
    Action a;
    a.at = at;
    std::visit(
        [&](const auto& f) {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, CrashFault>) {
                a.kind = ActionKind::Crash;
                a.node = f.node;
            } else if constexpr (std::is_same_v<F, RecoverFault>) {
                a.kind = ActionKind::Recover;
                a.node = f.node;
            } else if constexpr (std::is_same_v<F, PartitionFault>) {
                a.kind = ActionKind::PartitionStart;
                a.groups = f.groups;
            } else if constexpr (std::is_same_v<F, HealFault>) {
                a.kind = ActionKind::PartitionStop;
            } else if constexpr (std::is_same_v<F, DropLinkFault>) {
                a.kind = ActionKind::DropLink;
                a.node = f.a;
                a.peer = f.b;
            } else {
                a.kind = ActionKind::RestoreLink;
                a.node = f.a;
                a.peer = f.b;
            }
        },
        fault);
    return add_action(std::move(a));
}

Scenario ScenarioBuilder::build() const {
    validate_scenario(scenario_);
    return scenario_;
}

}  // namespace dronechain::simnet
