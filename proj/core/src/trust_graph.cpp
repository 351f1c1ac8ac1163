#include "dronechain/trust_graph.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include <nlohmann/json.hpp>

namespace dronechain {

std::string_view to_string(EntityType t) noexcept {
    switch (t) {
        case EntityType::Drone: return "drone";
        case EntityType::GroundStation: return "ground_station";
        case EntityType::Other: return "other";
    }
    return "other";
}

std::optional<EntityType> entity_type_from_string(std::string_view s) noexcept {
    if (s == "drone") return EntityType::Drone;
    if (s == "ground_station") return EntityType::GroundStation;
    if (s == "other") return EntityType::Other;
    return std::nullopt;
}

std::optional<EntityType> entity_type_from_byte(std::uint8_t b) noexcept {
    if (b > static_cast<std::uint8_t>(EntityType::Other)) return std::nullopt;
    return static_cast<EntityType>(b);
}

std::string_view to_string(TrustReason r) noexcept {
    switch (r) {
        case TrustReason::DirectAnchor: return "DirectAnchor";
        case TrustReason::PathFound: return "PathFound";
        case TrustReason::NoPath: return "NoPath";
        case TrustReason::UnknownTarget: return "UnknownTarget";
    }
    return "NoPath";
}

void TrustGraph::add_node(EntityRecord record) {
    if (record.auth_public_key.empty()) throw GraphError("entity record without auth key");
    auto key = record.account;
    if (!nodes_.emplace(key, std::move(record)).second) throw GraphError("node already present: " + key.short_hex());
}

void TrustGraph::remove_node(const PublicKey& key) {
    if (nodes_.erase(key) == 0) throw GraphError("no such node: " + key.short_hex());
    for (const auto& [to, limit] : out_edges(key)) {
        edges_.erase({key, to});
        reverse_.erase({to, key});
    }
    for (const auto& [from, limit] : in_edges(key)) {
        edges_.erase({from, key});
        reverse_.erase({key, from});
    }
}

void TrustGraph::set_edge(const PublicKey& from, const PublicKey& to, std::uint8_t max_path_len) {
    if (max_path_len == 0) throw GraphError("edge limit must be at least 1");
    if (from == to) throw GraphError("self-edges are not allowed");
    if (!has_node(from) || !has_node(to)) throw GraphError("edge endpoint missing");
    edges_[{from, to}] = max_path_len;
    reverse_[{to, from}] = max_path_len;
}

void TrustGraph::remove_edge(const PublicKey& from, const PublicKey& to) {
    if (edges_.erase({from, to}) == 0) throw GraphError("no such edge");
    reverse_.erase({to, from});
}

const EntityRecord* TrustGraph::find_node(const PublicKey& key) const {
    auto it = nodes_.find(key);
    return it == nodes_.end() ? nullptr : &it->second;
}

std::optional<std::uint8_t> TrustGraph::edge_limit(const PublicKey& from, const PublicKey& to) const {
    auto it = edges_.find({from, to});
    if (it == edges_.end()) return std::nullopt;
    return it->second;
}

namespace {

std::vector<std::pair<PublicKey, std::uint8_t>> adjacent(const std::map<EdgeKey, std::uint8_t>& index,
                                                         const PublicKey& key) {
    std::vector<std::pair<PublicKey, std::uint8_t>> out;
    // Empty key sorts before every real key sharing the same first component.
    for (auto it = index.lower_bound({key, PublicKey{}}); it != index.end() && it->first.first == key; ++it) {
        out.emplace_back(it->first.second, it->second);
    }
    return out;
}

}  // namespace

std::vector<std::pair<PublicKey, std::uint8_t>> TrustGraph::out_edges(const PublicKey& from) const {
    return adjacent(edges_, from);
}

std::vector<std::pair<PublicKey, std::uint8_t>> TrustGraph::in_edges(const PublicKey& to) const {
    return adjacent(reverse_, to);
}

TrustDecision evaluate_trust(const TrustGraph& graph, const AnchorSet& anchors, const PublicKey& target,
                             std::uint8_t global_cap) {
    if (anchors.empty()) throw std::invalid_argument("anchor set is empty");
    if (global_cap == 0) throw std::invalid_argument("global cap must be at least 1");

    if (anchors.contains(target)) return {true, {}, TrustReason::DirectAnchor};
    if (!graph.has_node(target)) return {false, {}, TrustReason::UnknownTarget};

    // remaining[u] = fewest hops of a valid suffix u -> ... -> target. Using
    // the fewest hops at the successor is always optimal: a smaller remainder
    // both shortens the path and relaxes the limit required of the new edge.
    std::map<PublicKey, unsigned> remaining;
    remaining[target] = 0;
    std::deque<PublicKey> frontier{target};
    while (!frontier.empty()) {
        auto node = std::move(frontier.front());
        frontier.pop_front();
        unsigned hops = remaining[node] + 1;
        if (hops > global_cap) continue;
        for (const auto& [pred, limit] : graph.in_edges(node)) {
            if (limit < hops || remaining.contains(pred)) continue;
            remaining[pred] = hops;
            frontier.push_back(pred);
        }
    }

    const PublicKey* start = nullptr;
    unsigned best = global_cap + 1u;
    for (const auto& a : anchors) {
        auto it = remaining.find(a);
        if (it != remaining.end() && it->second < best) {
            best = it->second;
            start = &it->first;
        }
    }
    if (start == nullptr) return {false, {}, TrustReason::NoPath};

    // Greedy walk picks the lexicographically smallest successor that stays
    // on a shortest valid path; remaining strictly decreases, so the path is
    // simple.
    TrustDecision decision{true, {*start}, TrustReason::PathFound};
    PublicKey current = *start;
    for (unsigned left = best; left > 0; --left) {
        for (const auto& [next, limit] : graph.out_edges(current)) {
            auto it = remaining.find(next);
            if (limit >= left && it != remaining.end() && it->second == left - 1) {
                current = next;
                break;
            }
        }
        decision.witness_path.push_back(current);
    }
    return decision;
}

namespace {

struct SubgraphWalker {
    const TrustGraph& graph;
    std::uint8_t cap;
    std::set<PublicKey> on_path;
    std::set<PublicKey> nodes;
    std::set<EdgeKey> edges;

    // slack = how many further hops the prefix ending at `node` tolerates.
    void walk(const PublicKey& node, unsigned depth, unsigned slack) {
        if (slack == 0 || depth >= cap) return;
        for (const auto& [next, limit] : graph.out_edges(node)) {
            if (on_path.contains(next)) continue;
            edges.insert({node, next});
            nodes.insert(next);
            on_path.insert(next);
            walk(next, depth + 1, std::min<unsigned>(slack - 1, limit - 1u));
            on_path.erase(next);
        }
    }
};

}  // namespace

TrustGraph relevant_subgraph(const TrustGraph& graph, const AnchorSet& anchors, std::uint8_t global_cap) {
    if (anchors.empty()) throw std::invalid_argument("anchor set is empty");
    if (global_cap == 0) throw std::invalid_argument("global cap must be at least 1");

    SubgraphWalker walker{graph, global_cap, {}, {}, {}};
    for (const auto& a : anchors) {
        if (!graph.has_node(a)) continue;
        walker.nodes.insert(a);
        walker.on_path = {a};
        walker.walk(a, 0, global_cap);
    }

    TrustGraph out;
    for (const auto& key : walker.nodes) out.add_node(*graph.find_node(key));
    for (const auto& [from, to] : walker.edges) out.set_edge(from, to, *graph.edge_limit(from, to));
    return out;
}

namespace {

std::string dot_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

}  // namespace

std::string to_dot(const TrustGraph& graph) {
    std::ostringstream os;
    os << "digraph trust {\n";
    for (const auto& [key, rec] : graph.nodes()) {
        os << "  \"" << key.short_hex() << "\" [label=\"" << dot_escape(rec.identity_name) << "\\n"
           << to_string(rec.entity_type) << "\"];\n";
    }
    for (const auto& [edge, limit] : graph.edges()) {
        os << "  \"" << edge.first.short_hex() << "\" -> \"" << edge.second.short_hex() << "\" [label=\""
           << static_cast<unsigned>(limit) << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

nlohmann::json to_json(const TrustGraph& graph) {
    auto nodes = nlohmann::json::array();
    for (const auto& [key, rec] : graph.nodes()) {
        nodes.push_back({{"account", key.hex()},
                         {"name", rec.identity_name},
                         {"type", to_string(rec.entity_type)},
                         {"auth_public_key", to_hex(rec.auth_public_key)}});
    }
    auto edges = nlohmann::json::array();
    for (const auto& [edge, limit] : graph.edges()) {
        edges.push_back({{"from", edge.first.hex()}, {"to", edge.second.hex()}, {"max_path_len", limit}});
    }
    return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

}  // namespace dronechain
