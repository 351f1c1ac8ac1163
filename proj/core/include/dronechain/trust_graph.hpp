#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dronechain/crypto.hpp"

namespace dronechain {

enum class EntityType : std::uint8_t { Drone = 0, GroundStation = 1, Other = 2 };

std::string_view to_string(EntityType t) noexcept;
std::optional<EntityType> entity_type_from_string(std::string_view s) noexcept;
std::optional<EntityType> entity_type_from_byte(std::uint8_t b) noexcept;

struct EntityRecord {
    PublicKey account;
    Bytes auth_public_key;
    std::string identity_name;
    EntityType entity_type = EntityType::Other;

    friend bool operator==(const EntityRecord&, const EntityRecord&) = default;
};

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using EdgeKey = std::pair<PublicKey, PublicKey>;

inline constexpr std::uint8_t kDefaultGlobalCap = 6;

// Identity/key records connected by confirmation edges, each edge carrying
// the maximal allowed path length. A plain value: copies are snapshots.
class TrustGraph {
public:
    void add_node(EntityRecord record);
    // Removes the node and every incident edge.
    void remove_node(const PublicKey& key);
    // Inserts or replaces the edge limit. Both endpoints must exist.
    void set_edge(const PublicKey& from, const PublicKey& to, std::uint8_t max_path_len);
    void remove_edge(const PublicKey& from, const PublicKey& to);

    bool has_node(const PublicKey& key) const { return nodes_.contains(key); }
    const EntityRecord* find_node(const PublicKey& key) const;
    std::optional<std::uint8_t> edge_limit(const PublicKey& from, const PublicKey& to) const;

    std::vector<std::pair<PublicKey, std::uint8_t>> out_edges(const PublicKey& from) const;
    std::vector<std::pair<PublicKey, std::uint8_t>> in_edges(const PublicKey& to) const;

    const std::map<PublicKey, EntityRecord>& nodes() const noexcept { return nodes_; }
    const std::map<EdgeKey, std::uint8_t>& edges() const noexcept { return edges_; }

    friend bool operator==(const TrustGraph& a, const TrustGraph& b) {
        return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
    }

private:
    std::map<PublicKey, EntityRecord> nodes_;
    std::map<EdgeKey, std::uint8_t> edges_;
    // (to, from) -> limit, mirrors edges_ for backward traversal.
    std::map<EdgeKey, std::uint8_t> reverse_;
};

enum class TrustReason : std::uint8_t { DirectAnchor, PathFound, NoPath, UnknownTarget };

std::string_view to_string(TrustReason r) noexcept;

struct TrustDecision {
    bool trusted = false;
    // anchor ... target; empty for DirectAnchor and for untrusted decisions.
    std::vector<PublicKey> witness_path;
    TrustReason reason = TrustReason::NoPath;

    friend bool operator==(const TrustDecision&, const TrustDecision&) = default;
};

using AnchorSet = std::set<PublicKey>;

// A path a0 -> ... -> ak is valid when a0 is an anchor, ak is the target,
// k <= global_cap, no node repeats, and the i-th edge (1-based) has a limit
// of at least k - i + 1: every edge must cover the hops from itself through
// the target. Among valid paths the shortest wins, ties broken by comparing
// node keys lexicographically along the path.
//
// Throws std::invalid_argument when anchors is empty or global_cap is 0.
TrustDecision evaluate_trust(const TrustGraph& graph, const AnchorSet& anchors, const PublicKey& target,
                             std::uint8_t global_cap = kDefaultGlobalCap);

// Every node and edge lying on at least one valid path from an anchor, plus
// the anchors that are registered nodes. Evaluating trust on the result gives
// the same decision as on the full graph for every target.
TrustGraph relevant_subgraph(const TrustGraph& graph, const AnchorSet& anchors,
                             std::uint8_t global_cap = kDefaultGlobalCap);

std::string to_dot(const TrustGraph& graph);
nlohmann::json to_json(const TrustGraph& graph);

}  // namespace dronechain
