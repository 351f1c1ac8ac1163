#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "dronechain/node.hpp"
#include "dronechain/state.hpp"
#include "dronechain/trust_graph.hpp"

namespace dronechain::simnet {

inline constexpr std::uint64_t kSchemaVersion = 1;

// Raised before a simulation starts; `field` is a JSON path such as
// "workload[3].node".
class SchemaError : public std::runtime_error {
public:
    SchemaError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct Latency {
    std::uint64_t min_ms = 0;
    std::uint64_t max_ms = 0;  // equal to min_ms for a fixed latency
    friend bool operator==(const Latency&, const Latency&) = default;
};

struct LinkSpec {
    NodeId a = 0;
    NodeId b = 0;
    Latency latency;
    double loss = 0.0;
    friend bool operator==(const LinkSpec&, const LinkSpec&) = default;
};

struct NodeSpec {
    NodeId id = 0;
    NodeRole role = NodeRole::Full;
    friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

struct GenesisSpec {
    std::string crypto_provider{kMockProvider};
    std::uint64_t round_length_ms = 1000;
    std::uint8_t global_cap = kDefaultGlobalCap;
    FeeParams fees;
    std::size_t max_block_txs = 100;
    std::uint64_t auth_ttl_ms = 5000;
    std::map<NodeId, std::uint64_t> initial_balances;
    std::vector<NodeId> validators;
    // Missing entries default to the validator set.
    std::map<NodeId, std::vector<NodeId>> anchors;
    friend bool operator==(const GenesisSpec&, const GenesisSpec&) = default;
};

enum class ActionKind : std::uint8_t {
    RegisterEntity,
    Confirm,
    Revoke,
    RevokeEntity,
    Transfer,
    Auth,
    Refresh,
    Crash,
    Recover,
    PartitionStart,
    PartitionStop,
    DropLink,
    RestoreLink,
};

std::string_view to_string(ActionKind k) noexcept;

enum class ResponderBehavior : std::uint8_t { Honest, WrongKey, WrongNonce };

std::string_view to_string(ResponderBehavior b) noexcept;

// One scripted workload step. Which fields matter depends on `kind`:
//   register_entity: node, name, entity_type
//   confirm:         node, peer (subject), max_path_len
//   revoke:          node, peer (subject)
//   revoke_entity, refresh, crash, recover: node
//   transfer:        node, peer (recipient), amount
//   auth:            node (verifier), peer (target), behavior, label
//   partition_start: groups
//   drop_link, restore_link: node, peer
struct Action {
    std::uint64_t at = 0;
    ActionKind kind = ActionKind::RegisterEntity;
    NodeId node = 0;
    NodeId peer = 0;
    std::uint8_t max_path_len = 1;
    std::uint64_t amount = 0;
    std::string name;
    std::optional<EntityType> entity_type;
    ResponderBehavior behavior = ResponderBehavior::Honest;
    std::string label;
    std::vector<std::vector<NodeId>> groups;
    friend bool operator==(const Action&, const Action&) = default;
};

struct Scenario {
    std::uint64_t schema_version = kSchemaVersion;
    std::string name;
    std::uint64_t seed = 0;
    std::uint64_t duration_ms = 0;
    GenesisSpec genesis;
    std::vector<NodeSpec> nodes;
    std::vector<LinkSpec> links;
    std::vector<Action> workload;
    std::uint64_t light_refresh_interval_ms = 0;  // 0: refresh only when scripted
    std::optional<std::string> chain_dir;          // where full nodes persist their chains

    const NodeSpec* find_node(NodeId id) const;
    const LinkSpec* find_link(NodeId a, NodeId b) const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Throws SchemaError naming the offending field.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& path);
void validate_scenario(const Scenario& scenario);
nlohmann::json to_json(const Scenario& scenario);

struct CrashFault {
    NodeId node = 0;
};
struct RecoverFault {
    NodeId node = 0;
};
struct PartitionFault {
    std::vector<std::vector<NodeId>> groups;
};
struct HealFault {};
struct DropLinkFault {
    NodeId a = 0;
    NodeId b = 0;
};
struct RestoreLinkFault {
    NodeId a = 0;
    NodeId b = 0;
};

using Fault = std::variant<CrashFault, RecoverFault, PartitionFault, HealFault, DropLinkFault, RestoreLinkFault>;

class ScenarioBuilder {
public:
    explicit ScenarioBuilder(Scenario base) : scenario_(std::move(base)) {}

    // Appends the fault to the workload, keeping it ordered by time.
    // Throws SchemaError for unknown nodes or links and times past the end.
    ScenarioBuilder& inject_fault(const Fault& fault, std::uint64_t at);
    ScenarioBuilder& add_action(Action action);

    const Scenario& scenario() const noexcept { return scenario_; }
    Scenario build() const;

private:
    Scenario scenario_;
};

}  // namespace dronechain::simnet
