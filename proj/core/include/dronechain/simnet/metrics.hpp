#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dronechain/node.hpp"

namespace dronechain::simnet {

// Rejection reasons reported by the simulator: the verifier's decisions plus
// NoPeer for attempts that never reached a responder.
inline constexpr std::string_view kRejectionReasons[] = {"Untrusted", "BadSignature", "Expired", "WrongTarget",
                                                         "NoPeer"};

struct LatencySummary {
    std::uint64_t count = 0;
    std::optional<std::uint64_t> median;
    std::optional<std::uint64_t> p95;
    std::optional<std::uint64_t> max;
    friend bool operator==(const LatencySummary&, const LatencySummary&) = default;
};

// Nearest-rank percentiles.
LatencySummary summarize(std::vector<std::uint64_t> samples);

struct AuthCounts {
    std::uint64_t attempts = 0;
    std::uint64_t accepted = 0;
    std::map<std::string, std::uint64_t> rejected_by_reason;

    AuthCounts();
    void record(bool accepted, std::string_view reason);
    std::uint64_t rejected() const noexcept;
    // nullopt for 0/0.
    std::optional<double> probability() const noexcept;
    friend bool operator==(const AuthCounts&, const AuthCounts&) = default;
};

struct Confusion {
    std::uint64_t honest_accepted = 0;
    std::uint64_t honest_rejected = 0;
    std::uint64_t attacker_accepted = 0;
    std::uint64_t attacker_rejected = 0;
    friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct NodeMetrics {
    NodeId id = 0;
    NodeRole role = NodeRole::Full;
    bool up = true;
    std::uint64_t height = 0;
    std::string state_digest;  // ledger state for full nodes, local view for light nodes
    std::uint64_t messages_sent = 0;
    std::uint64_t messages_received = 0;
    std::uint64_t bytes_sent = 0;
    std::uint64_t signatures_created = 0;
    std::uint64_t signatures_verified = 0;
    std::uint64_t hashes_computed = 0;
    std::uint64_t restarts = 0;
    NodeCounters counters;
    friend bool operator==(const NodeMetrics&, const NodeMetrics&) = default;
};

struct MetricsReport {
    std::string scenario;
    std::uint64_t seed = 0;
    std::uint64_t duration_ms = 0;
    std::string provider;

    AuthCounts auth;
    std::map<std::string, AuthCounts> auth_by_label;
    Confusion confusion;
    LatencySummary auth_latency;

    std::uint64_t tx_submitted = 0;
    std::uint64_t tx_rejected = 0;
    std::uint64_t tx_committed = 0;
    LatencySummary tx_commit_latency;

    std::uint64_t messages_sent = 0;
    std::uint64_t messages_delivered = 0;
    std::uint64_t messages_lost = 0;
    std::uint64_t messages_in_flight = 0;
    std::uint64_t bytes_sent = 0;
    std::uint64_t malformed_messages = 0;

    std::uint64_t signatures_created = 0;
    std::uint64_t signatures_verified = 0;
    std::uint64_t hashes_computed = 0;

    std::uint64_t restarts = 0;
    std::uint64_t restart_digest_mismatches = 0;

    std::vector<NodeMetrics> nodes;

    // Wall clock; the only field allowed to differ between identical runs.
    double running_time_ms = 0.0;
};

inline constexpr std::string_view kWallClockField = "running_time_ms";

nlohmann::json to_json(const MetricsReport& report);
std::string to_csv(const MetricsReport& report);
// The report with the wall-clock field removed, serialized.
std::string deterministic_dump(const nlohmann::json& report);

}  // namespace dronechain::simnet
