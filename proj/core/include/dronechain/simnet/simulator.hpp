#pragma once

#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "dronechain/node.hpp"
#include "dronechain/simnet/metrics.hpp"
#include "dronechain/simnet/scenario.hpp"

namespace dronechain::simnet {

struct AuthOutcome {
    std::uint64_t attempt = 0;
    NodeId verifier = 0;
    NodeId target = 0;
    std::string label;
    ResponderBehavior behavior = ResponderBehavior::Honest;
    std::uint64_t started = 0;
    std::uint64_t finished = 0;
    bool accepted = false;
    std::string reason;  // AuthReason name or "NoPeer"
};

struct SimOptions {
    std::ostream* trace = nullptr;  // JSON lines, one event per line
};

// Keys are a pure function of (provider, master seed, node id).
KeyPair account_keypair(const Provider& crypto, std::uint64_t seed, NodeId id);
KeyPair auth_keypair(const Provider& crypto, std::uint64_t seed, NodeId id);

// Discrete-event run of a scenario. Time is virtual (ms); events with equal
// timestamps run in insertion order. Each link draws loss and latency from
// its own rng streams derived from the master seed, so adding a link leaves
// the draws of every other link unchanged.
class Simulation {
public:
    explicit Simulation(Scenario scenario, SimOptions options = {});
    ~Simulation();
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    // Processes every event up to and including `t`.
    void run_until(std::uint64_t t);
    // Runs to the scenario's duration and closes open auth attempts as
    // Expired. Idempotent.
    void run();

    std::uint64_t now() const noexcept;
    const Scenario& scenario() const noexcept;
    std::vector<NodeId> node_ids() const;
    const Node& node(NodeId id) const;
    bool is_up(NodeId id) const;
    const KeyPair& account(NodeId id) const;
    const std::vector<AuthOutcome>& auth_outcomes() const noexcept;

    MetricsReport report() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Throws SchemaError if the scenario is invalid.
MetricsReport run_scenario(const Scenario& scenario, const SimOptions& options = {});

}  // namespace dronechain::simnet
