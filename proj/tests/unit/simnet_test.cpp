#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dronechain/simnet/simulator.hpp"
#include "support.hpp"

using namespace dctest;
using namespace dronechain::simnet;
using nlohmann::json;

namespace {

// Validators 0..full-1 and light nodes after them, fully meshed. Every node
// registers, validator 0 confirms each light node, and light nodes refresh
// and authenticate the next light node periodically.
json fleet_doc(std::size_t full, std::size_t light, double loss, std::uint64_t seed, std::uint64_t duration = 16000) {
    json nodes = json::array(), links = json::array(), balances = json::object(), validators = json::array();
    const auto n = full + light;
    for (std::size_t i = 0; i < n; ++i) {
        nodes.push_back({{"id", i}, {"role", i < full ? "full" : "light"}});
        balances[std::to_string(i)] = 500;
        if (i < full) validators.push_back(i);
    }
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            links.push_back({{"a", a}, {"b", b}, {"latency", {{"uniform", {5, 40}}}}, {"loss", loss}});
        }
    }
    json workload = json::array();
    for (std::size_t i = 0; i < n; ++i) workload.push_back({{"at", 100}, {"action", "register_entity"}, {"node", i}});
    for (std::size_t l = full; l < n; ++l) {
        workload.push_back({{"at", 2100}, {"action", "confirm"}, {"node", 0}, {"subject", l}, {"max_path_len", 2}});
    }
    for (std::uint64_t t = 6000; t + 2000 < duration; t += 2000) {
        for (std::size_t l = full; l < n; ++l) {
            const auto target = l + 1 < n ? l + 1 : (light > 1 ? full : 1);
            workload.push_back({{"at", t}, {"action", "refresh"}, {"node", l}});
            workload.push_back(
                {{"at", t + 500}, {"action", "auth"}, {"verifier", l}, {"target", target}, {"label", "fleet"}});
        }
    }
    return {{"schema_version", 1},
            {"name", "fleet"},
            {"seed", seed},
            {"duration_ms", duration},
            {"genesis", {{"crypto_provider", "mock"}, {"initial_balances", balances}, {"validators", validators}}},
            {"topology", {{"nodes", nodes}, {"links", links}}},
            {"workload", workload}};
}

Scenario fleet(std::size_t full, std::size_t light, double loss, std::uint64_t seed, std::uint64_t duration = 16000) {
    return parse_scenario(fleet_doc(full, light, loss, seed, duration));
}

std::string schema_field(const json& doc) {
    try {
        (void)parse_scenario(doc);
    } catch (const SchemaError& e) {
        return e.field();
    }
    return "<accepted>";
}

Scenario shipped(const std::string& name) { return load_scenario(scenarios_dir() / (name + ".json")); }

std::string dump(const MetricsReport& r) { return deterministic_dump(to_json(r)); }

}  // namespace

TEST(Schema, ErrorsNameTheField) {
    const auto good = fleet_doc(3, 2, 0.0, 1);
    EXPECT_EQ(schema_field(good), "<accepted>");

    auto d = good;
    d.erase("schema_version");
    EXPECT_EQ(schema_field(d), "schema_version");
    d = good;
    d["schema_version"] = 2;
    EXPECT_EQ(schema_field(d), "schema_version");
    d = good;
    d["duration_ms"] = "long";
    EXPECT_EQ(schema_field(d), "duration_ms");
    d = good;
    d["workload"][3]["node"] = 99;
    EXPECT_EQ(schema_field(d), "workload[3].node");
    d = good;
    d["workload"][0]["action"] = "teleport";
    EXPECT_EQ(schema_field(d), "workload[0].action");
    d = good;
    d["topology"]["links"][1]["loss"] = 1.5;
    EXPECT_EQ(schema_field(d), "topology.links[1].loss");
    d = good;
    d["genesis"]["crypto_provider"] = "rot13";
    EXPECT_EQ(schema_field(d), "genesis.crypto_provider");
    d = good;
    d["genesis"]["validators"] = json::array({3});  // a light node
    EXPECT_EQ(schema_field(d).rfind("genesis.validators", 0), 0u);
}

TEST(Schema, ShippedScenariosRoundTrip) {
    for (const auto* name : {"happy_path", "revocation", "partition", "validator_crash", "lossy_fleet"}) {
        auto s = shipped(name);
        EXPECT_EQ(parse_scenario(to_json(s)), s) << name;
    }
}

TEST(Schema, BuilderRejectsUnknownNodesAndLateFaults) {
    ScenarioBuilder b(fleet(3, 1, 0.0, 1));
    EXPECT_THROW(b.inject_fault(CrashFault{9}, 100), SchemaError);
    EXPECT_THROW(b.inject_fault(CrashFault{1}, 1'000'000), SchemaError);
    EXPECT_THROW(b.inject_fault(DropLinkFault{0, 9}, 100), SchemaError);
    EXPECT_NO_THROW(b.inject_fault(CrashFault{1}, 100));
    const auto s = b.build();
    EXPECT_TRUE(std::is_sorted(s.workload.begin(), s.workload.end(),
                               [](const Action& x, const Action& y) { return x.at < y.at; }));
}

TEST(Simulation, SameSeedSameReport) {
    const auto s = fleet(3, 3, 0.2, 42);
    EXPECT_EQ(dump(run_scenario(s)), dump(run_scenario(s)));
    auto other = s;
    other.seed = 43;
    EXPECT_NE(dump(run_scenario(s)), dump(run_scenario(other)));
}

TEST(Simulation, ReplicasConvergeWithoutLoss) {
    Simulation sim(fleet(4, 2, 0.0, 7));
    sim.run();
    const auto& ref = sim.node(0);
    EXPECT_GT(ref.height(), 10u);
    for (NodeId id : {1u, 2u, 3u}) {
        EXPECT_EQ(sim.node(id).height(), ref.height());
        EXPECT_EQ(sim.node(id).state_digest(), ref.state_digest());
    }
    const auto r = sim.report();
    for (const auto& o : sim.auth_outcomes()) {
        EXPECT_TRUE(o.accepted) << o.verifier << "->" << o.target << " " << o.reason;
    }
    EXPECT_EQ(r.auth.probability(), 1.0);
    EXPECT_GT(r.auth.attempts, 0u);
}

TEST(Simulation, ShippedExamples) {
    auto happy = run_scenario(shipped("happy_path"));
    EXPECT_EQ(happy.auth.probability(), 1.0);

    auto rev = run_scenario(shipped("revocation"));
    ASSERT_TRUE(rev.auth_by_label.contains("before"));
    ASSERT_TRUE(rev.auth_by_label.contains("after"));
    EXPECT_EQ(rev.auth_by_label["before"].probability(), 1.0);
    EXPECT_EQ(rev.auth_by_label["after"].probability(), 0.0);
    EXPECT_EQ(rev.auth_by_label["after"].rejected_by_reason["Untrusted"], rev.auth_by_label["after"].attempts);
}

TEST(Simulation, TotalLossNeverAuthenticates) {
    auto r = run_scenario(fleet(3, 2, 1.0, 5));
    ASSERT_GT(r.auth.attempts, 0u);
    EXPECT_EQ(r.auth.accepted, 0u);
    EXPECT_EQ(r.auth.rejected_by_reason["NoPeer"] + r.auth.rejected_by_reason["Expired"], r.auth.attempts);
    EXPECT_EQ(r.messages_delivered, 0u);
}

TEST(Faults, OneCrashedValidatorOfFourKeepsCommitting) {
    auto s = ScenarioBuilder(fleet(4, 0, 0.0, 3, 30000)).inject_fault(CrashFault{3}, 0).build();
    Simulation sim(s);
    sim.run();
    EXPECT_FALSE(sim.is_up(3));
    // Genesis opens round 1; one height per round from there on.
    EXPECT_GE(sim.node(0).height(), 28u);
    const auto& commits = sim.node(0).commits();
    for (std::size_t i = 1; i < commits.size(); ++i) {
        EXPECT_EQ(commits[i].time / 1000, commits[i - 1].time / 1000 + 1) << "height " << commits[i].height;
    }
}

TEST(Faults, TwoCrashedValidatorsOfFourHalt) {
    auto s = ScenarioBuilder(fleet(4, 0, 0.0, 3, 10000))
                 .inject_fault(CrashFault{2}, 0)
                 .inject_fault(CrashFault{3}, 0)
                 .build();
    Simulation sim(s);
    sim.run();
    EXPECT_EQ(sim.node(0).height(), 0u);
    EXPECT_EQ(sim.node(1).height(), 0u);
}

TEST(Faults, CrashAndRecoverRestoresFromDisk) {
    auto s = ScenarioBuilder(fleet(4, 1, 0.0, 8, 20000))
                 .inject_fault(CrashFault{2}, 5000)
                 .inject_fault(RecoverFault{2}, 9000)
                 .build();
    Simulation sim(s);
    sim.run();
    const auto r = sim.report();
    EXPECT_EQ(r.restarts, 1u);
    EXPECT_EQ(r.restart_digest_mismatches, 0u);
    EXPECT_EQ(sim.node(2).height(), sim.node(0).height());
    EXPECT_EQ(sim.node(2).state_digest(), sim.node(0).state_digest());
}

TEST(Faults, PartitionFailsThenRecovers) {
    auto r = run_scenario(shipped("partition"));
    EXPECT_EQ(r.auth_by_label["before"].probability(), 1.0);
    EXPECT_EQ(r.auth_by_label["during"].accepted, 0u);
    EXPECT_EQ(r.auth_by_label["after"].probability(), 1.0);
}

TEST(Metrics, Reconcile) {
    for (double loss : {0.0, 0.3, 1.0}) {
        auto r = run_scenario(fleet(3, 3, loss, 9));
        EXPECT_EQ(r.messages_sent, r.messages_delivered + r.messages_lost + r.messages_in_flight) << loss;
        EXPECT_EQ(r.auth.attempts, r.auth.accepted + r.auth.rejected()) << loss;
        std::uint64_t by_label = 0, sent = 0, bytes = 0;
        for (const auto& [_, c] : r.auth_by_label) by_label += c.attempts;
        for (const auto& n : r.nodes) {
            sent += n.messages_sent;
            bytes += n.bytes_sent;
        }
        EXPECT_EQ(by_label, r.auth.attempts);
        EXPECT_EQ(sent, r.messages_sent);
        EXPECT_EQ(bytes, r.bytes_sent);
        const auto& c = r.confusion;
        EXPECT_EQ(c.honest_accepted + c.honest_rejected + c.attacker_accepted + c.attacker_rejected, r.auth.attempts);
    }
}

TEST(Metrics, ReportJsonAndCsv) {
    auto r = run_scenario(fleet(3, 1, 0.0, 2, 8000));
    auto j = to_json(r);
    EXPECT_TRUE(j.contains(std::string(kWallClockField)));
    EXPECT_EQ(j.at("auth").at("attempts").get<std::uint64_t>(), r.auth.attempts);
    EXPECT_EQ(deterministic_dump(j).find(std::string(kWallClockField)), std::string::npos);
    const auto csv = to_csv(r);
    EXPECT_NE(csv.find("messages_sent"), std::string::npos);
}

TEST(Metrics, LatencySummaryNearestRank) {
    auto s = summarize({5, 1, 4, 2, 3});
    EXPECT_EQ(s.count, 5u);
    EXPECT_EQ(s.median, 3u);
    EXPECT_EQ(s.p95, 5u);
    EXPECT_EQ(s.max, 5u);
    std::vector<std::uint64_t> hundred(100);
    for (std::uint64_t i = 0; i < 100; ++i) hundred[i] = i + 1;
    s = summarize(hundred);
    EXPECT_EQ(s.median, 50u);
    EXPECT_EQ(s.p95, 95u);
    EXPECT_EQ(summarize({}).median, std::nullopt);
}

// Averaged over seeds, more loss never helps.
TEST(Metrics, DegradesMonotonicallyWithLoss) {
    const std::vector<double> losses{0.0, 0.2, 0.4, 0.6, 0.8};
    std::vector<double> mean;
    for (double loss : losses) {
        double sum = 0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            sum += run_scenario(fleet(3, 3, loss, seed)).auth.probability().value_or(0.0);
        }
        mean.push_back(sum / 20);
    }
    for (std::size_t i = 1; i < mean.size(); ++i) EXPECT_LE(mean[i], mean[i - 1] + 1e-9) << losses[i];
    EXPECT_EQ(mean.front(), 1.0);
    EXPECT_LT(mean.back(), 0.5);
}

TEST(Simulation, TraceIsJsonLines) {
    std::ostringstream trace;
    SimOptions o;
    o.trace = &trace;
    (void)run_scenario(fleet(3, 1, 0.1, 4, 6000), o);
    std::istringstream in(trace.str());
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) {
        auto j = json::parse(line);
        EXPECT_TRUE(j.contains("t"));
        ++lines;
    }
    EXPECT_GT(lines, 10u);
}

TEST(Simulation, KeysArePureFunctionsOfSeedAndId) {
    auto s = fleet(3, 1, 0.0, 77, 4000);
    Simulation sim(s);
    for (NodeId id : sim.node_ids()) {
        EXPECT_EQ(sim.account(id).public_key, account_keypair(*mock(), 77, id).public_key);
        EXPECT_NE(account_keypair(*mock(), 77, id).public_key, auth_keypair(*mock(), 77, id).public_key);
    }
}
