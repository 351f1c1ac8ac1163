#include "dronechain/simnet/metrics.hpp"

#include <algorithm>
#include <sstream>

namespace dronechain::simnet {

using nlohmann::json;

namespace {

std::uint64_t nearest_rank(const std::vector<std::uint64_t>& sorted, std::uint64_t percent) {
    auto rank = (percent * sorted.size() + 99) / 100;
    return sorted[std::max<std::uint64_t>(rank, 1) - 1];
}

json opt(const std::optional<std::uint64_t>& v) {
    return v ? json(*v) : json(nullptr);
}

json latency_json(const LatencySummary& l) {
    return {{"count", l.count}, {"median", opt(l.median)}, {"p95", opt(l.p95)}, {"max", opt(l.max)}};
}

json counts_json(const AuthCounts& c) {
    auto p = c.probability();
    return {{"attempts", c.attempts},
            {"accepted", c.accepted},
            {"rejected_by_reason", c.rejected_by_reason},
            {"probability_of_authentication", p ? json(*p) : json(nullptr)}};
}

}  // namespace

LatencySummary summarize(std::vector<std::uint64_t> samples) {
    LatencySummary s;
    s.count = samples.size();
    if (samples.empty()) return s;
    std::sort(samples.begin(), samples.end());
    s.median = nearest_rank(samples, 50);
    s.p95 = nearest_rank(samples, 95);
    s.max = samples.back();
    return s;
}

AuthCounts::AuthCounts() {
    for (auto r : kRejectionReasons) rejected_by_reason[std::string(r)] = 0;
}

void AuthCounts::record(bool ok, std::string_view reason) {
    ++attempts;
    if (ok) {
        ++accepted;
    } else {
        ++rejected_by_reason[std::string(reason)];
    }
}

std::uint64_t AuthCounts::rejected() const noexcept {
    std::uint64_t n = 0;
    for (const auto& [r, c] : rejected_by_reason) n += c;
    return n;
}

std::optional<double> AuthCounts::probability() const noexcept {
    if (attempts == 0) return std::nullopt;
    return static_cast<double>(accepted) / static_cast<double>(attempts);
}

json to_json(const MetricsReport& r) {
    json doc;
    doc["scenario"] = r.scenario;
    doc["seed"] = r.seed;
    doc["duration_ms"] = r.duration_ms;
    doc["provider"] = r.provider;

    auto auth = counts_json(r.auth);
    auth["latency"] = latency_json(r.auth_latency);
    auth["by_label"] = json::object();
    for (const auto& [label, c] : r.auth_by_label) auth["by_label"][label] = counts_json(c);
    auth["confusion"] = {{"honest_accepted", r.confusion.honest_accepted},
                         {"honest_rejected", r.confusion.honest_rejected},
                         {"attacker_accepted", r.confusion.attacker_accepted},
                         {"attacker_rejected", r.confusion.attacker_rejected}};
    doc["auth"] = std::move(auth);

    doc["transactions"] = {{"submitted", r.tx_submitted},
                           {"rejected", r.tx_rejected},
                           {"committed", r.tx_committed},
                           {"commit_latency", latency_json(r.tx_commit_latency)}};
    doc["messages"] = {{"sent", r.messages_sent},
                       {"delivered", r.messages_delivered},
                       {"lost", r.messages_lost},
                       {"in_flight", r.messages_in_flight},
                       {"bytes_sent", r.bytes_sent},
                       {"malformed", r.malformed_messages}};
    doc["energy"] = {{"signatures_created", r.signatures_created},
                     {"signatures_verified", r.signatures_verified},
                     {"hashes_computed", r.hashes_computed}};
    doc["restarts"] = {{"count", r.restarts}, {"digest_mismatches", r.restart_digest_mismatches}};

    json nodes = json::array();
    json heights = json::object();
    for (const auto& n : r.nodes) {
        heights[std::to_string(n.id)] = n.height;
        nodes.push_back({{"id", n.id},
                         {"role", std::string(to_string(n.role))},
                         {"up", n.up},
                         {"height", n.height},
                         {"state_digest", n.state_digest},
                         {"messages_sent", n.messages_sent},
                         {"messages_received", n.messages_received},
                         {"bytes_sent", n.bytes_sent},
                         {"signatures_created", n.signatures_created},
                         {"signatures_verified", n.signatures_verified},
                         {"hashes_computed", n.hashes_computed},
                         {"restarts", n.restarts},
                         {"malformed_dropped", n.counters.malformed_dropped},
                         {"rejected_proposals", n.counters.rejected_proposals},
                         {"rejected_headers", n.counters.rejected_headers},
                         {"rejected_deltas", n.counters.rejected_deltas},
                         {"rejected_txs", n.counters.rejected_txs}});
    }
    doc["heights"] = std::move(heights);
    doc["nodes"] = std::move(nodes);
    doc[std::string(kWallClockField)] = r.running_time_ms;
    return doc;
}

std::string to_csv(const MetricsReport& r) {
    std::ostringstream out;
    auto cell = [](const std::optional<std::uint64_t>& v) { return v ? std::to_string(*v) : std::string(); };
    out << "metric,value\n";
    out << "scenario," << r.scenario << "\n";
    out << "seed," << r.seed << "\n";
    out << "auth_attempts," << r.auth.attempts << "\n";
    out << "auth_accepted," << r.auth.accepted << "\n";
    for (const auto& [reason, n] : r.auth.rejected_by_reason) out << "auth_rejected_" << reason << "," << n << "\n";
    auto p = r.auth.probability();
    out << "probability_of_authentication," << (p ? json(*p).dump() : std::string()) << "\n";
    out << "auth_latency_median_ms," << cell(r.auth_latency.median) << "\n";
    out << "auth_latency_p95_ms," << cell(r.auth_latency.p95) << "\n";
    out << "auth_latency_max_ms," << cell(r.auth_latency.max) << "\n";
    out << "tx_submitted," << r.tx_submitted << "\n";
    out << "tx_committed," << r.tx_committed << "\n";
    out << "tx_commit_latency_median_ms," << cell(r.tx_commit_latency.median) << "\n";
    out << "tx_commit_latency_p95_ms," << cell(r.tx_commit_latency.p95) << "\n";
    out << "tx_commit_latency_max_ms," << cell(r.tx_commit_latency.max) << "\n";
    out << "messages_sent," << r.messages_sent << "\n";
    out << "messages_delivered," << r.messages_delivered << "\n";
    out << "messages_lost," << r.messages_lost << "\n";
    out << "bytes_sent," << r.bytes_sent << "\n";
    out << "signatures_created," << r.signatures_created << "\n";
    out << "signatures_verified," << r.signatures_verified << "\n";
    out << "hashes_computed," << r.hashes_computed << "\n";
    for (const auto& n : r.nodes) out << "height_node_" << n.id << "," << n.height << "\n";
    out << "running_time_ms," << json(r.running_time_ms).dump() << "\n";
    return out.str();
}

std::string deterministic_dump(const json& report) {
    auto copy = report;
    if (copy.is_object()) copy.erase(std::string(kWallClockField));
    return copy.dump(2);
}

}  // namespace dronechain::simnet
