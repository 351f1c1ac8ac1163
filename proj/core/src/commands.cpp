#include "dronechain/commands.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dronechain/simnet/simulator.hpp"

namespace dronechain::cli {

using nlohmann::json;

namespace {

Result<VerifiedChain, int> load_chain(const std::filesystem::path& path, std::ostream& err) {
    Bytes bytes;
    try {
        bytes = read_file_bytes(path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return fail(static_cast<int>(kExitRuntime));
    }
    auto chain = verify_chain_bytes(bytes);
    if (!chain) {
        err << "integrity failure: " << chain.error().describe() << "\n";
        return fail(static_cast<int>(kExitIntegrity));
    }
    return std::move(chain).value();
}

}  // namespace

int run(const RunOptions& options, std::ostream& out, std::ostream& err) {
    simnet::Scenario scenario;
    try {
        scenario = simnet::load_scenario(options.scenario);
        if (options.seed) scenario.seed = *options.seed;
        if (options.provider_override) {
            scenario.genesis.crypto_provider = *options.provider_override;
            simnet::validate_scenario(scenario);
        }
    } catch (const simnet::SchemaError& e) {
        err << "schema error at " << e.what() << "\n";
        return kExitSchema;
    }

    simnet::MetricsReport report;
    try {
        std::ofstream trace;
        simnet::SimOptions sim_options;
        if (options.trace) {
            trace.open(*options.trace);
            if (!trace) throw std::runtime_error("cannot open trace file " + options.trace->string());
            sim_options.trace = &trace;
        }
        report = simnet::run_scenario(scenario, sim_options);

        std::ofstream json_out(options.out);
        if (!json_out) throw std::runtime_error("cannot write " + options.out.string());
        json_out << simnet::to_json(report).dump(2) << "\n";
        auto csv_path = options.out;
        csv_path.replace_extension(".csv");
        if (csv_path != options.out) {
            std::ofstream csv_out(csv_path);
            if (!csv_out) throw std::runtime_error("cannot write " + csv_path.string());
            csv_out << simnet::to_csv(report);
        }
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }

    auto p = report.auth.probability();
    out << "scenario " << (report.scenario.empty() ? options.scenario.filename().string() : report.scenario)
        << " seed " << report.seed << "\n";
    out << "auth attempts " << report.auth.attempts << ", accepted " << report.auth.accepted
        << ", probability " << (p ? json(*p).dump() : "n/a") << "\n";
    for (const auto& n : report.nodes) {
        out << "node " << n.id << " (" << to_string(n.role) << ") height " << n.height << "\n";
    }
    out << "report written to " << options.out.string() << "\n";
    return kExitOk;
}

std::string describe_block(const VerifiedChain& chain, std::uint64_t height) {
    const auto& b = chain.blocks.at(height);
    const auto& h = b.header;
    std::ostringstream s;
    s << "height: " << h.height << "\n";
    s << "header_digest: " << h.header_digest.hex() << "\n";
    s << "parent_digest: " << h.parent_digest.hex() << "\n";
    s << "tx_commitment: " << h.tx_commitment.hex() << "\n";
    s << "timestamp: " << h.timestamp << "\n";
    s << "proposer: " << (h.proposer.empty() ? "-" : h.proposer.hex()) << "\n";
    s << "quorum_votes: " << h.quorum_cert.size() << "\n";
    s << "tx_count: " << b.transactions.size() << "\n";
    s << "state_digest: " << chain.state_digests.at(height).hex() << "\n";
    return s.str();
}

int inspect(const InspectOptions& options, std::ostream& out, std::ostream& err) {
    auto chain = load_chain(options.chain, err);
    if (!chain) return chain.error();
    const auto tip = chain->blocks.size() - 1;
    const auto height = options.height.value_or(tip);
    if (height > tip) {
        err << "height " << height << " out of range: chain holds heights 0.." << tip << "\n";
        return kExitRuntime;
    }
    out << "chain: " << options.chain.string() << " (tip " << tip << ", provider " << chain->config.provider << ")\n";
    out << describe_block(*chain, height);
    return kExitOk;
}

int graph(const GraphOptions& options, std::ostream& out, std::ostream& err) {
    auto chain = load_chain(options.chain, err);
    if (!chain) return chain.error();
    const auto& full = chain->tip_state.graph;

    TrustGraph view = full;
    if (!options.anchors.empty()) {
        AnchorSet anchors;
        for (const auto& hex : options.anchors) {
            PublicKey key;
            try {
                key.bytes = from_hex(hex);
            } catch (const std::exception&) {
                err << "malformed anchor key '" << hex << "'\n";
                return kExitRuntime;
            }
            if (!full.has_node(key)) {
                err << "unknown anchor " << hex << "\n";
                return kExitRuntime;
            }
            anchors.insert(std::move(key));
        }
        view = relevant_subgraph(full, anchors, chain->config.global_cap);
    }
    if (options.format == GraphFormat::Dot) {
        out << to_dot(view);
    } else {
        out << to_json(view).dump(2) << "\n";
    }
    return kExitOk;
}

int report_diff(const ReportDiffOptions& options, std::ostream& out, std::ostream& err) {
    auto load = [&](const std::filesystem::path& p) -> std::optional<json> {
        std::ifstream in(p);
        if (!in) {
            err << "cannot read " << p.string() << "\n";
            return std::nullopt;
        }
        try {
            return json::parse(in);
        } catch (const json::parse_error& e) {
            err << p.string() << ": " << e.what() << "\n";
            return std::nullopt;
        }
    };
    auto left = load(options.left);
    auto right = load(options.right);
    if (!left || !right) return kExitRuntime;

    for (auto* doc : {&*left, &*right}) {
        if (doc->is_object()) doc->erase(std::string(simnet::kWallClockField));
    }
    if (*left == *right) {
        out << "reports match\n";
        return kExitOk;
    }
    for (const auto& op : json::diff(*left, *right)) {
        out << op.at("op").get<std::string>() << " " << op.at("path").get<std::string>() << "\n";
    }
    return kExitDiffers;
}

}  // namespace dronechain::cli
