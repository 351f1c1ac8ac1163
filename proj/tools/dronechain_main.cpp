#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "dronechain/commands.hpp"

namespace cli = dronechain::cli;

int main(int argc, char** argv) {
    CLI::App app{"dronechain: trust-graph ledger simulator and chain tools"};
    app.require_subcommand(1);

    cli::RunOptions run;
    std::string scenario, out_path, trace_path;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario and write its metrics report");
    run_cmd->add_option("--scenario", scenario, "Scenario JSON file")->required();
    run_cmd->add_option("--seed", run.seed, "Override the scenario's master seed");
    run_cmd->add_option("--out", out_path, "Report JSON output path")->required();
    auto* trace_opt = run_cmd->add_option("--trace", trace_path, "Write a JSON-lines event trace");

    cli::InspectOptions inspect;
    std::string chain_path;
    auto* inspect_cmd = app.add_subcommand("inspect", "Verify a chain file and print a block summary");
    inspect_cmd->add_option("--chain", chain_path, "Chain file")->required();
    inspect_cmd->add_option("--height", inspect.height, "Block height (default: tip)");

    cli::GraphOptions graph;
    std::string graph_chain, format = "dot";
    auto* graph_cmd = app.add_subcommand("graph", "Export the trust graph held by a chain file");
    graph_cmd->add_option("--chain", graph_chain, "Chain file")->required();
    graph_cmd->add_option("--format", format, "dot or json")->check(CLI::IsMember({"dot", "json"}));
    graph_cmd->add_option("--anchors", graph.anchors, "Comma-separated hex account keys")->delimiter(',');

    std::string left, right;
    auto* diff_cmd = app.add_subcommand("report-diff", "Compare two metrics reports, ignoring wall-clock time");
    diff_cmd->add_option("left", left, "First report")->required();
    diff_cmd->add_option("right", right, "Second report")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kExitSchema;
    }

    if (run_cmd->parsed()) {
        run.scenario = scenario;
        run.out = out_path;
        if (*trace_opt) run.trace = trace_path;
        if (const char* p = std::getenv(cli::kProviderEnv); p && *p) run.provider_override = p;
        return cli::run(run, std::cout, std::cerr);
    }
    if (inspect_cmd->parsed()) {
        inspect.chain = chain_path;
        return cli::inspect(inspect, std::cout, std::cerr);
    }
    if (graph_cmd->parsed()) {
        graph.chain = graph_chain;
        graph.format = format == "json" ? cli::GraphFormat::Json : cli::GraphFormat::Dot;
        return cli::graph(graph, std::cout, std::cerr);
    }
    return cli::report_diff({left, right}, std::cout, std::cerr);
}
