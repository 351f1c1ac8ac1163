#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dronechain/chain_file.hpp"

// Library side of the command-line tool. Each command writes its summary to
// `out`, diagnostics to `err`, and returns the process exit code.
namespace dronechain::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitDiffers = 1,
    kExitSchema = 2,
    kExitRuntime = 3,
    kExitIntegrity = 4,
};

inline constexpr const char* kProviderEnv = "DRONECHAIN_PROVIDER";

struct RunOptions {
    std::filesystem::path scenario;
    std::optional<std::uint64_t> seed;
    std::filesystem::path out;
    std::optional<std::filesystem::path> trace;
    // Usually taken from DRONECHAIN_PROVIDER.
    std::optional<std::string> provider_override;
};

// Writes the JSON report to `out` and a CSV summary next to it (same stem,
// .csv extension).
int run(const RunOptions& options, std::ostream& out, std::ostream& err);

struct InspectOptions {
    std::filesystem::path chain;
    std::optional<std::uint64_t> height;
};

int inspect(const InspectOptions& options, std::ostream& out, std::ostream& err);

// Text printed by inspect for one block of a verified chain.
std::string describe_block(const VerifiedChain& chain, std::uint64_t height);

enum class GraphFormat { Dot, Json };

struct GraphOptions {
    std::filesystem::path chain;
    GraphFormat format = GraphFormat::Dot;
    std::vector<std::string> anchors;  // hex account keys
};

int graph(const GraphOptions& options, std::ostream& out, std::ostream& err);

struct ReportDiffOptions {
    std::filesystem::path left;
    std::filesystem::path right;
};

// 0 when the reports match outside the wall-clock field, 1 otherwise.
int report_diff(const ReportDiffOptions& options, std::ostream& out, std::ostream& err);

}  // namespace dronechain::cli
