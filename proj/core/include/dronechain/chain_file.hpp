#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dronechain/ledger.hpp"
#include "dronechain/result.hpp"
#include "dronechain/state.hpp"

namespace dronechain {

// Chain-wide parameters fixed at genesis. Stored in the chain file preamble
// so a file can be verified and replayed on its own.
struct ChainConfig {
    std::string provider{kMockProvider};
    Validators validators;
    FeeParams fees;
    std::uint64_t round_length_ms = 1000;
    std::uint8_t global_cap = kDefaultGlobalCap;

    friend bool operator==(const ChainConfig&, const ChainConfig&) = default;
};

Bytes encode_config(const ChainConfig& config);
ChainConfig decode_config(Decoder& dec);

// File layout:
//   "DCHN" | u32 version | bytes(config) | sha256(config)
//   then per block: u32 length | canonical full block encoding
inline constexpr std::uint32_t kChainFileVersion = 1;

Bytes encode_preamble(const ChainConfig& config);
Bytes encode_record(const Block& block);
Bytes encode_chain(const ChainConfig& config, std::span<const Block> blocks);

struct IntegrityFailure {
    std::optional<std::uint64_t> height;  // nullopt: preamble is broken
    std::string reason;

    std::string describe() const;
};

struct VerifiedChain {
    ChainConfig config;
    std::vector<Block> blocks;
    std::vector<Digest> state_digests;  // index = height
    LedgerState tip_state;
};

// Decodes and checks every record in order: genesis shape, hash links,
// commitments, certificates and state transitions. Stops at the first
// broken height.
Result<VerifiedChain, IntegrityFailure> verify_chain_bytes(ByteView bytes);

Bytes read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, ByteView bytes);

// Append-only writer. Creating a new file writes the preamble.
class ChainWriter {
public:
    ChainWriter(const std::filesystem::path& path, const ChainConfig& config);

    void append(const Block& block);

private:
    std::ofstream out_;
};

}  // namespace dronechain
