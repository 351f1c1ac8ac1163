#include "dronechain/chain_file.hpp"

#include <algorithm>
#include <iterator>

namespace dronechain {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'D', 'C', 'H', 'N'};

}  // namespace

Bytes encode_config(const ChainConfig& config) {
    Encoder enc;
    enc.str(config.provider);
    enc.u32(static_cast<std::uint32_t>(config.validators.size()));
    for (const auto& v : config.validators) enc.bytes(v.bytes);
    enc.u64(config.fees.tx_fee);
    enc.u64(config.fees.entity_reserve);
    enc.u64(config.fees.confirmation_reserve);
    enc.u64(config.fees.block_reward);
    enc.u64(config.round_length_ms);
    enc.u8(config.global_cap);
    return std::move(enc).take();
}

ChainConfig decode_config(Decoder& dec) {
    ChainConfig c;
    c.provider = dec.str();
    auto n = dec.u32();
    if (n > dec.remaining() / 4) throw DecodeError("validator count exceeds input");
    for (std::uint32_t i = 0; i < n; ++i) c.validators.push_back(PublicKey{dec.bytes()});
    c.fees.tx_fee = dec.u64();
    c.fees.entity_reserve = dec.u64();
    c.fees.confirmation_reserve = dec.u64();
    c.fees.block_reward = dec.u64();
    c.round_length_ms = dec.u64();
    c.global_cap = dec.u8();
    return c;
}

Bytes encode_preamble(const ChainConfig& config) {
    Encoder enc;
    enc.raw(kMagic);
    enc.u32(kChainFileVersion);
    auto cfg = encode_config(config);
    enc.bytes(cfg);
    enc.raw(sha256(cfg).bytes);
    return std::move(enc).take();
}

Bytes encode_record(const Block& block) {
    auto body = encode_full(block);
    Encoder enc;
    enc.bytes(body);
    return std::move(enc).take();
}

Bytes encode_chain(const ChainConfig& config, std::span<const Block> blocks) {
    auto out = encode_preamble(config);
    for (const auto& b : blocks) {
        auto rec = encode_record(b);
        out.insert(out.end(), rec.begin(), rec.end());
    }
    return out;
}

std::string IntegrityFailure::describe() const {
    if (!height) return "integrity failure in preamble: " + reason;
    return "integrity failure at height " + std::to_string(*height) + ": " + reason;
}

Result<VerifiedChain, IntegrityFailure> verify_chain_bytes(ByteView bytes) {
    Decoder dec(bytes);
    VerifiedChain chain;
    std::shared_ptr<const Provider> crypto;
    try {
        auto magic = dec.raw(kMagic.size());
        if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) throw DecodeError("bad magic");
        if (dec.u32() != kChainFileVersion) throw DecodeError("unsupported chain file version");
        auto cfg = dec.bytes();
        auto digest = Digest::from_view(dec.raw(kDigestSize));
        if (sha256(cfg) != digest) throw DecodeError("config digest mismatch");
        Decoder cfg_dec(cfg);
        chain.config = decode_config(cfg_dec);
        cfg_dec.expect_done();
        crypto = make_provider(chain.config.provider);
    } catch (const std::exception& e) {
        return fail(IntegrityFailure{std::nullopt, e.what()});
    }

    std::uint64_t height = 0;
    while (!dec.done()) {
        Block block;
        try {
            auto record = dec.bytes();
            Decoder rec(record);
            block = decode_block(rec, *crypto);
            rec.expect_done();
        } catch (const std::exception& e) {
            return fail(IntegrityFailure{height, std::string("undecodable record: ") + e.what()});
        }
        if (height == 0) {
            if (auto r = validate_genesis(block, *crypto); !r) {
                return fail(IntegrityFailure{height, std::string(to_string(r.error().kind)) + ": " + r.error().detail});
            }
            chain.tip_state = apply_genesis(block);
        } else {
            auto r = validate_block(chain.blocks.back().header, block, chain.config.validators, *crypto);
            if (!r) {
                return fail(IntegrityFailure{height, std::string(to_string(r.error().kind)) + ": " + r.error().detail});
            }
            auto next = apply_block(chain.tip_state, block, chain.config.fees, *crypto);
            if (!next) return fail(IntegrityFailure{height, "state transition rejected: " + describe(next.error())});
            chain.tip_state = std::move(next).value();
        }
        chain.state_digests.push_back(state_digest(chain.tip_state, *crypto));
        chain.blocks.push_back(std::move(block));
        ++height;
    }
    if (chain.blocks.empty()) return fail(IntegrityFailure{0, "chain has no genesis block"});
    return chain;
}

Bytes read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::filesystem::path& path, ByteView bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

ChainWriter::ChainWriter(const std::filesystem::path& path, const ChainConfig& config) {
    bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    out_.open(path, std::ios::binary | std::ios::app);
    if (!out_) throw std::runtime_error("cannot open " + path.string());
    if (fresh) {
        auto pre = encode_preamble(config);
        out_.write(reinterpret_cast<const char*>(pre.data()), static_cast<std::streamsize>(pre.size()));
        out_.flush();
    }
}

void ChainWriter::append(const Block& block) {
    auto rec = encode_record(block);
    out_.write(reinterpret_cast<const char*>(rec.data()), static_cast<std::streamsize>(rec.size()));
    out_.flush();
}

}  // namespace dronechain
