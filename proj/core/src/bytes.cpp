#include "dronechain/bytes.hpp"

#include <limits>

namespace dronechain {

namespace {

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::string to_hex(ByteView data) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (auto b : data) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0x0f]);
    }
    return out;
}

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) throw std::invalid_argument("hex string has odd length");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_value(hex[i]);
        int lo = hex_value(hex[i + 1]);
        if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex character");
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

void Encoder::u32(std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void Encoder::u64(std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void Encoder::bytes(ByteView data) {
    if (data.size() > std::numeric_limits<std::uint32_t>::max()) {
        throw std::length_error("byte string exceeds 32-bit length prefix");
    }
    u32(static_cast<std::uint32_t>(data.size()));
    raw(data);
}

void Decoder::need(std::size_t n) const {
    if (remaining() < n) throw DecodeError("unexpected end of input");
}

std::uint8_t Decoder::u8() {
    need(1);
    return in_[pos_++];
}

std::uint32_t Decoder::u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | in_[pos_++];
    return v;
}

std::uint64_t Decoder::u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | in_[pos_++];
    return v;
}

bool Decoder::boolean() {
    auto v = u8();
    if (v > 1) throw DecodeError("boolean byte out of range");
    return v == 1;
}

ByteView Decoder::raw(std::size_t n) {
    need(n);
    auto out = in_.subspan(pos_, n);
    pos_ += n;
    return out;
}

Bytes Decoder::bytes() {
    auto n = u32();
    auto view = raw(n);
    return {view.begin(), view.end()};
}

std::string Decoder::str() {
    auto n = u32();
    auto view = raw(n);
    return {view.begin(), view.end()};
}

void Decoder::expect_done() const {
    if (!done()) throw DecodeError("trailing bytes after value");
}

}  // namespace dronechain
