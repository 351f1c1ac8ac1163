#pragma once

#include <array>
#include <atomic>
#include <compare>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "dronechain/bytes.hpp"

namespace dronechain {

inline constexpr std::size_t kDigestSize = 32;
inline constexpr std::size_t kSeedSize = 32;

struct Digest {
    std::array<std::uint8_t, kDigestSize> bytes{};

    ByteView view() const noexcept { return bytes; }
    std::string hex() const { return to_hex(bytes); }
    bool is_zero() const noexcept;

    static Digest from_hex(std::string_view hex);
    static Digest from_view(ByteView v);

    friend auto operator<=>(const Digest&, const Digest&) = default;
};

struct PublicKey {
    Bytes bytes;

    bool empty() const noexcept { return bytes.empty(); }
    std::string hex() const { return to_hex(bytes); }
    std::string short_hex() const { return hex().substr(0, 12); }

    friend auto operator<=>(const PublicKey&, const PublicKey&) = default;
};

struct PrivateKey {
    Bytes bytes;

    friend bool operator==(const PrivateKey&, const PrivateKey&) = default;
};

struct Signature {
    Bytes bytes;

    bool empty() const noexcept { return bytes.empty(); }
    friend auto operator<=>(const Signature&, const Signature&) = default;
};

struct KeyPair {
    PublicKey public_key;
    PrivateKey private_key;
};

using Seed = std::array<std::uint8_t, kSeedSize>;

class CryptoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Signature + hash primitives. Implementations are stateless after
// construction; all randomness enters through the seed argument.
class Provider {
public:
    virtual ~Provider() = default;

    virtual std::string_view name() const noexcept = 0;
    virtual KeyPair generate_keypair(const Seed& seed) const = 0;
    // Throws CryptoError on a malformed private key.
    virtual Signature sign(const PrivateKey& key, ByteView message) const = 0;
    virtual bool verify(const PublicKey& key, ByteView message, const Signature& sig) const noexcept = 0;
    virtual Digest hash(ByteView data) const = 0;
};

inline constexpr std::string_view kEdCurveProvider = "ed-curve";
inline constexpr std::string_view kMockProvider = "mock";

// "ed-curve" (Ed25519 signatures, SHA-256) or "mock" (hash-based, SHA-256).
// Throws std::invalid_argument for unknown names.
std::shared_ptr<const Provider> make_provider(std::string_view name);

// Plain SHA-256, independent of any provider. Used for seed derivation.
Digest sha256(ByteView data);

// Derives a 32-byte seed from a label and a 64-bit value.
Seed derive_seed(std::string_view label, std::uint64_t value);

// Wraps a provider and counts operations; the simulator uses one per node
// for the energy-proxy metrics.
class CountingProvider final : public Provider {
public:
    explicit CountingProvider(std::shared_ptr<const Provider> inner) : inner_(std::move(inner)) {}

    std::string_view name() const noexcept override { return inner_->name(); }
    KeyPair generate_keypair(const Seed& seed) const override { return inner_->generate_keypair(seed); }
    Signature sign(const PrivateKey& key, ByteView message) const override {
        signs_.fetch_add(1, std::memory_order_relaxed);
        return inner_->sign(key, message);
    }
    bool verify(const PublicKey& key, ByteView message, const Signature& sig) const noexcept override {
        verifies_.fetch_add(1, std::memory_order_relaxed);
        return inner_->verify(key, message, sig);
    }
    Digest hash(ByteView data) const override {
        hashes_.fetch_add(1, std::memory_order_relaxed);
        return inner_->hash(data);
    }

    std::uint64_t signatures_created() const noexcept { return signs_.load(std::memory_order_relaxed); }
    std::uint64_t signatures_verified() const noexcept { return verifies_.load(std::memory_order_relaxed); }
    std::uint64_t hashes_computed() const noexcept { return hashes_.load(std::memory_order_relaxed); }

private:
    std::shared_ptr<const Provider> inner_;
    mutable std::atomic<std::uint64_t> signs_{0};
    mutable std::atomic<std::uint64_t> verifies_{0};
    mutable std::atomic<std::uint64_t> hashes_{0};
};

}  // namespace dronechain
