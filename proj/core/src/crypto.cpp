#include "dronechain/crypto.hpp"

#include <sodium.h>

#include <algorithm>
#include <mutex>

namespace dronechain {

namespace {

void ensure_sodium() {
    static std::once_flag once;
    std::call_once(once, [] {
        if (sodium_init() < 0) throw CryptoError("libsodium initialisation failed");
    });
}

Digest sha256_raw(ByteView data) {
    Digest d;
    crypto_hash_sha256(d.bytes.data(), data.data(), data.size());
    return d;
}

class EdCurveProvider final : public Provider {
public:
    EdCurveProvider() { ensure_sodium(); }

    std::string_view name() const noexcept override { return kEdCurveProvider; }

    KeyPair generate_keypair(const Seed& seed) const override {
        KeyPair kp;
        kp.public_key.bytes.resize(crypto_sign_PUBLICKEYBYTES);
        kp.private_key.bytes.resize(crypto_sign_SECRETKEYBYTES);
        crypto_sign_seed_keypair(kp.public_key.bytes.data(), kp.private_key.bytes.data(), seed.data());
        return kp;
    }

    Signature sign(const PrivateKey& key, ByteView message) const override {
        if (key.bytes.size() != crypto_sign_SECRETKEYBYTES) throw CryptoError("malformed ed-curve private key");
        Signature sig;
        sig.bytes.resize(crypto_sign_BYTES);
        crypto_sign_detached(sig.bytes.data(), nullptr, message.data(), message.size(), key.bytes.data());
        return sig;
    }

    bool verify(const PublicKey& key, ByteView message, const Signature& sig) const noexcept override {
        if (key.bytes.size() != crypto_sign_PUBLICKEYBYTES || sig.bytes.size() != crypto_sign_BYTES) return false;
        return crypto_sign_verify_detached(sig.bytes.data(), message.data(), message.size(), key.bytes.data()) == 0;
    }

    Digest hash(ByteView data) const override { return sha256_raw(data); }
};

// Deterministic stand-in for fast exhaustive tests. The secret is derivable
// from the public key, so signatures are forgeable by design; never use it
// outside simulation.
//   public  = H("mock-pk" ++ seed)
//   secret  = H("mock-sk" ++ public)
//   sig     = H(secret ++ message)
class MockProvider final : public Provider {
public:
    MockProvider() { ensure_sodium(); }

    std::string_view name() const noexcept override { return kMockProvider; }

    KeyPair generate_keypair(const Seed& seed) const override {
        KeyPair kp;
        auto pk = sha256_raw(concat(as_bytes("mock-pk"), seed));
        kp.public_key.bytes.assign(pk.bytes.begin(), pk.bytes.end());
        kp.private_key.bytes = secret_for(kp.public_key);
        return kp;
    }

    Signature sign(const PrivateKey& key, ByteView message) const override {
        if (key.bytes.size() != kDigestSize) throw CryptoError("malformed mock private key");
        auto d = sha256_raw(concat(key.bytes, message));
        return Signature{Bytes(d.bytes.begin(), d.bytes.end())};
    }

    bool verify(const PublicKey& key, ByteView message, const Signature& sig) const noexcept override {
        if (key.bytes.size() != kDigestSize || sig.bytes.size() != kDigestSize) return false;
        auto expected = sha256_raw(concat(secret_for(key), message));
        return std::equal(expected.bytes.begin(), expected.bytes.end(), sig.bytes.begin());
    }

    Digest hash(ByteView data) const override { return sha256_raw(data); }

private:
    static Bytes secret_for(const PublicKey& pk) {
        auto sk = sha256_raw(concat(as_bytes("mock-sk"), pk.bytes));
        return {sk.bytes.begin(), sk.bytes.end()};
    }
};

}  // namespace

bool Digest::is_zero() const noexcept {
    return std::all_of(bytes.begin(), bytes.end(), [](auto b) { return b == 0; });
}

Digest Digest::from_hex(std::string_view hex) {
    return from_view(dronechain::from_hex(hex));
}

Digest Digest::from_view(ByteView v) {
    if (v.size() != kDigestSize) throw std::invalid_argument("digest must be 32 bytes");
    Digest d;
    std::copy(v.begin(), v.end(), d.bytes.begin());
    return d;
}

std::shared_ptr<const Provider> make_provider(std::string_view name) {
    if (name == kEdCurveProvider) return std::make_shared<EdCurveProvider>();
    if (name == kMockProvider) return std::make_shared<MockProvider>();
    throw std::invalid_argument("unknown crypto provider: " + std::string(name));
}

Digest sha256(ByteView data) {
    ensure_sodium();
    return sha256_raw(data);
}

Seed derive_seed(std::string_view label, std::uint64_t value) {
    Encoder enc;
    enc.str(label);
    enc.u64(value);
    auto d = sha256(enc.view());
    Seed s;
    std::copy(d.bytes.begin(), d.bytes.end(), s.begin());
    return s;
}

}  // namespace dronechain
