#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "dronechain/crypto.hpp"
#include "dronechain/trust_graph.hpp"

namespace dronechain {

using Nonce = std::array<std::uint8_t, 32>;

inline constexpr std::uint64_t kDefaultAuthTtlMs = 5000;

struct Challenge {
    Nonce nonce{};
    PublicKey verifier_account;
    PublicKey target_account;
    std::uint64_t issued_at = 0;
    std::uint64_t ttl = kDefaultAuthTtlMs;

    friend bool operator==(const Challenge&, const Challenge&) = default;
};

struct AuthResponse {
    Challenge challenge;
    Signature responder_auth_sig;

    friend bool operator==(const AuthResponse&, const AuthResponse&) = default;
};

enum class AuthReason : std::uint8_t { Ok, Untrusted, BadSignature, Expired, WrongTarget };

std::string_view to_string(AuthReason r) noexcept;

struct AuthDecision {
    bool accepted = false;
    AuthReason reason = AuthReason::Untrusted;
    // Present when accepted; empty path when the target is an anchor.
    std::optional<std::vector<PublicKey>> trust_witness;
};

// Seeded nonce stream: nonce_i = H("nonce" ++ seed ++ i). Never repeats
// within one source.
class NonceSource {
public:
    explicit NonceSource(std::uint64_t seed) : seed_(seed) {}

    Nonce next();
    std::uint64_t issued() const noexcept { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

// Throws std::invalid_argument when ttl is 0.
Challenge issue_challenge(const PublicKey& verifier, const PublicKey& target, std::uint64_t now,
                          NonceSource& nonces, std::uint64_t ttl = kDefaultAuthTtlMs);

// Bytes the responder signs: nonce ++ verifier ++ target, canonically encoded.
Bytes challenge_signing_bytes(const Challenge& challenge);

AuthResponse respond(const Challenge& challenge, const KeyPair& responder_auth_key, const Provider& crypto);

// Checks, in order: expiry against the issued challenge, that the response
// answers that challenge, trust in the target, and the signature under the
// auth key registered for the target in trust_view.
AuthDecision verify_response(const AuthResponse& response, const Challenge& issued, const TrustGraph& trust_view,
                             const AnchorSet& anchors, std::uint64_t now, std::uint8_t global_cap,
                             const Provider& crypto);

}  // namespace dronechain
