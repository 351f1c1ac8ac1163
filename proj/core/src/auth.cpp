#include "dronechain/auth.hpp"

#include <algorithm>
#include <stdexcept>

namespace dronechain {

std::string_view to_string(AuthReason r) noexcept {
    switch (r) {
        case AuthReason::Ok: return "Ok";
        case AuthReason::Untrusted: return "Untrusted";
        case AuthReason::BadSignature: return "BadSignature";
        case AuthReason::Expired: return "Expired";
        case AuthReason::WrongTarget: return "WrongTarget";
    }
    return "Unknown";
}

Nonce NonceSource::next() {
    Encoder enc;
    enc.str("nonce");
    enc.u64(seed_);
    enc.u64(counter_++);
    auto d = sha256(enc.view());
    Nonce n;
    std::copy(d.bytes.begin(), d.bytes.end(), n.begin());
    return n;
}

Challenge issue_challenge(const PublicKey& verifier, const PublicKey& target, std::uint64_t now,
                          NonceSource& nonces, std::uint64_t ttl) {
    if (ttl == 0) throw std::invalid_argument("challenge ttl must be positive");
    return {nonces.next(), verifier, target, now, ttl};
}

Bytes challenge_signing_bytes(const Challenge& challenge) {
    Encoder enc;
    enc.raw(challenge.nonce);
    enc.bytes(challenge.verifier_account.bytes);
    enc.bytes(challenge.target_account.bytes);
    return std::move(enc).take();
}

AuthResponse respond(const Challenge& challenge, const KeyPair& responder_auth_key, const Provider& crypto) {
    return {challenge, crypto.sign(responder_auth_key.private_key, challenge_signing_bytes(challenge))};
}

AuthDecision verify_response(const AuthResponse& response, const Challenge& issued, const TrustGraph& trust_view,
                             const AnchorSet& anchors, std::uint64_t now, std::uint8_t global_cap,
                             const Provider& crypto) {
    if (now > issued.issued_at + issued.ttl) return {false, AuthReason::Expired, std::nullopt};
    if (response.challenge != issued) return {false, AuthReason::WrongTarget, std::nullopt};

    auto trust = evaluate_trust(trust_view, anchors, issued.target_account, global_cap);
    if (!trust.trusted) return {false, AuthReason::Untrusted, std::nullopt};

    // An anchor that never registered has no auth key on record.
    const auto* record = trust_view.find_node(issued.target_account);
    if (record == nullptr ||
        !crypto.verify(PublicKey{record->auth_public_key}, challenge_signing_bytes(issued),
                       response.responder_auth_sig)) {
        return {false, AuthReason::BadSignature, std::nullopt};
    }
    return {true, AuthReason::Ok, std::move(trust.witness_path)};
}

}  // namespace dronechain
