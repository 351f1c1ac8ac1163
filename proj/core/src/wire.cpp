#include "dronechain/wire.hpp"

#include <algorithm>

namespace dronechain {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void encode_challenge(Encoder& enc, const Challenge& c) {
    enc.raw(c.nonce);
    enc.bytes(c.verifier_account.bytes);
    enc.bytes(c.target_account.bytes);
    enc.u64(c.issued_at);
    enc.u64(c.ttl);
}

Challenge decode_challenge(Decoder& dec) {
    Challenge c;
    auto nonce = dec.raw(c.nonce.size());
    std::copy(nonce.begin(), nonce.end(), c.nonce.begin());
    c.verifier_account.bytes = dec.bytes();
    c.target_account.bytes = dec.bytes();
    c.issued_at = dec.u64();
    c.ttl = dec.u64();
    if (c.ttl == 0) throw DecodeError("challenge ttl is zero");
    return c;
}

std::uint32_t bounded_count(Decoder& dec, std::size_t min_item_size) {
    auto n = dec.u32();
    if (n > dec.remaining() / min_item_size) throw DecodeError("element count exceeds input");
    return n;
}

}  // namespace

Bytes prevote_signing_bytes(std::uint64_t height, std::uint64_t round, const Digest& digest) {
    Encoder enc;
    enc.str("prevote");
    enc.u64(height);
    enc.u64(round);
    enc.raw(digest.bytes);
    return std::move(enc).take();
}

std::string_view message_name(const WireMessage& msg) noexcept {
    static constexpr std::string_view kNames[] = {
        "SubmitTx",     "NewBlock",      "Vote",           "HeaderRequest",    "HeaderResponse",  "BlockRequest",
        "BlockResponse", "EntityQuery", "EntityResponse", "AuthChallenge", "AuthResponse",
    };
    return kNames[msg.index()];
}

Bytes encode_message(const WireMessage& msg) {
    Encoder enc;
    enc.u8(static_cast<std::uint8_t>(msg.index() + 1));
    std::visit(Overloaded{
                   [&](const SubmitTx& m) { encode_full(enc, m.tx); },
                   [&](const NewBlock& m) {
                       encode_full(enc, m.block);
                       enc.u64(m.round);
                       enc.boolean(m.pol_round.has_value());
                       if (m.pol_round) enc.u64(*m.pol_round);
                   },
                   [&](const Vote& m) {
                       enc.u64(m.height);
                       enc.u64(m.round);
                       enc.u8(static_cast<std::uint8_t>(m.kind));
                       enc.raw(m.header_digest.bytes);
                       enc.bytes(m.vote.validator.bytes);
                       enc.bytes(m.vote.signature.bytes);
                   },
                   [&](const HeaderRequest& m) { enc.u64(m.from_height); },
                   [&](const HeaderResponse& m) {
                       enc.u32(static_cast<std::uint32_t>(m.headers.size()));
                       for (const auto& h : m.headers) encode_full(enc, h);
                   },
                   [&](const BlockRequest& m) { enc.u64(m.from_height); },
                   [&](const BlockResponse& m) {
                       enc.u32(static_cast<std::uint32_t>(m.blocks.size()));
                       for (const auto& b : m.blocks) encode_full(enc, b);
                   },
                   [&](const EntityQuery& m) {
                       enc.u64(m.query_id);
                       enc.boolean(m.target.has_value());
                       if (m.target) enc.bytes(m.target->bytes);
                       enc.u32(static_cast<std::uint32_t>(m.anchors.size()));
                       for (const auto& a : m.anchors) enc.bytes(a.bytes);
                       enc.u64(m.known_height);
                   },
                   [&](const EntityResponse& m) {
                       enc.u64(m.query_id);
                       enc.u32(static_cast<std::uint32_t>(m.headers.size()));
                       for (const auto& h : m.headers) encode_full(enc, h);
                       enc.u32(static_cast<std::uint32_t>(m.backing.size()));
                       for (const auto& b : m.backing) {
                           enc.u64(b.height);
                           encode_full(enc, b.tx);
                           encode_full(enc, b.proof);
                       }
                   },
                   [&](const AuthChallengeMsg& m) { encode_challenge(enc, m.challenge); },
                   [&](const AuthResponseMsg& m) {
                       encode_challenge(enc, m.response.challenge);
                       enc.bytes(m.response.responder_auth_sig.bytes);
                   },
               },
               msg);
    return std::move(enc).take();
}

WireMessage decode_message(ByteView bytes, const Provider& crypto) {
    Decoder dec(bytes);
    auto tag = dec.u8();
    WireMessage out;
    switch (tag) {
        case 1: out = SubmitTx{decode_transaction(dec, crypto)}; break;
        case 2: {
            NewBlock m;
            m.block = decode_block(dec, crypto);
            m.round = dec.u64();
            if (dec.boolean()) m.pol_round = dec.u64();
            out = std::move(m);
            break;
        }
        case 3: {
            Vote v;
            v.height = dec.u64();
            v.round = dec.u64();
            auto kind = dec.u8();
            if (kind != 1 && kind != 2) throw DecodeError("unknown vote kind");
            v.kind = static_cast<VoteKind>(kind);
            v.header_digest = Digest::from_view(dec.raw(kDigestSize));
            v.vote.validator.bytes = dec.bytes();
            v.vote.signature.bytes = dec.bytes();
            out = std::move(v);
            break;
        }
        case 4: out = HeaderRequest{dec.u64()}; break;
        case 5: {
            HeaderResponse r;
            auto n = bounded_count(dec, 8);
            for (std::uint32_t i = 0; i < n; ++i) r.headers.push_back(decode_header(dec));
            out = std::move(r);
            break;
        }
        case 6: out = BlockRequest{dec.u64()}; break;
        case 7: {
            BlockResponse r;
            auto n = bounded_count(dec, 8);
            for (std::uint32_t i = 0; i < n; ++i) r.blocks.push_back(decode_block(dec, crypto));
            out = std::move(r);
            break;
        }
        case 8: {
            EntityQuery q;
            q.query_id = dec.u64();
            if (dec.boolean()) q.target = PublicKey{dec.bytes()};
            auto n = bounded_count(dec, 4);
            for (std::uint32_t i = 0; i < n; ++i) q.anchors.push_back(PublicKey{dec.bytes()});
            q.known_height = dec.u64();
            out = std::move(q);
            break;
        }
        case 9: {
            EntityResponse r;
            r.query_id = dec.u64();
            auto nh = bounded_count(dec, 8);
            for (std::uint32_t i = 0; i < nh; ++i) r.headers.push_back(decode_header(dec));
            auto nb = bounded_count(dec, 8);
            for (std::uint32_t i = 0; i < nb; ++i) {
                BackedTx b;
                b.height = dec.u64();
                b.tx = decode_transaction(dec, crypto);
                b.proof = decode_proof(dec);
                r.backing.push_back(std::move(b));
            }
            out = std::move(r);
            break;
        }
        case 10: out = AuthChallengeMsg{decode_challenge(dec)}; break;
        case 11: {
            AuthResponseMsg m;
            m.response.challenge = decode_challenge(dec);
            m.response.responder_auth_sig.bytes = dec.bytes();
            if (m.response.responder_auth_sig.empty()) throw DecodeError("empty auth signature");
            out = std::move(m);
            break;
        }
        default: throw DecodeError("unknown message tag");
    }
    dec.expect_done();
    return out;
}

}  // namespace dronechain
