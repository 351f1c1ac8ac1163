#pragma once

#include <string>
#include <vector>

#include "dronechain/crypto.hpp"
#include "dronechain/ledger.hpp"
#include "dronechain/state.hpp"

namespace bench {

using namespace dronechain;

// Genesis funding `n` accounts and a block holding one transfer from each.
struct TransferBlock {
    std::vector<KeyPair> accounts;
    Block genesis;
    Block block;
};

inline TransferBlock transfer_block(const Provider& crypto, std::size_t n) {
    TransferBlock f;
    std::vector<std::pair<PublicKey, std::uint64_t>> alloc;
    for (std::size_t i = 0; i < n; ++i) {
        f.accounts.push_back(crypto.generate_keypair(derive_seed("bench-account", i)));
        alloc.emplace_back(f.accounts.back().public_key, 1000);
    }
    f.genesis = build_genesis(alloc, crypto);
    const auto proposer = crypto.generate_keypair(derive_seed("bench-validator", 0));
    const FeeParams fees;
    std::vector<Transaction> txs{make_coinbase(proposer.public_key, fees.block_reward, 1, crypto)};
    for (std::size_t i = 0; i < n; ++i) {
        const auto& to = f.accounts[(i + 1) % n].public_key;
        txs.push_back(sign_transaction(TokenTransferPayload{to, 5}, 0, fees.tx_fee, f.accounts[i], crypto));
    }
    f.block = build_block(f.genesis.header, std::move(txs), proposer, 1000, crypto);
    return f;
}

}  // namespace bench
