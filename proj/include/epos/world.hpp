#pragma once

#include <epos/config.hpp>
#include <epos/core.hpp>
#include <epos/rng.hpp>

#include <vector>

namespace epos {

struct World {
    /// Balances before any genesis fee is paid; peers[i].node_id == i.
    std::vector<Peer> peers;
    /// Senders can afford every fee when admitted in order.
    Mempool mempool;
    /// Adversary identities (the last p node ids), empty without one.
    std::vector<NodeId> adversary;
    TxId next_tx_id = 0;
};

/// n ~ U[n_min, n_max]; honest balances i.i.d. U[balance_min, balance_max];
/// with an adversary, the last p peers share alpha of all coins evenly.
/// The genesis mempool holds U[mempool_blocks_min, mempool_blocks_max]
/// blocks' worth of unit-size transactions.
World generate_world(const RunConfig& config);

struct ArrivalModel {
    Amount fee_min = 1;
    Amount fee_max = 9;
    double invalid_fraction = 0.0;
    std::size_t peers = 1;
};

/// Poisson(lambda * duration) draw using the standard pmf.
std::uint64_t poisson_count(double lambda, SimSeconds duration, Rng& rng);

/// Arrivals over `duration` seconds with ids from `first_id` upward, fees
/// uniform over the model's range and uniformly drawn distinct endpoints.
std::vector<Transaction> poisson_arrivals(double lambda,
                                          SimSeconds duration,
                                          std::uint64_t seed,
                                          const ArrivalModel& model,
                                          TxId first_id = 0);

} // namespace epos
