#pragma once

#include <epos/adversary.hpp>
#include <epos/core.hpp>
#include <epos/schemes.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace epos {

enum class BidStrategy {
    /// Uniform pick among the W highest-stake eligible blocks, uniform pct.
    window,
    /// 99 % on the highest-stake eligible block.
    greedy,
    abstain,
};

std::string_view to_string(BidStrategy strategy);
BidStrategy parse_bid_strategy(std::string_view name);

struct RunConfig {
    std::uint64_t seed = 1;
    std::size_t n_min = 8'000;
    std::size_t n_max = 9'000;
    Amount balance_min = 0;
    Amount balance_max = 20'000;
    SlotCount block_size = 2'000;
    SimSeconds block_time = 600;
    /// Transactions per simulated second.
    double lambda = 2'000.0 / 600.0;
    std::size_t epochs = 1;
    Amount fee_min = 1;
    Amount fee_max = 9;
    /// Genesis mempool holds U[min, max] blocks' worth of transactions.
    std::size_t mempool_blocks_min = 1;
    std::size_t mempool_blocks_max = 100;
    double invalid_tx_fraction = 0.0;
    std::optional<std::size_t> forced_length;
    Amount coinbase_supplement = 0;
    std::vector<Scheme> schemes{Scheme::epos, Scheme::random, Scheme::priority};
    double greedy_fraction = 0.02;
    Amount histogram_bin_width = 1'000;
    std::size_t committee_size = 10;
    unsigned fallback_factor = 2;
    BidStrategy bid_strategy = BidStrategy::window;
    std::size_t bid_window = 32;
    double propagation_loss = 0.0;
    std::optional<AdversaryConfig> adversary;

    std::string json_out = "report.json";
    std::string table_csv = "table1.csv";
    std::string histogram_csv = "histograms.csv";
    bool timestamps = true;

    /// Throws ConfigError naming the offending field.
    void validate() const;
    bool runs(Scheme scheme) const;
};

/// Reference network: 8,000 to 9,000 peers, U[0, 20,000]
/// balances, 2,000-slot blocks, a genesis mempool of 200 full blocks and a
/// forced epoch length, all three schemes, one epoch.
RunConfig table1_config(std::uint64_t seed, std::size_t length);

} // namespace epos
