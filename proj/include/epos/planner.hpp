#pragma once

#include <epos/core.hpp>

#include <optional>
#include <span>
#include <vector>

namespace epos {

struct EpochPlan {
    std::uint64_t epoch_index = 0;
    std::size_t length = 0;
    SimSeconds block_time = 0;
    SimSeconds duration = 0;
    std::vector<BlockPlan> blocks;

    const BlockPlan& block(std::size_t index) const { return blocks.at(index - 1); }
    Amount total_fees() const;
    double mean_baseline_stake() const;
};

struct PlannerOptions {
    SlotCount block_size = 2000;
    SimSeconds block_time = 600;
    /// When set, plan exactly this many blocks from the top of the
    /// fee-sorted pool; every block closes at block_size and the
    /// remainder stays pending.
    std::optional<std::size_t> forced_length;
    Amount coinbase_supplement = 0;
};

/// Blocks needed to drain the mempool: 0 when block_size > mempool_size,
/// otherwise ceil(mempool_size / block_size).
std::size_t compute_epoch_length(SlotCount mempool_size, SlotCount block_size);

SimSeconds epoch_duration(std::size_t length, SimSeconds block_time);

/// Greedy fee-ordered fill: blocks 1..l-1 close as soon as their size
/// reaches block_size (the transaction that crosses stays in the block),
/// block l takes everything left. Throws PlanningError if the input is not
/// fee-sorted, if l is 0 while transactions are pending, or if l exceeds
/// max(1, compute_epoch_length) for the snapshot.
std::vector<BlockPlan> compute_baseline_stakes(std::span<const Transaction> sorted_txs,
                                               SlotCount block_size,
                                               std::size_t length,
                                               Amount coinbase_supplement = 0);

/// Sorts the snapshot and plans one epoch (derived or forced length).
EpochPlan plan_epoch(std::uint64_t epoch_index, const Mempool& snapshot, const PlannerOptions& options);

} // namespace epos
