#include <epos/planner.hpp>

#include <algorithm>
#include <numeric>

namespace epos {

namespace {

bool fee_sorted(std::span<const Transaction> txs)
{
    return std::is_sorted(txs.begin(), txs.end(), [](const Transaction& a, const Transaction& b) {
        if (a.fee != b.fee) {
            return a.fee > b.fee;
        }
        return a.id < b.id;
    });
}

void add_to_block(BlockPlan& block, const Transaction& tx)
{
    block.transactions.push_back(tx);
    block.fees += tx.fee;
    block.size += tx.size;
}

// Fills `length` blocks. When `cap_last` is false the last block absorbs
// the remainder; otherwise it closes like the others and the rest is left
// out. Returns the number of transactions consumed through `consumed`.
std::vector<BlockPlan> fill_blocks(std::span<const Transaction> sorted,
                                   SlotCount block_size,
                                   std::size_t length,
                                   Amount supplement,
                                   bool cap_last,
                                   std::size_t* consumed = nullptr)
{
    std::vector<BlockPlan> blocks(length);
    std::size_t next = 0;
    for (std::size_t i = 0; i < length; ++i) {
        BlockPlan& block = blocks[i];
        block.index = i + 1;
        const bool last = i + 1 == length;
        if (last && !cap_last) {
            for (; next < sorted.size(); ++next) {
                add_to_block(block, sorted[next]);
            }
        } else {
            while (next < sorted.size() && block.size < block_size) {
                add_to_block(block, sorted[next++]);
            }
        }
        block.baseline_stake = block.fees + supplement;
    }
    if (consumed) {
        *consumed = next;
    }
    return blocks;
}

} // namespace

Amount EpochPlan::total_fees() const
{
    return std::accumulate(blocks.begin(), blocks.end(), Amount{0},
                           [](Amount acc, const BlockPlan& b) { return acc + b.fees; });
}

double EpochPlan::mean_baseline_stake() const
{
    if (blocks.empty()) {
        return 0.0;
    }
    Amount sum = 0;
    for (const auto& b : blocks) {
        sum += b.baseline_stake;
    }
    return static_cast<double>(sum) / static_cast<double>(blocks.size());
}

std::size_t compute_epoch_length(SlotCount mempool_size, SlotCount block_size)
{
    if (block_size < 1) {
        throw ConfigError("block size must be at least one slot");
    }
    if (mempool_size < 0) {
        throw ConfigError("negative mempool size");
    }
    if (block_size > mempool_size) {
        return 0;
    }
    return static_cast<std::size_t>((mempool_size + block_size - 1) / block_size);
}

SimSeconds epoch_duration(std::size_t length, SimSeconds block_time)
{
    return static_cast<SimSeconds>(length) * block_time;
}

std::vector<BlockPlan> compute_baseline_stakes(std::span<const Transaction> sorted_txs,
                                               SlotCount block_size,
                                               std::size_t length,
                                               Amount coinbase_supplement)
{
    if (!fee_sorted(sorted_txs)) {
        throw PlanningError("transactions are not in fee-descending order");
    }
    SlotCount total = 0;
    for (const auto& tx : sorted_txs) {
        total += tx.size;
    }
    const std::size_t derived = std::max<std::size_t>(1, compute_epoch_length(total, block_size));
    if ((length == 0 && !sorted_txs.empty()) || length > derived) {
        throw PlanningError("epoch length " + std::to_string(length) +
                            " is inconsistent with a mempool of " + std::to_string(total) + " slots");
    }
    return fill_blocks(sorted_txs, block_size, length, coinbase_supplement, false);
}

EpochPlan plan_epoch(std::uint64_t epoch_index, const Mempool& snapshot, const PlannerOptions& options)
{
    if (options.block_time < 0) {
        throw ConfigError("negative block time");
    }
    EpochPlan plan;
    plan.epoch_index = epoch_index;
    plan.block_time = options.block_time;

    const auto sorted = sort_by_fee_desc(snapshot);
    if (options.forced_length) {
        plan.length = *options.forced_length;
        plan.blocks = fill_blocks(sorted, options.block_size, plan.length, options.coinbase_supplement, true);
    } else {
        plan.length = compute_epoch_length(snapshot.total_size(), options.block_size);
        if (plan.length == 0) {
            return plan;
        }
        plan.blocks = compute_baseline_stakes(sorted, options.block_size, plan.length, options.coinbase_supplement);
    }
    plan.duration = epoch_duration(plan.length, options.block_time);
    return plan;
}

} // namespace epos
