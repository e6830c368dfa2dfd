#include <epos/auction.hpp>

#include <algorithm>

namespace epos {

namespace {

struct TieOrder {
    const MiningRecord& record;

    bool operator()(const TieCandidate& a, const TieCandidate& b) const
    {
        const auto ha = record.blocks_mined(a.node);
        const auto hb = record.blocks_mined(b.node);
        if (ha != hb) {
            return ha < hb;
        }
        if (a.balance != b.balance) {
            return a.balance > b.balance;
        }
        return a.node < b.node;
    }
};

} // namespace

std::vector<std::size_t> eligible_blocks(const Peer& peer, const EpochPlan& plan)
{
    std::vector<std::size_t> out;
    for (const auto& block : plan.blocks) {
        if (peer.balance > block.baseline_stake) {
            out.push_back(block.index);
        }
    }
    return out;
}

Amount committed_stake_for(Amount balance, Amount baseline_stake, BasisPoints pct)
{
    const Amount headroom = balance - baseline_stake;
    if (headroom <= 0) {
        return 0;
    }
    const auto product = static_cast<__int128>(headroom) * pct;
    return static_cast<Amount>(product / kFullBasisPoints);
}

const Bid& BidBook::place_bid(const Peer& peer, std::size_t block_index, BasisPoints pct)
{
    if (bids_.count(peer.node_id) != 0) {
        throw BidRejected("node " + std::to_string(peer.node_id.value) + " already bid this epoch");
    }
    if (pct > kFullBasisPoints) {
        throw BidRejected("percentage outside [0, 10000] basis points");
    }
    if (block_index < 1 || block_index > plan_->blocks.size()) {
        throw BidRejected("no block " + std::to_string(block_index) + " in this epoch");
    }
    const BlockPlan& block = plan_->block(block_index);
    if (peer.balance <= block.baseline_stake) {
        throw BidRejected("balance does not exceed the baseline stake of block " + std::to_string(block_index));
    }
    Bid bid{peer.node_id, block_index, pct, committed_stake_for(peer.balance, block.baseline_stake, pct), peer.balance};
    return bids_.emplace(peer.node_id, bid).first->second;
}

std::vector<Bid> BidBook::bids() const
{
    std::vector<Bid> out;
    out.reserve(bids_.size());
    for (const auto& [_, bid] : bids_) {
        out.push_back(bid);
    }
    return out;
}

NodeId resolve_tie(std::span<const TieCandidate> tied, const MiningRecord& record)
{
    if (tied.empty()) {
        throw Error("resolve_tie called with no candidates");
    }
    return std::min_element(tied.begin(), tied.end(), TieOrder{record})->node;
}

AssignmentEntry make_entry(const Bid& bid, const BlockPlan& block)
{
    AssignmentEntry entry;
    entry.block_index = block.index;
    entry.winner = bid.bidder;
    entry.winning_pct = bid.pct;
    entry.baseline_stake = block.baseline_stake;
    entry.committed_stake = bid.committed_stake;
    entry.locked_stake = block.baseline_stake + bid.committed_stake;
    return entry;
}

Assignment finalize_miners(std::span<const Bid> bids, const MiningRecord& record, const EpochPlan& plan)
{
    std::vector<std::vector<const Bid*>> per_block(plan.blocks.size() + 1);
    for (const auto& bid : bids) {
        if (bid.block_index < 1 || bid.block_index > plan.blocks.size()) {
            throw BidRejected("bid on block outside the epoch");
        }
        per_block[bid.block_index].push_back(&bid);
    }

    Assignment out;
    for (const auto& block : plan.blocks) {
        const auto& entries = per_block[block.index];
        if (entries.empty()) {
            out.unassigned.push_back(block.index);
            continue;
        }
        BasisPoints top = 0;
        for (const Bid* b : entries) {
            top = std::max(top, b->pct);
        }
        std::vector<TieCandidate> tied;
        const Bid* single = nullptr;
        for (const Bid* b : entries) {
            if (b->pct == top) {
                tied.push_back({b->bidder, b->balance});
                single = b;
            }
        }
        if (tied.size() > 1) {
            const NodeId chosen = resolve_tie(tied, record);
            single = *std::find_if(entries.begin(), entries.end(),
                                   [&](const Bid* b) { return b->pct == top && b->bidder == chosen; });
        }
        out.winners.emplace(block.index, make_entry(*single, block));
    }
    return out;
}

std::vector<Bid> rank_bids(std::span<const Bid> bids, std::size_t block_index, const MiningRecord& record)
{
    std::vector<Bid> out;
    for (const auto& bid : bids) {
        if (bid.block_index == block_index) {
            out.push_back(bid);
        }
    }
    const TieOrder tie{record};
    std::sort(out.begin(), out.end(), [&](const Bid& a, const Bid& b) {
        if (a.pct != b.pct) {
            return a.pct > b.pct;
        }
        return tie({a.bidder, a.balance}, {b.bidder, b.balance});
    });
    return out;
}

} // namespace epos
