#pragma once

#include <epos/core.hpp>
#include <epos/planner.hpp>

#include <map>
#include <span>
#include <vector>

namespace epos {

/// Percentages in basis points: 10'000 == 100 %.
using BasisPoints = std::uint32_t;
inline constexpr BasisPoints kFullBasisPoints = 10'000;

struct BidRejected : Error {
    using Error::Error;
};

struct Bid {
    NodeId bidder;
    std::size_t block_index = 0;
    BasisPoints pct = 0;
    Amount committed_stake = 0;
    /// Balance the contract saw when the bid was placed (used for Case 2).
    Amount balance = 0;
};

struct AssignmentEntry {
    std::size_t block_index = 0;
    NodeId winner;
    BasisPoints winning_pct = 0;
    Amount baseline_stake = 0;
    Amount committed_stake = 0;
    Amount locked_stake = 0; // baseline_stake + committed_stake
    bool via_fallback = false;
};

struct Assignment {
    std::map<std::size_t, AssignmentEntry> winners;
    /// Blocks that received no bid.
    std::vector<std::size_t> unassigned;
};

std::vector<std::size_t> eligible_blocks(const Peer& peer, const EpochPlan& plan);

/// floor(pct * (balance - baseline) / 10'000)
Amount committed_stake_for(Amount balance, Amount baseline_stake, BasisPoints pct);

/// Sealed single-round bid collection for one epoch.
class BidBook {
public:
    explicit BidBook(const EpochPlan& plan) : plan_(&plan) {}

    /// Throws BidRejected for an ineligible block, an out-of-range
    /// percentage, or a second bid from the same node.
    const Bid& place_bid(const Peer& peer, std::size_t block_index, BasisPoints pct);

    std::vector<Bid> bids() const;
    std::size_t size() const { return bids_.size(); }
    const EpochPlan& plan() const { return *plan_; }

private:
    const EpochPlan* plan_;
    std::map<NodeId, Bid> bids_;
};

struct TieCandidate {
    NodeId node;
    Amount balance = 0;
};

/// Fewest prior blocks wins; then greatest balance; then smallest node id.
NodeId resolve_tie(std::span<const TieCandidate> tied, const MiningRecord& record);

/// Highest percentage per block, ties via resolve_tie.
Assignment finalize_miners(std::span<const Bid> bids, const MiningRecord& record, const EpochPlan& plan);

/// Remaining bids for a block ordered best-first under the same rules.
std::vector<Bid> rank_bids(std::span<const Bid> bids, std::size_t block_index, const MiningRecord& record);

AssignmentEntry make_entry(const Bid& bid, const BlockPlan& block);

} // namespace epos
