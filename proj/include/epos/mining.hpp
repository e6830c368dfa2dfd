#pragma once

#include <epos/auction.hpp>
#include <epos/core.hpp>
#include <epos/planner.hpp>
#include <epos/signature.hpp>

#include <functional>
#include <set>
#include <span>
#include <unordered_set>
#include <vector>

namespace epos {

struct StallError : Error {
    using Error::Error;
};

struct SettlementError : Error {
    using Error::Error;
};

/// Canonical signed message: length-prefixed epoch, block index, the
/// transactions sorted by id as (id, fee, size), then the miner id.
Bytes encode_block_body(std::uint64_t epoch, const BlockPlan& plan, NodeId miner);

struct SignedBlock {
    std::uint64_t epoch = 0;
    BlockPlan plan;
    NodeId miner;
    PublicKey public_key{};
    Bytes body;
    Signature signature{};
    Digest block_hash{};
};

/// A transaction the miner reported as invalid and dropped.
struct FraudReport {
    TxId tx = 0;
    NodeId sender;
    Amount fee = 0;
};

struct MiningResult {
    SignedBlock block;
    std::vector<FraudReport> fraud_reports;
};

/// Drops every transaction flagged invalid plus any listed in
/// `claimed_invalid` (a fraudulent miner's extra removals), reports each
/// removal, then signs and hashes the remaining body.
MiningResult mine_block(std::uint64_t epoch,
                        const BlockPlan& plan,
                        NodeId miner,
                        const KeyPair& keys,
                        const std::unordered_set<TxId>& claimed_invalid = {});

/// 1 iff the miner's registered key verifies the signature, the body is the
/// canonical encoding of the carried plan, and the hash recomputes.
bool verify_block(const SignedBlock& block, const KeyRegistry& registry);

/// Two distinct bodies validly signed by one miner for the same slot.
bool is_equivocation(const SignedBlock& a, const SignedBlock& b, const KeyRegistry& registry);

enum class CommitmentStatus { accepted, revoked };

CommitmentStatus final_commitment_check(const AssignmentEntry& entry, Amount current_balance);

struct CommitmentOutcome {
    Assignment assignment;
    std::vector<NodeId> revoked;
    /// (block index, promoted bidder)
    std::vector<std::pair<std::size_t, NodeId>> promoted;
};

/// Runs the final commitment for every winner; a revoked winner's block
/// goes to the next-ranked original bidder that still covers its lock, or
/// to Assignment::unassigned when none does.
CommitmentOutcome confirm_commitments(Assignment assignment,
                                      std::span<const Bid> bids,
                                      const MiningRecord& record,
                                      const EpochPlan& plan,
                                      const std::function<Amount(NodeId)>& current_balance);

struct FallbackOutcome {
    AssignmentEntry entry;
    Amount threshold = 0;
    unsigned halvings = 0;
};

/// Lowers the block's threshold by `factor` until some transaction sender
/// or recipient (any peer, for a block with no transactions) outside
/// `excluded` has a balance above it; the richest such party is assigned.
/// Throws StallError when even a zero threshold finds nobody.
FallbackOutcome nothing_at_stake_fallback(const BlockPlan& block,
                                          std::span<const Peer> peers,
                                          const std::unordered_set<NodeId>& excluded,
                                          unsigned factor = 2);

struct VictimRefund {
    TxId tx = 0;
    NodeId recipient;
    Amount refund = 0;
};

struct PenaltyOutcome {
    NodeId offender;
    /// Refunds drawn from the baseline part of the lock.
    Amount reimbursed_fees = 0;
    /// Refund shortfall covered from the forfeited reward (only possible
    /// when a fallback lock was below the stolen fees).
    Amount reimbursed_from_reward = 0;
    /// Confiscated beyond-baseline commitment.
    Amount penalty = 0;
    Amount forfeited_reward = 0;
    Amount returned_to_offender = 0;
    std::vector<VictimRefund> victims;

    Amount total_refunds() const { return reimbursed_fees + reimbursed_from_reward; }
};

PenaltyOutcome apply_penalty(const AssignmentEntry& entry, std::span<const Transaction> victim_txs, Amount reward = 0);

struct MinedBlockOutcome {
    AssignmentEntry entry;
    /// Fees moved from in-flight into escrow for this block.
    Amount reward = 0;
    /// Valid transactions the miner fraudulently dropped.
    std::vector<Transaction> victims;
    bool equivocated = false;
};

struct EpochOutcome {
    std::uint64_t epoch = 0;
    std::vector<MinedBlockOutcome> blocks;
    bool settled = false;
};

struct Release {
    NodeId miner;
    std::size_t block_index = 0;
    Amount amount = 0;
};

struct SettlementReport {
    std::uint64_t epoch = 0;
    bool released = false;
    std::vector<Release> releases;
    std::vector<PenaltyOutcome> penalties;
    std::vector<NodeId> withheld;
    Amount withheld_amount = 0;
};

/// Releases epoch `outcome.epoch` once the following epoch started. Honest
/// miners get reward + lock back; offenders go through apply_penalty;
/// miners in `faulty_replicas` get their lock back but forfeit the reward.
/// Throws SettlementError if the outcome was already settled.
SettlementReport settle_epoch(EpochOutcome& outcome,
                              bool next_started_ok,
                              const std::set<NodeId>& faulty_replicas,
                              LedgerState& ledger);

} // namespace epos
