#include <epos/mining.hpp>

#include <algorithm>

namespace epos {

Bytes encode_block_body(std::uint64_t epoch, const BlockPlan& plan, NodeId miner)
{
    std::vector<const Transaction*> txs;
    txs.reserve(plan.transactions.size());
    for (const auto& tx : plan.transactions) {
        txs.push_back(&tx);
    }
    std::sort(txs.begin(), txs.end(), [](const Transaction* a, const Transaction* b) { return a->id < b->id; });

    Encoder header;
    header.u64(epoch);
    header.u64(plan.index);
    Encoder body_txs;
    for (const Transaction* tx : txs) {
        body_txs.u64(tx->id);
        body_txs.i64(tx->fee);
        body_txs.i64(tx->size);
    }
    Encoder miner_field;
    miner_field.u64(miner.value);

    Encoder out;
    out.field(header.bytes());
    out.u64(txs.size());
    out.field(body_txs.bytes());
    out.field(miner_field.bytes());
    return out.take();
}

MiningResult mine_block(std::uint64_t epoch,
                        const BlockPlan& plan,
                        NodeId miner,
                        const KeyPair& keys,
                        const std::unordered_set<TxId>& claimed_invalid)
{
    MiningResult result;
    BlockPlan kept;
    kept.index = plan.index;
    for (const auto& tx : plan.transactions) {
        if (!tx.valid || claimed_invalid.count(tx.id) != 0) {
            result.fraud_reports.push_back({tx.id, tx.sender, tx.fee});
            continue;
        }
        kept.transactions.push_back(tx);
        kept.fees += tx.fee;
        kept.size += tx.size;
    }
    kept.baseline_stake = plan.baseline_stake;

    SignedBlock& block = result.block;
    block.epoch = epoch;
    block.miner = miner;
    block.public_key = keys.public_key();
    block.body = encode_block_body(epoch, kept, miner);
    block.signature = keys.sign(block.body);
    block.block_hash = hash_bytes(block.body);
    block.plan = std::move(kept);
    return result;
}

bool verify_block(const SignedBlock& block, const KeyRegistry& registry)
{
    const auto pk = registry.lookup(block.miner);
    if (!pk || *pk != block.public_key) {
        return false;
    }
    if (hash_bytes(block.body) != block.block_hash) {
        return false;
    }
    if (encode_block_body(block.epoch, block.plan, block.miner) != block.body) {
        return false;
    }
    return verify_signature(*pk, block.body, block.signature);
}

bool is_equivocation(const SignedBlock& a, const SignedBlock& b, const KeyRegistry& registry)
{
    return a.miner == b.miner && a.epoch == b.epoch && a.plan.index == b.plan.index &&
           a.block_hash != b.block_hash && verify_block(a, registry) && verify_block(b, registry);
}

CommitmentStatus final_commitment_check(const AssignmentEntry& entry, Amount current_balance)
{
    return current_balance >= entry.locked_stake ? CommitmentStatus::accepted : CommitmentStatus::revoked;
}

CommitmentOutcome confirm_commitments(Assignment assignment,
                                      std::span<const Bid> bids,
                                      const MiningRecord& record,
                                      const EpochPlan& plan,
                                      const std::function<Amount(NodeId)>& current_balance)
{
    CommitmentOutcome out;
    std::vector<std::size_t> lost;
    for (auto& [index, entry] : assignment.winners) {
        if (final_commitment_check(entry, current_balance(entry.winner)) == CommitmentStatus::accepted) {
            continue;
        }
        out.revoked.push_back(entry.winner);
        bool replaced = false;
        for (const Bid& next : rank_bids(bids, index, record)) {
            if (next.bidder == entry.winner) {
                continue;
            }
            const AssignmentEntry candidate = make_entry(next, plan.block(index));
            if (final_commitment_check(candidate, current_balance(next.bidder)) == CommitmentStatus::accepted) {
                entry = candidate;
                out.promoted.emplace_back(index, next.bidder);
                replaced = true;
                break;
            }
            out.revoked.push_back(next.bidder);
        }
        if (!replaced) {
            lost.push_back(index);
        }
    }
    for (std::size_t index : lost) {
        assignment.winners.erase(index);
        assignment.unassigned.push_back(index);
    }
    std::sort(assignment.unassigned.begin(), assignment.unassigned.end());
    out.assignment = std::move(assignment);
    return out;
}

FallbackOutcome nothing_at_stake_fallback(const BlockPlan& block,
                                          std::span<const Peer> peers,
                                          const std::unordered_set<NodeId>& excluded,
                                          unsigned factor)
{
    if (factor < 2) {
        throw ConfigError("fallback factor must be at least 2");
    }
    std::set<NodeId> parties;
    if (block.transactions.empty()) {
        for (const auto& p : peers) {
            parties.insert(p.node_id);
        }
    } else {
        for (const auto& tx : block.transactions) {
            parties.insert(tx.sender);
            parties.insert(tx.recipient);
        }
    }
    Amount threshold = block.baseline_stake;
    unsigned halvings = 0;
    while (true) {
        const Peer* best = nullptr;
        for (NodeId id : parties) {
            if (excluded.count(id) != 0 || id.value >= peers.size()) {
                continue;
            }
            const Peer& p = peers[id.value];
            if (p.balance > threshold && (!best || p.balance > best->balance)) {
                best = &p;
            }
        }
        if (best) {
            FallbackOutcome out;
            out.threshold = threshold;
            out.halvings = halvings;
            out.entry.block_index = block.index;
            out.entry.winner = best->node_id;
            out.entry.baseline_stake = threshold;
            out.entry.locked_stake = threshold;
            out.entry.via_fallback = true;
            return out;
        }
        if (threshold == 0) {
            throw StallError("block " + std::to_string(block.index) +
                             " has no bidder and no transaction party with a positive balance");
        }
        threshold /= factor;
        ++halvings;
    }
}

PenaltyOutcome apply_penalty(const AssignmentEntry& entry, std::span<const Transaction> victim_txs, Amount reward)
{
    PenaltyOutcome out;
    out.offender = entry.winner;
    Amount baseline_left = entry.baseline_stake;
    Amount reward_left = reward;
    for (const auto& tx : victim_txs) {
        const Amount from_baseline = std::min(tx.fee, baseline_left);
        baseline_left -= from_baseline;
        const Amount shortfall = tx.fee - from_baseline;
        if (shortfall > reward_left) {
            throw SettlementError("stolen fees exceed the offender's lock and reward");
        }
        reward_left -= shortfall;
        out.reimbursed_fees += from_baseline;
        out.reimbursed_from_reward += shortfall;
        out.victims.push_back({tx.id, tx.sender, tx.fee});
    }
    out.penalty = entry.locked_stake - entry.baseline_stake;
    out.returned_to_offender = baseline_left;
    out.forfeited_reward = reward_left;
    return out;
}

SettlementReport settle_epoch(EpochOutcome& outcome,
                              bool next_started_ok,
                              const std::set<NodeId>& faulty_replicas,
                              LedgerState& ledger)
{
    if (outcome.settled) {
        throw SettlementError("epoch " + std::to_string(outcome.epoch) + " already settled");
    }
    SettlementReport report;
    report.epoch = outcome.epoch;
    if (!next_started_ok) {
        return report;
    }
    report.released = true;
    for (const auto& mined : outcome.blocks) {
        const NodeId miner = mined.entry.winner;
        if (!mined.victims.empty() || mined.equivocated) {
            PenaltyOutcome penalty = apply_penalty(mined.entry, mined.victims, mined.reward);
            for (const auto& v : penalty.victims) {
                ledger.release_from_escrow(v.recipient, v.refund);
            }
            ledger.release_from_escrow(miner, penalty.returned_to_offender);
            ledger.escrow_to_penalty(penalty.penalty + penalty.forfeited_reward);
            report.penalties.push_back(std::move(penalty));
        } else if (faulty_replicas.count(miner) != 0) {
            ledger.release_from_escrow(miner, mined.entry.locked_stake);
            ledger.escrow_to_penalty(mined.reward);
            report.withheld.push_back(miner);
            report.withheld_amount += mined.reward;
            report.releases.push_back({miner, mined.entry.block_index, mined.entry.locked_stake});
        } else {
            const Amount amount = mined.entry.locked_stake + mined.reward;
            ledger.release_from_escrow(miner, amount);
            report.releases.push_back({miner, mined.entry.block_index, amount});
        }
    }
    outcome.settled = true;
    return report;
}

} // namespace epos
