#include <epos/core.hpp>

#include <algorithm>
#include <numeric>

namespace epos {

void Mempool::insert(const Transaction& tx)
{
    if (ids_.count(tx.id) != 0) {
        throw DuplicateTransaction("duplicate transaction id " + std::to_string(tx.id));
    }
    if (tx.fee < 0 || tx.size < 1) {
        throw Error("malformed transaction " + std::to_string(tx.id));
    }
    if (capacity_ && total_size_ + tx.size > *capacity_) {
        throw Error("mempool capacity exceeded by transaction " + std::to_string(tx.id));
    }
    txs_.push_back(tx);
    ids_.insert(tx.id);
    total_fees_ += tx.fee;
    total_size_ += tx.size;
}

std::size_t Mempool::remove(const std::unordered_set<TxId>& ids)
{
    std::size_t removed = 0;
    std::erase_if(txs_, [&](const Transaction& tx) {
        if (ids.count(tx.id) == 0) {
            return false;
        }
        ids_.erase(tx.id);
        total_fees_ -= tx.fee;
        total_size_ -= tx.size;
        ++removed;
        return true;
    });
    return removed;
}

Mempool mempool_insert(Mempool pool, const Transaction& tx)
{
    pool.insert(tx);
    return pool;
}

std::vector<Transaction> sort_by_fee_desc(std::span<const Transaction> txs)
{
    std::vector<Transaction> sorted(txs.begin(), txs.end());
    std::sort(sorted.begin(), sorted.end(), [](const Transaction& a, const Transaction& b) {
        if (a.fee != b.fee) {
            return a.fee > b.fee;
        }
        return a.id < b.id;
    });
    return sorted;
}

std::uint64_t MiningRecord::blocks_mined(NodeId node) const
{
    auto it = counts_.find(node);
    return it == counts_.end() ? 0 : it->second;
}

MiningRecord record_block(MiningRecord record, NodeId node)
{
    record.record_block(node);
    return record;
}

LedgerState::LedgerState(std::vector<Peer> peers) : peers_(std::move(peers))
{
    for (std::size_t i = 0; i < peers_.size(); ++i) {
        if (peers_[i].node_id.value != i) {
            throw LedgerError("peers must be indexed densely by node id");
        }
        if (peers_[i].balance < 0) {
            throw LedgerError("negative initial balance");
        }
        total_coins_ += peers_[i].balance;
    }
}

const Peer& LedgerState::peer(NodeId id) const
{
    if (id.value >= peers_.size()) {
        throw LedgerError("unknown node " + std::to_string(id.value));
    }
    return peers_[id.value];
}

Peer& LedgerState::mutable_peer(NodeId id)
{
    if (id.value >= peers_.size()) {
        throw LedgerError("unknown node " + std::to_string(id.value));
    }
    return peers_[id.value];
}

void LedgerState::debit_to_escrow(NodeId id, Amount amount)
{
    Peer& p = mutable_peer(id);
    if (amount < 0 || p.balance < amount) {
        throw LedgerError("insufficient balance to lock stake for node " + std::to_string(id.value));
    }
    p.balance -= amount;
    escrow_ += amount;
}

void LedgerState::release_from_escrow(NodeId id, Amount amount)
{
    if (amount < 0 || escrow_ < amount) {
        throw LedgerError("escrow underflow");
    }
    escrow_ -= amount;
    mutable_peer(id).balance += amount;
}

void LedgerState::escrow_to_penalty(Amount amount)
{
    if (amount < 0 || escrow_ < amount) {
        throw LedgerError("escrow underflow");
    }
    escrow_ -= amount;
    penalty_pool_ += amount;
}

void LedgerState::admit_fee(NodeId sender, Amount fee)
{
    Peer& p = mutable_peer(sender);
    if (fee < 0 || p.balance < fee) {
        throw LedgerError("sender cannot pay fee");
    }
    p.balance -= fee;
    in_flight_ += fee;
}

void LedgerState::refund_in_flight(NodeId sender, Amount fee)
{
    if (fee < 0 || in_flight_ < fee) {
        throw LedgerError("in-flight underflow");
    }
    in_flight_ -= fee;
    mutable_peer(sender).balance += fee;
}

void LedgerState::in_flight_to_escrow(Amount fee)
{
    if (fee < 0 || in_flight_ < fee) {
        throw LedgerError("in-flight underflow");
    }
    in_flight_ -= fee;
    escrow_ += fee;
}

void LedgerState::transfer(NodeId from, NodeId to, Amount amount)
{
    Peer& src = mutable_peer(from);
    if (amount < 0 || src.balance < amount) {
        throw LedgerError("insufficient balance for transfer");
    }
    src.balance -= amount;
    mutable_peer(to).balance += amount;
}

void LedgerState::append_block(ChainEntry entry)
{
    if (!chain_.empty() && entry.height <= chain_.back().height) {
        throw LedgerError("chain heights must increase");
    }
    chain_.push_back(std::move(entry));
}

Amount LedgerState::total_balances() const
{
    return std::accumulate(peers_.begin(), peers_.end(), Amount{0},
                           [](Amount acc, const Peer& p) { return acc + p.balance; });
}

bool LedgerState::conserved() const
{
    return total_balances() + escrow_ + in_flight_ + penalty_pool_ == total_coins_;
}

} // namespace epos
