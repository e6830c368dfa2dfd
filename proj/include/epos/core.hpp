#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace epos {

/// Coin amounts in integer base units.
using Amount = std::int64_t;
using TxId = std::uint64_t;
/// Size in abstract transaction slots.
using SlotCount = std::int64_t;
/// Simulated seconds.
using SimSeconds = std::int64_t;

/// Opaque network identity (stands in for an IP address).
struct NodeId {
    std::uint64_t value = 0;

    auto operator<=>(const NodeId&) const = default;
};

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct DuplicateTransaction : Error {
    using Error::Error;
};

struct PlanningError : Error {
    using Error::Error;
};

struct LedgerError : Error {
    using Error::Error;
};

struct Transaction {
    TxId id = 0;
    Amount fee = 0;
    SlotCount size = 1;
    NodeId sender;
    NodeId recipient;
    // Ground truth for fraud injection; there is no UTXO model behind it.
    bool valid = true;

    bool operator==(const Transaction&) const = default;
};

struct Peer {
    NodeId node_id;
    std::uint64_t account_id = 0;
    Amount balance = 0;
};

/// Unconfirmed transactions in arrival order with running totals.
class Mempool {
public:
    Mempool() = default;
    explicit Mempool(std::optional<SlotCount> capacity) : capacity_(capacity) {}

    /// Throws DuplicateTransaction on a repeated id, or Error when the
    /// size cap would be exceeded.
    void insert(const Transaction& tx);
    bool contains(TxId id) const { return ids_.count(id) != 0; }
    /// Removes every listed id that is present; returns how many were removed.
    std::size_t remove(const std::unordered_set<TxId>& ids);

    std::span<const Transaction> transactions() const { return txs_; }
    std::size_t count() const { return txs_.size(); }
    bool empty() const { return txs_.empty(); }
    Amount total_fees() const { return total_fees_; }
    SlotCount total_size() const { return total_size_; }
    std::optional<SlotCount> capacity() const { return capacity_; }

private:
    std::vector<Transaction> txs_;
    std::unordered_set<TxId> ids_;
    Amount total_fees_ = 0;
    SlotCount total_size_ = 0;
    std::optional<SlotCount> capacity_;
};

Mempool mempool_insert(Mempool pool, const Transaction& tx);

/// Fee-descending order, ties by ascending id.
std::vector<Transaction> sort_by_fee_desc(std::span<const Transaction> txs);
inline std::vector<Transaction> sort_by_fee_desc(const Mempool& pool)
{
    return sort_by_fee_desc(pool.transactions());
}

struct BlockPlan {
    std::size_t index = 0; // 1-based position in the epoch
    std::vector<Transaction> transactions;
    Amount fees = 0;           // sum of contained fees
    Amount baseline_stake = 0; // fees plus any configured coinbase supplement
    SlotCount size = 0;
};

/// Blocks mined per node identity (h_j).
class MiningRecord {
public:
    void record_block(NodeId node) { ++counts_[node]; }
    std::uint64_t blocks_mined(NodeId node) const;
    const std::map<NodeId, std::uint64_t>& counts() const { return counts_; }

private:
    std::map<NodeId, std::uint64_t> counts_;
};

MiningRecord record_block(MiningRecord record, NodeId node);

/// Header of a block appended to the chain.
struct ChainEntry {
    std::uint64_t epoch = 0;
    std::uint64_t height = 0;
    std::size_t block_index = 0;
    NodeId miner;
    SimSeconds timestamp = 0;
    std::string block_hash; // hex
    std::size_t tx_count = 0;
    Amount fees = 0;
};

/// Global accounting. Peers are stored densely: peers[i].node_id.value == i.
class LedgerState {
public:
    LedgerState() = default;
    explicit LedgerState(std::vector<Peer> peers);

    std::span<const Peer> peers() const { return peers_; }
    std::size_t peer_count() const { return peers_.size(); }
    const Peer& peer(NodeId id) const;
    Amount balance(NodeId id) const { return peer(id).balance; }

    /// Spendable movement between a peer and a contract pool. Throws
    /// LedgerError if a balance or pool would go negative.
    void debit_to_escrow(NodeId id, Amount amount);
    void release_from_escrow(NodeId id, Amount amount);
    void escrow_to_penalty(Amount amount);
    void admit_fee(NodeId sender, Amount fee);
    void refund_in_flight(NodeId sender, Amount fee);
    void in_flight_to_escrow(Amount fee);
    void transfer(NodeId from, NodeId to, Amount amount);

    void append_block(ChainEntry entry);
    std::span<const ChainEntry> chain() const { return chain_; }

    Amount total_coins() const { return total_coins_; }
    Amount escrow() const { return escrow_; }
    Amount in_flight_fees() const { return in_flight_; }
    Amount penalty_pool() const { return penalty_pool_; }
    Amount total_balances() const;
    /// Σ balances + escrow + in-flight fees + penalty pool == B_N.
    bool conserved() const;

private:
    Peer& mutable_peer(NodeId id);

    std::vector<Peer> peers_;
    std::vector<ChainEntry> chain_;
    Amount total_coins_ = 0;
    Amount escrow_ = 0;
    Amount in_flight_ = 0;
    Amount penalty_pool_ = 0;
};

} // namespace epos

template <>
struct std::hash<epos::NodeId> {
    std::size_t operator()(const epos::NodeId& id) const noexcept
    {
        return std::hash<std::uint64_t>{}(id.value);
    }
};
