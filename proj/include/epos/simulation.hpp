#pragma once

#include <epos/auction.hpp>
#include <epos/config.hpp>
#include <epos/mining.hpp>
#include <epos/pbft.hpp>
#include <epos/planner.hpp>
#include <epos/schemes.hpp>
#include <epos/world.hpp>

#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace epos {

struct PbftSummary {
    bool decided = false;
    NodeId primary;
    std::size_t replicas = 0;
    std::size_t view_changes = 0;
    std::size_t messages = 0;
    std::vector<PhaseRecord> rounds;
    std::vector<NodeId> faulty;
};

struct BlockReport {
    std::size_t index = 0;
    NodeId miner;
    BasisPoints pct = 0;
    Amount baseline_stake = 0;
    Amount locked_stake = 0;
    Amount balance_pre = 0;
    bool via_fallback = false;
    unsigned halvings = 0;
    std::size_t tx_count = 0;
    Amount fees = 0;
    std::size_t invalid_removed = 0;
    std::size_t stolen = 0;
    bool equivocated = false;
    SimSeconds timestamp = 0;
    std::uint64_t height = 0;
    std::string block_hash;
};

/// Pairs a settled penalty with the block it punishes.
struct PenaltyRecord {
    std::uint64_t epoch = 0;
    AssignmentEntry entry;
    std::vector<Transaction> stolen;
    Amount reward = 0;
    PenaltyOutcome outcome;
};

enum class EpochStatus { mined, skipped, pbft_failed };

std::string_view to_string(EpochStatus status);

struct EpochReport {
    std::uint64_t epoch = 0;
    EpochStatus status = EpochStatus::mined;
    SimSeconds start_time = 0;
    PbftSummary pbft;
    /// Settlements of earlier epochs released when this epoch's PBFT
    /// round succeeded.
    std::vector<SettlementReport> settlements;
    std::size_t snapshot_size = 0;
    std::size_t length = 0;
    SimSeconds duration = 0;
    Amount total_fees = 0;
    std::vector<Amount> baseline_stakes;
    std::size_t bids = 0;
    std::vector<BlockReport> blocks;
    std::vector<NodeId> revoked;
    std::vector<std::pair<std::size_t, NodeId>> promoted;
    std::size_t fallback_blocks = 0;
    std::vector<SchemeResult> schemes;
    std::size_t arrivals = 0;
    std::size_t rejected_arrivals = 0;
    std::size_t mempool_after = 0;
    Amount escrow_after = 0;
    Amount penalty_pool_after = 0;
    bool conserved = true;

    const SchemeResult* scheme(Scheme s) const;
};

struct RunReport {
    RunConfig config;
    std::size_t n = 0;
    Amount total_coins = 0;
    std::size_t genesis_mempool = 0;
    std::vector<Amount> initial_balances;
    std::vector<EpochReport> epochs;
    /// Final balances per scheme world, indexed by node id.
    std::vector<std::pair<Scheme, std::vector<Amount>>> final_balances;
    std::optional<std::string> stall;
};

/// One e-PoS world plus the random and priority worlds it is compared with.
class Simulation {
public:
    explicit Simulation(RunConfig config);
    Simulation(RunConfig config, World world);

    /// Runs one epoch. Throws StallError when the fallback finds nobody.
    EpochReport step();
    /// A PBFT start without planning: settles whatever is pending when the
    /// committee decides.
    std::vector<SettlementReport> settle_pending();

    const RunConfig& config() const { return config_; }
    const LedgerState& ledger() const { return ledger_; }
    const Mempool& mempool() const { return mempool_; }
    const MiningRecord& record() const { return record_; }
    const KeyRegistry& registry() const { return registry_; }
    const std::vector<NodeId>& committee() const { return committee_; }
    const std::vector<NodeId>& adversary() const { return adversary_; }
    const std::vector<Amount>& initial_balances() const { return initial_balances_; }
    std::vector<Amount> scheme_balances(Scheme scheme) const;
    const std::vector<PenaltyRecord>& penalties() const { return penalties_; }
    std::size_t genesis_mempool() const { return genesis_mempool_; }
    SimSeconds now() const { return now_; }
    bool is_adversary(NodeId id) const;

private:
    struct Agreement {
        PbftSummary summary;
        std::optional<Mempool> snapshot;
    };

    Agreement agree();
    std::vector<SettlementReport> settle(const std::vector<NodeId>& faulty);
    std::vector<Bid> collect_bids(const EpochPlan& plan, std::uint64_t epoch);
    const KeyPair& keys_for(NodeId id);
    std::vector<NodeId> bootstrap_committee() const;
    void refill(SimSeconds duration, std::uint64_t stream, EpochReport& report);
    void finish_epoch(EpochReport& report);

    RunConfig config_;
    LedgerState ledger_;
    Mempool mempool_;
    MiningRecord record_;
    KeyRegistry registry_;
    std::unordered_map<NodeId, KeyPair> keys_;
    std::vector<NodeId> committee_;
    std::vector<NodeId> adversary_;
    std::vector<Amount> initial_balances_;
    std::vector<Amount> random_balances_;
    std::vector<Amount> priority_balances_;
    std::vector<NodeId> greedy_set_;
    std::deque<EpochOutcome> pending_;
    std::vector<PenaltyRecord> penalties_;
    std::size_t genesis_mempool_ = 0;
    TxId next_tx_id_ = 0;
    std::uint64_t epoch_ = 0;
    std::uint64_t height_ = 0;
    SimSeconds now_ = 0;
};

/// Runs config.epochs epochs. A stall ends the run early with
/// RunReport::stall set.
RunReport run_experiment(const RunConfig& config);

struct AttackReport {
    AttackStrategy strategy = AttackStrategy::max_bid;
    std::size_t epochs = 0;
    std::size_t total_blocks = 0;
    std::size_t adversary_blocks = 0;
    /// Runs of m + 1 consecutive chain blocks all mined by the adversary.
    std::size_t double_spend_windows = 0;
    std::size_t fallback_blocks = 0;
    std::size_t revoked = 0;
    Amount withheld_rewards = 0;
    std::vector<PenaltyRecord> penalties;
    /// Coin conservation held after every epoch and after settlement.
    bool conserved = true;
    std::optional<std::string> stall;

    double win_rate() const
    {
        return total_blocks == 0 ? 0.0 : double(adversary_blocks) / double(total_blocks);
    }
};

/// Drives the configured adversary through the full pipeline for
/// config.epochs epochs, then one more PBFT start so every mined epoch is
/// settled. Requires config.adversary.
AttackReport run_attack_scenario(const RunConfig& config);

} // namespace epos
