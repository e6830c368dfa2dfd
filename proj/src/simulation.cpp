#include <epos/rng.hpp>
#include <epos/simulation.hpp>

#include <algorithm>
#include <set>
#include <unordered_set>

namespace epos {

std::string_view to_string(EpochStatus status)
{
    switch (status) {
    case EpochStatus::mined:
        return "mined";
    case EpochStatus::skipped:
        return "skipped";
    case EpochStatus::pbft_failed:
        return "pbft-failed";
    }
    return "unknown";
}

const SchemeResult* EpochReport::scheme(Scheme s) const
{
    for (const auto& r : schemes) {
        if (r.scheme == s) {
            return &r;
        }
    }
    return nullptr;
}

Simulation::Simulation(RunConfig config) : Simulation(config, generate_world(config)) {}

Simulation::Simulation(RunConfig config, World world)
    : config_(std::move(config)), ledger_(world.peers), adversary_(std::move(world.adversary))
{
    config_.validate();
    initial_balances_.reserve(world.peers.size());
    for (const auto& p : world.peers) {
        initial_balances_.push_back(p.balance);
    }
    for (const auto& tx : world.mempool.transactions()) {
        ledger_.admit_fee(tx.sender, tx.fee);
    }
    mempool_ = std::move(world.mempool);
    genesis_mempool_ = mempool_.count();
    next_tx_id_ = world.next_tx_id;

    random_balances_ = scheme_balances(Scheme::epos);
    priority_balances_ = random_balances_;
    if (config_.runs(Scheme::priority)) {
        greedy_set_ = select_greedy_set(priority_balances_, config_.greedy_fraction);
    }
    committee_ = bootstrap_committee();
}

std::vector<Amount> Simulation::scheme_balances(Scheme scheme) const
{
    switch (scheme) {
    case Scheme::random:
        return random_balances_;
    case Scheme::priority:
        return priority_balances_;
    case Scheme::epos:
        break;
    }
    std::vector<Amount> out;
    out.reserve(ledger_.peer_count());
    for (const auto& p : ledger_.peers()) {
        out.push_back(p.balance);
    }
    return out;
}

bool Simulation::is_adversary(NodeId id) const
{
    return std::binary_search(adversary_.begin(), adversary_.end(), id);
}

std::vector<NodeId> Simulation::bootstrap_committee() const
{
    std::vector<NodeId> ids;
    ids.reserve(ledger_.peer_count());
    for (const auto& p : ledger_.peers()) {
        ids.push_back(p.node_id);
    }
    const std::size_t k = std::min(config_.committee_size, ids.size());
    std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k), ids.end(), [&](NodeId a, NodeId b) {
        const Amount ba = ledger_.balance(a);
        const Amount bb = ledger_.balance(b);
        return ba != bb ? ba > bb : a < b;
    });
    ids.resize(k);
    std::sort(ids.begin(), ids.end());
    return ids;
}

const KeyPair& Simulation::keys_for(NodeId id)
{
    auto it = keys_.find(id);
    if (it == keys_.end()) {
        it = keys_.emplace(id, KeyPair::from_seed(derive_seed(config_.seed, "miner-key", id.value))).first;
        registry_.register_key(id, it->second.public_key());
    }
    return it->second;
}

Simulation::Agreement Simulation::agree()
{
    auto base = std::make_shared<const Mempool>(mempool_);
    auto replicas = diverge_views(base, committee_, config_.propagation_loss,
                                  derive_seed(config_.seed, "propagation", epoch_));
    if (config_.adversary) {
        for (auto& r : replicas) {
            if (is_adversary(r.node_id)) {
                r.behavior = config_.adversary->replica_behavior;
            }
        }
    }
    const NodeId primary = select_primary(committee_, derive_seed(config_.seed, "primary", epoch_));
    PbftOutcome outcome = run_pbft(replicas, primary);

    Agreement out;
    out.summary.decided = outcome.decided;
    out.summary.primary = outcome.primary;
    out.summary.replicas = replicas.size();
    out.summary.view_changes = outcome.view_changes;
    out.summary.messages = outcome.total_messages();
    out.summary.rounds = std::move(outcome.rounds);
    out.summary.faulty = std::move(outcome.faulty_detected);
    if (outcome.decided) {
        const auto& mask = outcome.agreed_view->mask();
        if (!std::all_of(mask.begin(), mask.end(), [](bool b) { return b; })) {
            out.snapshot = outcome.agreed_view->materialize();
        }
    }
    return out;
}

std::vector<SettlementReport> Simulation::settle(const std::vector<NodeId>& faulty)
{
    const std::set<NodeId> faulty_set(faulty.begin(), faulty.end());
    std::vector<SettlementReport> out;
    for (auto& outcome : pending_) {
        SettlementReport report = settle_epoch(outcome, true, faulty_set, ledger_);
        std::size_t next_penalty = 0;
        for (const auto& mined : outcome.blocks) {
            if (mined.victims.empty() && !mined.equivocated) {
                continue;
            }
            penalties_.push_back(
                {outcome.epoch, mined.entry, mined.victims, mined.reward, report.penalties.at(next_penalty++)});
        }
        out.push_back(std::move(report));
    }
    pending_.clear();
    return out;
}

std::vector<SettlementReport> Simulation::settle_pending()
{
    Agreement agreement = agree();
    if (!agreement.summary.decided) {
        return {};
    }
    auto out = settle(agreement.summary.faulty);
    if (!ledger_.conserved()) {
        throw LedgerError("coin conservation violated by the closing settlement");
    }
    return out;
}

std::vector<Bid> Simulation::collect_bids(const EpochPlan& plan, std::uint64_t epoch)
{
    // Blocks by decreasing stake; a peer's eligible blocks form a suffix.
    std::vector<std::size_t> by_stake(plan.blocks.size());
    for (std::size_t i = 0; i < by_stake.size(); ++i) {
        by_stake[i] = i + 1;
    }
    std::stable_sort(by_stake.begin(), by_stake.end(), [&](std::size_t a, std::size_t b) {
        return plan.block(a).baseline_stake > plan.block(b).baseline_stake;
    });
    auto first_eligible = [&](Amount balance) {
        return static_cast<std::size_t>(
            std::partition_point(by_stake.begin(), by_stake.end(),
                                 [&](std::size_t i) { return plan.block(i).baseline_stake >= balance; }) -
            by_stake.begin());
    };

    BidBook book(plan);
    Rng rng = make_rng(config_.seed, "bids", epoch);
    std::uniform_int_distribution<BasisPoints> pct(0, kFullBasisPoints);
    constexpr BasisPoints kGreedyPct = 9'900;

    if (config_.bid_strategy != BidStrategy::abstain) {
        for (const auto& peer : ledger_.peers()) {
            if (is_adversary(peer.node_id)) {
                continue;
            }
            const std::size_t start = first_eligible(peer.balance);
            const std::size_t count = by_stake.size() - start;
            if (count == 0) {
                continue;
            }
            if (config_.bid_strategy == BidStrategy::greedy) {
                book.place_bid(peer, by_stake[start], kGreedyPct);
                continue;
            }
            const std::size_t window = std::min(count, config_.bid_window);
            const std::size_t pick = std::uniform_int_distribution<std::size_t>(0, window - 1)(rng);
            book.place_bid(peer, by_stake[start + pick], pct(rng));
        }
    }

    if (config_.adversary && config_.adversary->strategy != AttackStrategy::abstain) {
        std::unordered_set<std::size_t> taken;
        for (NodeId id : adversary_) {
            const Peer& peer = ledger_.peer(id);
            for (std::size_t k = first_eligible(peer.balance); k < by_stake.size(); ++k) {
                if (taken.insert(by_stake[k]).second) {
                    book.place_bid(peer, by_stake[k], config_.adversary->bid_pct);
                    break;
                }
            }
        }
    }
    return book.bids();
}

void Simulation::refill(SimSeconds duration, std::uint64_t stream, EpochReport& report)
{
    const ArrivalModel model{config_.fee_min, config_.fee_max, config_.invalid_tx_fraction, ledger_.peer_count()};
    const auto arrivals = poisson_arrivals(config_.lambda, duration, derive_seed(config_.seed, "arrivals", stream),
                                           model, next_tx_id_);
    next_tx_id_ += arrivals.size();
    report.arrivals = arrivals.size();
    for (const auto& tx : arrivals) {
        if (ledger_.balance(tx.sender) < tx.fee) {
            ++report.rejected_arrivals;
            continue;
        }
        ledger_.admit_fee(tx.sender, tx.fee);
        mempool_.insert(tx);
        for (auto* world : {&random_balances_, &priority_balances_}) {
            Amount& b = (*world)[tx.sender.value];
            b = std::max<Amount>(0, b - tx.fee);
        }
    }
}

void Simulation::finish_epoch(EpochReport& report)
{
    report.mempool_after = mempool_.count();
    report.escrow_after = ledger_.escrow();
    report.penalty_pool_after = ledger_.penalty_pool();
    report.conserved = ledger_.conserved();
    if (!report.conserved) {
        throw LedgerError("coin conservation violated in epoch " + std::to_string(report.epoch));
    }
    ++epoch_;
}

EpochReport Simulation::step()
{
    EpochReport report;
    report.epoch = epoch_;
    report.start_time = now_;

    Agreement agreement = agree();
    report.pbft = agreement.summary;
    if (!agreement.summary.decided) {
        report.status = EpochStatus::pbft_failed;
        committee_ = bootstrap_committee();
        now_ += config_.block_time;
        refill(config_.block_time, epoch_, report);
        finish_epoch(report);
        return report;
    }
    report.settlements = settle(agreement.summary.faulty);

    PlannerOptions options;
    options.block_size = config_.block_size;
    options.block_time = config_.block_time;
    options.forced_length = config_.forced_length;
    options.coinbase_supplement = config_.coinbase_supplement;
    const Mempool& snapshot = agreement.snapshot ? *agreement.snapshot : mempool_;
    const EpochPlan plan = plan_epoch(epoch_, snapshot, options);

    report.snapshot_size = snapshot.count();
    report.length = plan.length;
    report.duration = plan.duration;
    report.total_fees = plan.total_fees();
    for (const auto& b : plan.blocks) {
        report.baseline_stakes.push_back(b.baseline_stake);
    }
    if (plan.length == 0) {
        report.status = EpochStatus::skipped;
        now_ += config_.block_time;
        refill(config_.block_time, epoch_, report);
        finish_epoch(report);
        return report;
    }

    std::vector<SchemeResult> baselines;
    if (config_.runs(Scheme::random)) {
        baselines.push_back(run_random_scheme(random_balances_, plan, config_.seed));
    }
    if (config_.runs(Scheme::priority)) {
        baselines.push_back(run_priority_scheme(priority_balances_, plan, greedy_set_));
    }

    const std::vector<Bid> bids = collect_bids(plan, epoch_);
    report.bids = bids.size();
    const std::vector<Amount> bid_balances = scheme_balances(Scheme::epos);
    Assignment assignment = finalize_miners(bids, record_, plan);

    if (config_.adversary && config_.adversary->spend_before_commit) {
        const NodeId payee{0};
        for (const auto& [index, entry] : assignment.winners) {
            const Amount balance = ledger_.balance(entry.winner);
            if (is_adversary(entry.winner) && balance >= entry.locked_stake) {
                ledger_.transfer(entry.winner, payee, balance - entry.locked_stake + 1);
            }
        }
    }
    CommitmentOutcome commitment =
        confirm_commitments(std::move(assignment), bids, record_, plan, [&](NodeId id) { return ledger_.balance(id); });
    report.revoked = commitment.revoked;
    report.promoted = commitment.promoted;
    auto& winners = commitment.assignment.winners;

    std::unordered_set<NodeId> assigned;
    for (const auto& [index, entry] : winners) {
        assigned.insert(entry.winner);
    }
    std::map<std::size_t, unsigned> halvings;
    for (std::size_t index : commitment.assignment.unassigned) {
        FallbackOutcome fb =
            nothing_at_stake_fallback(plan.block(index), ledger_.peers(), assigned, config_.fallback_factor);
        assigned.insert(fb.entry.winner);
        halvings[index] = fb.halvings;
        winners.emplace(index, fb.entry);
        ++report.fallback_blocks;
    }

    for (const auto& [index, entry] : winners) {
        ledger_.debit_to_escrow(entry.winner, entry.locked_stake);
    }
    std::unordered_set<TxId> planned;
    for (const auto& block : plan.blocks) {
        for (const auto& tx : block.transactions) {
            planned.insert(tx.id);
        }
    }
    mempool_.remove(planned);

    const bool thief = config_.adversary && config_.adversary->strategy == AttackStrategy::stake_theft;
    const bool equivocator = config_.adversary && config_.adversary->strategy == AttackStrategy::equivocate;
    EpochOutcome outcome;
    outcome.epoch = epoch_;
    std::vector<WinnerRecord> epos_winners;
    std::vector<NodeId> miners;
    for (const auto& block : plan.blocks) {
        const AssignmentEntry& entry = winners.at(block.index);
        const NodeId miner = entry.winner;
        const KeyPair& keys = keys_for(miner);

        std::unordered_set<TxId> claimed;
        if (thief && is_adversary(miner)) {
            for (const auto& tx : block.transactions) {
                if (claimed.size() == config_.adversary->theft_tx_count) {
                    break;
                }
                if (tx.valid) {
                    claimed.insert(tx.id);
                }
            }
        }
        MiningResult mined = mine_block(epoch_, block, miner, keys, claimed);
        if (!verify_block(mined.block, registry_)) {
            throw Error("block " + std::to_string(block.index) + " of epoch " + std::to_string(epoch_) +
                        " failed verification");
        }

        MinedBlockOutcome result;
        result.entry = entry;
        result.reward = mined.block.plan.fees;
        BlockReport br;
        for (const auto& fraud : mined.fraud_reports) {
            if (claimed.count(fraud.tx) != 0) {
                const auto it = std::find_if(block.transactions.begin(), block.transactions.end(),
                                             [&](const Transaction& tx) { return tx.id == fraud.tx; });
                result.victims.push_back(*it);
                result.reward += fraud.fee;
                ++br.stolen;
            } else {
                ledger_.refund_in_flight(fraud.sender, fraud.fee);
                ++br.invalid_removed;
            }
        }
        ledger_.in_flight_to_escrow(result.reward);

        if (equivocator && is_adversary(miner) && !mined.block.plan.transactions.empty()) {
            BlockPlan twin = mined.block.plan;
            twin.fees -= twin.transactions.back().fee;
            twin.size -= twin.transactions.back().size;
            twin.transactions.pop_back();
            const MiningResult other = mine_block(epoch_, twin, miner, keys);
            result.equivocated = is_equivocation(mined.block, other.block, registry_);
        }

        record_.record_block(miner);
        ++height_;
        const SimSeconds timestamp = now_ + static_cast<SimSeconds>(block.index) * config_.block_time;
        const std::string hash = to_hex(mined.block.block_hash);
        ledger_.append_block({epoch_, height_, block.index, miner, timestamp, hash,
                              mined.block.plan.transactions.size(), mined.block.plan.fees});

        br.index = block.index;
        br.miner = miner;
        br.pct = entry.winning_pct;
        br.baseline_stake = entry.baseline_stake;
        br.locked_stake = entry.locked_stake;
        br.balance_pre = bid_balances[miner.value];
        br.via_fallback = entry.via_fallback;
        br.halvings = halvings.count(block.index) != 0 ? halvings[block.index] : 0;
        br.tx_count = mined.block.plan.transactions.size();
        br.fees = mined.block.plan.fees;
        br.equivocated = result.equivocated;
        br.timestamp = timestamp;
        br.height = height_;
        br.block_hash = hash;
        report.blocks.push_back(std::move(br));

        epos_winners.push_back({block.index, miner, bid_balances[miner.value], block.baseline_stake});
        miners.push_back(miner);
        outcome.blocks.push_back(std::move(result));
    }
    pending_.push_back(std::move(outcome));

    SchemeResult epos = summarize_scheme(Scheme::epos, plan, std::move(epos_winners), ledger_.peer_count());
    for (auto& r : baselines) {
        r.gamma = gamma(epos.beta, r.beta).value;
    }
    report.schemes.push_back(std::move(epos));
    for (auto& r : baselines) {
        report.schemes.push_back(std::move(r));
    }

    std::sort(miners.begin(), miners.end());
    miners.erase(std::unique(miners.begin(), miners.end()), miners.end());
    committee_ = std::move(miners);

    now_ += plan.duration;
    refill(plan.duration, epoch_, report);
    finish_epoch(report);
    return report;
}

RunReport run_experiment(const RunConfig& config)
{
    RunReport report;
    report.config = config;
    Simulation sim(config);
    report.n = sim.ledger().peer_count();
    report.total_coins = sim.ledger().total_coins();
    report.genesis_mempool = sim.genesis_mempool();
    report.initial_balances = sim.initial_balances();
    for (std::size_t e = 0; e < config.epochs; ++e) {
        try {
            report.epochs.push_back(sim.step());
        } catch (const StallError& stall) {
            report.stall = stall.what();
            break;
        }
    }
    for (Scheme s : config.schemes) {
        report.final_balances.emplace_back(s, sim.scheme_balances(s));
    }
    return report;
}

AttackReport run_attack_scenario(const RunConfig& config)
{
    if (!config.adversary) {
        throw ConfigError("attack scenario needs an adversary configuration");
    }
    Simulation sim(config);
    AttackReport out;
    out.strategy = config.adversary->strategy;
    auto tally_settlements = [&](const std::vector<SettlementReport>& settlements) {
        for (const auto& s : settlements) {
            out.withheld_rewards += s.withheld_amount;
        }
    };
    for (std::size_t e = 0; e < config.epochs; ++e) {
        EpochReport report;
        try {
            report = sim.step();
        } catch (const StallError& stall) {
            out.stall = stall.what();
            break;
        }
        ++out.epochs;
        out.conserved = out.conserved && report.conserved;
        out.fallback_blocks += report.fallback_blocks;
        out.revoked += report.revoked.size();
        tally_settlements(report.settlements);
        for (const auto& b : report.blocks) {
            ++out.total_blocks;
            if (sim.is_adversary(b.miner)) {
                ++out.adversary_blocks;
            }
        }
    }
    tally_settlements(sim.settle_pending());
    out.conserved = out.conserved && sim.ledger().conserved();

    std::size_t run = 0;
    for (const auto& entry : sim.ledger().chain()) {
        run = sim.is_adversary(entry.miner) ? run + 1 : 0;
        if (run >= config.adversary->m + 1) {
            ++out.double_spend_windows;
        }
    }
    out.penalties = sim.penalties();
    return out;
}

} // namespace epos
