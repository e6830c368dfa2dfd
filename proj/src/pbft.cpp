#include <epos/pbft.hpp>
#include <epos/rng.hpp>

#include <algorithm>

namespace epos {

MempoolView::MempoolView(std::shared_ptr<const Mempool> base, std::vector<bool> present)
    : base_(std::move(base)), present_(std::move(present))
{
    const std::size_t expected = base_ ? base_->count() : 0;
    if (present_.size() != expected) {
        throw Error("mempool view mask does not match its base snapshot");
    }
}

MempoolView MempoolView::full(std::shared_ptr<const Mempool> base)
{
    const std::size_t n = base ? base->count() : 0;
    return MempoolView(std::move(base), std::vector<bool>(n, true));
}

std::size_t MempoolView::size() const
{
    return static_cast<std::size_t>(std::count(present_.begin(), present_.end(), true));
}

Digest MempoolView::digest() const
{
    Encoder enc;
    if (base_) {
        const auto txs = base_->transactions();
        for (std::size_t i = 0; i < txs.size(); ++i) {
            if (present_[i]) {
                enc.u64(txs[i].id);
            }
        }
    }
    return hash_bytes(enc.bytes());
}

Mempool MempoolView::materialize() const
{
    Mempool out;
    if (!base_) {
        return out;
    }
    const auto txs = base_->transactions();
    for (std::size_t i = 0; i < txs.size(); ++i) {
        if (present_[i]) {
            out.insert(txs[i]);
        }
    }
    return out;
}

std::string_view to_string(ReplicaBehavior behavior)
{
    switch (behavior) {
    case ReplicaBehavior::honest:
        return "honest";
    case ReplicaBehavior::crash:
        return "crash";
    case ReplicaBehavior::equivocating:
        return "equivocating";
    }
    return "unknown";
}

std::string_view to_string(PbftPhase phase)
{
    switch (phase) {
    case PbftPhase::pre_prepare:
        return "pre-prepare";
    case PbftPhase::prepare:
        return "prepare";
    case PbftPhase::commit:
        return "commit";
    case PbftPhase::reply:
        return "reply";
    case PbftPhase::view_change:
        return "view-change";
    }
    return "unknown";
}

std::size_t PbftOutcome::total_messages() const
{
    std::size_t total = 0;
    for (const auto& r : rounds) {
        total += r.messages;
    }
    return total;
}

std::size_t pbft_tolerance(std::size_t replicas)
{
    return replicas == 0 ? 0 : (replicas - 1) / 3;
}

NodeId select_primary(std::span<const NodeId> miners, std::uint64_t seed)
{
    if (miners.empty()) {
        throw ConfigError("cannot select a PBFT primary from an empty miner set");
    }
    Rng rng{derive_seed(seed, "pbft-primary")};
    std::uniform_int_distribution<std::size_t> pick(0, miners.size() - 1);
    return miners[pick(rng)];
}

std::vector<Replica> diverge_views(std::shared_ptr<const Mempool> base,
                                   std::span<const NodeId> replicas,
                                   double loss,
                                   std::uint64_t seed)
{
    if (!(loss >= 0.0 && loss <= 1.0)) {
        throw ConfigError("propagation loss must lie in [0, 1]");
    }
    const std::size_t n = base ? base->count() : 0;
    std::vector<Replica> out;
    out.reserve(replicas.size());
    for (std::size_t r = 0; r < replicas.size(); ++r) {
        std::vector<bool> present(n, true);
        if (loss > 0.0) {
            Rng rng = make_rng(seed, "pbft-diverge", r);
            std::bernoulli_distribution drop(loss);
            for (std::size_t i = 0; i < n; ++i) {
                present[i] = !drop(rng);
            }
        }
        out.push_back({replicas[r], MempoolView(base, std::move(present)), ReplicaBehavior::honest});
    }
    return out;
}

PbftOutcome run_pbft(std::span<Replica> replicas, NodeId primary)
{
    if (replicas.empty()) {
        throw ConfigError("PBFT needs at least one replica");
    }
    std::vector<std::size_t> order(replicas.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return replicas[a].node_id < replicas[b].node_id; });
    const auto start_it = std::find_if(order.begin(), order.end(),
                                       [&](std::size_t i) { return replicas[i].node_id == primary; });
    if (start_it == order.end()) {
        throw ConfigError("PBFT primary " + std::to_string(primary.value) + " is not a replica");
    }
    const std::size_t start = static_cast<std::size_t>(start_it - order.begin());

    const std::size_t n = replicas.size();
    std::size_t honest = 0;
    std::size_t crashed = 0;
    PbftOutcome out;
    for (const auto& r : replicas) {
        if (r.behavior == ReplicaBehavior::honest) {
            ++honest;
        } else {
            if (r.behavior == ReplicaBehavior::crash) {
                ++crashed;
            }
            out.faulty_detected.push_back(r.node_id);
        }
    }
    std::sort(out.faulty_detected.begin(), out.faulty_detected.end());
    const std::size_t quorum = n - pbft_tolerance(n);
    const std::size_t live = n - crashed;
    const std::size_t fanout = n - 1;

    for (std::size_t view = 0; view < n; ++view) {
        const Replica& leader = replicas[order[(start + view) % n]];
        out.primary = leader.node_id;
        if (view > 0) {
            ++out.view_changes;
        }
        auto record = [&](PbftPhase phase, std::size_t messages) {
            out.rounds.push_back({view, leader.node_id, phase, messages});
        };

        if (leader.behavior == ReplicaBehavior::crash) {
            record(PbftPhase::view_change, live * fanout);
            continue;
        }
        record(PbftPhase::pre_prepare, fanout);
        // Backups that are alive answer with Prepare; an equivocating leader
        // or equivocating backups never produce matching digests, so only
        // honest replicas vote for the leader's proposal.
        const std::size_t live_backups = live - 1;
        record(PbftPhase::prepare, live_backups * fanout);
        const std::size_t votes = leader.behavior == ReplicaBehavior::honest ? honest : 0;
        if (votes < quorum) {
            record(PbftPhase::view_change, live * fanout);
            continue;
        }
        record(PbftPhase::commit, live * fanout);
        record(PbftPhase::reply, honest);

        out.decided = true;
        out.agreed_view = leader.local_view;
        for (auto& r : replicas) {
            if (r.behavior == ReplicaBehavior::honest) {
                r.local_view = leader.local_view;
            }
        }
        return out;
    }
    return out;
}

} // namespace epos
