#pragma once

#include <epos/core.hpp>
#include <epos/signature.hpp>

#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace epos {

/// One replica's view of a shared base snapshot: a presence mask over the
/// base's transactions. Views over the same base compare byte-for-byte.
class MempoolView {
public:
    MempoolView() = default;
    MempoolView(std::shared_ptr<const Mempool> base, std::vector<bool> present);
    static MempoolView full(std::shared_ptr<const Mempool> base);

    std::size_t size() const;
    Digest digest() const;
    Mempool materialize() const;
    const std::vector<bool>& mask() const { return present_; }
    const Mempool* base() const { return base_.get(); }

    bool operator==(const MempoolView& other) const
    {
        return base_ == other.base_ && present_ == other.present_;
    }

private:
    std::shared_ptr<const Mempool> base_;
    std::vector<bool> present_;
};

enum class ReplicaBehavior { honest, crash, equivocating };

std::string_view to_string(ReplicaBehavior behavior);

struct Replica {
    NodeId node_id;
    MempoolView local_view;
    ReplicaBehavior behavior = ReplicaBehavior::honest;
};

enum class PbftPhase { pre_prepare, prepare, commit, reply, view_change };

std::string_view to_string(PbftPhase phase);

struct PhaseRecord {
    std::size_t view = 0;
    NodeId primary;
    PbftPhase phase = PbftPhase::pre_prepare;
    std::size_t messages = 0;
};

struct PbftOutcome {
    bool decided = false;
    std::optional<MempoolView> agreed_view;
    NodeId primary; // primary of the deciding (or last attempted) view
    std::vector<PhaseRecord> rounds;
    std::vector<NodeId> faulty_detected;
    std::size_t view_changes = 0;

    std::size_t total_messages() const;
};

/// floor((n - 1) / 3)
std::size_t pbft_tolerance(std::size_t replicas);

/// Uniform pick from `miners` driven by `seed`. Throws ConfigError if empty.
NodeId select_primary(std::span<const NodeId> miners, std::uint64_t seed);

/// Each replica drops each base transaction independently with
/// probability `loss`.
std::vector<Replica> diverge_views(std::shared_ptr<const Mempool> base,
                                   std::span<const NodeId> replicas,
                                   double loss,
                                   std::uint64_t seed);

/// Phase-level PBFT on the primary's mempool view. Quorum is
/// n - floor((n-1)/3) matching votes, so the run decides exactly when at
/// most floor((n-1)/3) replicas are faulty. A faulty primary triggers a view
/// change to the next replica by ascending node id, at most n views in
/// total. On a decision every honest replica adopts the agreed view.
PbftOutcome run_pbft(std::span<Replica> replicas, NodeId primary);

} // namespace epos
