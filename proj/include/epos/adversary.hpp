#pragma once

#include <epos/auction.hpp>
#include <epos/core.hpp>
#include <epos/pbft.hpp>

#include <cstdint>
#include <string_view>

namespace epos {

enum class AttackStrategy { max_bid, double_spend, stake_theft, equivocate, abstain };

std::string_view to_string(AttackStrategy strategy);
AttackStrategy parse_attack_strategy(std::string_view name);

struct AdversaryConfig {
    /// Share of all coins held across the adversary's identities.
    double alpha = 0.51;
    /// Number of node ids the balance is split across.
    std::size_t p = 1;
    /// Consecutive blocks beyond the first needed for a double spend.
    std::size_t m = 1;
    AttackStrategy strategy = AttackStrategy::max_bid;
    BasisPoints bid_pct = 9'900;
    /// Spend the balance after winning, before the final commitment.
    bool spend_before_commit = false;
    ReplicaBehavior replica_behavior = ReplicaBehavior::honest;
    /// Valid transactions a stake-thief claims invalid per mined block.
    std::size_t theft_tx_count = 2;

    void validate() const;
};

/// (alpha / (1 - alpha))^m below one half, otherwise 1.
double pos_double_spend_prob(double alpha, std::size_t m);

/// alpha / (1 - alpha) capped at 1 below one half, otherwise 1.
double pos_next_block_prob(double alpha);

/// p / n. Throws ConfigError unless 1 <= p <= n.
double epos_next_block_prob(std::size_t n, std::size_t p);

/// Product over i = 0..m of (p - i) / (n - i), written for p = 1 as the
/// product of 1 / (n - i). Zero when m > p. Throws ConfigError unless
/// 1 <= p <= n and m < n.
double epos_double_spend_prob(std::size_t n, std::size_t p, std::size_t m);

/// Closed form the Monte-Carlo oracle is compared against: the next-block
/// probability for m = 0, the double-spend product otherwise.
double epos_attack_closed_form(std::size_t n, std::size_t p, std::size_t m);

struct OracleEstimate {
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;

    double frequency() const { return trials == 0 ? 0.0 : double(successes) / double(trials); }
};

/// Idealized auctions: n equally funded peers, p of them the adversary's,
/// all bidding 99 % on a single block, repeated for m + 1 consecutive blocks
/// with the mining record kept across them. Winners come out of
/// finalize_miners; node ids are shuffled each trial so the residual tie
/// rule picks uniformly. Counts trials in which the adversary won every block.
OracleEstimate idealized_attack_trials(std::size_t n,
                                       std::size_t p,
                                       std::size_t m,
                                       std::uint64_t trials,
                                       std::uint64_t seed);

} // namespace epos
