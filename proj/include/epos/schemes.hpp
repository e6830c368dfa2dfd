#pragma once

#include <epos/core.hpp>
#include <epos/planner.hpp>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epos {

enum class Scheme { epos, random, priority };

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view name);

struct WinnerRecord {
    std::size_t block_index = 0;
    NodeId node;
    /// Balance before the block was awarded.
    Amount balance_pre = 0;
    Amount baseline_stake = 0;
};

struct HistogramBin {
    Amount lower = 0;
    Amount upper = 0;
    std::size_t count = 0;
};

struct Histogram {
    Amount bin_width = 0;
    std::vector<HistogramBin> bins;

    /// Upper edge of the highest bin, 0 when empty.
    Amount max_edge() const { return bins.empty() ? 0 : bins.back().upper; }
};

struct SchemeResult {
    Scheme scheme = Scheme::epos;
    std::size_t length = 0;
    std::size_t unique_miners = 0;
    double mean_baseline_stake = 0.0;
    double mean_winner_balance_pre = 0.0;
    std::size_t violations = 0;
    double beta = 0.0;
    /// beta of e-PoS minus this scheme's beta for the same epoch.
    double gamma = 0.0;
    std::vector<WinnerRecord> winners;
};

/// Fills the summary fields from `winners` and the plan.
SchemeResult summarize_scheme(Scheme scheme, const EpochPlan& plan, std::vector<WinnerRecord> winners, std::size_t n);

/// Each block goes to a uniformly drawn peer regardless of its balance; the
/// winner's entry in `balances` (indexed by node id) is credited the fees.
SchemeResult run_random_scheme(std::span<Amount> balances, const EpochPlan& plan, std::uint64_t seed);

/// Each block goes to the richest member of `greedy_set` (ties to the
/// smaller node id), whose balance then grows by the block's fees. Throws
/// ConfigError for an empty greedy set.
SchemeResult run_priority_scheme(std::span<Amount> balances,
                                 const EpochPlan& plan,
                                 std::span<const NodeId> greedy_set);

/// Richest `fraction` of the peers (at least one), by balance then node id.
std::vector<NodeId> select_greedy_set(std::span<const Amount> balances, double fraction);

double decentralization_beta(std::size_t unique_miners, std::size_t n);

enum class Decentralization { less, equally, more };

std::string_view to_string(Decentralization d);

struct GammaResult {
    double value = 0.0;
    Decentralization label = Decentralization::equally;
};

GammaResult gamma(double beta_e, double beta_other);

/// Winners whose pre-award balance is below their block's baseline stake.
std::size_t fairness_violations(std::span<const WinnerRecord> winners);

/// Fixed-width bins from zero up to the bin holding the largest balance.
/// Throws ConfigError if bin_width < 1.
Histogram balance_histogram(std::span<const Amount> balances, Amount bin_width);

} // namespace epos
