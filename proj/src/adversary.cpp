#include <epos/adversary.hpp>
#include <epos/rng.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace epos {

std::string_view to_string(AttackStrategy strategy)
{
    switch (strategy) {
    case AttackStrategy::max_bid:
        return "max-bid";
    case AttackStrategy::double_spend:
        return "double-spend";
    case AttackStrategy::stake_theft:
        return "stake-theft";
    case AttackStrategy::equivocate:
        return "equivocate";
    case AttackStrategy::abstain:
        return "abstain";
    }
    return "unknown";
}

AttackStrategy parse_attack_strategy(std::string_view name)
{
    for (auto s : {AttackStrategy::max_bid, AttackStrategy::double_spend, AttackStrategy::stake_theft,
                   AttackStrategy::equivocate, AttackStrategy::abstain}) {
        if (to_string(s) == name) {
            return s;
        }
    }
    throw ConfigError("unknown attack strategy '" + std::string(name) + "'");
}

void AdversaryConfig::validate() const
{
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ConfigError("adversary alpha must lie in [0, 1]");
    }
    if (p < 1) {
        throw ConfigError("adversary needs at least one node id");
    }
    if (m < 1) {
        throw ConfigError("adversary target m must be at least 1");
    }
    if (bid_pct > kFullBasisPoints) {
        throw ConfigError("adversary bid percentage above 10000 basis points");
    }
}

namespace {

void check_alpha(double alpha)
{
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ConfigError("alpha must lie in [0, 1]");
    }
}

void check_population(std::size_t n, std::size_t p)
{
    if (p < 1 || p > n) {
        throw ConfigError("need 1 <= p <= n, got p=" + std::to_string(p) + " n=" + std::to_string(n));
    }
}

} // namespace

double pos_double_spend_prob(double alpha, std::size_t m)
{
    check_alpha(alpha);
    if (alpha >= 0.5) {
        return 1.0;
    }
    return std::pow(alpha / (1.0 - alpha), static_cast<double>(m));
}

double pos_next_block_prob(double alpha)
{
    check_alpha(alpha);
    if (alpha >= 0.5) {
        return 1.0;
    }
    return std::min(1.0, alpha / (1.0 - alpha));
}

double epos_next_block_prob(std::size_t n, std::size_t p)
{
    check_population(n, p);
    return static_cast<double>(p) / static_cast<double>(n);
}

double epos_double_spend_prob(std::size_t n, std::size_t p, std::size_t m)
{
    check_population(n, p);
    if (m >= n) {
        throw ConfigError("need m < n, got m=" + std::to_string(m) + " n=" + std::to_string(n));
    }
    if (m > p) {
        return 0.0;
    }
    double prob = 1.0;
    for (std::size_t i = 0; i <= m; ++i) {
        const double numerator = p == 1 ? 1.0 : static_cast<double>(p - i);
        prob *= numerator / static_cast<double>(n - i);
    }
    return prob;
}

double epos_attack_closed_form(std::size_t n, std::size_t p, std::size_t m)
{
    return m == 0 ? epos_next_block_prob(n, p) : epos_double_spend_prob(n, p, m);
}

OracleEstimate idealized_attack_trials(std::size_t n,
                                       std::size_t p,
                                       std::size_t m,
                                       std::uint64_t trials,
                                       std::uint64_t seed)
{
    check_population(n, p);
    constexpr Amount kBalance = 10'000;
    constexpr BasisPoints kGreedyPct = 9'900;

    EpochPlan plan;
    plan.length = 1;
    plan.blocks.push_back(BlockPlan{1, {}, 100, 100, 0});

    Rng rng{derive_seed(seed, "idealized-auction")};
    std::vector<std::uint64_t> ids(n);
    std::iota(ids.begin(), ids.end(), std::uint64_t{0});
    std::vector<Peer> peers(n);

    OracleEstimate est;
    est.trials = trials;
    for (std::uint64_t t = 0; t < trials; ++t) {
        std::shuffle(ids.begin(), ids.end(), rng);
        for (std::size_t i = 0; i < n; ++i) {
            peers[i] = Peer{NodeId{ids[i]}, i, kBalance};
        }
        MiningRecord record;
        bool all_won = true;
        for (std::size_t block = 0; block <= m && all_won; ++block) {
            BidBook book(plan);
            for (const auto& peer : peers) {
                book.place_bid(peer, 1, kGreedyPct);
            }
            const auto bids = book.bids();
            const Assignment assignment = finalize_miners(bids, record, plan);
            const NodeId winner = assignment.winners.at(1).winner;
            record.record_block(winner);
            // The adversary holds peers[0..p).
            const auto it = std::find_if(peers.begin(), peers.end(),
                                         [&](const Peer& peer) { return peer.node_id == winner; });
            all_won = static_cast<std::size_t>(it - peers.begin()) < p;
        }
        if (all_won) {
            ++est.successes;
        }
    }
    return est;
}

} // namespace epos
