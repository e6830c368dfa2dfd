#include <epos/rng.hpp>
#include <epos/schemes.hpp>

#include <algorithm>
#include <set>

namespace epos {

std::string_view to_string(Scheme scheme)
{
    switch (scheme) {
    case Scheme::epos:
        return "epos";
    case Scheme::random:
        return "random";
    case Scheme::priority:
        return "priority";
    }
    return "unknown";
}

Scheme parse_scheme(std::string_view name)
{
    for (auto s : {Scheme::epos, Scheme::random, Scheme::priority}) {
        if (to_string(s) == name) {
            return s;
        }
    }
    throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

SchemeResult summarize_scheme(Scheme scheme, const EpochPlan& plan, std::vector<WinnerRecord> winners, std::size_t n)
{
    SchemeResult out;
    out.scheme = scheme;
    out.length = plan.length;
    out.mean_baseline_stake = plan.mean_baseline_stake();
    std::set<NodeId> distinct;
    double balance_sum = 0.0;
    for (const auto& w : winners) {
        distinct.insert(w.node);
        balance_sum += static_cast<double>(w.balance_pre);
    }
    out.unique_miners = distinct.size();
    out.mean_winner_balance_pre = winners.empty() ? 0.0 : balance_sum / static_cast<double>(winners.size());
    out.violations = fairness_violations(winners);
    out.beta = n == 0 ? 0.0 : decentralization_beta(out.unique_miners, n);
    out.winners = std::move(winners);
    return out;
}

SchemeResult run_random_scheme(std::span<Amount> balances, const EpochPlan& plan, std::uint64_t seed)
{
    if (balances.empty()) {
        throw ConfigError("random selection needs at least one peer");
    }
    Rng rng{derive_seed(seed, "random-scheme", plan.epoch_index)};
    std::uniform_int_distribution<std::size_t> pick(0, balances.size() - 1);
    std::vector<WinnerRecord> winners;
    for (const auto& block : plan.blocks) {
        const std::size_t w = pick(rng);
        winners.push_back({block.index, NodeId{w}, balances[w], block.baseline_stake});
        balances[w] += block.fees;
    }
    return summarize_scheme(Scheme::random, plan, std::move(winners), balances.size());
}

SchemeResult run_priority_scheme(std::span<Amount> balances,
                                 const EpochPlan& plan,
                                 std::span<const NodeId> greedy_set)
{
    if (greedy_set.empty()) {
        throw ConfigError("priority selection needs a non-empty greedy set");
    }
    std::vector<WinnerRecord> winners;
    for (const auto& block : plan.blocks) {
        NodeId best = greedy_set.front();
        for (NodeId id : greedy_set) {
            const Amount b = balances[id.value];
            if (b > balances[best.value] || (b == balances[best.value] && id < best)) {
                best = id;
            }
        }
        winners.push_back({block.index, best, balances[best.value], block.baseline_stake});
        balances[best.value] += block.fees;
    }
    return summarize_scheme(Scheme::priority, plan, std::move(winners), balances.size());
}

std::vector<NodeId> select_greedy_set(std::span<const Amount> balances, double fraction)
{
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw ConfigError("greedy fraction must lie in (0, 1]");
    }
    std::vector<NodeId> ids(balances.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        ids[i] = NodeId{i};
    }
    std::sort(ids.begin(), ids.end(), [&](NodeId a, NodeId b) {
        if (balances[a.value] != balances[b.value]) {
            return balances[a.value] > balances[b.value];
        }
        return a < b;
    });
    const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(fraction * static_cast<double>(ids.size())));
    ids.resize(std::min(k, ids.size()));
    std::sort(ids.begin(), ids.end());
    return ids;
}

double decentralization_beta(std::size_t unique_miners, std::size_t n)
{
    if (n < 1) {
        throw ConfigError("decentralization needs n >= 1");
    }
    return static_cast<double>(unique_miners) / static_cast<double>(n);
}

std::string_view to_string(Decentralization d)
{
    switch (d) {
    case Decentralization::less:
        return "less decentralized";
    case Decentralization::equally:
        return "equally decentralized";
    case Decentralization::more:
        return "more decentralized";
    }
    return "unknown";
}

GammaResult gamma(double beta_e, double beta_other)
{
    GammaResult out;
    out.value = beta_e - beta_other;
    if (beta_e > beta_other) {
        out.label = Decentralization::more;
    } else if (beta_e < beta_other) {
        out.label = Decentralization::less;
    }
    return out;
}

std::size_t fairness_violations(std::span<const WinnerRecord> winners)
{
    return static_cast<std::size_t>(std::count_if(winners.begin(), winners.end(), [](const WinnerRecord& w) {
        return w.balance_pre < w.baseline_stake;
    }));
}

Histogram balance_histogram(std::span<const Amount> balances, Amount bin_width)
{
    if (bin_width < 1) {
        throw ConfigError("histogram bin width must be positive");
    }
    Histogram h;
    h.bin_width = bin_width;
    if (balances.empty()) {
        return h;
    }
    const Amount top = *std::max_element(balances.begin(), balances.end());
    const auto nbins = static_cast<std::size_t>(std::max<Amount>(top, 0) / bin_width) + 1;
    h.bins.resize(nbins);
    for (std::size_t i = 0; i < nbins; ++i) {
        h.bins[i].lower = static_cast<Amount>(i) * bin_width;
        h.bins[i].upper = h.bins[i].lower + bin_width;
    }
    for (Amount b : balances) {
        ++h.bins[static_cast<std::size_t>(std::max<Amount>(b, 0) / bin_width)].count;
    }
    return h;
}

} // namespace epos
