#include <epos/config.hpp>

#include <algorithm>

namespace epos {

std::string_view to_string(BidStrategy strategy)
{
    switch (strategy) {
    case BidStrategy::window:
        return "window";
    case BidStrategy::greedy:
        return "greedy";
    case BidStrategy::abstain:
        return "abstain";
    }
    return "unknown";
}

BidStrategy parse_bid_strategy(std::string_view name)
{
    for (auto s : {BidStrategy::window, BidStrategy::greedy, BidStrategy::abstain}) {
        if (to_string(s) == name) {
            return s;
        }
    }
    throw ConfigError("unknown bid strategy '" + std::string(name) + "'");
}

namespace {

void require(bool ok, const std::string& message)
{
    if (!ok) {
        throw ConfigError(message);
    }
}

} // namespace

void RunConfig::validate() const
{
    require(n_min >= 1 && n_min <= n_max && n_max <= 1'000'000, "n range must satisfy 1 <= min <= max <= 1000000");
    require(balance_min >= 0 && balance_min <= balance_max, "balance range must satisfy 0 <= min <= max");
    require(block_size >= 1, "block_size must be at least 1");
    require(block_time >= 0, "block_time must be non-negative");
    require(lambda >= 0.0, "lambda must be non-negative");
    require(fee_min >= 0 && fee_min <= fee_max, "fee range must satisfy 0 <= min <= max");
    require(mempool_blocks_min <= mempool_blocks_max, "mempool block range is empty");
    require(invalid_tx_fraction >= 0.0 && invalid_tx_fraction <= 1.0, "invalid_tx_fraction must lie in [0, 1]");
    require(coinbase_supplement >= 0, "coinbase_supplement must be non-negative");
    require(greedy_fraction > 0.0 && greedy_fraction <= 1.0, "greedy_fraction must lie in (0, 1]");
    require(histogram_bin_width >= 1, "histogram_bin_width must be positive");
    require(committee_size >= 1, "committee_size must be at least 1");
    require(fallback_factor >= 2, "fallback_factor must be at least 2");
    require(bid_window >= 1, "bid_window must be at least 1");
    require(propagation_loss >= 0.0 && propagation_loss <= 1.0, "propagation_loss must lie in [0, 1]");
    require(!schemes.empty() && runs(Scheme::epos), "scheme list must include epos");
    if (adversary) {
        adversary->validate();
        require(adversary->p < n_min, "adversary needs at least one honest peer");
    }
}

bool RunConfig::runs(Scheme scheme) const
{
    return std::find(schemes.begin(), schemes.end(), scheme) != schemes.end();
}

RunConfig table1_config(std::uint64_t seed, std::size_t length)
{
    RunConfig c;
    c.seed = seed;
    c.mempool_blocks_min = 200;
    c.mempool_blocks_max = 200;
    c.forced_length = length;
    c.epochs = 1;
    return c;
}

} // namespace epos
