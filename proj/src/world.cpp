#include <epos/world.hpp>

#include <cmath>

namespace epos {

namespace {

Transaction draw_transaction(Rng& rng, const ArrivalModel& model, TxId id)
{
    std::uniform_int_distribution<Amount> fee(model.fee_min, model.fee_max);
    std::uniform_int_distribution<std::size_t> peer(0, model.peers - 1);
    std::bernoulli_distribution invalid(model.invalid_fraction);

    Transaction tx;
    tx.id = id;
    tx.fee = fee(rng);
    tx.sender = NodeId{peer(rng)};
    tx.recipient = tx.sender;
    if (model.peers > 1) {
        while (tx.recipient == tx.sender) {
            tx.recipient = NodeId{peer(rng)};
        }
    }
    tx.valid = !invalid(rng);
    return tx;
}

} // namespace

World generate_world(const RunConfig& config)
{
    config.validate();
    World world;
    Rng rng = make_rng(config.seed, "world");
    const auto n = std::uniform_int_distribution<std::size_t>(config.n_min, config.n_max)(rng);
    const std::size_t adversaries = config.adversary ? config.adversary->p : 0;
    const std::size_t honest = n - adversaries;

    std::uniform_int_distribution<Amount> balance(config.balance_min, config.balance_max);
    world.peers.reserve(n);
    Amount honest_total = 0;
    for (std::size_t i = 0; i < honest; ++i) {
        const Amount b = balance(rng);
        honest_total += b;
        world.peers.push_back({NodeId{i}, i, b});
    }
    if (config.adversary) {
        const double alpha = config.adversary->alpha;
        if (alpha >= 1.0) {
            throw ConfigError("adversary alpha must be below 1 while honest peers exist");
        }
        const auto total = static_cast<Amount>(std::llround(alpha / (1.0 - alpha) * static_cast<double>(honest_total)));
        const auto share = total / static_cast<Amount>(adversaries);
        for (std::size_t i = honest; i < n; ++i) {
            world.peers.push_back({NodeId{i}, i, share});
            world.adversary.push_back(NodeId{i});
        }
    }

    const auto blocks =
        std::uniform_int_distribution<std::size_t>(config.mempool_blocks_min, config.mempool_blocks_max)(rng);
    const auto target = blocks * static_cast<std::size_t>(config.block_size);
    const ArrivalModel model{config.fee_min, config.fee_max, config.invalid_tx_fraction, n};

    std::vector<Amount> spendable(n);
    for (std::size_t i = 0; i < n; ++i) {
        spendable[i] = world.peers[i].balance;
    }
    Rng tx_rng = make_rng(config.seed, "genesis-mempool");
    std::size_t misses = 0;
    while (world.mempool.count() < target) {
        Transaction tx = draw_transaction(tx_rng, model, world.next_tx_id);
        if (spendable[tx.sender.value] < tx.fee) {
            if (++misses > 64 * target + 1024) {
                throw ConfigError("genesis mempool cannot be funded by the configured balances");
            }
            continue;
        }
        spendable[tx.sender.value] -= tx.fee;
        world.mempool.insert(tx);
        ++world.next_tx_id;
    }
    return world;
}

std::uint64_t poisson_count(double lambda, SimSeconds duration, Rng& rng)
{
    if (lambda < 0.0 || duration < 0) {
        throw ConfigError("poisson arrivals need lambda >= 0 and duration >= 0");
    }
    const double mean = lambda * static_cast<double>(duration);
    if (mean == 0.0) {
        return 0;
    }
    return std::poisson_distribution<std::uint64_t>(mean)(rng);
}

std::vector<Transaction> poisson_arrivals(double lambda,
                                          SimSeconds duration,
                                          std::uint64_t seed,
                                          const ArrivalModel& model,
                                          TxId first_id)
{
    if (model.peers < 1 || model.fee_min < 0 || model.fee_min > model.fee_max) {
        throw ConfigError("arrival model needs peers and a non-empty fee range");
    }
    Rng rng{seed};
    const auto z = poisson_count(lambda, duration, rng);
    std::vector<Transaction> out;
    out.reserve(z);
    for (std::uint64_t i = 0; i < z; ++i) {
        out.push_back(draw_transaction(rng, model, first_id + i));
    }
    return out;
}

} // namespace epos
