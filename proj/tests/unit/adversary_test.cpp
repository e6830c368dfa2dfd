#include <epos/adversary.hpp>
#include <epos/simulation.hpp>

#include <doctest.h>

#include <cmath>

using namespace epos;

namespace {

RunConfig small_world(std::uint64_t seed, std::size_t n)
{
    RunConfig c;
    c.seed = seed;
    c.n_min = n;
    c.n_max = n;
    c.balance_min = 5'000;
    c.balance_max = 5'000;
    c.block_size = 10;
    c.block_time = 60;
    c.lambda = 10.0 / 60.0;
    c.mempool_blocks_min = 3;
    c.mempool_blocks_max = 3;
    c.committee_size = 4;
    c.schemes = {Scheme::epos};
    return c;
}

} // namespace

TEST_CASE("PoS attack probabilities")
{
    CHECK(pos_double_spend_prob(0.51, 6) == 1.0);
    CHECK(pos_double_spend_prob(0.25, 2) == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
    CHECK(pos_double_spend_prob(0.0, 3) == 0.0);
    CHECK(pos_next_block_prob(0.5) == 1.0);
    CHECK(pos_next_block_prob(0.25) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(pos_next_block_prob(0.0) == 0.0);
    CHECK_THROWS_AS(pos_next_block_prob(1.5), ConfigError);
}

TEST_CASE("e-PoS attack probabilities")
{
    CHECK(epos_next_block_prob(100, 1) == doctest::Approx(0.01));
    CHECK(epos_next_block_prob(100, 10) == doctest::Approx(0.1));
    CHECK(epos_next_block_prob(7, 7) == 1.0);
    CHECK_THROWS_AS(epos_next_block_prob(5, 6), ConfigError);
    CHECK_THROWS_AS(epos_next_block_prob(5, 0), ConfigError);

    CHECK(epos_double_spend_prob(10, 1, 1) == doctest::Approx(1.0 / 90.0).epsilon(1e-12));
    CHECK(epos_double_spend_prob(10, 2, 1) == doctest::Approx(1.0 / 45.0).epsilon(1e-12));
    CHECK(epos_double_spend_prob(6, 6, 5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(epos_double_spend_prob(10, 2, 3) == 0.0);
    CHECK_THROWS_AS(epos_double_spend_prob(3, 3, 3), ConfigError);

    CHECK(epos_attack_closed_form(10, 3, 0) == doctest::Approx(0.3));
    CHECK(epos_attack_closed_form(10, 3, 2) == doctest::Approx(6.0 / 720.0));
}

TEST_CASE("attack probabilities are monotone and bounded")
{
    for (std::size_t n = 2; n <= 30; ++n) {
        for (std::size_t p = 1; p <= n; ++p) {
            for (std::size_t m = 1; m < n && m <= 6; ++m) {
                const double v = epos_double_spend_prob(n, p, m);
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
                if (p < n) {
                    CHECK(epos_double_spend_prob(n, p + 1, m) >= v);
                    CHECK(epos_double_spend_prob(n + 1, p, m) <= v);
                }
                if (m + 1 < n) {
                    CHECK(epos_double_spend_prob(n, p, m + 1) <= v);
                }
            }
        }
    }
    for (double alpha = 0.5; alpha <= 1.0; alpha += 0.05) {
        for (std::size_t n = 2; n <= 20; ++n) {
            for (std::size_t p = 1; p < n; ++p) {
                CHECK(epos_next_block_prob(n, p) < pos_next_block_prob(alpha));
            }
        }
    }
    for (double alpha = 0.0; alpha <= 1.0; alpha += 0.01) {
        for (std::size_t m = 1; m <= 8; ++m) {
            const double v = pos_double_spend_prob(alpha, m);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("idealized auctions match the next-block closed form")
{
    constexpr std::uint64_t kTrials = 20'000;
    for (auto [n, p] : {std::pair<std::size_t, std::size_t>{5, 1}, {8, 3}, {10, 10}}) {
        const auto est = idealized_attack_trials(n, p, 0, kTrials, 42);
        const double q = epos_attack_closed_form(n, p, 0);
        const double sigma = std::sqrt(q * (1.0 - q) / double(kTrials));
        CHECK(std::abs(est.frequency() - q) <= 3.0 * sigma + 1e-12);
    }
    const auto est = idealized_attack_trials(6, 3, 2, kTrials, 42);
    const double q = epos_attack_closed_form(6, 3, 2);
    CHECK(std::abs(est.frequency() - q) <= 3.0 * std::sqrt(q * (1.0 - q) / double(kTrials)));
}

TEST_CASE("record bars a lone identity from consecutive blocks")
{
    CHECK(idealized_attack_trials(5, 1, 1, 2'000, 1).successes == 0);
}

TEST_CASE("majority holder with one identity wins one block in n under greedy bids")
{
    RunConfig c = small_world(3, 5);
    c.epochs = 200;
    c.bid_strategy = BidStrategy::greedy;
    c.forced_length = 1;
    c.mempool_blocks_min = 1;
    c.mempool_blocks_max = 1;
    c.lambda = 20.0 / 60.0;
    AdversaryConfig a;
    a.alpha = 0.51;
    a.p = 1;
    a.strategy = AttackStrategy::max_bid;
    c.adversary = a;
    const AttackReport r = run_attack_scenario(c);
    REQUIRE_FALSE(r.stall);
    CHECK(r.total_blocks == 200);
    const double q = 0.2;
    CHECK(std::abs(r.win_rate() - q) <= 3.0 * std::sqrt(q * (1.0 - q) / 200.0));
    CHECK(r.double_spend_windows == 0);
    CHECK(r.conserved);
}

TEST_CASE("stake theft is penalized for every victim")
{
    RunConfig c = small_world(5, 6);
    c.epochs = 6;
    AdversaryConfig a;
    a.alpha = 0.4;
    a.p = 2;
    a.strategy = AttackStrategy::stake_theft;
    c.adversary = a;
    const AttackReport r = run_attack_scenario(c);
    REQUIRE_FALSE(r.stall);
    REQUIRE(r.adversary_blocks > 0);
    CHECK(r.penalties.size() == r.adversary_blocks);
    for (const auto& p : r.penalties) {
        REQUIRE(p.outcome.victims.size() == p.stolen.size());
        for (std::size_t i = 0; i < p.stolen.size(); ++i) {
            CHECK(p.outcome.victims[i].refund == p.stolen[i].fee);
        }
        CHECK(p.outcome.reimbursed_fees <= p.entry.baseline_stake);
        CHECK(p.outcome.penalty == p.entry.locked_stake - p.entry.baseline_stake);
    }
    CHECK(r.conserved);
}

TEST_CASE("abstaining network sends every block through the fallback")
{
    RunConfig c = small_world(9, 6);
    c.epochs = 3;
    c.bid_strategy = BidStrategy::abstain;
    AdversaryConfig a;
    a.strategy = AttackStrategy::abstain;
    c.adversary = a;
    const AttackReport r = run_attack_scenario(c);
    REQUIRE_FALSE(r.stall);
    CHECK(r.total_blocks > 0);
    CHECK(r.fallback_blocks == r.total_blocks);
    CHECK(r.conserved);
}

TEST_CASE("spending before the final check revokes the win")
{
    RunConfig c = small_world(4, 6);
    AdversaryConfig a;
    a.p = 2;
    a.spend_before_commit = true;
    c.adversary = a;
    Simulation sim(c);
    std::size_t revoked = 0;
    for (int i = 0; i < 4; ++i) {
        const EpochReport e = sim.step();
        for (NodeId id : e.revoked) {
            CHECK(sim.is_adversary(id));
            ++revoked;
        }
        for (const auto& b : e.blocks) {
            if (sim.is_adversary(b.miner)) {
                CHECK(b.via_fallback);
            }
        }
        CHECK(e.conserved);
    }
    CHECK(revoked > 0);
}

TEST_CASE("crashed adversary replicas forfeit rewards")
{
    RunConfig c = small_world(6, 8);
    c.epochs = 5;
    c.committee_size = 7;
    AdversaryConfig a;
    a.alpha = 0.3;
    a.p = 2;
    a.replica_behavior = ReplicaBehavior::crash;
    c.adversary = a;
    const AttackReport r = run_attack_scenario(c);
    REQUIRE_FALSE(r.stall);
    CHECK(r.withheld_rewards > 0);
    CHECK(r.conserved);
}

TEST_CASE("too many crashed replicas stop agreement")
{
    RunConfig c = small_world(6, 8);
    c.committee_size = 4;
    AdversaryConfig a;
    a.alpha = 0.3;
    a.p = 2;
    a.replica_behavior = ReplicaBehavior::crash;
    c.adversary = a;
    Simulation sim(c);
    const EpochReport e = sim.step();
    CHECK(e.status == EpochStatus::pbft_failed);
    CHECK(e.blocks.empty());
    CHECK(e.conserved);
}

TEST_CASE("strategy names round-trip and bad configs are rejected")
{
    for (auto s : {AttackStrategy::max_bid, AttackStrategy::double_spend, AttackStrategy::stake_theft,
                   AttackStrategy::equivocate, AttackStrategy::abstain}) {
        CHECK(parse_attack_strategy(to_string(s)) == s);
    }
    CHECK_THROWS_AS(parse_attack_strategy("bribe"), ConfigError);
    AdversaryConfig a;
    a.alpha = 1.2;
    CHECK_THROWS_AS(a.validate(), ConfigError);
    a = {};
    a.p = 0;
    CHECK_THROWS_AS(a.validate(), ConfigError);
    a = {};
    a.m = 0;
    CHECK_THROWS_AS(a.validate(), ConfigError);
}
