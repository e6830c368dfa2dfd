#include <epos/schemes.hpp>
#include <epos/simulation.hpp>

#include <doctest.h>

using namespace epos;

namespace {

EpochPlan plan_with_fees(const std::vector<Amount>& fees)
{
    EpochPlan plan;
    for (std::size_t i = 0; i < fees.size(); ++i) {
        BlockPlan b;
        b.index = i + 1;
        b.fees = fees[i];
        b.baseline_stake = fees[i];
        plan.blocks.push_back(b);
    }
    plan.length = fees.size();
    return plan;
}

} // namespace

TEST_CASE("priority selection compounds on the richest greedy peer")
{
    std::vector<Amount> balances{100, 90};
    const std::vector<NodeId> greedy{NodeId{0}, NodeId{1}};
    const SchemeResult r = run_priority_scheme(balances, plan_with_fees({9, 5, 1}), greedy);
    CHECK(balances[0] == 115);
    CHECK(balances[1] == 90);
    CHECK(r.unique_miners == 1);
    CHECK(r.violations == 0);
    CHECK(r.winners[2].balance_pre == 114);
}

TEST_CASE("priority ties go to the smaller id and compounding keeps the lead")
{
    std::vector<Amount> balances{50, 50};
    const std::vector<NodeId> greedy{NodeId{1}, NodeId{0}};
    const SchemeResult r = run_priority_scheme(balances, plan_with_fees({5, 3}), greedy);
    CHECK(r.winners[0].node == NodeId{0});
    CHECK(r.winners[1].node == NodeId{0});
    CHECK(balances == std::vector<Amount>{58, 50});

    std::vector<Amount> lone{10, 900};
    const std::vector<NodeId> single{NodeId{0}};
    CHECK(run_priority_scheme(lone, plan_with_fees({5, 3}), single).unique_miners == 1);
    CHECK_THROWS_AS(run_priority_scheme(lone, plan_with_fees({5}), std::vector<NodeId>{}), ConfigError);
}

TEST_CASE("random selection with one peer always picks it")
{
    std::vector<Amount> balances{0};
    const SchemeResult r = run_random_scheme(balances, plan_with_fees({4, 3, 2}), 1);
    CHECK(r.unique_miners == 1);
    CHECK(balances[0] == 9);
    CHECK(r.violations == 1);
    std::vector<Amount> none;
    CHECK_THROWS_AS(run_random_scheme(none, plan_with_fees({1}), 1), ConfigError);
}

TEST_CASE("random selection replays for a seed and ignores balances")
{
    std::vector<Amount> a(50, 0);
    std::vector<Amount> b(50, 0);
    std::vector<Amount> rich(50, 1'000'000);
    const EpochPlan plan = plan_with_fees(std::vector<Amount>(40, 3));
    const SchemeResult ra = run_random_scheme(a, plan, 77);
    const SchemeResult rb = run_random_scheme(b, plan, 77);
    const SchemeResult rr = run_random_scheme(rich, plan, 77);
    REQUIRE(ra.winners.size() == 40);
    for (std::size_t i = 0; i < 40; ++i) {
        CHECK(ra.winners[i].node == rb.winners[i].node);
        CHECK(ra.winners[i].node == rr.winners[i].node);
    }
    CHECK(a == b);
    CHECK(rr.violations == 0);
}

TEST_CASE("greedy set is the richest fraction")
{
    const std::vector<Amount> balances{5, 90, 40, 90, 1, 7, 3, 2, 8, 60};
    CHECK(select_greedy_set(balances, 0.2) == std::vector<NodeId>{NodeId{1}, NodeId{3}});
    CHECK(select_greedy_set(balances, 0.01) == std::vector<NodeId>{NodeId{1}});
    CHECK(select_greedy_set(balances, 1.0).size() == 10);
    CHECK_THROWS_AS(select_greedy_set(balances, 0.0), ConfigError);
}

TEST_CASE("decentralization fraction and gamma labels")
{
    CHECK(decentralization_beta(200, 8'000) == doctest::Approx(0.025));
    CHECK(decentralization_beta(0, 10) == 0.0);
    CHECK(decentralization_beta(10, 10) == 1.0);
    CHECK_THROWS_AS(decentralization_beta(0, 0), ConfigError);

    const GammaResult vs_priority = gamma(0.0250, 0.0200);
    CHECK(vs_priority.value == doctest::Approx(0.005));
    CHECK(vs_priority.label == Decentralization::more);
    const GammaResult vs_random = gamma(0.0250, 0.0240);
    CHECK(vs_random.value == doctest::Approx(0.001));
    CHECK(vs_random.label == Decentralization::more);
    const GammaResult same = gamma(0.03, 0.03);
    CHECK(same.value == 0.0);
    CHECK(same.label == Decentralization::equally);
    CHECK(gamma(0.01, 0.02).label == Decentralization::less);
    CHECK(to_string(Decentralization::more) == "more decentralized");
}

TEST_CASE("violations count winners below their baseline")
{
    const std::vector<WinnerRecord> w{
        {1, NodeId{0}, 100, 100}, {2, NodeId{1}, 99, 100}, {3, NodeId{2}, 0, 1}, {4, NodeId{3}, 5, 0}};
    CHECK(fairness_violations(w) == 2);
    CHECK(fairness_violations(std::vector<WinnerRecord>{}) == 0);
}

TEST_CASE("balance histogram bins from zero")
{
    const std::vector<Amount> two{5, 15};
    const Histogram h = balance_histogram(two, 10);
    REQUIRE(h.bins.size() == 2);
    CHECK(h.bins[0].lower == 0);
    CHECK(h.bins[0].upper == 10);
    CHECK(h.bins[0].count == 1);
    CHECK(h.bins[1].count == 1);
    CHECK(h.max_edge() == 20);

    CHECK(balance_histogram(std::vector<Amount>{}, 10).bins.empty());
    CHECK(balance_histogram(std::vector<Amount>{}, 10).max_edge() == 0);
    CHECK(balance_histogram(std::vector<Amount>{10}, 10).bins.size() == 2);
    CHECK_THROWS_AS(balance_histogram(two, 0), ConfigError);
}

TEST_CASE("priority world ends more skewed than the e-PoS world")
{
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        RunConfig c;
        c.seed = seed;
        c.n_min = 400;
        c.n_max = 400;
        c.block_size = 50;
        c.mempool_blocks_min = 40;
        c.mempool_blocks_max = 40;
        c.fee_min = 50;
        c.fee_max = 500;
        c.epochs = 2;
        c.lambda = 2'000.0 / 600.0 / 40.0;
        const RunReport r = run_experiment(c);
        REQUIRE_FALSE(r.stall);
        Amount epos_edge = 0;
        Amount priority_edge = 0;
        for (const auto& [scheme, balances] : r.final_balances) {
            const Amount edge = balance_histogram(balances, 1'000).max_edge();
            if (scheme == Scheme::epos) {
                epos_edge = edge;
            } else if (scheme == Scheme::priority) {
                priority_edge = edge;
            }
        }
        CHECK(priority_edge > epos_edge);
    }
}

TEST_CASE("scheme names round-trip")
{
    for (auto s : {Scheme::epos, Scheme::random, Scheme::priority}) {
        CHECK(parse_scheme(to_string(s)) == s);
    }
    CHECK_THROWS_AS(parse_scheme("pow"), ConfigError);
}
