#include <epos/pbft.hpp>
#include <epos/rng.hpp>

#include <doctest.h>

#include <cmath>
#include <map>

using namespace epos;

namespace {

std::shared_ptr<const Mempool> pool_of(std::size_t count)
{
    auto pool = std::make_shared<Mempool>();
    for (TxId id = 0; id < count; ++id) {
        Transaction t;
        t.id = id;
        t.fee = static_cast<Amount>(id % 9 + 1);
        pool->insert(t);
    }
    return pool;
}

std::vector<NodeId> ids_of(std::size_t n)
{
    std::vector<NodeId> ids;
    for (std::size_t i = 0; i < n; ++i) {
        ids.push_back(NodeId{i});
    }
    return ids;
}

} // namespace

TEST_CASE("tolerance is floor of (n - 1) / 3")
{
    CHECK(pbft_tolerance(1) == 0);
    CHECK(pbft_tolerance(3) == 0);
    CHECK(pbft_tolerance(4) == 1);
    CHECK(pbft_tolerance(7) == 2);
    CHECK(pbft_tolerance(10) == 3);
}

TEST_CASE("four replicas survive one crash but not two")
{
    const auto base = pool_of(20);
    const auto ids = ids_of(4);
    auto one = diverge_views(base, ids, 0.0, 1);
    one[3].behavior = ReplicaBehavior::crash;
    CHECK(run_pbft(one, NodeId{0}).decided);

    auto two = diverge_views(base, ids, 0.0, 1);
    two[2].behavior = ReplicaBehavior::crash;
    two[3].behavior = ReplicaBehavior::equivocating;
    const PbftOutcome out = run_pbft(two, NodeId{0});
    CHECK_FALSE(out.decided);
    CHECK(out.view_changes == 3);
    CHECK(out.faulty_detected == std::vector<NodeId>{NodeId{2}, NodeId{3}});

    auto single = diverge_views(base, ids_of(1), 0.0, 1);
    CHECK(run_pbft(single, NodeId{0}).decided);
}

TEST_CASE("crashed primary hands over to the next id")
{
    auto replicas = diverge_views(pool_of(5), ids_of(4), 0.0, 1);
    replicas[2].behavior = ReplicaBehavior::crash;
    const PbftOutcome out = run_pbft(replicas, NodeId{2});
    CHECK(out.decided);
    CHECK(out.view_changes == 1);
    CHECK(out.primary == NodeId{3});
}

TEST_CASE("decision threshold is exact for every faulty subset up to ten replicas")
{
    const auto base = pool_of(40);
    for (std::size_t n = 1; n <= 10; ++n) {
        const auto ids = ids_of(n);
        for (const auto behavior : {ReplicaBehavior::crash, ReplicaBehavior::equivocating}) {
            for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
                auto replicas = diverge_views(base, ids, 0.2, n * 4096 + mask);
                std::size_t faulty = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (mask & (1u << i)) {
                        replicas[i].behavior = behavior;
                        ++faulty;
                    }
                }
                const NodeId primary{mask % n};
                const PbftOutcome out = run_pbft(replicas, primary);
                CHECK(out.decided == (faulty <= pbft_tolerance(n)));
                CHECK(out.faulty_detected.size() == faulty);
                if (out.decided) {
                    const Digest agreed = out.agreed_view->digest();
                    for (const auto& r : replicas) {
                        if (r.behavior == ReplicaBehavior::honest) {
                            CHECK(r.local_view == *out.agreed_view);
                            CHECK(r.local_view.digest() == agreed);
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("primary selection is uniform over the committee")
{
    const auto ids = ids_of(10);
    std::map<NodeId, int> hits;
    constexpr int kDraws = 100'000;
    for (int i = 0; i < kDraws; ++i) {
        ++hits[select_primary(ids, derive_seed(7, "primary-test", static_cast<std::uint64_t>(i)))];
    }
    REQUIRE(hits.size() == 10);
    for (const auto& [id, count] : hits) {
        CHECK(std::abs(count / double(kDraws) - 0.1) < 0.01);
    }
    CHECK(select_primary(ids, 5) == select_primary(ids, 5));
    CHECK_THROWS_AS(select_primary(std::vector<NodeId>{}, 1), ConfigError);
}

TEST_CASE("view divergence drops transactions at the configured rate")
{
    const auto base = pool_of(1000);
    const auto ids = ids_of(50);
    for (const auto& r : diverge_views(base, ids, 0.0, 3)) {
        CHECK(r.local_view.size() == 1000);
        CHECK(r.local_view == MempoolView::full(base));
    }
    for (const auto& r : diverge_views(base, ids, 1.0, 3)) {
        CHECK(r.local_view.size() == 0);
    }
    double dropped = 0.0;
    for (const auto& r : diverge_views(base, ids, 0.1, 3)) {
        dropped += 1000.0 - static_cast<double>(r.local_view.size());
    }
    const double mean = dropped / 50.0;
    const double sigma = std::sqrt(1000.0 * 0.1 * 0.9 / 50.0);
    CHECK(std::abs(mean - 100.0) < 3.0 * sigma);
    CHECK_THROWS_AS(diverge_views(base, ids, 1.5, 3), ConfigError);
}

TEST_CASE("materialized view keeps only present transactions")
{
    const auto base = pool_of(4);
    const MempoolView view(base, {true, false, true, false});
    const Mempool m = view.materialize();
    CHECK(m.count() == 2);
    CHECK(m.contains(0));
    CHECK_FALSE(m.contains(1));
    CHECK(view.digest() != MempoolView::full(base).digest());
    CHECK_THROWS(MempoolView(base, {true}));
}

TEST_CASE("message volume is quadratic in the replica count")
{
    auto four = diverge_views(pool_of(3), ids_of(4), 0.0, 1);
    const PbftOutcome out = run_pbft(four, NodeId{0});
    CHECK(out.total_messages() == 3 + 9 + 12 + 4);

    for (std::size_t n = 1; n <= 30; ++n) {
        auto replicas = diverge_views(pool_of(3), ids_of(n), 0.0, n);
        const auto messages = run_pbft(replicas, NodeId{0}).total_messages();
        CHECK(messages <= 3 * n * n);
        CHECK(messages >= 2 * (n - 1) * (n - 1));
    }
}

TEST_CASE("run_pbft rejects an empty set and an unknown primary")
{
    std::vector<Replica> none;
    CHECK_THROWS_AS(run_pbft(none, NodeId{0}), ConfigError);
    auto replicas = diverge_views(pool_of(1), ids_of(2), 0.0, 1);
    CHECK_THROWS_AS(run_pbft(replicas, NodeId{9}), ConfigError);
}
