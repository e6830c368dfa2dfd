#include <epos/report.hpp>
#include <epos/simulation.hpp>
#include <epos/world.hpp>

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace epos;
namespace fs = std::filesystem;

namespace {

RunConfig small_run(std::uint64_t seed)
{
    RunConfig c;
    c.seed = seed;
    c.n_min = 200;
    c.n_max = 250;
    c.block_size = 20;
    c.block_time = 60;
    c.lambda = 20.0 / 60.0;
    c.mempool_blocks_min = 5;
    c.mempool_blocks_max = 8;
    c.committee_size = 5;
    c.epochs = 3;
    return c;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("epos-harness-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("default world matches the evaluation network")
{
    RunConfig c;
    c.mempool_blocks_max = 2;
    const World w = generate_world(c);
    CHECK(w.peers.size() >= 8'000);
    CHECK(w.peers.size() <= 9'000);
    for (const auto& p : w.peers) {
        CHECK(p.balance >= 0);
        CHECK(p.balance <= 20'000);
    }
    CHECK(w.mempool.total_size() % 2'000 == 0);
    CHECK(w.adversary.empty());
}

TEST_CASE("world generation replays for a seed")
{
    RunConfig c = small_run(4);
    const World a = generate_world(c);
    const World b = generate_world(c);
    REQUIRE(a.peers.size() == b.peers.size());
    for (std::size_t i = 0; i < a.peers.size(); ++i) {
        CHECK(a.peers[i].balance == b.peers[i].balance);
    }
    CHECK(std::equal(a.mempool.transactions().begin(), a.mempool.transactions().end(),
                     b.mempool.transactions().begin(), b.mempool.transactions().end()));
    c.seed = 5;
    const World other = generate_world(c);
    CHECK(other.mempool.total_fees() != a.mempool.total_fees());
}

TEST_CASE("fixed balance range gives equal balances and an affordable mempool")
{
    RunConfig c = small_run(2);
    c.balance_min = 5;
    c.balance_max = 5;
    const World w = generate_world(c);
    std::vector<Amount> spent(w.peers.size(), 0);
    for (const auto& p : w.peers) {
        CHECK(p.balance == 5);
    }
    for (const auto& tx : w.mempool.transactions()) {
        spent[tx.sender.value] += tx.fee;
        CHECK(tx.sender != tx.recipient);
    }
    for (Amount s : spent) {
        CHECK(s <= 5);
    }
}

TEST_CASE("adversary holds alpha of all coins across its identities")
{
    RunConfig c = small_run(6);
    AdversaryConfig a;
    a.alpha = 0.51;
    a.p = 3;
    c.adversary = a;
    const World w = generate_world(c);
    REQUIRE(w.adversary.size() == 3);
    Amount adv = 0;
    Amount all = 0;
    for (const auto& p : w.peers) {
        all += p.balance;
    }
    for (NodeId id : w.adversary) {
        adv += w.peers[id.value].balance;
        CHECK(id.value >= w.peers.size() - 3);
    }
    CHECK(double(adv) / double(all) == doctest::Approx(0.51).epsilon(1e-3));
}

TEST_CASE("poisson arrivals")
{
    Rng rng{1};
    CHECK(poisson_count(0.0, 600, rng) == 0);
    CHECK(poisson_count(2.0, 0, rng) == 0);
    CHECK_THROWS_AS(poisson_count(-1.0, 10, rng), ConfigError);

    constexpr int kDraws = 1'000'000;
    int zeros = 0;
    for (int i = 0; i < kDraws; ++i) {
        zeros += poisson_count(1.0, 1, rng) == 0 ? 1 : 0;
    }
    const double p0 = std::exp(-1.0);
    CHECK(std::abs(zeros / double(kDraws) - p0) < 3.0 * std::sqrt(p0 * (1 - p0) / kDraws));

    constexpr int kEpochs = 2'000;
    double sum = 0.0;
    for (int i = 0; i < kEpochs; ++i) {
        sum += static_cast<double>(poisson_count(2.0, 600, rng));
    }
    CHECK(std::abs(sum / kEpochs - 1200.0) < 3.0 * std::sqrt(1200.0 / kEpochs));

    const ArrivalModel model{1, 9, 0.0, 10};
    const auto txs = poisson_arrivals(1.0, 100, 9, model, 500);
    REQUIRE_FALSE(txs.empty());
    CHECK(txs.front().id == 500);
    CHECK(txs.back().id == 500 + txs.size() - 1);
    for (const auto& t : txs) {
        CHECK(t.fee >= 1);
        CHECK(t.fee <= 9);
    }
    CHECK(poisson_arrivals(1.0, 100, 9, model, 500) == txs);
}

TEST_CASE("zero epochs leave the world untouched")
{
    RunConfig c = small_run(1);
    c.epochs = 0;
    const RunReport r = run_experiment(c);
    CHECK(r.epochs.empty());
    CHECK_FALSE(r.stall);
    REQUIRE(r.final_balances.size() == 3);
    for (const auto& [scheme, balances] : r.final_balances) {
        CHECK(balances == r.final_balances.front().second);
    }

    // Only the genesis fees have left the senders' balances.
    const Simulation sim(c);
    std::vector<Amount> expected = sim.initial_balances();
    for (const auto& tx : sim.mempool().transactions()) {
        expected[tx.sender.value] -= tx.fee;
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(sim.ledger().balance(NodeId{i}) == expected[i]);
    }
    CHECK(sim.ledger().in_flight_fees() == sim.mempool().total_fees());
    CHECK(sim.ledger().chain().empty());
}

TEST_CASE("runs replay for a seed")
{
    const RunConfig c = small_run(11);
    const RunReport a = run_experiment(c);
    const RunReport b = run_experiment(c);
    CHECK(report_to_json(a, false).dump() == report_to_json(b, false).dump());
    CHECK(table_csv(a) == table_csv(b));
    CHECK(histogram_csv(a) == histogram_csv(b));
}

TEST_CASE("rewards are released only after the next epoch starts")
{
    RunConfig c = small_run(3);
    c.schemes = {Scheme::epos};
    Simulation sim(c);
    const EpochReport first = sim.step();
    REQUIRE(first.status == EpochStatus::mined);
    CHECK(first.settlements.empty());
    Amount locked = 0;
    Amount fees = 0;
    for (const auto& b : first.blocks) {
        locked += b.locked_stake;
        fees += b.fees;
    }
    CHECK(sim.ledger().escrow() == locked + fees);

    const EpochReport second = sim.step();
    REQUIRE(second.settlements.size() == 1);
    const SettlementReport& s = second.settlements[0];
    CHECK(s.epoch == first.epoch);
    CHECK(s.released);
    REQUIRE(s.releases.size() == first.blocks.size());
    for (std::size_t i = 0; i < first.blocks.size(); ++i) {
        CHECK(s.releases[i].miner == first.blocks[i].miner);
        CHECK(s.releases[i].amount == first.blocks[i].locked_stake + first.blocks[i].fees);
    }
    CHECK(sim.ledger().conserved());
}

TEST_CASE("blocks are timestamped one block time apart")
{
    RunConfig c = small_run(8);
    c.schemes = {Scheme::epos};
    Simulation sim(c);
    const EpochReport e = sim.step();
    REQUIRE(e.blocks.size() >= 2);
    for (std::size_t i = 1; i < e.blocks.size(); ++i) {
        CHECK(e.blocks[i].timestamp - e.blocks[i - 1].timestamp == c.block_time);
        CHECK(e.blocks[i].height == e.blocks[i - 1].height + 1);
    }
    CHECK(sim.now() == e.start_time + e.duration);
}

TEST_CASE("refill tracks lambda times the epoch duration")
{
    RunConfig c = small_run(12);
    c.schemes = {Scheme::epos};
    c.epochs = 20;
    const RunReport r = run_experiment(c);
    REQUIRE_FALSE(r.stall);
    double arrivals = 0.0;
    double expected = 0.0;
    for (const auto& e : r.epochs) {
        arrivals += static_cast<double>(e.arrivals);
        const SimSeconds span = e.status == EpochStatus::mined ? e.duration : c.block_time;
        expected += c.lambda * static_cast<double>(span);
        CHECK(e.conserved);
    }
    CHECK(std::abs(arrivals - expected) < 4.0 * std::sqrt(expected));
}

TEST_CASE("report files carry the table and histogram headers")
{
    const fs::path dir = scratch_dir("emit");
    RunConfig c = small_run(2);
    c.epochs = 1;
    c.json_out = (dir / "r.json").string();
    c.table_csv = (dir / "t.csv").string();
    c.histogram_csv = (dir / "h.csv").string();
    const RunReport r = run_experiment(c);
    emit_report(r);
    REQUIRE(fs::exists(c.json_out));
    const std::string table = slurp(c.table_csv);
    CHECK(table.rfind(std::string(kTableHeader) + "\n", 0) == 0);
    CHECK(std::count(table.begin(), table.end(), '\n') == 4);
    CHECK(slurp(c.histogram_csv).rfind(std::string(kHistogramHeader) + "\n", 0) == 0);
    const auto json = nlohmann::json::parse(slurp(c.json_out));
    CHECK(json["schema_version"] == kReportSchemaVersion);
    CHECK(json["seed"] == 2);

    RunConfig empty_cfg = c;
    empty_cfg.epochs = 0;
    emit_report(run_experiment(empty_cfg));
    CHECK(slurp(c.table_csv) == std::string(kTableHeader) + "\n");
    CHECK_FALSE(fs::exists(c.table_csv + ".tmp"));
    fs::remove_all(dir);
}

TEST_CASE("unwritable report path names the path")
{
    const std::string path = "/nonexistent-dir/epos/out.json";
    try {
        write_file_atomic(path, "{}");
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find(path) != std::string::npos);
    }
}

TEST_CASE("invalid configs are rejected")
{
    RunConfig c = small_run(1);
    c.n_min = 10;
    c.n_max = 5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small_run(1);
    c.block_size = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small_run(1);
    c.fee_min = 5;
    c.fee_max = 1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}
