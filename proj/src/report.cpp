#include <epos/report.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

namespace epos {

using nlohmann::ordered_json;

namespace {

std::string fixed(double value, int precision)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, value);
    return buf;
}

std::string utc_now()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

ordered_json ids(const std::vector<NodeId>& nodes)
{
    ordered_json out = ordered_json::array();
    for (NodeId id : nodes) {
        out.push_back(id.value);
    }
    return out;
}

ordered_json pbft_json(const PbftSummary& s)
{
    ordered_json phases = ordered_json::array();
    for (const auto& r : s.rounds) {
        phases.push_back({{"view", r.view},
                          {"primary", r.primary.value},
                          {"phase", std::string(to_string(r.phase))},
                          {"messages", r.messages}});
    }
    return {{"decided", s.decided}, {"primary", s.primary.value}, {"replicas", s.replicas},
            {"view_changes", s.view_changes}, {"messages", s.messages}, {"phases", phases},
            {"faulty", ids(s.faulty)}};
}

ordered_json penalty_json(const PenaltyOutcome& p)
{
    ordered_json victims = ordered_json::array();
    for (const auto& v : p.victims) {
        victims.push_back({{"tx", v.tx}, {"recipient", v.recipient.value}, {"refund", v.refund}});
    }
    return {{"offender", p.offender.value},
            {"reimbursed_fees", p.reimbursed_fees},
            {"reimbursed_from_reward", p.reimbursed_from_reward},
            {"penalty", p.penalty},
            {"forfeited_reward", p.forfeited_reward},
            {"returned_to_offender", p.returned_to_offender},
            {"victims", victims}};
}

ordered_json settlement_json(const SettlementReport& s)
{
    ordered_json releases = ordered_json::array();
    for (const auto& r : s.releases) {
        releases.push_back({{"miner", r.miner.value}, {"block", r.block_index}, {"amount", r.amount}});
    }
    ordered_json penalties = ordered_json::array();
    for (const auto& p : s.penalties) {
        penalties.push_back(penalty_json(p));
    }
    return {{"epoch", s.epoch},         {"released", s.released},          {"releases", releases},
            {"penalties", penalties},   {"withheld", ids(s.withheld)},     {"withheld_amount", s.withheld_amount}};
}

ordered_json scheme_json(const SchemeResult& r)
{
    ordered_json winners = ordered_json::array();
    for (const auto& w : r.winners) {
        winners.push_back({{"block", w.block_index},
                           {"node", w.node.value},
                           {"balance_pre", w.balance_pre},
                           {"baseline_stake", w.baseline_stake}});
    }
    return {{"scheme", std::string(to_string(r.scheme))},
            {"l", r.length},
            {"mean_ST", r.mean_baseline_stake},
            {"mean_b_k", r.mean_winner_balance_pre},
            {"unique_k", r.unique_miners},
            {"beta", r.beta},
            {"gamma", r.gamma},
            {"violations", r.violations},
            {"winners", winners}};
}

ordered_json epoch_json(const EpochReport& e)
{
    ordered_json settlements = ordered_json::array();
    for (const auto& s : e.settlements) {
        settlements.push_back(settlement_json(s));
    }
    ordered_json blocks = ordered_json::array();
    for (const auto& b : e.blocks) {
        blocks.push_back({{"index", b.index},
                          {"miner", b.miner.value},
                          {"pct", b.pct},
                          {"baseline_stake", b.baseline_stake},
                          {"locked_stake", b.locked_stake},
                          {"balance_pre", b.balance_pre},
                          {"via_fallback", b.via_fallback},
                          {"halvings", b.halvings},
                          {"tx_count", b.tx_count},
                          {"fees", b.fees},
                          {"invalid_removed", b.invalid_removed},
                          {"stolen", b.stolen},
                          {"equivocated", b.equivocated},
                          {"timestamp", b.timestamp},
                          {"height", b.height},
                          {"hash", b.block_hash}});
    }
    ordered_json promoted = ordered_json::array();
    for (const auto& [index, node] : e.promoted) {
        promoted.push_back({{"block", index}, {"node", node.value}});
    }
    ordered_json schemes = ordered_json::array();
    for (const auto& r : e.schemes) {
        schemes.push_back(scheme_json(r));
    }
    return {{"status", std::string(to_string(e.status))},
            {"start_time", e.start_time},
            {"pbft", pbft_json(e.pbft)},
            {"settlements", settlements},
            {"plan",
             {{"snapshot_size", e.snapshot_size},
              {"length", e.length},
              {"duration", e.duration},
              {"total_fees", e.total_fees},
              {"baseline_stakes", e.baseline_stakes}}},
            {"auction",
             {{"bids", e.bids}, {"revoked", ids(e.revoked)}, {"promoted", promoted},
              {"fallback_blocks", e.fallback_blocks}}},
            {"blocks", blocks},
            {"schemes", schemes},
            {"refill", {{"arrivals", e.arrivals}, {"rejected", e.rejected_arrivals}}},
            {"ledger",
             {{"mempool", e.mempool_after},
              {"escrow", e.escrow_after},
              {"penalty_pool", e.penalty_pool_after},
              {"conserved", e.conserved}}}};
}

} // namespace

void write_file_atomic(const std::string& path, const std::string& content)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open " + tmp.string() + " for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            throw IoError("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot replace " + path + ": " + ec.message());
    }
}

ordered_json config_to_json(const RunConfig& c)
{
    ordered_json schemes = ordered_json::array();
    for (Scheme s : c.schemes) {
        schemes.push_back(std::string(to_string(s)));
    }
    ordered_json j = {{"seed", c.seed},
                      {"n_range", {c.n_min, c.n_max}},
                      {"balance_range", {c.balance_min, c.balance_max}},
                      {"block_size", c.block_size},
                      {"block_time", c.block_time},
                      {"lambda", c.lambda},
                      {"epochs", c.epochs},
                      {"fee_range", {c.fee_min, c.fee_max}},
                      {"mempool_blocks", {c.mempool_blocks_min, c.mempool_blocks_max}},
                      {"invalid_tx_fraction", c.invalid_tx_fraction},
                      {"forced_length", c.forced_length ? ordered_json(*c.forced_length) : ordered_json()},
                      {"coinbase_supplement", c.coinbase_supplement},
                      {"schemes", schemes},
                      {"greedy_fraction", c.greedy_fraction},
                      {"histogram_bin_width", c.histogram_bin_width},
                      {"committee_size", c.committee_size},
                      {"fallback_factor", c.fallback_factor},
                      {"bid_strategy", std::string(to_string(c.bid_strategy))},
                      {"bid_window", c.bid_window},
                      {"propagation_loss", c.propagation_loss}};
    if (c.adversary) {
        const auto& a = *c.adversary;
        j["adversary"] = {{"alpha", a.alpha},
                          {"p", a.p},
                          {"m", a.m},
                          {"strategy", std::string(to_string(a.strategy))},
                          {"bid_pct", a.bid_pct},
                          {"spend_before_commit", a.spend_before_commit},
                          {"replica_behavior", std::string(to_string(a.replica_behavior))},
                          {"theft_tx_count", a.theft_tx_count}};
    } else {
        j["adversary"] = nullptr;
    }
    return j;
}

ordered_json report_to_json(const RunReport& report, bool timestamps)
{
    ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    if (timestamps) {
        j["generated_at"] = utc_now();
    }
    j["seed"] = report.config.seed;
    j["config"] = config_to_json(report.config);
    j["network"] = {{"n", report.n}, {"total_coins", report.total_coins}, {"genesis_mempool", report.genesis_mempool}};
    j["stall"] = report.stall ? ordered_json(*report.stall) : ordered_json();
    ordered_json epochs = ordered_json::object();
    for (const auto& e : report.epochs) {
        epochs[std::to_string(e.epoch)] = epoch_json(e);
    }
    j["epochs"] = epochs;
    return j;
}

std::string table_csv(const RunReport& report)
{
    std::string out = std::string(kTableHeader) + "\n";
    for (const auto& e : report.epochs) {
        for (const auto& r : e.schemes) {
            out += std::string(to_string(r.scheme)) + "," + std::to_string(r.length) + "," +
                   fixed(r.mean_baseline_stake, 4) + "," + fixed(r.mean_winner_balance_pre, 4) + "," +
                   std::to_string(r.unique_miners) + "," + fixed(r.beta, 6) + "," + fixed(r.gamma, 6) + "\n";
        }
    }
    return out;
}

std::string histogram_csv(const RunReport& report)
{
    std::string out = std::string(kHistogramHeader) + "\n";
    auto emit = [&](std::string_view name, const std::vector<Amount>& balances) {
        const Histogram h = balance_histogram(balances, report.config.histogram_bin_width);
        for (const auto& bin : h.bins) {
            out += std::string(name) + "," + std::to_string(bin.lower) + "," + std::to_string(bin.upper) + "," +
                   std::to_string(bin.count) + "\n";
        }
    };
    if (!report.initial_balances.empty()) {
        emit("original", report.initial_balances);
    }
    for (const auto& [scheme, balances] : report.final_balances) {
        emit(to_string(scheme), balances);
    }
    return out;
}

void emit_report(const RunReport& report)
{
    const auto& c = report.config;
    write_file_atomic(c.json_out, report_to_json(report, c.timestamps).dump(2) + "\n");
    write_file_atomic(c.table_csv, table_csv(report));
    write_file_atomic(c.histogram_csv, histogram_csv(report));
}

std::string sweep_csv(const std::vector<SweepRow>& rows)
{
    std::string out = std::string(kSweepHeader) + "\n";
    for (const auto& r : rows) {
        out += std::to_string(r.n) + "," + std::to_string(r.p) + "," + std::to_string(r.m) + "," + fixed(r.alpha, 4) +
               "," + fixed(r.closed_form, 12) + "," + fixed(r.empirical, 12) + "," + std::to_string(r.trials) + "\n";
    }
    return out;
}

} // namespace epos
