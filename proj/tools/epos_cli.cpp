#include "cli_commands.hpp"

#include <epos/mining.hpp>
#include <epos/report.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <map>

namespace {

using namespace epos;

struct RunFlags {
    RunConfig config;
    std::string preset;
    std::size_t forced_length = 0;
    std::vector<std::string> schemes{"epos", "random", "priority"};
    std::string bid_strategy = "window";
    AdversaryConfig adversary;
    std::string attack_strategy = "max-bid";
    std::string replica_behavior = "honest";
    bool no_timestamps = false;
};

ReplicaBehavior parse_behavior(const std::string& name)
{
    for (auto b : {ReplicaBehavior::honest, ReplicaBehavior::crash, ReplicaBehavior::equivocating}) {
        if (to_string(b) == name) {
            return b;
        }
    }
    throw ConfigError("unknown replica behavior '" + name + "'");
}

void add_run_options(CLI::App& run, RunFlags& f)
{
    RunConfig& c = f.config;
    run.set_config("--config", "", "INI/TOML file supplying any flag; flags on the command line win");
    run.add_option("--preset", f.preset, "Parameter preset (table1)")->check(CLI::IsMember({"table1"}));
    run.add_option("--seed", c.seed);
    run.add_option("--n-min", c.n_min);
    run.add_option("--n-max", c.n_max);
    run.add_option("--balance-min", c.balance_min);
    run.add_option("--balance-max", c.balance_max);
    run.add_option("--block-size", c.block_size, "Block capacity in transaction slots");
    run.add_option("--block-time", c.block_time, "Seconds per block");
    run.add_option("--lambda", c.lambda, "Transaction arrivals per second");
    run.add_option("--epochs", c.epochs);
    run.add_option("--fee-min", c.fee_min);
    run.add_option("--fee-max", c.fee_max);
    run.add_option("--mempool-blocks-min", c.mempool_blocks_min);
    run.add_option("--mempool-blocks-max", c.mempool_blocks_max);
    run.add_option("--invalid-fraction", c.invalid_tx_fraction);
    run.add_option("--force-epoch-length", f.forced_length);
    run.add_option("--coinbase-supplement", c.coinbase_supplement);
    run.add_option("--schemes", f.schemes)->delimiter(',');
    run.add_option("--greedy-fraction", c.greedy_fraction);
    run.add_option("--bin-width", c.histogram_bin_width);
    run.add_option("--committee-size", c.committee_size);
    run.add_option("--fallback-factor", c.fallback_factor);
    run.add_option("--bid-strategy", f.bid_strategy)->check(CLI::IsMember({"window", "greedy", "abstain"}));
    run.add_option("--bid-window", c.bid_window);
    run.add_option("--propagation-loss", c.propagation_loss);
    run.add_option("--adversary-strategy", f.attack_strategy, "Enables the adversary");
    run.add_option("--adversary-alpha", f.adversary.alpha);
    run.add_option("--adversary-p", f.adversary.p);
    run.add_option("--adversary-m", f.adversary.m);
    run.add_option("--adversary-bid-pct", f.adversary.bid_pct);
    run.add_flag("--adversary-spend", f.adversary.spend_before_commit);
    run.add_option("--adversary-replica", f.replica_behavior);
    run.add_option("--theft-tx-count", f.adversary.theft_tx_count);
    run.add_option("--json-out", c.json_out);
    run.add_option("--table-csv", c.table_csv);
    run.add_option("--histogram-csv", c.histogram_csv);
    run.add_flag("--no-timestamps", f.no_timestamps);
}

RunConfig finish_run_config(const CLI::App& run, RunFlags& f)
{
    RunConfig c = f.config;
    if (f.preset == "table1") {
        const RunConfig preset = table1_config(c.seed, 200);
        const std::map<std::string, std::function<void()>> fields = {
            {"--mempool-blocks-min", [&] { c.mempool_blocks_min = preset.mempool_blocks_min; }},
            {"--mempool-blocks-max", [&] { c.mempool_blocks_max = preset.mempool_blocks_max; }},
            {"--epochs", [&] { c.epochs = preset.epochs; }},
            {"--force-epoch-length", [&] { c.forced_length = preset.forced_length; }},
        };
        for (const auto& [flag, apply] : fields) {
            if (run.count(flag) == 0) {
                apply();
            }
        }
    }
    if (run.count("--force-epoch-length") != 0) {
        c.forced_length = f.forced_length;
    }
    c.schemes.clear();
    for (const auto& s : f.schemes) {
        c.schemes.push_back(parse_scheme(s));
    }
    c.bid_strategy = parse_bid_strategy(f.bid_strategy);
    if (run.count("--adversary-strategy") != 0) {
        AdversaryConfig a = f.adversary;
        a.strategy = parse_attack_strategy(f.attack_strategy);
        a.replica_behavior = parse_behavior(f.replica_behavior);
        c.adversary = a;
    }
    c.timestamps = !f.no_timestamps;
    return c;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"e-PoS simulation framework"};
    app.require_subcommand(1);

    RunFlags run_flags;
    CLI::App* run = app.add_subcommand("run", "Run a multi-epoch experiment and write JSON/CSV reports");
    add_run_options(*run, run_flags);

    cli::SweepOptions sweep_opts;
    CLI::App* sweep = app.add_subcommand("sweep", "Closed-form attack probabilities against the Monte-Carlo oracle");
    sweep->add_option("--n-max", sweep_opts.n_max);
    sweep->add_option("--m-max", sweep_opts.m_max);
    sweep->add_option("--trials", sweep_opts.trials);
    sweep->add_option("--seed", sweep_opts.seed);
    sweep->add_option("--alpha", sweep_opts.alpha);
    sweep->add_option("--out", sweep_opts.out);

    cli::PbftSuiteOptions pbft_opts;
    std::string pbft_behavior = "crash";
    CLI::App* pbft = app.add_subcommand("pbft", "Exhaustive PBFT fault-threshold suite");
    pbft->add_option("--max-replicas", pbft_opts.max_replicas);
    pbft->add_option("--behavior", pbft_behavior)->check(CLI::IsMember({"crash", "equivocating"}));
    pbft->add_option("--seed", pbft_opts.seed);
    pbft->add_option("--out", pbft_opts.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cli::kExitOk : cli::kExitConfig;
    }

    try {
        if (run->parsed()) {
            return cli::run(finish_run_config(*run, run_flags));
        }
        if (sweep->parsed()) {
            return cli::sweep(sweep_opts);
        }
        pbft_opts.behavior = parse_behavior(pbft_behavior);
        return cli::pbft_suite(pbft_opts);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return cli::kExitConfig;
    } catch (const StallError& e) {
        std::cerr << "stalled: " << e.what() << "\n";
        return cli::kExitStall;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kExitFailure;
    }
}
