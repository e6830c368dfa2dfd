#include "cli_commands.hpp"

#include <epos/adversary.hpp>
#include <epos/report.hpp>
#include <epos/rng.hpp>
#include <epos/simulation.hpp>

#include <iostream>

namespace epos::cli {

int run(const RunConfig& config)
{
    config.validate();
    const RunReport report = run_experiment(config);
    emit_report(report);
    for (const auto& e : report.epochs) {
        std::cout << "epoch " << e.epoch << ": " << to_string(e.status) << ", l=" << e.length;
        if (const auto* r = e.scheme(Scheme::epos)) {
            std::cout << ", unique e-PoS miners " << r->unique_miners << ", beta " << r->beta;
        }
        std::cout << "\n";
    }
    std::cout << "wrote " << config.json_out << ", " << config.table_csv << ", " << config.histogram_csv << "\n";
    if (report.stall) {
        std::cerr << "stalled: " << *report.stall << "\n";
        return kExitStall;
    }
    return kExitOk;
}

int sweep(const SweepOptions& options)
{
    if (options.n_max < 1 || options.trials < 1) {
        throw ConfigError("sweep needs n_max >= 1 and trials >= 1");
    }
    std::vector<SweepRow> rows;
    for (std::size_t n = 1; n <= options.n_max; ++n) {
        for (std::size_t p = 1; p <= n; ++p) {
            for (std::size_t m = 0; m <= options.m_max && m < n; ++m) {
                const std::uint64_t stream = n * 1'000'000 + p * 1'000 + m;
                const auto est =
                    idealized_attack_trials(n, p, m, options.trials, derive_seed(options.seed, "sweep", stream));
                rows.push_back({n, p, m, options.alpha, epos_attack_closed_form(n, p, m), est.frequency(), est.trials});
            }
        }
    }
    write_file_atomic(options.out, sweep_csv(rows));
    std::cout << "wrote " << rows.size() << " rows to " << options.out << "\n";
    return kExitOk;
}

int pbft_suite(const PbftSuiteOptions& options)
{
    if (options.max_replicas < 1) {
        throw ConfigError("pbft suite needs at least one replica");
    }
    std::string csv = "n,f,behavior,decided,expected,view_changes,messages\n";
    std::size_t mismatches = 0;
    auto base = std::make_shared<const Mempool>();
    for (std::size_t n = 1; n <= options.max_replicas; ++n) {
        std::vector<NodeId> ids;
        for (std::size_t i = 0; i < n; ++i) {
            ids.push_back(NodeId{i});
        }
        for (std::size_t f = 0; f <= n; ++f) {
            auto replicas = diverge_views(base, ids, 0.0, options.seed);
            for (std::size_t i = 0; i < f; ++i) {
                replicas[i].behavior = options.behavior;
            }
            const NodeId primary = select_primary(ids, derive_seed(options.seed, "suite", n * 100 + f));
            const PbftOutcome out = run_pbft(replicas, primary);
            const bool expected = f <= pbft_tolerance(n);
            mismatches += out.decided != expected ? 1 : 0;
            csv += std::to_string(n) + "," + std::to_string(f) + "," + std::string(to_string(options.behavior)) + "," +
                   (out.decided ? "1" : "0") + "," + (expected ? "1" : "0") + "," +
                   std::to_string(out.view_changes) + "," + std::to_string(out.total_messages()) + "\n";
        }
    }
    write_file_atomic(options.out, csv);
    std::cout << "wrote " << options.out << "; " << mismatches << " threshold mismatches\n";
    return mismatches == 0 ? kExitOk : kExitFailure;
}

} // namespace epos::cli
