#pragma once

#include <epos/config.hpp>
#include <epos/pbft.hpp>

#include <string>

namespace epos::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitStall = 3;

int run(const RunConfig& config);

struct SweepOptions {
    std::size_t n_max = 10;
    std::size_t m_max = 2;
    std::uint64_t trials = 100'000;
    std::uint64_t seed = 42;
    double alpha = 0.51;
    std::string out = "sweep.csv";
};

int sweep(const SweepOptions& options);

struct PbftSuiteOptions {
    std::size_t max_replicas = 10;
    ReplicaBehavior behavior = ReplicaBehavior::crash;
    std::uint64_t seed = 1;
    std::string out = "pbft.csv";
};

int pbft_suite(const PbftSuiteOptions& options);

} // namespace epos::cli
