#pragma once

#include <epos/simulation.hpp>

#include <json.hpp>

#include <string>

namespace epos {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kTableHeader = "scheme,l,mean_ST,mean_b_k,unique_k,beta,gamma";
inline constexpr const char* kHistogramHeader = "scheme,bin_lower,bin_upper,count";
inline constexpr const char* kSweepHeader = "n,p,m,alpha,closed_form,empirical,trials";

struct IoError : Error {
    using Error::Error;
};

/// Writes through a sibling temporary file and renames it into place.
/// Throws IoError naming the path.
void write_file_atomic(const std::string& path, const std::string& content);

nlohmann::ordered_json config_to_json(const RunConfig& config);
nlohmann::ordered_json report_to_json(const RunReport& report, bool timestamps);
std::string table_csv(const RunReport& report);
std::string histogram_csv(const RunReport& report);

/// Writes the JSON report and both CSVs to the paths in report.config.
void emit_report(const RunReport& report);

struct SweepRow {
    std::size_t n = 0;
    std::size_t p = 0;
    std::size_t m = 0;
    double alpha = 0.0;
    double closed_form = 0.0;
    double empirical = 0.0;
    std::uint64_t trials = 0;
};

std::string sweep_csv(const std::vector<SweepRow>& rows);

} // namespace epos
