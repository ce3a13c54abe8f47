#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "rankeff/hypothesis_tests.hpp"
#include "rankeff/io.hpp"
#include "rankeff/simulation.hpp"

namespace rankeff {

inline constexpr const char* kSchemaVersion = "1.0";
inline constexpr const char* kToolName = "rankeff";
inline constexpr const char* kToolVersion = "0.1.0";

struct AnalysisOptions {
    double alpha = 0.05;
    std::vector<Method> methods{Method::All, Method::CompleteOnly, Method::IncompleteOnly};
    PatternChoice pattern = PatternChoice::Auto;
    std::size_t size_floor = kDefaultSizeFloor;
};

struct AnalysisReport {
    std::vector<std::string> labels;
    PatternIndex index;
    AnalysisOptions options;
    std::vector<AssumptionWarning> warnings;
    std::vector<MethodResult> results;
};

/// index -> assumptions -> every requested method. Throws PatternMismatch
/// when a simple estimator is forced on a general pattern.
AnalysisReport analyze(const Dataset& data, const AnalysisOptions& options = {});

struct Provenance {
    std::optional<std::uint64_t> seed;
    std::string config_hash;
};

/// Values at full precision, with 3-decimal "_display" companions.
nlohmann::json report_to_json(const AnalysisReport& report, const Provenance& provenance);

/// Effects per component and method, then the test statistics and
/// p-values, in aligned columns.
std::string report_to_table(const AnalysisReport& report);

/// Canonical hash input for an analysis run.
std::string analysis_config_string(const AnalysisOptions& options, const ParseOptions& parse,
                                   std::string_view input_bytes);

nlohmann::json simulation_to_json(const std::vector<SimulationResult>& results, std::uint64_t master_seed,
                                  bool include_timing);
std::string simulation_to_table(const std::vector<SimulationResult>& results);

/// Error object printed by the CLI on operational failure.
nlohmann::json error_to_json(const Error& error);

}  // namespace rankeff
