#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rankeff/core_model.hpp"
#include "rankeff/simulation.hpp"

namespace rankeff {

enum class HeaderMode { Auto, Present, Absent };

struct ParseOptions {
    std::string na_token = "NA";
    HeaderMode header = HeaderMode::Auto;
    std::optional<std::size_t> dims;  // otherwise half the column count
};

struct Dataset {
    MaskedSample sample;
    std::vector<std::string> labels;  // one per component
};

/// Wide CSV, one row per subject: g1_var1..g1_vard, g2_var1..g2_vard.
/// Errors: ParseError (with line and column), InconsistentWidth,
/// EmptySubject, IoError.
Dataset parse_dataset_text(std::string_view text, const ParseOptions& options = {});
Dataset parse_dataset(const std::filesystem::path& path, const ParseOptions& options = {});

/// Inverse of parse_dataset with a header row. Values use the shortest
/// representation that reads back to the same double.
std::string format_dataset(const MaskedSample& sample, const std::vector<std::string>& labels,
                           const std::string& na_token = "NA");
void write_dataset(const std::filesystem::path& path, const MaskedSample& sample,
                   const std::vector<std::string>& labels, const std::string& na_token = "NA");

/// Shortest round-trip decimal text of a double.
std::string format_double(double value);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

struct ScenarioFile {
    std::vector<Scenario> scenarios;
    std::optional<std::uint64_t> seed;
};

/// Plain-text scenario configuration: "[scenario]" sections of
/// "key = value" lines, an optional "[grid]" section holding "seed", "#"
/// comments. Throws InvalidConfig with the offending key and line.
ScenarioFile parse_scenarios_text(std::string_view text);
ScenarioFile parse_scenarios(const std::filesystem::path& path);

/// Canonical one-line description of a scenario, used for hashing.
std::string describe(const Scenario& scenario);

std::string read_file(const std::filesystem::path& path);

}  // namespace rankeff
