// Command-line front end: analyze a wide CSV, run simulation grids, or
// generate a synthetic dataset.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rankeff/io.hpp"
#include "rankeff/report.hpp"
#include "rankeff/simulation.hpp"

namespace {

constexpr int kExitOperational = 2;
constexpr std::uint64_t kDefaultSeed = 20240917;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw rankeff::Error(rankeff::ErrorKind::IoError, "cannot write '" + path + "'");
    out << text;
}

struct AnalyzeArgs {
    std::string input;
    double alpha = 0.05;
    std::string methods = "all,complete,incomplete";
    std::string pattern = "auto";
    bool json = false;
    bool table = false;
    std::string na_token = "NA";
    std::optional<std::size_t> dims;
    std::string header = "auto";
    std::size_t floor = rankeff::kDefaultSizeFloor;
    std::string output;
};

int run_analyze(const AnalyzeArgs& a) {
    rankeff::ParseOptions parse;
    parse.na_token = a.na_token;
    parse.dims = a.dims;
    parse.header = a.header == "yes"  ? rankeff::HeaderMode::Present
                   : a.header == "no" ? rankeff::HeaderMode::Absent
                                      : rankeff::HeaderMode::Auto;
    rankeff::AnalysisOptions options;
    options.alpha = a.alpha;
    options.pattern = rankeff::parse_pattern_choice(a.pattern);
    options.size_floor = a.floor;
    options.methods.clear();
    for (const auto& m : split_list(a.methods)) options.methods.push_back(rankeff::parse_method(m));
    if (options.methods.empty()) {
        throw rankeff::Error(rankeff::ErrorKind::InvalidArgument, "--methods must name at least one method");
    }

    const std::string bytes = rankeff::read_file(a.input);
    const rankeff::Dataset data = rankeff::parse_dataset_text(bytes, parse);
    const rankeff::AnalysisReport report = rankeff::analyze(data, options);

    std::string text;
    const bool want_json = a.json || !a.table;
    if (want_json) {
        rankeff::Provenance prov;
        prov.config_hash = rankeff::fnv1a_hex(rankeff::analysis_config_string(options, parse, bytes));
        text += rankeff::report_to_json(report, prov).dump(2) + "\n";
    }
    if (a.table) text += rankeff::report_to_table(report);
    emit(text, a.output);
    return 0;
}

struct SimulateArgs {
    std::string builtin;
    std::string config;
    std::optional<std::size_t> reps;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> dims;
    std::string distribution;
    std::string json_out;
    std::string table_out;
    bool timing = false;
};

int run_simulate(const SimulateArgs& a) {
    std::vector<rankeff::Scenario> scenarios;
    std::uint64_t seed = a.seed.value_or(kDefaultSeed);
    if (!a.builtin.empty() == !a.config.empty()) {
        throw rankeff::Error(rankeff::ErrorKind::InvalidArgument, "give exactly one of --builtin or --config");
    }
    if (!a.builtin.empty()) {
        std::optional<rankeff::Distribution> dist;
        if (!a.distribution.empty()) dist = rankeff::parse_distribution(a.distribution);
        scenarios = rankeff::builtin_grid(a.builtin, a.reps.value_or(1000), dist, a.dims);
    } else {
        rankeff::ScenarioFile file = rankeff::parse_scenarios(a.config);
        scenarios = std::move(file.scenarios);
        if (!a.seed && file.seed) seed = *file.seed;
        for (auto& s : scenarios) {
            if (a.reps) s.reps = *a.reps;
            if (!a.distribution.empty()) s.distribution = rankeff::parse_distribution(a.distribution);
        }
        if (a.dims) std::erase_if(scenarios, [&](const rankeff::Scenario& s) { return s.d != *a.dims; });
    }
    if (scenarios.empty()) {
        throw rankeff::Error(rankeff::ErrorKind::InvalidArgument, "no scenarios match the requested filters");
    }
    const auto results = rankeff::run_grid(std::move(scenarios), seed);
    const std::string table = rankeff::simulation_to_table(results);
    if (!a.json_out.empty()) {
        emit(rankeff::simulation_to_json(results, seed, a.timing).dump(2) + "\n", a.json_out);
    }
    if (!a.table_out.empty()) emit(table, a.table_out);
    if (a.json_out.empty() && a.table_out.empty()) std::cout << table;
    return 0;
}

struct GenerateArgs {
    std::size_t d = 3;
    std::string sizes = "simple 33 8 1";
    std::string distribution = "discretized-normal";
    std::string shift;
    std::string rho = "0.1,0.1,0.1";
    std::string sigma2 = "1,1";
    std::uint64_t seed = kDefaultSeed;
    std::string output;
};

int run_generate(const GenerateArgs& a) {
    std::ostringstream cfg;
    cfg << "[scenario]\nd = " << a.d << "\nsizes = " << a.sizes << "\ndistribution = " << a.distribution
        << "\nrho = " << a.rho << "\nsigma2 = " << a.sigma2 << "\nreps = 1\n";
    if (!a.shift.empty()) cfg << "shift = " << a.shift << "\n";
    rankeff::Scenario s = rankeff::parse_scenarios_text(cfg.str()).scenarios.front();
    s.seed = a.seed;
    const rankeff::MaskedSample sample = rankeff::draw_sample(s, 0);
    std::vector<std::string> labels;
    for (std::size_t l = 0; l < a.d; ++l) labels.push_back("var" + std::to_string(l + 1));
    emit(rankeff::format_dataset(sample, labels), a.output);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonparametric multivariate two-sample rank tests with missing data"};
    app.set_version_flag("--version", rankeff::kToolVersion);
    app.require_subcommand(1);

    AnalyzeArgs aa;
    auto* analyze = app.add_subcommand("analyze", "Estimate effects and run the Wald and ANOVA tests on a CSV file");
    analyze->add_option("input", aa.input, "Wide CSV: g1_var1..g1_vard, g2_var1..g2_vard")->required();
    analyze->add_option("--alpha", aa.alpha, "Significance level")->capture_default_str();
    analyze->add_option("--methods", aa.methods, "Comma list of all, complete, incomplete")->capture_default_str();
    analyze->add_option("--pattern", aa.pattern, "Covariance estimator: auto, simple or general")
        ->check(CLI::IsMember({"auto", "simple", "general"}))
        ->capture_default_str();
    analyze->add_flag("--json", aa.json, "Write the JSON report (default)");
    analyze->add_flag("--table", aa.table, "Write the aligned text table");
    analyze->add_option("--na-token", aa.na_token, "Token marking a missing cell")->capture_default_str();
    analyze->add_option("--dims", aa.dims, "Number of components d");
    analyze->add_option("--header", aa.header, "Header row: auto, yes or no")
        ->check(CLI::IsMember({"auto", "yes", "no"}))
        ->capture_default_str();
    analyze->add_option("--floor", aa.floor, "Group size below which a warning is issued")->capture_default_str();
    analyze->add_option("-o,--output", aa.output, "Output path (default stdout)");

    SimulateArgs sa;
    auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo grid of Type-I error or power scenarios");
    simulate->add_option("--builtin", sa.builtin, "Named grid: table3, table6, design1, design2, design3");
    simulate->add_option("--config", sa.config, "Scenario configuration file");
    simulate->add_option("--reps", sa.reps, "Replications per scenario");
    simulate->add_option("--seed", sa.seed, "Master seed");
    simulate->add_option("--dims", sa.dims, "Keep only scenarios with this d");
    simulate->add_option("--distribution", sa.distribution, "discretized-normal, lognormal, cauchy or normal");
    simulate->add_option("--json-out", sa.json_out, "Write JSON results here");
    simulate->add_option("--table-out", sa.table_out, "Write the text table here");
    simulate->add_flag("--timing", sa.timing, "Include wall-clock seconds in the JSON results");

    GenerateArgs ga;
    auto* generate = app.add_subcommand("generate", "Draw one synthetic dataset as CSV");
    generate->add_option("--dims", ga.d, "Number of components")->capture_default_str();
    generate->add_option("--sizes", ga.sizes, "Layout, e.g. 'simple 33 8 1' or 'design1 75'")->capture_default_str();
    generate->add_option("--distribution", ga.distribution, "Generator")->capture_default_str();
    generate->add_option("--shift", ga.shift, "Comma list of group-2 shifts");
    generate->add_option("--rho", ga.rho, "rho1,rho2,rho12")->capture_default_str();
    generate->add_option("--sigma2", ga.sigma2, "sigma1^2,sigma2^2")->capture_default_str();
    generate->add_option("--seed", ga.seed, "Seed")->capture_default_str();
    generate->add_option("-o,--output", ga.output, "Output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (analyze->parsed()) return run_analyze(aa);
        if (simulate->parsed()) return run_simulate(sa);
        if (generate->parsed()) return run_generate(ga);
    } catch (const rankeff::Error& e) {
        std::cerr << rankeff::error_to_json(e).dump() << '\n';
        return kExitOperational;
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", {{"kind", "Internal"}, {"message", e.what()}}}}.dump() << '\n';
        return kExitOperational;
    }
    return 0;
}
