#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "rankeff/core_model.hpp"
#include "rankeff/effects.hpp"
#include "rankeff/hypothesis_tests.hpp"

namespace rankeff {

enum class Distribution { DiscretizedNormal, LogNormal, Cauchy, Normal };

std::string_view to_string(Distribution dist) noexcept;
/// Accepts "discretized-normal", "lognormal", "cauchy", "normal".
Distribution parse_distribution(std::string_view name);

/// Treatment-level missingness: n_c complete subjects, n1 observed in group
/// 1 only, n2 in group 2 only.
struct SimpleSizes {
    std::size_t n_complete = 0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
};

/// Every observedness pattern gets n / P subjects, P = 2^(2d) - 1.
struct Design1 {
    std::size_t n = 0;
};

/// Fully observed pattern gets n*a subjects, the other P - 1 patterns share
/// the rest equally.
struct Design2 {
    std::size_t n = 0;
    double a = 0.0;
};

/// Fully observed pattern gets n_complete subjects, every other pattern
/// n_other.
struct Design3 {
    std::size_t n_complete = 0;
    std::size_t n_other = 100;
};

using SizePlan = std::variant<SimpleSizes, Design1, Design2, Design3>;

struct Scenario {
    std::string label;
    Distribution distribution = Distribution::DiscretizedNormal;
    std::size_t d = 2;
    double rho1 = 0.0;
    double rho2 = 0.0;
    double rho12 = 0.0;
    double sigma1_sq = 1.0;
    double sigma2_sq = 1.0;
    std::vector<double> shift;  // added to group 2, empty means no shift
    SizePlan sizes = SimpleSizes{};
    std::size_t reps = 1000;
    std::uint64_t seed = 0;
    double alpha = 0.05;
    std::vector<Method> methods{Method::All, Method::CompleteOnly, Method::IncompleteOnly};
};

/// Block covariance: group blocks sigma_g^2 [I + rho_g (J - I)], cross block
/// rho12 sigma1 sigma2 J. Throws NotPositiveDefinite.
Eigen::MatrixXd build_sigma(std::size_t d, double rho1, double rho2, double rho12, double sigma1_sq,
                            double sigma2_sq);

/// Throws InvalidScenario or NotPositiveDefinite.
void validate(const Scenario& scenario);

/// Subject counts per observedness pattern, in draw order. Patterns are
/// bitmasks over the 2d rows (bit r set = row r observed); the fully
/// observed pattern comes first, then the others in increasing order.
std::vector<std::pair<std::uint32_t, std::size_t>> pattern_allocation(const Scenario& scenario);

/// Mixes seed material into a well-spread 64-bit value (SplitMix64).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept;

/// Deterministic in (scenario.seed, replicate).
MaskedSample draw_sample(const Scenario& scenario, std::size_t replicate);

struct Tally {
    Method method = Method::All;
    TestKind test = TestKind::Wald;
    std::size_t rejections = 0;
    std::size_t failures = 0;    // replicates where the test was inestimable
    std::size_t degenerate = 0;  // replicates with a flagged degenerate statistic
    double rate = 0.0;
    double mc_se = 0.0;
};

struct SimulationResult {
    Scenario scenario;
    std::vector<Tally> tallies;
    double wall_seconds = 0.0;

    const Tally& tally(Method method, TestKind test) const;
};

/// Worker count from RANK_EFFECT_THREADS, else the hardware concurrency.
std::size_t thread_count();

SimulationResult run_scenario(const Scenario& scenario);

/// Runs scenarios in order. Scenario i gets seed mix_seed(master_seed, i).
std::vector<SimulationResult> run_grid(std::vector<Scenario> scenarios, std::uint64_t master_seed);

/// Named grids: table3, table6, design1, design2, design3. A dims filter
/// keeps rows with that d. Throws InvalidArgument listing valid names.
std::vector<Scenario> builtin_grid(std::string_view name, std::size_t reps,
                                   std::optional<Distribution> distribution = std::nullopt,
                                   std::optional<std::size_t> dims = std::nullopt);

const std::vector<std::string>& builtin_grid_names();

}  // namespace rankeff
