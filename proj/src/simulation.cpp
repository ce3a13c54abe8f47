#include "rankeff/simulation.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>
#include <thread>

#include "rankeff/ranking.hpp"

namespace rankeff {

namespace {

std::size_t pattern_count(std::size_t d) { return (std::size_t{1} << (2 * d)) - 1; }

std::uint32_t full_pattern(std::size_t d) { return static_cast<std::uint32_t>(pattern_count(d)); }

Error invalid(const std::string& what) { return Error(ErrorKind::InvalidScenario, what); }

std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

std::string triple(double a, double b, double c) { return "(" + fmt(a) + "," + fmt(b) + "," + fmt(c) + ")"; }
std::string pair_str(double a, double b) { return "(" + fmt(a) + "," + fmt(b) + ")"; }

struct Rho {
    double r1, r2, r12;
};
struct Var2 {
    double s1, s2;
};

constexpr std::array<SimpleSizes, 4> kSettings{{{10, 30, 30}, {30, 10, 10}, {30, 30, 10}, {10, 10, 30}}};

Scenario base(Distribution dist, std::size_t d, Rho rho, Var2 var, std::size_t reps) {
    Scenario s;
    s.distribution = dist;
    s.d = d;
    s.rho1 = rho.r1;
    s.rho2 = rho.r2;
    s.rho12 = rho.r12;
    s.sigma1_sq = var.s1;
    s.sigma2_sq = var.s2;
    s.reps = reps;
    return s;
}

std::string common_label(const Scenario& s) {
    return "d=" + std::to_string(s.d) + " rho=" + triple(s.rho1, s.rho2, s.rho12) +
           " sigma2=" + pair_str(s.sigma1_sq, s.sigma2_sq);
}

}  // namespace

std::string_view to_string(Distribution dist) noexcept {
    switch (dist) {
    case Distribution::DiscretizedNormal: return "discretized-normal";
    case Distribution::LogNormal: return "lognormal";
    case Distribution::Cauchy: return "cauchy";
    case Distribution::Normal: return "normal";
    }
    return "unknown";
}

Distribution parse_distribution(std::string_view name) {
    if (name == "discretized-normal") return Distribution::DiscretizedNormal;
    if (name == "lognormal") return Distribution::LogNormal;
    if (name == "cauchy") return Distribution::Cauchy;
    if (name == "normal") return Distribution::Normal;
    throw Error(ErrorKind::InvalidArgument, "unknown distribution '" + std::string(name) +
                                                "' (expected discretized-normal, lognormal, cauchy or normal)");
}

Eigen::MatrixXd build_sigma(std::size_t d, double rho1, double rho2, double rho12, double sigma1_sq,
                            double sigma2_sq) {
    if (d == 0) throw invalid("d must be at least 1");
    if (!(sigma1_sq > 0.0) || !(sigma2_sq > 0.0)) throw invalid("variances must be positive");
    const auto n = static_cast<Eigen::Index>(d);
    const double s1 = std::sqrt(sigma1_sq);
    const double s2 = std::sqrt(sigma2_sq);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(n, n);
    Eigen::MatrixXd sigma(2 * n, 2 * n);
    sigma.topLeftCorner(n, n) = sigma1_sq * (id + rho1 * (ones - id));
    sigma.bottomRightCorner(n, n) = sigma2_sq * (id + rho2 * (ones - id));
    sigma.topRightCorner(n, n) = rho12 * s1 * s2 * ones;
    sigma.bottomLeftCorner(n, n) = rho12 * s1 * s2 * ones;
    const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorKind::NotPositiveDefinite, "covariance matrix for rho=" + triple(rho1, rho2, rho12) +
                                                        " is not positive definite");
    }
    return sigma;
}

std::vector<std::pair<std::uint32_t, std::size_t>> pattern_allocation(const Scenario& s) {
    const std::size_t d = s.d;
    const std::uint32_t full = full_pattern(d);
    const std::uint32_t group1 = (std::uint32_t{1} << d) - 1;
    const std::uint32_t group2 = group1 << d;
    std::vector<std::pair<std::uint32_t, std::size_t>> out;

    if (const auto* simple = std::get_if<SimpleSizes>(&s.sizes)) {
        out = {{full, simple->n_complete}, {group1, simple->n1}, {group2, simple->n2}};
        return out;
    }
    const std::size_t p = pattern_count(d);
    if (d > 4) throw invalid("design layouts support d <= 4");
    std::size_t first = 0;
    std::size_t other = 0;
    if (const auto* d1 = std::get_if<Design1>(&s.sizes)) {
        if (d1->n % p != 0) {
            throw invalid("design 1 needs n divisible by " + std::to_string(p) + ", got " + std::to_string(d1->n));
        }
        first = other = d1->n / p;
    } else if (const auto* d2 = std::get_if<Design2>(&s.sizes)) {
        if (!(d2->a > 0.0 && d2->a < 1.0)) throw invalid("design 2 needs a in (0, 1)");
        const double exact = static_cast<double>(d2->n) * d2->a;
        first = static_cast<std::size_t>(std::llround(exact));
        if (std::abs(exact - static_cast<double>(first)) > 1e-9) throw invalid("design 2 needs n*a to be an integer");
        const std::size_t rest = d2->n - first;
        if (rest % (p - 1) != 0) {
            throw invalid("design 2 needs n(1-a) divisible by " + std::to_string(p - 1));
        }
        other = rest / (p - 1);
    } else {
        const auto& d3 = std::get<Design3>(s.sizes);
        first = d3.n_complete;
        other = d3.n_other;
    }
    out.emplace_back(full, first);
    for (std::uint32_t m = 1; m < full; ++m) out.emplace_back(m, other);
    return out;
}

void validate(const Scenario& s) {
    if (s.reps == 0) throw invalid("replications must be at least 1");
    if (!(s.alpha > 0.0 && s.alpha < 1.0)) throw invalid("alpha must lie in (0, 1)");
    if (!s.shift.empty() && s.shift.size() != s.d) {
        throw invalid("shift has " + std::to_string(s.shift.size()) + " entries, expected " + std::to_string(s.d));
    }
    for (double x : s.shift) {
        if (!std::isfinite(x)) throw invalid("shift entries must be finite");
    }
    if (s.methods.empty()) throw invalid("at least one method is required");
    build_sigma(s.d, s.rho1, s.rho2, s.rho12, s.sigma1_sq, s.sigma2_sq);
    std::size_t total = 0;
    for (const auto& [pattern, count] : pattern_allocation(s)) total += count;
    if (total < 2) throw invalid("at least two subjects are required");
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept {
    auto splitmix = [](std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    };
    return splitmix(splitmix(a) ^ (b + 0x632BE59BD9B4E019ULL));
}

MaskedSample draw_sample(const Scenario& s, std::size_t replicate) {
    const std::size_t d = s.d;
    const auto rows = static_cast<Eigen::Index>(2 * d);
    const Eigen::MatrixXd sigma = build_sigma(d, s.rho1, s.rho2, s.rho12, s.sigma1_sq, s.sigma2_sq);
    const Eigen::MatrixXd chol = sigma.llt().matrixL();
    const auto allocation = pattern_allocation(s);
    std::size_t n = 0;
    for (const auto& [pattern, count] : allocation) n += count;

    std::mt19937_64 rng(mix_seed(s.seed, replicate));
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(rows);
    for (std::size_t l = 0; l < s.shift.size(); ++l) mean(static_cast<Eigen::Index>(d + l)) = s.shift[l];

    Eigen::MatrixXd values(rows, static_cast<Eigen::Index>(n));
    BoolMatrix observed(rows, static_cast<Eigen::Index>(n));
    Eigen::VectorXd z(rows);
    Eigen::Index col = 0;
    for (const auto& [pattern, count] : allocation) {
        for (std::size_t t = 0; t < count; ++t, ++col) {
            for (Eigen::Index r = 0; r < rows; ++r) z(r) = normal(rng);
            const Eigen::VectorXd w = chol * z;
            Eigen::VectorXd x;
            switch (s.distribution) {
            case Distribution::DiscretizedNormal:
                x = (w + mean).unaryExpr([](double v) { return std::round(v) + 0.0; });
                break;
            case Distribution::LogNormal:
                x = (w + mean).array().exp().matrix();
                break;
            case Distribution::Cauchy:
                x = w / std::abs(normal(rng)) + mean;
                break;
            case Distribution::Normal:
                x = w + mean;
                break;
            }
            values.col(col) = x;
            for (Eigen::Index r = 0; r < rows; ++r) observed(r, col) = ((pattern >> r) & 1U) != 0;
        }
    }
    return build_masked_sample(values, observed);
}

const Tally& SimulationResult::tally(Method method, TestKind test) const {
    for (const auto& t : tallies) {
        if (t.method == method && t.test == test) return t;
    }
    throw Error(ErrorKind::InvalidArgument, "no tally for the requested method");
}

std::size_t thread_count() {
    if (const char* env = std::getenv("RANK_EFFECT_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

SimulationResult run_scenario(const Scenario& s) {
    validate(s);
    const auto start = std::chrono::steady_clock::now();
    const Hypothesis hyp(s.alpha);
    const std::size_t slots = 2 * s.methods.size();
    // outcome per replicate and slot: 0 accept, 1 reject, 2 inestimable,
    // plus 4 when the statistic is flagged degenerate
    std::vector<std::uint8_t> outcome(s.reps * slots, 2);

    auto work = [&](std::size_t rep) {
        std::uint8_t* row = outcome.data() + rep * slots;
        try {
            const MaskedSample sample = draw_sample(s, rep);
            const PatternIndex idx = derive_pattern_index(sample);
            const auto results = analyze_methods(sample, idx, hyp, s.methods, PatternChoice::Auto);
            for (std::size_t m = 0; m < results.size(); ++m) {
                const TestReport* reports[2] = {&results[m].wald, &results[m].anova};
                for (std::size_t t = 0; t < 2; ++t) {
                    const TestReport& rep_t = *reports[t];
                    std::uint8_t code = rep_t.estimable ? (rep_t.reject ? 1 : 0) : 2;
                    for (const auto& f : rep_t.flags) {
                        if (f == "zero_covariance_null" || f == "indefinite_covariance") code |= 4;
                    }
                    row[2 * m + t] = code;
                }
            }
        } catch (const Error&) {
            // the whole replicate counts as a failure for every slot
        }
    };

    const std::size_t workers = std::min(thread_count(), s.reps);
    if (workers <= 1) {
        for (std::size_t rep = 0; rep < s.reps; ++rep) work(rep);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t rep = next++; rep < s.reps; rep = next++) work(rep);
            });
        }
        for (auto& th : pool) th.join();
    }

    SimulationResult result;
    result.scenario = s;
    const double reps = static_cast<double>(s.reps);
    for (std::size_t m = 0; m < s.methods.size(); ++m) {
        for (std::size_t t = 0; t < 2; ++t) {
            Tally tally;
            tally.method = s.methods[m];
            tally.test = t == 0 ? TestKind::Wald : TestKind::Anova;
            for (std::size_t rep = 0; rep < s.reps; ++rep) {
                const std::uint8_t code = outcome[rep * slots + 2 * m + t];
                if ((code & 3) == 1) ++tally.rejections;
                if ((code & 3) == 2) ++tally.failures;
                if (code & 4) ++tally.degenerate;
            }
            tally.rate = static_cast<double>(tally.rejections) / reps;
            tally.mc_se = std::sqrt(tally.rate * (1.0 - tally.rate) / reps);
            result.tallies.push_back(tally);
        }
    }
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::vector<SimulationResult> run_grid(std::vector<Scenario> scenarios, std::uint64_t master_seed) {
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        scenarios[i].seed = mix_seed(master_seed, i);
        try {
            validate(scenarios[i]);
        } catch (const Error& e) {
            throw Error(e.kind(), "scenario " + std::to_string(i + 1) + " (" + scenarios[i].label + "): " + e.what());
        }
    }
    std::vector<SimulationResult> out;
    out.reserve(scenarios.size());
    for (const auto& s : scenarios) out.push_back(run_scenario(s));
    return out;
}

const std::vector<std::string>& builtin_grid_names() {
    static const std::vector<std::string> names{"table3", "table6", "design1", "design2", "design3"};
    return names;
}

std::vector<Scenario> builtin_grid(std::string_view name, std::size_t reps, std::optional<Distribution> distribution,
                                   std::optional<std::size_t> dims) {
    std::vector<Scenario> grid;
    const std::array<Var2, 2> variances{{{1, 1}, {1, 5}}};
    const Rho weak{0.1, 0.1, 0.1};
    const Rho negative{-0.1, -0.1, -0.1};
    const Rho strong{0.1, 0.9, 0.5};

    if (name == "table3") {
        const Distribution dist = distribution.value_or(Distribution::DiscretizedNormal);
        const std::array<Rho, 2> rhos{weak, dist == Distribution::DiscretizedNormal ? strong : negative};
        for (std::size_t setting = 0; setting < kSettings.size(); ++setting) {
            for (const Rho& rho : rhos) {
                for (const Var2& var : variances) {
                    for (std::size_t d : {2, 3, 5}) {
                        Scenario s = base(dist, d, rho, var, reps);
                        s.sizes = kSettings[setting];
                        s.label = "setting=" + std::to_string(setting + 1) + " " + common_label(s);
                        grid.push_back(std::move(s));
                    }
                }
            }
        }
    } else if (name == "table6") {
        const Distribution dist = distribution.value_or(Distribution::DiscretizedNormal);
        const Rho rho = dist == Distribution::DiscretizedNormal ? weak
                        : dist == Distribution::LogNormal       ? negative
                                                                : strong;
        const std::array<std::pair<double, double>, 6> shifts{
            {{0.0, 0.3}, {0.3, 0.3}, {0.6, 0.6}, {0.9, 0.9}, {0.3, 0.6}, {0.3, 0.9}}};
        for (std::size_t setting = 0; setting < kSettings.size(); ++setting) {
            for (const Var2& var : variances) {
                for (const auto& [d1, d2] : shifts) {
                    Scenario s = base(dist, 2, rho, var, reps);
                    s.sizes = kSettings[setting];
                    s.shift = {d1, d2};
                    s.label = "setting=" + std::to_string(setting + 1) + " " + common_label(s) +
                              " delta=" + pair_str(d1, d2);
                    grid.push_back(std::move(s));
                }
            }
        }
    } else if (name == "design1" || name == "design2" || name == "design3") {
        const Distribution dist = distribution.value_or(Distribution::DiscretizedNormal);
        std::vector<std::pair<SizePlan, std::string>> plans;
        if (name == "design1") {
            for (std::size_t n : {75, 150, 300}) plans.emplace_back(Design1{n}, "n=" + std::to_string(n));
        } else if (name == "design2") {
            for (double a : {0.2, 0.4, 0.6, 0.8}) plans.emplace_back(Design2{210, a}, "n=210 a=" + fmt(a));
        } else {
            for (std::size_t n1 : {5, 10, 20}) {
                plans.emplace_back(Design3{n1, 100}, "n_complete=" + std::to_string(n1) + " n_other=100");
            }
        }
        for (const auto& [plan, plan_label] : plans) {
            for (const Rho& rho : {negative, weak}) {
                for (const Var2& var : variances) {
                    Scenario s = base(dist, 2, rho, var, reps);
                    s.sizes = plan;
                    s.methods = {Method::All};
                    s.label = std::string(name) + " " + plan_label + " " + common_label(s);
                    grid.push_back(std::move(s));
                }
            }
        }
    } else {
        std::string valid;
        for (const auto& n : builtin_grid_names()) valid += (valid.empty() ? "" : ", ") + n;
        throw Error(ErrorKind::InvalidArgument, "unknown builtin grid '" + std::string(name) + "'; valid: " + valid);
    }
    if (dims) {
        std::erase_if(grid, [&](const Scenario& s) { return s.d != *dims; });
    }
    return grid;
}

}  // namespace rankeff
