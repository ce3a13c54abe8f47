#include "rankeff/report.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "rankeff/ranking.hpp"

namespace rankeff {

using nlohmann::json;

namespace {

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string fixed3(double x) {
    if (!std::isfinite(x)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", x);
    // avoid "-0.000"
    if (std::string(buf) == "-0.000") return "0.000";
    return buf;
}

std::string fixed1(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.1f", x);
    return buf;
}

json matrix(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string_view warning_kind(WarningKind k) {
    return k == WarningKind::BelowFloor ? "below_floor" : "degenerate_variance";
}

json flag_json(const DegenerateTerm& f) {
    return {{"term", f.term},
            {"l", f.l < 0 ? json(nullptr) : json(f.l + 1)},
            {"r", f.r < 0 ? json(nullptr) : json(f.r + 1)},
            {"count", f.count}};
}

json test_json(const TestReport& t) {
    json flags = json::array();
    for (const auto& f : t.flags) flags.push_back(f);
    json cov_flags = json::array();
    for (const auto& f : t.covariance_flags) cov_flags.push_back(flag_json(f));
    return {{"test", to_string(t.test)},
            {"method", to_string(t.method)},
            {"estimable", t.estimable},
            {"statistic", number(t.statistic)},
            {"statistic_display", fixed3(t.statistic)},
            {"df", number(t.df)},
            {"p_value", number(t.p_value)},
            {"p_value_display", fixed3(t.p_value)},
            {"reject", t.reject},
            {"flags", flags},
            {"covariance_flags", cov_flags},
            {"reason", t.reason.empty() ? json(nullptr) : json(t.reason)}};
}

std::string pad(const std::string& s, std::size_t width, bool left = false) {
    if (s.size() >= width) return s;
    return left ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}

std::string method_title(Method m) {
    switch (m) {
    case Method::All: return "All";
    case Method::CompleteOnly: return "Complete";
    case Method::IncompleteOnly: return "Incomplete";
    }
    return "?";
}

json sizes_json(const SizePlan& plan) {
    return std::visit(
        [](const auto& p) -> json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, SimpleSizes>) {
                return {{"layout", "simple"}, {"n_complete", p.n_complete}, {"n1", p.n1}, {"n2", p.n2}};
            } else if constexpr (std::is_same_v<T, Design1>) {
                return {{"layout", "design1"}, {"n", p.n}};
            } else if constexpr (std::is_same_v<T, Design2>) {
                return {{"layout", "design2"}, {"n", p.n}, {"a", p.a}};
            } else {
                return {{"layout", "design3"}, {"n_complete", p.n_complete}, {"n_other", p.n_other}};
            }
        },
        plan);
}

std::string test_symbol(TestKind t, Method m) {
    std::string base = t == TestKind::Wald ? "Q" : "F";
    switch (m) {
    case Method::All: return base;
    case Method::IncompleteOnly: return base + "(1)";
    case Method::CompleteOnly: return base + "(2)";
    }
    return base;
}

}  // namespace

AnalysisReport analyze(const Dataset& data, const AnalysisOptions& options) {
    AnalysisReport report;
    report.labels = data.labels;
    report.options = options;
    report.index = derive_pattern_index(data.sample);
    report.warnings = check_assumptions(report.index, options.size_floor);
    report.results = analyze_methods(data.sample, report.index, Hypothesis(options.alpha), options.methods,
                                     options.pattern);
    return report;
}

json report_to_json(const AnalysisReport& report, const Provenance& provenance) {
    const auto& idx = report.index;
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["provenance"] = {{"tool", kToolName},
                         {"version", kToolVersion},
                         {"seed", provenance.seed ? json(*provenance.seed) : json(nullptr)},
                         {"config_hash", provenance.config_hash}};

    json counts = json::array();
    for (std::size_t l = 0; l < idx.dims(); ++l) {
        const auto& c = idx.components[l];
        counts.push_back({{"component", report.labels[l]},
                          {"n_complete", c.n_complete()},
                          {"n1", c.n_only(0)},
                          {"n2", c.n_only(1)}});
    }
    doc["input"] = {{"dimensions", idx.dims()},
                    {"subjects", idx.subjects},
                    {"labels", report.labels},
                    {"pattern", idx.is_simple_pattern ? "simple" : "general"},
                    {"counts", counts}};
    json methods = json::array();
    for (Method m : report.options.methods) methods.push_back(to_string(m));
    doc["settings"] = {{"alpha", report.options.alpha},
                       {"pattern", to_string(report.options.pattern)},
                       {"methods", methods},
                       {"size_floor", report.options.size_floor}};

    json warnings = json::array();
    for (const auto& w : report.warnings) {
        warnings.push_back({{"kind", warning_kind(w.kind)},
                            {"group", w.group == 0 ? json("complete") : json(w.group)},
                            {"component", report.labels[w.component]},
                            {"count", w.count},
                            {"message", w.message}});
    }
    doc["assumptions"] = warnings;

    json results = json::array();
    json tests = json::array();
    for (const auto& res : report.results) {
        json entry = {{"method", to_string(res.method)},
                      {"estimable", res.estimable},
                      {"subjects", res.subjects},
                      {"reason", res.reason.empty() ? json(nullptr) : json(res.reason)}};
        if (res.effects) {
            json effects = json::array();
            for (std::size_t l = 0; l < report.labels.size(); ++l) {
                const auto li = static_cast<Eigen::Index>(l);
                effects.push_back({{"component", report.labels[l]},
                                   {"p_hat", number(res.effects->p_hat(li))},
                                   {"p_hat_display", fixed3(res.effects->p_hat(li))},
                                   {"theta1", number(res.effects->theta(0, li))},
                                   {"theta2", number(res.effects->theta(1, li))},
                                   {"n_complete", res.effects->counts[l].n_complete},
                                   {"n1", res.effects->counts[l].n1},
                                   {"n2", res.effects->counts[l].n2}});
            }
            entry["effects"] = effects;
        } else {
            entry["effects"] = nullptr;
        }
        if (res.covariance) {
            const auto& cov = *res.covariance;
            json flags = json::array();
            for (const auto& f : cov.flags) flags.push_back(flag_json(f));
            json parts = json::object();
            for (const auto& p : cov.parts) parts[p.name] = matrix(p.matrix);
            entry["covariance"] = {{"estimator", cov.general ? "general" : "simple"},
                                   {"V", matrix(cov.V)},
                                   {"trace", number(cov.trace)},
                                   {"trace_sq", number(cov.trace_sq)},
                                   {"nu_hat", number(cov.nu_hat)},
                                   {"nu_hat_display", fixed3(cov.nu_hat)},
                                   {"parts", parts},
                                   {"flags", flags}};
        } else {
            entry["covariance"] = nullptr;
        }
        results.push_back(std::move(entry));
        tests.push_back(test_json(res.wald));
        tests.push_back(test_json(res.anova));
    }
    doc["methods"] = results;
    doc["tests"] = tests;
    return doc;
}

std::string report_to_table(const AnalysisReport& report) {
    std::ostringstream os;
    std::size_t label_width = 12;
    for (const auto& l : report.labels) label_width = std::max(label_width, l.size() + 2);
    const std::size_t col = 12;

    os << "Estimated effects p_hat\n";
    os << pad("Component", label_width, true);
    for (const auto& res : report.results) os << pad(method_title(res.method), col);
    os << '\n';
    for (std::size_t l = 0; l < report.labels.size(); ++l) {
        os << pad(report.labels[l], label_width, true);
        for (const auto& res : report.results) {
            os << pad(res.effects ? fixed3(res.effects->p_hat(static_cast<Eigen::Index>(l))) : "NA", col);
        }
        os << '\n';
    }
    os << "\nTest statistics and p-values (alpha = " << report.options.alpha << ")\n";
    os << pad("Test", label_width, true);
    for (const auto& res : report.results) os << pad(method_title(res.method), 2 * col);
    os << '\n' << pad("", label_width, true);
    for (std::size_t i = 0; i < report.results.size(); ++i) os << pad("statistic", col) << pad("p-value", col);
    os << '\n';
    for (TestKind kind : {TestKind::Wald, TestKind::Anova}) {
        os << pad(kind == TestKind::Wald ? "Q_n (Wald)" : "F_n (ANOVA)", label_width, true);
        for (const auto& res : report.results) {
            const TestReport& t = kind == TestKind::Wald ? res.wald : res.anova;
            os << pad(fixed3(t.statistic), col) << pad(fixed3(t.p_value), col);
        }
        os << '\n';
    }
    bool any_note = false;
    for (const auto& res : report.results) {
        for (const TestReport* t : {&res.wald, &res.anova}) {
            if (t->flags.empty() && t->covariance_flags.empty()) continue;
            if (!any_note) os << "\nNotes\n";
            any_note = true;
            os << "  " << method_title(res.method) << " " << to_string(t->test) << ":";
            for (const auto& f : t->flags) os << ' ' << f;
            for (const auto& f : t->covariance_flags) {
                os << " degenerate " << f.term;
                if (f.l >= 0) os << "(" << f.l + 1 << "," << f.r + 1 << ")";
            }
            if (!t->reason.empty()) os << " [" << t->reason << "]";
            os << '\n';
        }
    }
    if (!report.warnings.empty()) {
        os << "\nAssumption warnings\n";
        for (const auto& w : report.warnings) os << "  " << w.message << '\n';
    }
    return os.str();
}

std::string analysis_config_string(const AnalysisOptions& options, const ParseOptions& parse,
                                   std::string_view input_bytes) {
    std::string s = "alpha=" + format_double(options.alpha) + "|pattern=" + std::string(to_string(options.pattern)) +
                    "|methods=";
    for (std::size_t i = 0; i < options.methods.size(); ++i) {
        s += (i ? "," : "") + std::string(to_string(options.methods[i]));
    }
    s += "|floor=" + std::to_string(options.size_floor) + "|na=" + parse.na_token +
         "|dims=" + (parse.dims ? std::to_string(*parse.dims) : std::string("auto")) + "|input=" +
         fnv1a_hex(input_bytes);
    return s;
}

json simulation_to_json(const std::vector<SimulationResult>& results, std::uint64_t master_seed,
                        bool include_timing) {
    std::string config;
    for (const auto& r : results) config += describe(r.scenario) + "\n";
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["provenance"] = {{"tool", kToolName},
                         {"version", kToolVersion},
                         {"seed", master_seed},
                         {"config_hash", fnv1a_hex(config)}};
    json rows = json::array();
    for (const auto& r : results) {
        const auto& s = r.scenario;
        json tallies = json::array();
        for (const auto& t : r.tallies) {
            tallies.push_back({{"method", to_string(t.method)},
                               {"test", to_string(t.test)},
                               {"rejections", t.rejections},
                               {"rate", t.rate},
                               {"rate_percent_display", fixed1(100.0 * t.rate)},
                               {"mc_se", t.mc_se},
                               {"failures", t.failures},
                               {"degenerate", t.degenerate}});
        }
        json row = {{"label", s.label},
                    {"distribution", to_string(s.distribution)},
                    {"d", s.d},
                    {"rho", {s.rho1, s.rho2, s.rho12}},
                    {"sigma2", {s.sigma1_sq, s.sigma2_sq}},
                    {"shift", s.shift},
                    {"sizes", sizes_json(s.sizes)},
                    {"reps", s.reps},
                    {"alpha", s.alpha},
                    {"seed", s.seed},
                    {"tallies", tallies}};
        if (include_timing) row["wall_seconds"] = r.wall_seconds;
        rows.push_back(std::move(row));
    }
    doc["results"] = rows;
    return doc;
}

std::string simulation_to_table(const std::vector<SimulationResult>& results) {
    std::ostringstream os;
    std::size_t label_width = 10;
    for (const auto& r : results) label_width = std::max(label_width, r.scenario.label.size() + 2);
    const std::size_t col = 14;
    os << "Rejection rates x100 (Monte Carlo standard error x100)\n";
    if (results.empty()) return os.str();
    os << pad("Scenario", label_width, true);
    for (const auto& t : results.front().tallies) os << pad(test_symbol(t.test, t.method), col);
    os << '\n';
    for (const auto& r : results) {
        os << pad(r.scenario.label, label_width, true);
        for (const auto& t : r.tallies) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.1f (%.1f)", 100.0 * t.rate, 100.0 * t.mc_se);
            os << pad(buf, col);
        }
        os << '\n';
    }
    return os.str();
}

json error_to_json(const Error& error) {
    const auto& ctx = error.context();
    json where = json::object();
    if (ctx.line) where["line"] = ctx.line;
    if (ctx.column) where["column"] = ctx.column;
    if (ctx.component >= 0) where["component"] = ctx.component + 1;
    if (ctx.group >= 0) where["group"] = ctx.group;
    if (!ctx.key.empty()) where["key"] = ctx.key;
    return {{"error", {{"kind", to_string(error.kind())}, {"message", error.what()}, {"context", where}}}};
}

}  // namespace rankeff
