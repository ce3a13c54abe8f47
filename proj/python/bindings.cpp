#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rankeff/covariance.hpp"
#include "rankeff/effects.hpp"
#include "rankeff/hypothesis_tests.hpp"
#include "rankeff/io.hpp"
#include "rankeff/report.hpp"
#include "rankeff/simulation.hpp"

namespace py = pybind11;
using namespace rankeff;

namespace {

py::object to_python(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
    std::vector<Method> out;
    for (const auto& n : names) out.push_back(parse_method(n));
    return out;
}

std::vector<std::string> default_labels(std::size_t d) {
    std::vector<std::string> labels;
    for (std::size_t l = 0; l < d; ++l) labels.push_back("var" + std::to_string(l + 1));
    return labels;
}

py::dict flags_dict(const std::vector<DegenerateTerm>& flags) {
    py::list out;
    for (const auto& f : flags) {
        py::dict d;
        d["term"] = f.term;
        d["l"] = f.l < 0 ? py::object(py::none()) : py::object(py::int_(f.l + 1));
        d["r"] = f.r < 0 ? py::object(py::none()) : py::object(py::int_(f.r + 1));
        d["count"] = f.count;
        out.append(d);
    }
    py::dict wrap;
    wrap["flags"] = out;
    return wrap;
}

py::dict test_dict(const TestReport& r) {
    py::dict d;
    d["test"] = std::string(to_string(r.test));
    d["statistic"] = r.statistic;
    d["df"] = r.df;
    d["p_value"] = r.p_value;
    d["reject"] = r.reject;
    d["flags"] = r.flags;
    d["covariance_flags"] = flags_dict(r.covariance_flags)["flags"];
    return d;
}

py::dict analyze_dataset(const Dataset& data, double alpha, const std::vector<std::string>& methods,
                         const std::string& pattern, std::size_t floor) {
    AnalysisOptions options;
    options.alpha = alpha;
    options.methods = parse_methods(methods);
    options.pattern = parse_pattern_choice(pattern);
    options.size_floor = floor;
    const AnalysisReport report = analyze(data, options);
    return to_python(report_to_json(report, Provenance{})).cast<py::dict>();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Nonparametric multivariate two-sample rank tests with missing data";
    m.attr("__version__") = kToolVersion;

    // kept alive for the interpreter lifetime
    static PyObject* error_type = py::exception<Error>(m, "RankEffError", PyExc_ValueError).release().ptr();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            const std::string kind(to_string(e.kind()));
            py::object exc = py::reinterpret_borrow<py::object>(error_type)(kind + ": " + e.what());
            exc.attr("kind") = kind;
            PyErr_SetObject(error_type, exc.ptr());
        }
    });

    m.def("midranks", [](const std::vector<double>& v) { return midranks(v); }, py::arg("values"),
          "Midranks with ties averaged.");

    m.def("chisq_upper_tail", &chisq_upper_tail, py::arg("x"), py::arg("k"),
          "Upper tail of the chi-square distribution with real degrees of freedom.");

    m.def(
        "parse_dataset",
        [](const std::string& path, const std::string& na_token, std::optional<std::size_t> dims) {
            ParseOptions opt;
            opt.na_token = na_token;
            opt.dims = dims;
            const Dataset ds = parse_dataset(path, opt);
            return py::make_tuple(ds.sample.values(), ds.labels);
        },
        py::arg("path"), py::arg("na_token") = "NA", py::arg("dims") = py::none(),
        "Reads a wide CSV. Returns (values, labels), values being 2d x n with NaN for missing cells.");

    m.def(
        "estimate_effects",
        [](const Eigen::MatrixXd& values, const std::string& method) {
            const MaskedSample s = build_masked_sample(values);
            const PatternIndex idx = derive_pattern_index(s);
            const Restriction r = restrict_method(s, idx, parse_method(method));
            const EffectEstimate e = estimate_effects(r.sample, r.index, build_rank_table(r.sample, r.index));
            py::dict d;
            d["p_hat"] = e.p_hat;
            d["theta"] = e.theta;
            d["is_simple_pattern"] = idx.is_simple_pattern;
            return d;
        },
        py::arg("values"), py::arg("method") = "all",
        "Effect estimates from a 2d x n matrix, NaN marking missing cells.");

    m.def(
        "covariance",
        [](const Eigen::MatrixXd& values, const std::string& method, const std::string& pattern) {
            const MaskedSample s = build_masked_sample(values);
            const PatternIndex idx = derive_pattern_index(s);
            const Restriction r = restrict_method(s, idx, parse_method(method));
            const RankTable ranks = build_rank_table(r.sample, r.index);
            const PatternChoice choice = parse_pattern_choice(pattern);
            if (choice == PatternChoice::Simple && !r.index.is_simple_pattern) {
                throw Error(ErrorKind::PatternMismatch, "pattern mismatch: the sample does not follow the simple pattern");
            }
            const bool simple = choice == PatternChoice::Simple ||
                                (choice == PatternChoice::Auto && r.index.is_simple_pattern);
            const CovarianceEstimate c = simple ? covariance_simple(r.sample, r.index, ranks)
                                                : covariance_general(r.sample, r.index, ranks);
            py::dict d = flags_dict(c.flags);
            d["V"] = c.V;
            d["trace"] = c.trace;
            d["trace_sq"] = c.trace_sq;
            d["nu_hat"] = c.nu_hat;
            d["estimator"] = c.general ? "general" : "simple";
            d["subjects"] = r.sample.subjects();
            return d;
        },
        py::arg("values"), py::arg("method") = "all", py::arg("pattern") = "auto",
        "Covariance estimate of sqrt(n)(p_hat - p).");

    m.def(
        "wald_test",
        [](const Eigen::VectorXd& p_hat, const Eigen::MatrixXd& V, std::size_t n, double alpha) {
            EffectEstimate e;
            e.p_hat = p_hat;
            CovarianceEstimate c;
            c.V = V;
            update_trace_diagnostics(c);
            return test_dict(wald_test(e, c, n, Hypothesis(alpha)));
        },
        py::arg("p_hat"), py::arg("V"), py::arg("n"), py::arg("alpha") = 0.05);

    m.def(
        "anova_test",
        [](const Eigen::VectorXd& p_hat, const Eigen::MatrixXd& V, std::size_t n, double alpha) {
            EffectEstimate e;
            e.p_hat = p_hat;
            CovarianceEstimate c;
            c.V = V;
            update_trace_diagnostics(c);
            return test_dict(anova_test(e, c, n, Hypothesis(alpha)));
        },
        py::arg("p_hat"), py::arg("V"), py::arg("n"), py::arg("alpha") = 0.05);

    m.def(
        "analyze",
        [](const Eigen::MatrixXd& values, std::optional<std::vector<std::string>> labels, double alpha,
           const std::vector<std::string>& methods, const std::string& pattern, std::size_t floor) {
            MaskedSample s = build_masked_sample(values);
            std::vector<std::string> names = labels ? *labels : default_labels(s.dims());
            if (names.size() != s.dims()) {
                throw Error(ErrorKind::DimensionMismatch, "expected one label per component");
            }
            return analyze_dataset(Dataset{std::move(s), std::move(names)}, alpha, methods, pattern, floor);
        },
        py::arg("values"), py::arg("labels") = py::none(), py::arg("alpha") = 0.05,
        py::arg("methods") = std::vector<std::string>{"all", "complete", "incomplete"},
        py::arg("pattern") = "auto", py::arg("floor") = kDefaultSizeFloor,
        "Full analysis of a 2d x n matrix. Returns the report as a dict.");

    m.def(
        "analyze_file",
        [](const std::string& path, double alpha, const std::vector<std::string>& methods,
           const std::string& pattern, const std::string& na_token, std::size_t floor) {
            ParseOptions opt;
            opt.na_token = na_token;
            return analyze_dataset(parse_dataset(path, opt), alpha, methods, pattern, floor);
        },
        py::arg("path"), py::arg("alpha") = 0.05,
        py::arg("methods") = std::vector<std::string>{"all", "complete", "incomplete"},
        py::arg("pattern") = "auto", py::arg("na_token") = "NA", py::arg("floor") = kDefaultSizeFloor);

    m.def(
        "simulate",
        [](const std::string& builtin, std::size_t reps, std::uint64_t seed, std::optional<std::size_t> dims,
           std::optional<std::string> distribution) {
            std::optional<Distribution> dist;
            if (distribution) dist = parse_distribution(*distribution);
            std::vector<Scenario> grid = builtin_grid(builtin, reps, dist, dims);
            std::vector<SimulationResult> results;
            {
                py::gil_scoped_release release;
                results = run_grid(std::move(grid), seed);
            }
            return to_python(simulation_to_json(results, seed, false));
        },
        py::arg("builtin"), py::arg("reps") = 1000, py::arg("seed") = 20240917, py::arg("dims") = py::none(),
        py::arg("distribution") = py::none(), "Runs a named simulation grid and returns the results as a dict.");

    m.def(
        "simulate_config",
        [](const std::string& text, std::optional<std::uint64_t> seed) {
            ScenarioFile file = parse_scenarios_text(text);
            const std::uint64_t master = seed.value_or(file.seed.value_or(20240917));
            std::vector<SimulationResult> results;
            {
                py::gil_scoped_release release;
                results = run_grid(std::move(file.scenarios), master);
            }
            return to_python(simulation_to_json(results, master, false));
        },
        py::arg("text"), py::arg("seed") = py::none(), "Runs the scenarios of a configuration text.");
}
