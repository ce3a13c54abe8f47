#include "rankeff/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <type_traits>
#include <variant>

namespace rankeff {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

struct Line {
    std::size_t number;
    std::string_view text;
};

std::vector<Line> lines_of(std::string_view text) {
    std::vector<Line> out;
    std::size_t number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = text.find('\n', start);
        ++number;
        std::string_view line = text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        out.push_back({number, line});
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::optional<double> parse_number(std::string_view cell) {
    if (cell.empty()) return std::nullopt;
    if (cell.front() == '+') cell.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
    return v;
}

Error parse_error(std::size_t line, std::size_t column, const std::string& what) {
    ErrorContext ctx;
    ctx.line = line;
    ctx.column = column;
    std::string where = "line " + std::to_string(line);
    if (column > 0) where += ", column " + std::to_string(column);
    return Error(ErrorKind::ParseError, where + ": " + what, ctx);
}

Error config_error(std::size_t line, const std::string& key, const std::string& what) {
    ErrorContext ctx;
    ctx.line = line;
    ctx.key = key;
    return Error(ErrorKind::InvalidConfig,
                 "line " + std::to_string(line) + (key.empty() ? "" : ", key '" + key + "'") + ": " + what, ctx);
}

std::vector<double> parse_list(std::string_view value, std::size_t line, const std::string& key) {
    std::vector<double> out;
    for (auto part : split(value, ',')) {
        const auto v = parse_number(part);
        if (!v || !std::isfinite(*v)) throw config_error(line, key, "'" + std::string(part) + "' is not a number");
        out.push_back(*v);
    }
    return out;
}

std::size_t parse_count(std::string_view token, std::size_t line, const std::string& key) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw config_error(line, key, "'" + std::string(token) + "' is not a non-negative integer");
    }
    return v;
}

std::vector<std::string_view> words(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        const std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

SizePlan parse_sizes(std::string_view value, std::size_t line) {
    const auto w = words(value);
    const std::string key = "sizes";
    if (w.empty()) throw config_error(line, key, "missing value");
    auto expect = [&](std::size_t lo, std::size_t hi) {
        if (w.size() < lo + 1 || w.size() > hi + 1) {
            throw config_error(line, key, "wrong number of values for '" + std::string(w[0]) + "'");
        }
    };
    if (w[0] == "simple") {
        expect(3, 3);
        return SimpleSizes{parse_count(w[1], line, key), parse_count(w[2], line, key), parse_count(w[3], line, key)};
    }
    if (w[0] == "design1") {
        expect(1, 1);
        return Design1{parse_count(w[1], line, key)};
    }
    if (w[0] == "design2") {
        expect(2, 2);
        const auto a = parse_number(w[2]);
        if (!a) throw config_error(line, key, "'" + std::string(w[2]) + "' is not a number");
        return Design2{parse_count(w[1], line, key), *a};
    }
    if (w[0] == "design3") {
        expect(1, 2);
        return Design3{parse_count(w[1], line, key), w.size() == 3 ? parse_count(w[2], line, key) : 100};
    }
    throw config_error(line, key, "unknown layout '" + std::string(w[0]) +
                                      "' (expected simple, design1, design2 or design3)");
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Dataset parse_dataset_text(std::string_view text, const ParseOptions& options) {
    std::vector<Line> rows;
    for (const Line& line : lines_of(text)) {
        if (!trim(line.text).empty()) rows.push_back(line);
    }
    if (rows.empty()) throw parse_error(1, 0, "no rows");

    std::vector<std::string> header;
    std::size_t first = 0;
    {
        const auto cells = split(rows.front().text, ',');
        bool looks_like_header = false;
        for (auto c : cells) {
            if (c != options.na_token && !parse_number(c)) looks_like_header = true;
        }
        const bool has_header = options.header == HeaderMode::Present ||
                                (options.header == HeaderMode::Auto && looks_like_header);
        if (has_header) {
            for (auto c : cells) header.emplace_back(c);
            first = 1;
        }
    }
    if (first >= rows.size()) throw parse_error(rows.front().number, 0, "no rows");

    const std::size_t width = header.empty() ? split(rows[first].text, ',').size() : header.size();
    if (options.dims && width != 2 * *options.dims) {
        ErrorContext ctx;
        ctx.line = rows.front().number;
        throw Error(ErrorKind::InconsistentWidth,
                    "line " + std::to_string(ctx.line) + ": expected " + std::to_string(2 * *options.dims) +
                        " columns for d=" + std::to_string(*options.dims) + ", found " + std::to_string(width),
                    ctx);
    }
    if (width % 2 != 0 || width == 0) {
        ErrorContext ctx;
        ctx.line = rows.front().number;
        throw Error(ErrorKind::InconsistentWidth,
                    "line " + std::to_string(ctx.line) + ": column count " + std::to_string(width) +
                        " is not of the form 2d",
                    ctx);
    }
    const std::size_t d = width / 2;
    const std::size_t n = rows.size() - first;

    Eigen::MatrixXd values(static_cast<Eigen::Index>(width), static_cast<Eigen::Index>(n));
    BoolMatrix observed(static_cast<Eigen::Index>(width), static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        const Line& line = rows[first + k];
        const auto cells = split(line.text, ',');
        if (cells.size() != width) {
            ErrorContext ctx;
            ctx.line = line.number;
            throw Error(ErrorKind::InconsistentWidth,
                        "line " + std::to_string(line.number) + ": expected " + std::to_string(width) +
                            " columns, found " + std::to_string(cells.size()),
                        ctx);
        }
        bool any = false;
        for (std::size_t c = 0; c < width; ++c) {
            const auto r = static_cast<Eigen::Index>(c);
            const auto col = static_cast<Eigen::Index>(k);
            if (cells[c] == options.na_token) {
                observed(r, col) = false;
                values(r, col) = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            const auto v = parse_number(cells[c]);
            if (!v) throw parse_error(line.number, c + 1, "'" + std::string(cells[c]) + "' is not a number");
            if (!std::isfinite(*v)) {
                ErrorContext ctx;
                ctx.line = line.number;
                ctx.column = c + 1;
                throw Error(ErrorKind::NonFiniteObservedValue,
                            "line " + std::to_string(line.number) + ", column " + std::to_string(c + 1) +
                                ": non-finite value",
                            ctx);
            }
            observed(r, col) = true;
            values(r, col) = *v;
            any = true;
        }
        if (!any) {
            ErrorContext ctx;
            ctx.line = line.number;
            throw Error(ErrorKind::EmptySubject, "line " + std::to_string(line.number) + ": subject has no observed value",
                        ctx);
        }
    }

    std::vector<std::string> labels;
    for (std::size_t l = 0; l < d; ++l) {
        std::string label = header.empty() ? "var" + std::to_string(l + 1) : header[l];
        if (label.rfind("g1_", 0) == 0) label = label.substr(3);
        labels.push_back(label);
    }
    return {build_masked_sample(values, observed), std::move(labels)};
}

Dataset parse_dataset(const std::filesystem::path& path, const ParseOptions& options) {
    return parse_dataset_text(read_file(path), options);
}

std::string format_dataset(const MaskedSample& sample, const std::vector<std::string>& labels,
                           const std::string& na_token) {
    const std::size_t d = sample.dims();
    std::string out;
    for (std::size_t g = 0; g < kGroups; ++g) {
        for (std::size_t l = 0; l < d; ++l) {
            if (g + l > 0) out += ',';
            out += (g == 0 ? "g1_" : "g2_") + (l < labels.size() ? labels[l] : "var" + std::to_string(l + 1));
        }
    }
    out += '\n';
    for (std::size_t k = 0; k < sample.subjects(); ++k) {
        for (std::size_t g = 0; g < kGroups; ++g) {
            for (std::size_t l = 0; l < d; ++l) {
                if (g + l > 0) out += ',';
                out += sample.observed(g, l, k) ? format_double(sample.value(g, l, k)) : na_token;
            }
        }
        out += '\n';
    }
    return out;
}

void write_dataset(const std::filesystem::path& path, const MaskedSample& sample,
                   const std::vector<std::string>& labels, const std::string& na_token) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path.string() + "'");
    out << format_dataset(sample, labels, na_token);
}

ScenarioFile parse_scenarios_text(std::string_view text) {
    ScenarioFile file;
    enum class Section { None, Grid, Scenario } section = Section::None;
    std::vector<std::size_t> starts;
    for (const Line& line : lines_of(text)) {
        std::string_view s = trim(line.text);
        if (s.empty() || s.front() == '#') continue;
        if (s.front() == '[') {
            if (s == "[scenario]") {
                section = Section::Scenario;
                file.scenarios.emplace_back();
                starts.push_back(line.number);
            } else if (s == "[grid]") {
                section = Section::Grid;
            } else {
                throw config_error(line.number, "", "unknown section " + std::string(s));
            }
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string_view::npos) throw config_error(line.number, "", "expected 'key = value'");
        const std::string key(trim(s.substr(0, eq)));
        const std::string_view value = trim(s.substr(eq + 1));
        if (section == Section::None) throw config_error(line.number, key, "key outside of a section");
        if (section == Section::Grid) {
            if (key != "seed") throw config_error(line.number, key, "unknown key in [grid]");
            file.seed = parse_count(value, line.number, key);
            continue;
        }
        Scenario& sc = file.scenarios.back();
        if (key == "label") {
            sc.label = std::string(value);
        } else if (key == "distribution") {
            try {
                sc.distribution = parse_distribution(value);
            } catch (const Error& e) {
                throw config_error(line.number, key, e.what());
            }
        } else if (key == "d") {
            sc.d = parse_count(value, line.number, key);
        } else if (key == "rho") {
            const auto v = parse_list(value, line.number, key);
            if (v.size() != 3) throw config_error(line.number, key, "expected three values rho1, rho2, rho12");
            sc.rho1 = v[0];
            sc.rho2 = v[1];
            sc.rho12 = v[2];
        } else if (key == "sigma2") {
            const auto v = parse_list(value, line.number, key);
            if (v.size() != 2) throw config_error(line.number, key, "expected two variances");
            sc.sigma1_sq = v[0];
            sc.sigma2_sq = v[1];
        } else if (key == "shift") {
            sc.shift = parse_list(value, line.number, key);
        } else if (key == "sizes") {
            sc.sizes = parse_sizes(value, line.number);
        } else if (key == "reps") {
            sc.reps = parse_count(value, line.number, key);
        } else if (key == "alpha") {
            const auto v = parse_number(value);
            if (!v) throw config_error(line.number, key, "'" + std::string(value) + "' is not a number");
            sc.alpha = *v;
        } else if (key == "methods") {
            sc.methods.clear();
            for (auto m : split(value, ',')) {
                try {
                    sc.methods.push_back(parse_method(m));
                } catch (const Error& e) {
                    throw config_error(line.number, key, e.what());
                }
            }
        } else {
            throw config_error(line.number, key, "unknown key");
        }
    }
    if (file.scenarios.empty()) throw config_error(1, "", "no [scenario] section");
    for (std::size_t i = 0; i < file.scenarios.size(); ++i) {
        Scenario& sc = file.scenarios[i];
        if (sc.label.empty()) sc.label = "scenario " + std::to_string(i + 1);
        try {
            validate(sc);
        } catch (const Error& e) {
            throw config_error(starts[i], "", "[scenario] '" + sc.label + "': " + e.what());
        }
    }
    return file;
}

ScenarioFile parse_scenarios(const std::filesystem::path& path) { return parse_scenarios_text(read_file(path)); }

std::string describe(const Scenario& s) {
    std::string out = s.label + "|" + std::string(to_string(s.distribution)) + "|d=" + std::to_string(s.d) +
                      "|rho=" + format_double(s.rho1) + "," + format_double(s.rho2) + "," + format_double(s.rho12) +
                      "|sigma2=" + format_double(s.sigma1_sq) + "," + format_double(s.sigma2_sq) + "|shift=";
    for (std::size_t i = 0; i < s.shift.size(); ++i) out += (i ? "," : "") + format_double(s.shift[i]);
    out += "|sizes=";
    std::visit(
        [&](const auto& plan) {
            using T = std::decay_t<decltype(plan)>;
            if constexpr (std::is_same_v<T, SimpleSizes>) {
                out += "simple " + std::to_string(plan.n_complete) + " " + std::to_string(plan.n1) + " " +
                       std::to_string(plan.n2);
            } else if constexpr (std::is_same_v<T, Design1>) {
                out += "design1 " + std::to_string(plan.n);
            } else if constexpr (std::is_same_v<T, Design2>) {
                out += "design2 " + std::to_string(plan.n) + " " + format_double(plan.a);
            } else {
                out += "design3 " + std::to_string(plan.n_complete) + " " + std::to_string(plan.n_other);
            }
        },
        s.sizes);
    out += "|reps=" + std::to_string(s.reps) + "|alpha=" + format_double(s.alpha) + "|methods=";
    for (std::size_t i = 0; i < s.methods.size(); ++i) out += (i ? "," : "") + std::string(to_string(s.methods[i]));
    return out;
}

}  // namespace rankeff
