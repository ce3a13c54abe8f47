#include "rankeff/effects.hpp"

namespace rankeff {

namespace {

void require_estimable(const PatternIndex& idx) {
    for (std::size_t l = 0; l < idx.dims(); ++l) {
        for (std::size_t g = 0; g < kGroups; ++g) {
            if (idx.components[l].m(g) == 0) {
                ErrorContext ctx;
                ctx.component = static_cast<int>(l);
                ctx.group = static_cast<int>(g + 1);
                throw Error(ErrorKind::InestimableComponent,
                            "group " + std::to_string(g + 1) + " has no observations on component " +
                                std::to_string(l + 1),
                            ctx);
            }
        }
    }
}

EffectEstimate make_shell(const PatternIndex& idx, Method method) {
    const auto d = static_cast<Eigen::Index>(idx.dims());
    EffectEstimate est;
    est.p_hat.resize(d);
    est.theta.resize(2, d);
    est.method = method;
    for (std::size_t l = 0; l < idx.dims(); ++l) {
        const auto& comp = idx.components[l];
        est.theta(0, static_cast<Eigen::Index>(l)) = comp.theta(0);
        est.theta(1, static_cast<Eigen::Index>(l)) = comp.theta(1);
        est.counts.push_back({comp.n_complete(), comp.n_only(0), comp.n_only(1)});
    }
    return est;
}

double mean_over(const Eigen::MatrixXd& m, Eigen::Index row, const std::vector<std::size_t>& cols) {
    if (cols.empty()) return 0.0;
    long double s = 0.0L;
    for (std::size_t k : cols) s += m(row, static_cast<Eigen::Index>(k));
    return static_cast<double>(s / static_cast<long double>(cols.size()));
}

double count_fn(double x) { return x < 0.0 ? 0.0 : (x > 0.0 ? 1.0 : 0.5); }

// sum over a in first (group 1 values) and b in second (group 2) of c(b - a)
long double pair_count(const MaskedSample& s, std::size_t l, const std::vector<std::size_t>& first,
                       const std::vector<std::size_t>& second) {
    long double total = 0.0L;
    for (std::size_t i : first) {
        const double x1 = s.value(0, l, i);
        for (std::size_t j : second) total += count_fn(s.value(1, l, j) - x1);
    }
    return total;
}

}  // namespace

std::string_view to_string(Method method) noexcept {
    switch (method) {
    case Method::All: return "all";
    case Method::CompleteOnly: return "complete";
    case Method::IncompleteOnly: return "incomplete";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    if (name == "all") return Method::All;
    if (name == "complete") return Method::CompleteOnly;
    if (name == "incomplete") return Method::IncompleteOnly;
    throw Error(ErrorKind::InvalidArgument,
                "unknown method '" + std::string(name) + "' (expected all, complete or incomplete)");
}

EffectEstimate estimate_effects(const MaskedSample& sample, const PatternIndex& idx, const RankTable& ranks) {
    require_estimable(idx);
    EffectEstimate est = make_shell(idx, Method::All);
    for (std::size_t l = 0; l < idx.dims(); ++l) {
        const auto& comp = idx.components[l];
        const auto r1 = static_cast<Eigen::Index>(sample.row(0, l));
        const auto r2 = static_cast<Eigen::Index>(sample.row(1, l));
        const double th1 = comp.theta(0);
        const double th2 = comp.theta(1);
        const double r1c = mean_over(ranks.overall, r1, comp.complete);
        const double r2c = mean_over(ranks.overall, r2, comp.complete);
        const double r1i = mean_over(ranks.overall, r1, comp.only[0]);
        const double r2i = mean_over(ranks.overall, r2, comp.only[1]);
        const double total = static_cast<double>(comp.total());
        est.p_hat(static_cast<Eigen::Index>(l)) =
            (th2 * r2c - th1 * r1c + (1.0 - th2) * r2i - (1.0 - th1) * r1i) / total + 0.5;
    }
    return est;
}

EffectEstimate estimate_effects_integral(const MaskedSample& sample, const PatternIndex& idx) {
    require_estimable(idx);
    EffectEstimate est = make_shell(idx, Method::All);
    for (std::size_t l = 0; l < idx.dims(); ++l) {
        const auto& comp = idx.components[l];
        const auto& c = comp.complete;
        const auto& i1 = comp.only[0];
        const auto& i2 = comp.only[1];
        const long double blocks = pair_count(sample, l, c, c) + pair_count(sample, l, c, i2) +
                                   pair_count(sample, l, i1, c) + pair_count(sample, l, i1, i2);
        const long double denom =
            static_cast<long double>(comp.m(0)) * static_cast<long double>(comp.m(1));
        est.p_hat(static_cast<Eigen::Index>(l)) = static_cast<double>(blocks / denom);
    }
    return est;
}

Restriction restrict_method(const MaskedSample& sample, const PatternIndex& idx, Method method) {
    if (method == Method::All) return {sample, idx};
    const auto d = sample.dims();
    BoolMatrix keep = BoolMatrix::Constant(sample.mask().rows(), sample.mask().cols(), false);
    for (std::size_t l = 0; l < d; ++l) {
        const auto& comp = idx.components[l];
        const auto r1 = static_cast<Eigen::Index>(sample.row(0, l));
        const auto r2 = static_cast<Eigen::Index>(sample.row(1, l));
        if (method == Method::CompleteOnly) {
            for (std::size_t k : comp.complete) {
                keep(r1, static_cast<Eigen::Index>(k)) = true;
                keep(r2, static_cast<Eigen::Index>(k)) = true;
            }
        } else {
            for (std::size_t k : comp.only[0]) keep(r1, static_cast<Eigen::Index>(k)) = true;
            for (std::size_t k : comp.only[1]) keep(r2, static_cast<Eigen::Index>(k)) = true;
        }
    }
    MaskedSample restricted = sample.restricted(keep);
    PatternIndex ridx = derive_pattern_index(restricted);
    for (std::size_t l = 0; l < d; ++l) {
        for (std::size_t g = 0; g < kGroups; ++g) {
            if (ridx.components[l].m(g) == 0) {
                ErrorContext ctx;
                ctx.component = static_cast<int>(l);
                ctx.group = static_cast<int>(g + 1);
                throw Error(ErrorKind::EverythingFiltered,
                            std::string(to_string(method)) + " restriction leaves group " +
                                std::to_string(g + 1) + " without data on component " + std::to_string(l + 1),
                            ctx);
            }
        }
    }
    return {std::move(restricted), std::move(ridx)};
}

}  // namespace rankeff
