#include "rankeff/ranking.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace rankeff {

namespace {

constexpr double kNoRank = std::numeric_limits<double>::quiet_NaN();

// Rows of a component that carry data for group g, as (subject) lists.
std::vector<std::size_t> observed_subjects(const ComponentPattern& comp, std::size_t group) {
    std::vector<std::size_t> out = comp.complete;
    out.insert(out.end(), comp.only[group].begin(), comp.only[group].end());
    return out;
}

}  // namespace

std::vector<double> midranks(std::span<const double> values) {
    if (values.empty()) throw Error(ErrorKind::EmptyInput, "midranks of an empty list");
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        // positions i+1..j share the average rank
        const double avg = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t t = i; t < j; ++t) ranks[order[t]] = avg;
        i = j;
    }
    return ranks;
}

RankTable build_rank_table(const MaskedSample& sample, const PatternIndex& idx) {
    const std::size_t d = sample.dims();
    const auto rows = static_cast<Eigen::Index>(2 * d);
    const auto cols = static_cast<Eigen::Index>(sample.subjects());
    RankTable table{d, Eigen::MatrixXd::Constant(rows, cols, kNoRank),
                    Eigen::MatrixXd::Constant(rows, cols, kNoRank)};

    for (std::size_t l = 0; l < d; ++l) {
        const auto& comp = idx.components[l];
        if (comp.total() == 0) {
            ErrorContext ctx;
            ctx.component = static_cast<int>(l);
            throw Error(ErrorKind::ComponentWithNoData,
                        "component " + std::to_string(l + 1) + " has no observations", ctx);
        }
        std::array<std::vector<std::size_t>, kGroups> subjects{observed_subjects(comp, 0),
                                                               observed_subjects(comp, 1)};
        std::vector<double> pooled;
        pooled.reserve(comp.total());
        for (std::size_t g = 0; g < kGroups; ++g) {
            for (std::size_t k : subjects[g]) pooled.push_back(sample.value(g, l, k));
        }
        const std::vector<double> overall = midranks(pooled);
        std::size_t offset = 0;
        for (std::size_t g = 0; g < kGroups; ++g) {
            const auto r = static_cast<Eigen::Index>(sample.row(g, l));
            const std::size_t m = subjects[g].size();
            if (m == 0) continue;
            const std::vector<double> internal =
                midranks(std::span<const double>(pooled).subspan(offset, m));
            for (std::size_t t = 0; t < m; ++t) {
                const auto c = static_cast<Eigen::Index>(subjects[g][t]);
                table.overall(r, c) = overall[offset + t];
                table.internal(r, c) = internal[t];
            }
            offset += m;
        }
    }
    return table;
}

Eigen::MatrixXd placements(const RankTable& ranks, const PatternIndex& idx) {
    const std::size_t d = ranks.dims;
    Eigen::MatrixXd y = Eigen::MatrixXd::Constant(ranks.overall.rows(), ranks.overall.cols(), kNoRank);
    for (std::size_t l = 0; l < d; ++l) {
        const auto& comp = idx.components[l];
        for (std::size_t g = 0; g < kGroups; ++g) {
            if (comp.m(g) == 0) continue;
            const std::size_t other = 1 - g;
            const std::size_t ms = comp.m(other);
            if (ms == 0) {
                ErrorContext ctx;
                ctx.component = static_cast<int>(l);
                ctx.group = static_cast<int>(other + 1);
                throw Error(ErrorKind::ComponentWithNoData,
                            "group " + std::to_string(other + 1) + " has no observations on component " +
                                std::to_string(l + 1),
                            ctx);
            }
            const auto r = static_cast<Eigen::Index>(MaskedSample::row(g, l, d));
            for (std::size_t k : observed_subjects(comp, g)) {
                const auto c = static_cast<Eigen::Index>(k);
                y(r, c) = (ranks.overall(r, c) - ranks.internal(r, c)) / static_cast<double>(ms);
            }
        }
    }
    return y;
}

}  // namespace rankeff
