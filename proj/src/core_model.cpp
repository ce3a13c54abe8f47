#include "rankeff/core_model.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace rankeff {

namespace {

constexpr double kMaskedSentinel = std::numeric_limits<double>::quiet_NaN();

std::string group_label(std::size_t group) { return group == 0 ? "1" : "2"; }

}  // namespace

double MaskedSample::value(std::size_t group, std::size_t component, std::size_t subject) const {
    assert(observed(group, component, subject) && "read of a masked cell");
    return values_(static_cast<Eigen::Index>(row(group, component)), static_cast<Eigen::Index>(subject));
}

std::size_t MaskedSample::observed_cells(std::size_t subject) const {
    return static_cast<std::size_t>(mask_.col(static_cast<Eigen::Index>(subject)).count());
}

MaskedSample MaskedSample::restricted(const BoolMatrix& keep) const {
    if (keep.rows() != mask_.rows() || keep.cols() != mask_.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "restriction mask has the wrong shape");
    }
    const BoolMatrix combined = keep && mask_;
    std::vector<Eigen::Index> columns;
    for (Eigen::Index k = 0; k < combined.cols(); ++k) {
        if (combined.col(k).any()) columns.push_back(k);
    }
    if (columns.size() < 2) {
        throw Error(ErrorKind::EverythingFiltered, "fewer than two subjects remain after restriction");
    }
    Eigen::MatrixXd values(values_.rows(), static_cast<Eigen::Index>(columns.size()));
    BoolMatrix mask(mask_.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        const auto col = static_cast<Eigen::Index>(j);
        mask.col(col) = combined.col(columns[j]);
        for (Eigen::Index r = 0; r < values.rows(); ++r) {
            values(r, col) = mask(r, col) ? values_(r, columns[j]) : kMaskedSentinel;
        }
    }
    return MaskedSample(dims_, std::move(values), std::move(mask));
}

MaskedSample MaskedSample::swapped_groups() const {
    const auto d = static_cast<Eigen::Index>(dims_);
    Eigen::MatrixXd values(values_.rows(), values_.cols());
    BoolMatrix mask(mask_.rows(), mask_.cols());
    values.topRows(d) = values_.bottomRows(d);
    values.bottomRows(d) = values_.topRows(d);
    mask.topRows(d) = mask_.bottomRows(d);
    mask.bottomRows(d) = mask_.topRows(d);
    return MaskedSample(dims_, std::move(values), std::move(mask));
}

MaskedSample build_masked_sample(const Eigen::MatrixXd& values, const BoolMatrix& observed) {
    if (values.rows() != observed.rows() || values.cols() != observed.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "values and mask differ in shape");
    }
    if (values.rows() < 2 || values.rows() % 2 != 0) {
        throw Error(ErrorKind::DimensionMismatch,
                    "row count must be 2d with d >= 1, got " + std::to_string(values.rows()));
    }
    if (values.cols() < 2) {
        throw Error(ErrorKind::DimensionMismatch, "at least two subjects are required");
    }
    const auto dims = static_cast<std::size_t>(values.rows() / 2);

    Eigen::MatrixXd stored(values.rows(), values.cols());
    for (Eigen::Index k = 0; k < values.cols(); ++k) {
        if (!observed.col(k).any()) {
            ErrorContext ctx;
            ctx.column = static_cast<std::size_t>(k) + 1;
            throw Error(ErrorKind::EmptySubject, "subject " + std::to_string(k) + " has no observed cell", ctx);
        }
        for (Eigen::Index r = 0; r < values.rows(); ++r) {
            if (!observed(r, k)) {
                stored(r, k) = kMaskedSentinel;
                continue;
            }
            if (!std::isfinite(values(r, k))) {
                ErrorContext ctx;
                ctx.column = static_cast<std::size_t>(k) + 1;
                ctx.group = r < static_cast<Eigen::Index>(dims) ? 1 : 2;
                ctx.component = static_cast<int>(static_cast<std::size_t>(r) % dims);
                throw Error(ErrorKind::NonFiniteObservedValue,
                            "non-finite observed value at row " + std::to_string(r) + ", subject " +
                                std::to_string(k),
                            ctx);
            }
            stored(r, k) = values(r, k);
        }
    }
    return MaskedSample(dims, std::move(stored), observed);
}

MaskedSample build_masked_sample(const Eigen::MatrixXd& values_with_nan) {
    const BoolMatrix observed = values_with_nan.array().isNaN() == false;
    return build_masked_sample(values_with_nan, observed);
}

double ComponentPattern::theta(std::size_t group) const noexcept {
    const std::size_t mg = m(group);
    if (mg == 0) return 0.0;
    return static_cast<double>(complete.size()) / static_cast<double>(mg);
}

PatternIndex derive_pattern_index(const MaskedSample& sample) {
    PatternIndex idx;
    idx.subjects = sample.subjects();
    idx.components.resize(sample.dims());
    for (std::size_t l = 0; l < sample.dims(); ++l) {
        auto& comp = idx.components[l];
        for (std::size_t k = 0; k < sample.subjects(); ++k) {
            const bool first = sample.observed(0, l, k);
            const bool second = sample.observed(1, l, k);
            if (first && second) {
                comp.complete.push_back(k);
            } else if (first) {
                comp.only[0].push_back(k);
            } else if (second) {
                comp.only[1].push_back(k);
            }
        }
    }
    idx.is_simple_pattern = true;
    for (std::size_t l = 1; l < idx.components.size(); ++l) {
        const auto& a = idx.components[0];
        const auto& b = idx.components[l];
        if (a.complete != b.complete || a.only[0] != b.only[0] || a.only[1] != b.only[1]) {
            idx.is_simple_pattern = false;
            break;
        }
    }
    return idx;
}

std::vector<AssumptionWarning> check_assumptions(const PatternIndex& idx, std::size_t floor) {
    std::vector<AssumptionWarning> warnings;
    for (std::size_t l = 0; l < idx.components.size(); ++l) {
        const auto& comp = idx.components[l];
        const std::string where = "component " + std::to_string(l + 1);
        for (std::size_t g = 0; g < kGroups; ++g) {
            if (comp.m(g) < floor) {
                warnings.push_back({WarningKind::BelowFloor, static_cast<int>(g + 1), l, comp.m(g),
                                    "group " + group_label(g) + ", " + where + ": m = " +
                                        std::to_string(comp.m(g)) + " is below the floor of " +
                                        std::to_string(floor)});
            }
        }
        if (comp.n_complete() == 1) {
            warnings.push_back({WarningKind::DegenerateVariance, 0, l, 1,
                                where + ": a single complete case, complete-case covariance part is zero"});
        }
        for (std::size_t g = 0; g < kGroups; ++g) {
            if (comp.n_only(g) == 1) {
                warnings.push_back({WarningKind::DegenerateVariance, static_cast<int>(g + 1), l, 1,
                                    "group " + group_label(g) + ", " + where +
                                        ": a single incomplete case, its covariance part is zero"});
            }
        }
    }
    return warnings;
}

Hypothesis::Hypothesis(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
    }
}

}  // namespace rankeff
