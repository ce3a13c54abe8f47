#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rankeff/error.hpp"

namespace rankeff {

/// Group indices used throughout the library: 0 is the first treatment,
/// 1 is the second. Reports and file formats use the 1-based labels.
inline constexpr std::size_t kGroups = 2;

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Two-group multivariate observation matrix with per-cell observedness.
///
/// Rows 0..d-1 hold the first group's components, rows d..2d-1 the second
/// group's. Columns are subjects. Masked cells hold a quiet NaN so that any
/// accidental read propagates instead of silently contributing a number.
class MaskedSample {
public:
    std::size_t dims() const noexcept { return dims_; }
    std::size_t subjects() const noexcept { return static_cast<std::size_t>(values_.cols()); }

    static std::size_t row(std::size_t group, std::size_t component, std::size_t dims) noexcept {
        return group * dims + component;
    }
    std::size_t row(std::size_t group, std::size_t component) const noexcept {
        return row(group, component, dims_);
    }

    bool observed(std::size_t group, std::size_t component, std::size_t subject) const {
        return mask_(row(group, component), subject);
    }

    double value(std::size_t group, std::size_t component, std::size_t subject) const;

    const Eigen::MatrixXd& values() const noexcept { return values_; }
    const BoolMatrix& mask() const noexcept { return mask_; }

    /// Number of observed cells in a column.
    std::size_t observed_cells(std::size_t subject) const;

    /// Builds a new sample keeping only the given mask (which must be a
    /// sub-mask of this one) and dropping columns left without data.
    /// Throws EverythingFiltered if fewer than two subjects remain.
    MaskedSample restricted(const BoolMatrix& keep) const;

    /// Copy of the sample with the two groups exchanged.
    MaskedSample swapped_groups() const;

    friend MaskedSample build_masked_sample(const Eigen::MatrixXd& values, const BoolMatrix& observed);

private:
    MaskedSample(std::size_t dims, Eigen::MatrixXd values, BoolMatrix mask)
        : dims_(dims), values_(std::move(values)), mask_(std::move(mask)) {}

    std::size_t dims_ = 0;
    Eigen::MatrixXd values_;
    BoolMatrix mask_;
};

/// Validates and wraps a 2d x n matrix. Errors: DimensionMismatch,
/// EmptySubject, NonFiniteObservedValue.
MaskedSample build_masked_sample(const Eigen::MatrixXd& values, const BoolMatrix& observed);

/// Convenience overload treating NaN cells as missing.
MaskedSample build_masked_sample(const Eigen::MatrixXd& values_with_nan);

/// Per-component index sets: complete cases and the two kinds of
/// incomplete cases.
struct ComponentPattern {
    std::vector<std::size_t> complete;                  // observed in both groups
    std::array<std::vector<std::size_t>, kGroups> only; // observed in one group only

    std::size_t n_complete() const noexcept { return complete.size(); }
    std::size_t n_only(std::size_t group) const noexcept { return only[group].size(); }
    /// Observations of the group on this component: complete plus incomplete.
    std::size_t m(std::size_t group) const noexcept { return complete.size() + only[group].size(); }
    /// Observations pooled over both groups.
    std::size_t total() const noexcept { return m(0) + m(1); }
    /// Relative sample size n_c / m_g, 1 when the group has no incomplete
    /// cases, 0 when it has no complete ones.
    double theta(std::size_t group) const noexcept;
};

struct PatternIndex {
    std::size_t subjects = 0;
    std::vector<ComponentPattern> components;
    bool is_simple_pattern = false;

    std::size_t dims() const noexcept { return components.size(); }
};

PatternIndex derive_pattern_index(const MaskedSample& sample);

enum class WarningKind {
    BelowFloor,          // m_g below the configured floor
    DegenerateVariance,  // a covariance part has a single case (count - 1 = 0)
};

struct AssumptionWarning {
    WarningKind kind;
    int group;             // 1, 2, or 0 for the complete-case part
    std::size_t component; // 0-based
    std::size_t count;
    std::string message;
};

inline constexpr std::size_t kDefaultSizeFloor = 5;

/// Advisory checks of the sample-size conditions. Never throws.
std::vector<AssumptionWarning> check_assumptions(const PatternIndex& idx,
                                                 std::size_t floor = kDefaultSizeFloor);

/// Null hypothesis p = 1/2 for every component at a significance level.
class Hypothesis {
public:
    explicit Hypothesis(double alpha = 0.05);
    double alpha() const noexcept { return alpha_; }
    static Eigen::VectorXd null_effects(std::size_t dims) {
        return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dims), 0.5);
    }

private:
    double alpha_;
};

}  // namespace rankeff
