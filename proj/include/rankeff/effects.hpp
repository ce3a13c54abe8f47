#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rankeff/core_model.hpp"
#include "rankeff/ranking.hpp"

namespace rankeff {

enum class Method { All, CompleteOnly, IncompleteOnly };

std::string_view to_string(Method method) noexcept;
/// Accepts "all", "complete", "incomplete". Throws InvalidArgument.
Method parse_method(std::string_view name);

struct ComponentCounts {
    std::size_t n_complete = 0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
};

struct EffectEstimate {
    Eigen::VectorXd p_hat;
    Eigen::MatrixXd theta;  // 2 x d, row g holds theta_g^(l)
    std::vector<ComponentCounts> counts;
    Method method = Method::All;
};

/// Rank form: p^(l) = (mean group-2 overall rank - mean group-1 overall rank)
/// / N^(l) + 1/2, written with the complete/incomplete split and theta
/// weights. Throws InestimableComponent when a group has no data on l.
EffectEstimate estimate_effects(const MaskedSample& sample, const PatternIndex& idx, const RankTable& ranks);

/// Pairwise-count form over the four complete/incomplete blocks. O(n^2).
EffectEstimate estimate_effects_integral(const MaskedSample& sample, const PatternIndex& idx);

struct Restriction {
    MaskedSample sample;
    PatternIndex index;
};

/// CompleteOnly keeps complete-case cells, IncompleteOnly keeps
/// incomplete-case cells, per component. Subjects left without data are
/// dropped. Throws EverythingFiltered when some group has no data left on
/// some component.
Restriction restrict_method(const MaskedSample& sample, const PatternIndex& idx, Method method);

}  // namespace rankeff
