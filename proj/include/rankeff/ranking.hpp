#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rankeff/core_model.hpp"

namespace rankeff {

/// Midranks r_i = 1/2 + sum_j c(x_i - x_j). Ties get the average position.
/// Throws EmptyInput on an empty list.
std::vector<double> midranks(std::span<const double> values);

/// Overall and internal midranks per observed cell, laid out like the
/// sample (2d x n). Masked cells hold NaN.
struct RankTable {
    std::size_t dims = 0;
    Eigen::MatrixXd overall;   // rank among all N^(l) pooled values of component l
    Eigen::MatrixXd internal;  // rank among the m_g^(l) values of group g on l
};

/// Throws ComponentWithNoData when a component has no observed cell.
RankTable build_rank_table(const MaskedSample& sample, const PatternIndex& idx);

/// Empirical placements Y = (R_overall - R_internal) / m_s, s the other
/// group, in the same 2d x n layout. Throws ComponentWithNoData when a group
/// with observations on l faces an empty opposite group.
Eigen::MatrixXd placements(const RankTable& ranks, const PatternIndex& idx);

}  // namespace rankeff
