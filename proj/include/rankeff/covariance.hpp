#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rankeff/core_model.hpp"
#include "rankeff/ranking.hpp"

namespace rankeff {

/// A covariance part that had a single case and was set to zero.
struct DegenerateTerm {
    std::string term;    // "Vc", "V1", "V2" or "C1".."C9"
    int l = -1;          // component pair, -1 for the simple-pattern parts
    int r = -1;
    std::size_t count = 0;
};

struct CovariancePart {
    std::string name;
    Eigen::MatrixXd matrix;
};

struct CovarianceEstimate {
    Eigen::MatrixXd V;
    double trace = 0.0;
    double trace_sq = 0.0;
    double nu_hat = 0.0;  // NaN when V = 0
    bool general = false;
    std::vector<CovariancePart> parts;
    std::vector<DegenerateTerm> flags;
};

/// Fills trace, trace_sq and nu_hat from V.
void update_trace_diagnostics(CovarianceEstimate& est);

/// Three-part rank estimator V = Vc + V1 + V2 built from B = R_overall -
/// R_internal. Throws PatternMismatch on a general pattern and
/// NoEstimablePart when no part has two or more cases.
CovarianceEstimate covariance_simple(const MaskedSample& sample, const PatternIndex& idx, const RankTable& ranks);

/// Nine-term estimator over the intersection sets of the per-component
/// complete/incomplete index sets, using placements. Not forced to be PSD.
CovarianceEstimate covariance_general(const MaskedSample& sample, const PatternIndex& idx, const RankTable& ranks);

}  // namespace rankeff
