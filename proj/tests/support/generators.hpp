#pragma once

// Random instances for property tests.

#include <random>

#include <Eigen/Dense>

#include "rankeff/core_model.hpp"

namespace rankeff::gen {

using Rng = std::mt19937_64;

/// Integer values in [0, levels) give heavy ties; levels == 0 gives
/// continuous normal values.
inline double draw_value(Rng& rng, int levels) {
    if (levels <= 0) return std::normal_distribution<double>(0.0, 1.0)(rng);
    return static_cast<double>(std::uniform_int_distribution<int>(0, levels - 1)(rng));
}

inline bool estimable(const BoolMatrix& mask, std::size_t d) {
    for (Eigen::Index k = 0; k < mask.cols(); ++k) {
        if (!mask.col(k).any()) return false;
    }
    for (std::size_t r = 0; r < 2 * d; ++r) {
        if (!mask.row(static_cast<Eigen::Index>(r)).any()) return false;
    }
    return true;
}

/// Every cell observed with probability p_observed. A subject's mask is
/// redrawn until it has data, the whole sample until every (group,
/// component) has an observation.
inline MaskedSample general_sample(Rng& rng, std::size_t d, std::size_t n, int levels, double p_observed = 0.7) {
    std::bernoulli_distribution keep(p_observed);
    const auto rows = static_cast<Eigen::Index>(2 * d);
    const auto cols = static_cast<Eigen::Index>(n);
    while (true) {
        Eigen::MatrixXd v(rows, cols);
        BoolMatrix m(rows, cols);
        for (Eigen::Index k = 0; k < cols; ++k) {
            for (Eigen::Index r = 0; r < rows; ++r) v(r, k) = draw_value(rng, levels);
            do {
                for (Eigen::Index r = 0; r < rows; ++r) m(r, k) = keep(rng);
            } while (!m.col(k).any());
        }
        if (estimable(m, d)) return build_masked_sample(v, m);
    }
}

/// Treatment-level pattern: n_c complete, n1 group-1 only, n2 group-2 only.
inline MaskedSample simple_sample(Rng& rng, std::size_t d, std::size_t nc, std::size_t n1, std::size_t n2,
                                  int levels) {
    const auto rows = static_cast<Eigen::Index>(2 * d);
    const auto cols = static_cast<Eigen::Index>(nc + n1 + n2);
    const auto dd = static_cast<Eigen::Index>(d);
    Eigen::MatrixXd v(rows, cols);
    BoolMatrix m = BoolMatrix::Constant(rows, cols, false);
    for (Eigen::Index k = 0; k < cols; ++k) {
        for (Eigen::Index r = 0; r < rows; ++r) v(r, k) = draw_value(rng, levels);
        const auto ku = static_cast<std::size_t>(k);
        if (ku < nc) {
            m.col(k).setConstant(true);
        } else if (ku < nc + n1) {
            m.col(k).head(dd).setConstant(true);
        } else {
            m.col(k).tail(dd).setConstant(true);
        }
    }
    return build_masked_sample(v, m);
}

}  // namespace rankeff::gen
