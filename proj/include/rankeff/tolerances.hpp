#pragma once

namespace rankeff {

/// Numerical tolerances shared by the estimators and tests.
struct Tolerances {
    /// Eigenvalues below this fraction of tr(V)/d count as zero in the
    /// pseudo-inverse.
    static constexpr double pinv_relative = 1e-10;
    /// |p - 1/2| below this counts as the null point when V vanishes.
    static constexpr double null_effect = 1e-14;
    /// Largest |entry| of V treated as an exact zero matrix.
    static constexpr double zero_matrix = 1e-300;
};

}  // namespace rankeff
