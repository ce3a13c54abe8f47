#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "generators.hpp"
#include "rankeff/core_model.hpp"

using namespace rankeff;

namespace {

const double NA = std::numeric_limits<double>::quiet_NaN();

MaskedSample from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index r = 0;
    for (const auto& row : rows) {
        Eigen::Index c = 0;
        for (double v : row) m(r, c++) = v;
        ++r;
    }
    return build_masked_sample(m);
}

std::set<std::size_t> as_set(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST(BuildMaskedSample, FullyObservedSmallCase) {
    const MaskedSample s = from_rows({{1, 3}, {2, 4}});
    EXPECT_EQ(s.dims(), 1u);
    EXPECT_EQ(s.subjects(), 2u);
    EXPECT_DOUBLE_EQ(s.value(1, 0, 1), 4.0);
    EXPECT_TRUE(derive_pattern_index(s).is_simple_pattern);
}

TEST(BuildMaskedSample, RejectsEmptyColumn) {
    Eigen::MatrixXd v(2, 3);
    v << 1, 2, 3, 4, 5, 6;
    BoolMatrix m = BoolMatrix::Constant(2, 3, true);
    m(0, 1) = m(1, 1) = false;
    try {
        build_masked_sample(v, m);
        FAIL() << "expected EmptySubject";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptySubject);
        EXPECT_EQ(e.context().column, 2u);
    }
}

TEST(BuildMaskedSample, RejectsNonFiniteObservedValue) {
    Eigen::MatrixXd v(2, 2);
    v << 1, std::numeric_limits<double>::infinity(), 3, 4;
    const BoolMatrix m = BoolMatrix::Constant(2, 2, true);
    try {
        build_masked_sample(v, m);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonFiniteObservedValue);
    }
}

TEST(BuildMaskedSample, NonFiniteValueUnderMaskIsIgnored) {
    Eigen::MatrixXd v(2, 2);
    v << 1, std::numeric_limits<double>::infinity(), 3, 4;
    BoolMatrix m = BoolMatrix::Constant(2, 2, true);
    m(0, 1) = false;
    const MaskedSample s = build_masked_sample(v, m);
    EXPECT_TRUE(std::isnan(s.values()(0, 1)));
}

TEST(BuildMaskedSample, ShapeErrors) {
    EXPECT_THROW(build_masked_sample(Eigen::MatrixXd::Zero(3, 4), BoolMatrix::Constant(3, 4, true)), Error);
    EXPECT_THROW(build_masked_sample(Eigen::MatrixXd::Zero(2, 1), BoolMatrix::Constant(2, 1, true)), Error);
    EXPECT_THROW(build_masked_sample(Eigen::MatrixXd::Zero(2, 3), BoolMatrix::Constant(2, 2, true)), Error);
}

TEST(PatternIndex, TreatmentLevelLayout) {
    // subject 1 everywhere, subject 2 group 1 only, subject 3 group 2 only
    const MaskedSample s = from_rows({{1, 2, NA}, {1, 2, NA}, {3, NA, 4}, {3, NA, 4}});
    const PatternIndex idx = derive_pattern_index(s);
    ASSERT_EQ(idx.dims(), 2u);
    for (const auto& c : idx.components) {
        EXPECT_EQ(c.complete, std::vector<std::size_t>{0});
        EXPECT_EQ(c.only[0], std::vector<std::size_t>{1});
        EXPECT_EQ(c.only[1], std::vector<std::size_t>{2});
    }
    EXPECT_TRUE(idx.is_simple_pattern);
}

TEST(PatternIndex, CrossedObservation) {
    // subject observed on (group 1, var 1) and (group 2, var 2) only
    const MaskedSample s = from_rows({{5, 1}, {NA, 1}, {NA, 1}, {6, 1}});
    const PatternIndex idx = derive_pattern_index(s);
    EXPECT_EQ(as_set(idx.components[0].only[0]), (std::set<std::size_t>{0}));
    EXPECT_EQ(as_set(idx.components[1].only[1]), (std::set<std::size_t>{0}));
    EXPECT_TRUE(idx.components[0].only[1].empty());
    EXPECT_TRUE(idx.components[1].only[0].empty());
    EXPECT_EQ(idx.components[0].complete, std::vector<std::size_t>{1});
    EXPECT_FALSE(idx.is_simple_pattern);
}

TEST(PatternIndex, FullyObserved) {
    gen::Rng rng(3);
    const MaskedSample s = gen::simple_sample(rng, 3, 7, 0, 0, 4);
    const PatternIndex idx = derive_pattern_index(s);
    for (const auto& c : idx.components) {
        EXPECT_EQ(c.n_complete(), 7u);
        EXPECT_EQ(c.n_only(0), 0u);
        EXPECT_EQ(c.n_only(1), 0u);
        EXPECT_DOUBLE_EQ(c.theta(0), 1.0);
    }
}

TEST(PatternIndex, SetsPartitionObservedSubjects) {
    gen::Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 1 + trial % 4;
        const MaskedSample s = gen::general_sample(rng, d, 3 + trial % 25, 3, 0.5);
        const PatternIndex idx = derive_pattern_index(s);
        for (std::size_t l = 0; l < d; ++l) {
            const auto& c = idx.components[l];
            std::set<std::size_t> all;
            for (const auto* v : {&c.complete, &c.only[0], &c.only[1]}) {
                for (std::size_t k : *v) EXPECT_TRUE(all.insert(k).second) << "sets overlap";
            }
            std::set<std::size_t> expected;
            for (std::size_t k = 0; k < s.subjects(); ++k) {
                if (s.observed(0, l, k) || s.observed(1, l, k)) expected.insert(k);
            }
            EXPECT_EQ(all, expected);
            EXPECT_LE(c.n_complete() + c.n_only(0) + c.n_only(1), s.subjects());
            EXPECT_EQ(c.m(0), c.n_complete() + c.n_only(0));
        }
    }
}

TEST(PatternIndex, ColumnPermutationRelabelsSets) {
    gen::Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const MaskedSample s = gen::general_sample(rng, 2, 12, 4, 0.6);
        std::vector<std::size_t> perm(s.subjects());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        Eigen::MatrixXd v(s.values().rows(), s.values().cols());
        BoolMatrix m(v.rows(), v.cols());
        for (std::size_t j = 0; j < perm.size(); ++j) {
            v.col(static_cast<Eigen::Index>(j)) = s.values().col(static_cast<Eigen::Index>(perm[j]));
            m.col(static_cast<Eigen::Index>(j)) = s.mask().col(static_cast<Eigen::Index>(perm[j]));
        }
        const PatternIndex a = derive_pattern_index(s);
        const PatternIndex b = derive_pattern_index(build_masked_sample(v, m));
        for (std::size_t l = 0; l < 2; ++l) {
            std::set<std::size_t> mapped;
            for (std::size_t k : b.components[l].complete) mapped.insert(perm[k]);
            EXPECT_EQ(mapped, as_set(a.components[l].complete));
            mapped.clear();
            for (std::size_t k : b.components[l].only[0]) mapped.insert(perm[k]);
            EXPECT_EQ(mapped, as_set(a.components[l].only[0]));
        }
        EXPECT_EQ(a.is_simple_pattern, b.is_simple_pattern);
    }
}

TEST(PatternIndex, SimpleFlagMatchesBruteForceScan) {
    gen::Rng rng(21);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t d = 1 + trial % 3;
        // dense masks make identical per-component sets reasonably common
        const MaskedSample s = gen::general_sample(rng, d, 2 + trial % 5, 3, 0.85);
        bool same = true;
        for (std::size_t k = 0; k < s.subjects(); ++k) {
            // the category of subject k on every component must match component 0
            for (std::size_t l = 1; l < d; ++l) {
                if (s.observed(0, 0, k) != s.observed(0, l, k) || s.observed(1, 0, k) != s.observed(1, l, k)) {
                    same = false;
                }
            }
        }
        EXPECT_EQ(derive_pattern_index(s).is_simple_pattern, same);
    }
}

TEST(CheckAssumptions, SingleIncompleteCaseWarns) {
    gen::Rng rng(1);
    const MaskedSample s = gen::simple_sample(rng, 3, 33, 8, 1, 5);
    const auto warnings = check_assumptions(derive_pattern_index(s));
    ASSERT_EQ(warnings.size(), 3u);
    for (const auto& w : warnings) {
        EXPECT_EQ(w.kind, WarningKind::DegenerateVariance);
        EXPECT_EQ(w.group, 2);
        EXPECT_EQ(w.count, 1u);
    }
}

TEST(CheckAssumptions, LargeGroupsAreQuiet) {
    gen::Rng rng(2);
    const MaskedSample s = gen::simple_sample(rng, 2, 10, 5, 5, 5);
    EXPECT_TRUE(check_assumptions(derive_pattern_index(s)).empty());
}

TEST(CheckAssumptions, FloorWarningNamesGroupAndComponent) {
    gen::Rng rng(4);
    const MaskedSample s = gen::simple_sample(rng, 1, 3, 6, 0, 5);
    const auto warnings = check_assumptions(derive_pattern_index(s));
    ASSERT_EQ(warnings.size(), 1u);
    EXPECT_EQ(warnings[0].kind, WarningKind::BelowFloor);
    EXPECT_EQ(warnings[0].group, 2);
    EXPECT_EQ(warnings[0].component, 0u);
    EXPECT_EQ(warnings[0].count, 3u);
}

TEST(HypothesisTest, AlphaRange) {
    EXPECT_NO_THROW(Hypothesis(0.05));
    EXPECT_THROW(Hypothesis(0.0), Error);
    EXPECT_THROW(Hypothesis(1.0), Error);
    EXPECT_EQ(Hypothesis::null_effects(3), Eigen::VectorXd::Constant(3, 0.5));
}

TEST(MaskedSample, RestrictedDropsEmptyColumns) {
    const MaskedSample s = from_rows({{1, 2, NA}, {3, NA, 4}});
    BoolMatrix keep = s.mask();
    keep(0, 1) = false;
    const MaskedSample r = s.restricted(keep);
    EXPECT_EQ(r.subjects(), 2u);
    keep(1, 2) = false;
    EXPECT_THROW(s.restricted(keep), Error);
}
