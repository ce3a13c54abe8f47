#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "generators.hpp"
#include "oracles.hpp"
#include "rankeff/effects.hpp"

using namespace rankeff;

namespace {

const double NA = std::numeric_limits<double>::quiet_NaN();

EffectEstimate rank_form(const MaskedSample& s) {
    const PatternIndex idx = derive_pattern_index(s);
    return estimate_effects(s, idx, build_rank_table(s, idx));
}

MaskedSample separated(bool upward) {
    Eigen::MatrixXd m(4, 5);
    m << 1, 2, 3, 4, NA,
         5, 6, NA, 7, 8,
         10, 11, 12, NA, 13,
         20, NA, 21, 22, 23;
    if (!upward) m.topRows(2).swap(m.bottomRows(2));
    return build_masked_sample(m);
}

}  // namespace

TEST(Effects, ParsesAndPrintsMethods) {
    EXPECT_EQ(parse_method("complete"), Method::CompleteOnly);
    EXPECT_EQ(to_string(Method::IncompleteOnly), "incomplete");
    EXPECT_THROW(parse_method("some"), Error);
}

TEST(Effects, CompletePairsExample) {
    Eigen::MatrixXd m(2, 2);
    m << 1, 3, 2, 4;
    const MaskedSample s = build_masked_sample(m);
    EXPECT_DOUBLE_EQ(rank_form(s).p_hat(0), 0.75);
    EXPECT_DOUBLE_EQ(estimate_effects_integral(s, derive_pattern_index(s)).p_hat(0), 0.75);
}

TEST(Effects, IdenticalGroupsGiveOneHalf) {
    Eigen::MatrixXd m(4, 4);
    m << 1, 2, 2, 9, 0, 0, 1, 1, 1, 2, 2, 9, 0, 0, 1, 1;
    const EffectEstimate e = rank_form(build_masked_sample(m));
    EXPECT_DOUBLE_EQ(e.p_hat(0), 0.5);
    EXPECT_DOUBLE_EQ(e.p_hat(1), 0.5);
}

TEST(Effects, SeparationLimits) {
    for (bool up : {true, false}) {
        const MaskedSample s = separated(up);
        const double want = up ? 1.0 : 0.0;
        const EffectEstimate a = rank_form(s);
        const EffectEstimate b = estimate_effects_integral(s, derive_pattern_index(s));
        for (Eigen::Index l = 0; l < 2; ++l) {
            EXPECT_EQ(a.p_hat(l), want);
            EXPECT_EQ(b.p_hat(l), want);
        }
    }
}

TEST(Effects, InestimableComponent) {
    Eigen::MatrixXd m(2, 2);
    m << 1, 2, NA, NA;
    BoolMatrix mask = BoolMatrix::Constant(2, 2, true);
    mask.row(1).setConstant(false);
    const MaskedSample s = build_masked_sample(m, mask);
    const PatternIndex idx = derive_pattern_index(s);
    EXPECT_THROW(estimate_effects_integral(s, idx), Error);
}

TEST(Effects, RankFormMatchesIntegralAndEdfForms) {
    gen::Rng rng(101);
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t d = 1 + trial % 3;
        const MaskedSample s = gen::general_sample(rng, d, 2 + trial % 30, trial % 4 == 0 ? 0 : 3, 0.65);
        const PatternIndex idx = derive_pattern_index(s);
        const EffectEstimate a = estimate_effects(s, idx, build_rank_table(s, idx));
        const EffectEstimate b = estimate_effects_integral(s, idx);
        const Eigen::VectorXd c = oracle::effects(s);
        for (std::size_t l = 0; l < d; ++l) {
            const auto li = static_cast<Eigen::Index>(l);
            EXPECT_NEAR(a.p_hat(li), b.p_hat(li), 1e-12);
            EXPECT_NEAR(a.p_hat(li), c(li), 1e-12);
            EXPECT_GE(a.p_hat(li), 0.0);
            EXPECT_LE(a.p_hat(li), 1.0);
            EXPECT_GE(a.theta(0, li), 0.0);
            EXPECT_LE(a.theta(1, li), 1.0);
        }
    }
}

TEST(Effects, AntisymmetricUnderGroupSwap) {
    gen::Rng rng(103);
    for (int trial = 0; trial < 200; ++trial) {
        const MaskedSample s = gen::general_sample(rng, 2, 3 + trial % 25, 4, 0.6);
        const EffectEstimate a = rank_form(s);
        const EffectEstimate b = rank_form(s.swapped_groups());
        for (Eigen::Index l = 0; l < 2; ++l) EXPECT_NEAR(a.p_hat(l), 1.0 - b.p_hat(l), 1e-14);
    }
}

TEST(Effects, MonotoneTransformInvariance) {
    gen::Rng rng(107);
    for (int trial = 0; trial < 100; ++trial) {
        const MaskedSample s = gen::general_sample(rng, 2, 15, 0, 0.7);
        Eigen::MatrixXd v = s.values();
        for (Eigen::Index k = 0; k < v.cols(); ++k) {
            v(0, k) = std::atan(v(0, k));
            v(2, k) = std::atan(v(2, k));
            v(1, k) = 3.0 * v(1, k) + 1.0;
            v(3, k) = 3.0 * v(3, k) + 1.0;
        }
        const EffectEstimate a = rank_form(s);
        const EffectEstimate b = rank_form(build_masked_sample(v, s.mask()));
        EXPECT_EQ(a.p_hat, b.p_hat);
    }
}

TEST(Effects, PlacementMeansReproduceEffect) {
    gen::Rng rng(109);
    for (int trial = 0; trial < 200; ++trial) {
        const MaskedSample s = gen::general_sample(rng, 2, 4 + trial % 20, 3, 0.7);
        const PatternIndex idx = derive_pattern_index(s);
        const RankTable t = build_rank_table(s, idx);
        const EffectEstimate e = estimate_effects(s, idx, t);
        const Eigen::MatrixXd y = placements(t, idx);
        for (std::size_t l = 0; l < 2; ++l) {
            double mean[2] = {0.0, 0.0};
            for (std::size_t g = 0; g < 2; ++g) {
                std::size_t count = 0;
                for (std::size_t k = 0; k < s.subjects(); ++k) {
                    if (!s.observed(g, l, k)) continue;
                    mean[g] += y(static_cast<Eigen::Index>(s.row(g, l)), static_cast<Eigen::Index>(k));
                    ++count;
                }
                mean[g] /= static_cast<double>(count);
            }
            EXPECT_NEAR(e.p_hat(static_cast<Eigen::Index>(l)) - 0.5, (mean[1] - mean[0]) / 2.0, 1e-13);
        }
    }
}

TEST(RestrictMethod, AllIsIdentity) {
    gen::Rng rng(7);
    const MaskedSample s = gen::simple_sample(rng, 2, 6, 3, 2, 4);
    const PatternIndex idx = derive_pattern_index(s);
    const Restriction r = restrict_method(s, idx, Method::All);
    EXPECT_EQ(r.sample.values().cols(), s.values().cols());
    EXPECT_TRUE((r.sample.mask() == s.mask()).all());
}

TEST(RestrictMethod, CompleteOnlyDropsIncompleteCases) {
    gen::Rng rng(7);
    const MaskedSample s = gen::simple_sample(rng, 2, 6, 3, 2, 4);
    const Restriction r = restrict_method(s, derive_pattern_index(s), Method::CompleteOnly);
    EXPECT_EQ(r.sample.subjects(), 6u);
    for (const auto& c : r.index.components) {
        EXPECT_EQ(c.n_only(0), 0u);
        EXPECT_EQ(c.n_only(1), 0u);
        EXPECT_EQ(c.n_complete(), 6u);
    }
}

TEST(RestrictMethod, IncompleteOnlyDropsCompleteCases) {
    gen::Rng rng(7);
    const MaskedSample s = gen::simple_sample(rng, 2, 6, 3, 2, 4);
    const Restriction r = restrict_method(s, derive_pattern_index(s), Method::IncompleteOnly);
    EXPECT_EQ(r.sample.subjects(), 5u);
    for (const auto& c : r.index.components) {
        EXPECT_EQ(c.n_complete(), 0u);
        EXPECT_EQ(c.n_only(0), 3u);
        EXPECT_EQ(c.n_only(1), 2u);
    }
}

TEST(RestrictMethod, IncompleteOnlyWithoutGroupTwoCases) {
    gen::Rng rng(7);
    const MaskedSample s = gen::simple_sample(rng, 1, 6, 3, 0, 4);
    try {
        restrict_method(s, derive_pattern_index(s), Method::IncompleteOnly);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EverythingFiltered);
    }
}

TEST(Effects, MonteCarloMeanApproachesTrueEffect) {
    // independent normals with shift delta: p = Phi(delta / sqrt 2)
    const double delta = 0.5;
    const double truth = oracle::normal_cdf(delta / std::sqrt(2.0));
    const int reps = 2000;
    const Eigen::Index n = 200;
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> z(0.0, 1.0);
    double sum = 0.0, sum_sq = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
        Eigen::MatrixXd m(2, n);
        for (Eigen::Index k = 0; k < n; ++k) {
            m(0, k) = z(rng);
            m(1, k) = z(rng) + delta;
        }
        const double p = rank_form(build_masked_sample(m)).p_hat(0);
        sum += p;
        sum_sq += p * p;
    }
    const double mean = sum / reps;
    const double se = std::sqrt((sum_sq / reps - mean * mean) / reps);
    EXPECT_LT(std::abs(mean - truth), 3.0 * se) << "mean " << mean << " truth " << truth;
}
