#include "rankeff/covariance.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace rankeff {

namespace {

using MatrixLD = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

// Scaled sum of centered outer products of the columns of x. Symmetric by
// construction.
Eigen::MatrixXd centered_outer(const MatrixLD& x, long double scale) {
    const Eigen::Index d = x.rows();
    const Eigen::Index e = x.cols();
    Eigen::Matrix<long double, Eigen::Dynamic, 1> mean = x.rowwise().sum() / static_cast<long double>(e);
    MatrixLD c = x.colwise() - mean;
    Eigen::MatrixXd out(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i; j < d; ++j) {
            long double s = 0.0L;
            for (Eigen::Index k = 0; k < e; ++k) s += c(i, k) * c(j, k);
            out(i, j) = out(j, i) = static_cast<double>(scale * s);
        }
    }
    return out;
}

enum Kind : int { kComplete = 0, kSecond = 1, kFirst = 2, kNone = 3 };

constexpr std::array<const char*, 9> kTermNames{"C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9"};
// Sign of the placement factor in the linearisation of p: complete and
// group-2 cases enter positively, group-1 cases negatively.
constexpr std::array<int, 3> kSign{1, 1, -1};

}  // namespace

void update_trace_diagnostics(CovarianceEstimate& est) {
    est.trace = est.V.trace();
    est.trace_sq = (est.V * est.V).trace();
    est.nu_hat = est.trace_sq > 0.0 ? est.trace * est.trace / est.trace_sq
                                    : std::numeric_limits<double>::quiet_NaN();
}

CovarianceEstimate covariance_simple(const MaskedSample& sample, const PatternIndex& idx, const RankTable& ranks) {
    if (!idx.is_simple_pattern) {
        throw Error(ErrorKind::PatternMismatch, "pattern mismatch: the sample does not follow the simple pattern");
    }
    const std::size_t d = sample.dims();
    const auto& comp = idx.components.front();
    const long double n = static_cast<long double>(sample.subjects());
    const long double m1 = static_cast<long double>(comp.m(0));
    const long double m2 = static_cast<long double>(comp.m(1));
    const long double denom = m1 * m1 * m2 * m2;
    const Eigen::MatrixXd b = ranks.overall - ranks.internal;

    CovarianceEstimate est;
    est.V = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));

    auto add_part = [&](const std::string& name, const std::vector<std::size_t>& cases, auto column) {
        Eigen::MatrixXd part = Eigen::MatrixXd::Zero(est.V.rows(), est.V.cols());
        const std::size_t e = cases.size();
        if (e == 1) {
            est.flags.push_back({name, -1, -1, e});
        } else if (e >= 2) {
            MatrixLD x(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(e));
            for (std::size_t t = 0; t < e; ++t) {
                for (std::size_t l = 0; l < d; ++l) {
                    x(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(t)) = column(l, cases[t]);
                }
            }
            const long double ce = static_cast<long double>(e);
            part = centered_outer(x, n * ce / (denom * (ce - 1.0L)));
        }
        est.V += part;
        est.parts.push_back({name, std::move(part)});
        return e >= 2;
    };

    auto at = [&](std::size_t g, std::size_t l, std::size_t k) -> long double {
        return b(static_cast<Eigen::Index>(MaskedSample::row(g, l, d)), static_cast<Eigen::Index>(k));
    };
    bool any = false;
    any |= add_part("Vc", comp.complete, [&](std::size_t l, std::size_t k) { return at(1, l, k) - at(0, l, k); });
    any |= add_part("V1", comp.only[0], [&](std::size_t l, std::size_t k) { return at(0, l, k); });
    any |= add_part("V2", comp.only[1], [&](std::size_t l, std::size_t k) { return at(1, l, k); });
    if (!any) {
        throw Error(ErrorKind::NoEstimablePart, "no covariance part has two or more cases");
    }
    update_trace_diagnostics(est);
    return est;
}

CovarianceEstimate covariance_general(const MaskedSample& sample, const PatternIndex& idx, const RankTable& ranks) {
    const std::size_t d = sample.dims();
    const std::size_t n = sample.subjects();
    const Eigen::MatrixXd y = placements(ranks, idx);

    // Per component: which set each subject falls in, its placement factor
    // and the set's outer denominator (n_c, m_2 or m_1).
    std::vector<std::vector<int>> kind(d, std::vector<int>(n, kNone));
    std::vector<std::vector<long double>> factor(d, std::vector<long double>(n, 0.0L));
    std::vector<std::array<long double, 3>> outer(d);
    for (std::size_t l = 0; l < d; ++l) {
        const auto& comp = idx.components[l];
        const auto r1 = static_cast<Eigen::Index>(MaskedSample::row(0, l, d));
        const auto r2 = static_cast<Eigen::Index>(MaskedSample::row(1, l, d));
        const long double th1 = comp.theta(0);
        const long double th2 = comp.theta(1);
        for (std::size_t k : comp.complete) {
            const auto c = static_cast<Eigen::Index>(k);
            kind[l][k] = kComplete;
            factor[l][k] = th2 * y(r2, c) - th1 * y(r1, c);
        }
        for (std::size_t k : comp.only[1]) {
            kind[l][k] = kSecond;
            factor[l][k] = y(r2, static_cast<Eigen::Index>(k));
        }
        for (std::size_t k : comp.only[0]) {
            kind[l][k] = kFirst;
            factor[l][k] = y(r1, static_cast<Eigen::Index>(k));
        }
        outer[l] = {static_cast<long double>(comp.n_complete()), static_cast<long double>(comp.m(1)),
                    static_cast<long double>(comp.m(0))};
    }

    CovarianceEstimate est;
    est.general = true;
    const auto dd = static_cast<Eigen::Index>(d);
    est.V = Eigen::MatrixXd::Zero(dd, dd);
    std::vector<Eigen::MatrixXd> terms(9, Eigen::MatrixXd::Zero(dd, dd));
    const long double nn = static_cast<long double>(n);

    std::array<std::vector<std::size_t>, 9> buckets;
    for (std::size_t l = 0; l < d; ++l) {
        for (std::size_t r = l; r < d; ++r) {
            for (auto& bkt : buckets) bkt.clear();
            for (std::size_t k = 0; k < n; ++k) {
                const int a = kind[l][k];
                const int b = kind[r][k];
                if (a == kNone || b == kNone) continue;
                buckets[static_cast<std::size_t>(3 * a + b)].push_back(k);
            }
            long double cell = 0.0L;
            for (std::size_t j = 0; j < 9; ++j) {
                const auto& set = buckets[j];
                const std::size_t e = set.size();
                if (e == 0) continue;
                if (e == 1) {
                    est.flags.push_back({kTermNames[j], static_cast<int>(l), static_cast<int>(r), e});
                    continue;
                }
                long double mx = 0.0L;
                long double my = 0.0L;
                for (std::size_t k : set) {
                    mx += factor[l][k];
                    my += factor[r][k];
                }
                const long double ce = static_cast<long double>(e);
                mx /= ce;
                my /= ce;
                long double s = 0.0L;
                for (std::size_t k : set) s += (factor[l][k] - mx) * (factor[r][k] - my);
                const long double c_hat = ce / (ce - 1.0L) * s;
                const std::size_t a = j / 3;
                const std::size_t b = j % 3;
                const long double contrib =
                    nn * static_cast<long double>(kSign[a] * kSign[b]) * c_hat / (outer[l][a] * outer[r][b]);
                cell += contrib;
                const auto li = static_cast<Eigen::Index>(l);
                const auto ri = static_cast<Eigen::Index>(r);
                terms[j](li, ri) += static_cast<double>(contrib);
                if (l != r) terms[j](ri, li) += static_cast<double>(contrib);
            }
            est.V(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(r)) = static_cast<double>(cell);
            est.V(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(l)) = static_cast<double>(cell);
        }
    }
    for (std::size_t j = 0; j < 9; ++j) est.parts.push_back({kTermNames[j], std::move(terms[j])});
    update_trace_diagnostics(est);
    return est;
}

}  // namespace rankeff
