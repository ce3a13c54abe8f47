#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace rankeff::oracle {

namespace {

double c(double x) { return x < 0 ? 0.0 : (x > 0 ? 1.0 : 0.5); }

std::vector<std::size_t> observed_in(const MaskedSample& s, std::size_t g, std::size_t l) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < s.subjects(); ++k) {
        if (s.observed(g, l, k)) out.push_back(k);
    }
    return out;
}

long double simpson(const std::function<long double(long double)>& f, long double a, long double b, long double fa,
                    long double fm, long double fb, long double whole, long double eps, int depth) {
    const long double m = (a + b) / 2;
    const long double lm = (a + m) / 2;
    const long double rm = (m + b) / 2;
    const long double flm = f(lm);
    const long double frm = f(rm);
    const long double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const long double right = (b - m) / 6 * (fm + 4 * frm + fb);
    const long double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15 * eps) return left + right + delta / 15;
    return simpson(f, a, m, fa, flm, fm, left, eps / 2, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, eps / 2, depth - 1);
}

}  // namespace

std::vector<double> midranks(const std::vector<double>& values) {
    std::vector<double> r(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        double s = 0.5;
        for (double v : values) s += c(values[i] - v);
        r[i] = s;
    }
    return r;
}

double normalized_edf(const MaskedSample& s, std::size_t group, std::size_t l, double x) {
    double acc = 0.0;
    std::size_t m = 0;
    for (std::size_t k = 0; k < s.subjects(); ++k) {
        if (!s.observed(group, l, k)) continue;
        acc += c(x - s.value(group, l, k));
        ++m;
    }
    return acc / static_cast<double>(m);
}

Eigen::VectorXd effects(const MaskedSample& s) {
    Eigen::VectorXd p(static_cast<Eigen::Index>(s.dims()));
    for (std::size_t l = 0; l < s.dims(); ++l) {
        const auto second = observed_in(s, 1, l);
        double acc = 0.0;
        for (std::size_t k : second) acc += normalized_edf(s, 0, l, s.value(1, l, k));
        p(static_cast<Eigen::Index>(l)) = acc / static_cast<double>(second.size());
    }
    return p;
}

namespace {

Eigen::MatrixXd placement_form(const MaskedSample& s,
                               const std::function<double(std::size_t, std::size_t, double)>& place) {
    const std::size_t d = s.dims();
    const auto dd = static_cast<Eigen::Index>(d);
    std::vector<std::size_t> complete, only1, only2;
    for (std::size_t k = 0; k < s.subjects(); ++k) {
        const bool a = s.observed(0, 0, k);
        const bool b = s.observed(1, 0, k);
        if (a && b) complete.push_back(k);
        else if (a) only1.push_back(k);
        else if (b) only2.push_back(k);
    }
    const double n = static_cast<double>(s.subjects());
    const double nc = static_cast<double>(complete.size());
    const double m1 = nc + static_cast<double>(only1.size());
    const double m2 = nc + static_cast<double>(only2.size());
    const double th1 = nc / m1;
    const double th2 = nc / m2;

    auto scatter = [&](const std::vector<Eigen::VectorXd>& rows) {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dd, dd);
        if (rows.size() < 2) return out;
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(dd);
        for (const auto& r : rows) mean += r;
        mean /= static_cast<double>(rows.size());
        for (const auto& r : rows) out += (r - mean) * (r - mean).transpose();
        return out;
    };
    // group g observation placed against the other group
    auto y = [&](std::size_t g, std::size_t k) {
        Eigen::VectorXd v(dd);
        for (std::size_t l = 0; l < d; ++l) v(static_cast<Eigen::Index>(l)) = place(g, l, s.value(g, l, k));
        return v;
    };
    std::vector<Eigen::VectorXd> z, y1, y2;
    for (std::size_t k : complete) z.push_back(th2 * y(1, k) - th1 * y(0, k));
    for (std::size_t k : only1) y1.push_back(y(0, k));
    for (std::size_t k : only2) y2.push_back(y(1, k));

    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(dd, dd);
    if (z.size() >= 2) v += n / (nc * (nc - 1)) * scatter(z);
    const double n1 = static_cast<double>(only1.size());
    const double n2 = static_cast<double>(only2.size());
    if (y1.size() >= 2) v += n * n1 / (m1 * m1 * (n1 - 1)) * scatter(y1);
    if (y2.size() >= 2) v += n * n2 / (m2 * m2 * (n2 - 1)) * scatter(y2);
    return v;
}

}  // namespace

Eigen::MatrixXd covariance_placements(const MaskedSample& s) {
    return placement_form(s, [&](std::size_t g, std::size_t l, double x) { return normalized_edf(s, 1 - g, l, x); });
}

Eigen::MatrixXd covariance_true_placements(const MaskedSample& s,
                                           const std::function<double(std::size_t, std::size_t, double)>& true_cdf) {
    return placement_form(s, [&](std::size_t g, std::size_t l, double x) { return true_cdf(1 - g, l, x); });
}

long double chisq_upper_series(long double x, long double k) {
    const long double a = k / 2;
    const long double y = x / 2;
    if (y <= 0) return 1.0L;
    const long double log_prefix = a * std::log(y) - y - std::lgamma(a);
    if (y < a + 1) {
        long double term = 1.0L / a;
        long double sum = term;
        for (int n = 1; n < 100000; ++n) {
            term *= y / (a + n);
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * 1e-21L) break;
        }
        return 1.0L - std::exp(log_prefix) * sum;
    }
    // modified Lentz for the continued fraction of Q
    const long double tiny = 1e-4000L;
    long double b = y + 1 - a;
    long double cc = 1 / tiny;
    long double dd = 1 / b;
    long double h = dd;
    for (int i = 1; i < 100000; ++i) {
        const long double an = -i * (i - a);
        b += 2;
        dd = an * dd + b;
        if (std::fabs(dd) < tiny) dd = tiny;
        cc = b + an / cc;
        if (std::fabs(cc) < tiny) cc = tiny;
        dd = 1 / dd;
        const long double delta = dd * cc;
        h *= delta;
        if (std::fabs(delta - 1) < 1e-21L) break;
    }
    return std::exp(log_prefix) * h;
}

long double chisq_upper_quadrature(long double x, long double k) {
    const long double a = k / 2;
    const long double y = x / 2;
    if (y <= 0) return 1.0L;
    const long double log_gamma = std::lgamma(a);
    auto integrate = [](const std::function<long double(long double)>& f, long double lo, long double hi) {
        const long double fa = f(lo);
        const long double fb = f(hi);
        const long double fm = f((lo + hi) / 2);
        const long double whole = (hi - lo) / 6 * (fa + 4 * fm + fb);
        return simpson(f, lo, hi, fa, fm, fb, whole, 1e-17L, 50);
    };
    const std::function<long double(long double)> density = [&](long double t) {
        if (t <= 0) return 0.0L;
        return std::exp((a - 1) * std::log(t) - t - log_gamma);
    };
    if (y >= a + 1) {
        // upper tail directly; e^{-t} makes the cut-off negligible
        return integrate(density, y, y + 120 + 10 * a);
    }
    if (a >= 2) return 1.0L - integrate(density, 0, y);
    // t^(a-1) is not smooth at 0: with u = t^a, P = integral_0^{y^a} exp(-u^(1/a)) du / Gamma(a+1)
    const std::function<long double(long double)> smooth = [a](long double u) {
        return std::exp(-std::pow(u, 1 / a));
    };
    return 1.0L - integrate(smooth, 0, std::pow(y, a)) / std::tgamma(a + 1);
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double best = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        const double fa = static_cast<double>(i) / static_cast<double>(a.size());
        const double fb = static_cast<double>(j) / static_cast<double>(b.size());
        best = std::max(best, std::abs(fa - fb));
    }
    return best;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace rankeff::oracle
