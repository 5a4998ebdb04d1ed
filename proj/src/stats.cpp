#include "kac/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "kac/quadrature.hpp"

namespace kac {

EmpiricalMeasure EmpiricalMeasure::from_points(std::vector<double> pts) {
    if (pts.empty()) throw std::invalid_argument("empirical measure needs at least one point");
    std::sort(pts.begin(), pts.end());
    EmpiricalMeasure m;
    m.weights.assign(pts.size(), 1.0 / static_cast<double>(pts.size()));
    m.points = std::move(pts);
    return m;
}

EmpiricalMeasure EmpiricalMeasure::from_ensemble(const std::vector<Configuration>& cs) {
    std::vector<double> all;
    for (const auto& c : cs) all.insert(all.end(), c.energies.begin(), c.energies.end());
    return from_points(std::move(all));
}

EmpiricalMeasure EmpiricalMeasure::from_weighted(std::vector<double> pts, std::vector<double> w) {
    if (pts.size() != w.size() || pts.empty()) throw std::invalid_argument("bad weighted measure");
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return pts[a] < pts[b]; });
    double total = 0.0;
    for (double v : w) {
        if (v < 0.0) throw std::invalid_argument("negative weight");
        total += v;
    }
    EmpiricalMeasure m;
    for (auto i : order) {
        m.points.push_back(pts[i]);
        m.weights.push_back(w[i] / total);
    }
    return m;
}

double EmpiricalMeasure::mean() const {
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) s += points[i] * weights[i];
    return s;
}

double w1_distance(const EmpiricalMeasure& mu, const DensityTable& nu) {
    auto I = [&](double x) { return nu.cdf_integral(x); };
    // Integral of |c - C| over [a,b] where C is nondecreasing.
    auto piece = [&](double a, double b, double c) {
        if (!(b > a)) return 0.0;
        const double s = std::clamp(nu.quantile(c), a, b);
        const double Ia = I(a), Ib = I(b), Is = I(s);
        return std::abs(c * (s - a) - (Is - Ia)) + std::abs((Ib - Is) - c * (b - s));
    };
    const auto& p = mu.points;
    double total = 0.0;
    const double lo = std::min(nu.lower(), p.front());
    total += piece(lo, p.front(), 0.0);
    double F = 0.0;
    for (std::size_t k = 0; k + 1 < p.size(); ++k) {
        F += mu.weights[k];
        total += piece(p[k], p[k + 1], std::min(F, 1.0));
    }
    total += piece(p.back(), std::max(p.back(), nu.upper()), 1.0);
    return total;
}

double w1_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    std::size_t i = 0, j = 0;
    double Fa = 0.0, Fb = 0.0, total = 0.0;
    double x = std::min(mu.points.front(), nu.points.front());
    while (i < mu.points.size() || j < nu.points.size()) {
        const double xa = i < mu.points.size() ? mu.points[i] : INFINITY;
        const double xb = j < nu.points.size() ? nu.points[j] : INFINITY;
        const double next = std::min(xa, xb);
        total += std::abs(Fa - Fb) * (next - x);
        x = next;
        if (xa == next) Fa += mu.weights[i++];
        if (xb == next) Fb += nu.weights[j++];
    }
    return total;
}

double w1_distance(const DensityTable& mu, const DensityTable& nu) {
    std::vector<double> knots(mu.grid().data(), mu.grid().data() + mu.points());
    knots.insert(knots.end(), nu.grid().data(), nu.grid().data() + nu.points());
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    auto d = [&](double x) { return mu.cdf(x) - nu.cdf(x); };
    auto absd = [&](double x) { return std::abs(d(x)); };
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        double a = knots[k], b = knots[k + 1];
        const double da = d(a), db = d(b);
        if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
            double lo = a, hi = b;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
                const double m = 0.5 * (lo + hi);
                if ((d(m) > 0.0) == (da > 0.0))
                    lo = m;
                else
                    hi = m;
            }
            const double s = 0.5 * (lo + hi);
            total += integrate(absd, a, s, 1, 8) + integrate(absd, s, b, 1, 8);
        } else {
            total += integrate(absd, a, b, 1, 8);
        }
    }
    return total;
}

double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-18) break;
    }
    return std::clamp(s, 0.0, 1.0);
}

namespace {
double ks_pvalue(double D, double ne) {
    const double r = std::sqrt(ne);
    return kolmogorov_survival((r + 0.12 + 0.11 / r) * D);
}
}  // namespace

KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::invalid_argument("KS test needs a nonempty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double D = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double F = cdf(sample[i]);
        D = std::max({D, (i + 1) / n - F, F - i / n});
    }
    return KsResult{D, ks_pvalue(D, n)};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("KS test needs nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double D = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        D = std::max(D, std::abs(i / na - j / nb));
    }
    return KsResult{D, ks_pvalue(D, na * nb / (na + nb))};
}

double binomial_two_sided_p(long k, long n, double p) {
    if (n < 0 || k < 0 || k > n) throw std::invalid_argument("bad binomial arguments");
    if (n == 0) return 1.0;
    auto logpmf = [&](long i) {
        return std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) + i * std::log(p) +
               (n - i) * std::log1p(-p);
    };
    const double ref = logpmf(k);
    double total = 0.0;
    for (long i = 0; i <= n; ++i) {
        const double l = logpmf(i);
        if (l <= ref + 1e-7) total += std::exp(l);
    }
    return std::min(total, 1.0);
}

double exponential_rate_mle(const std::vector<double>& sample) {
    if (sample.empty()) throw std::invalid_argument("rate fit needs data");
    const double m = std::accumulate(sample.begin(), sample.end(), 0.0) / static_cast<double>(sample.size());
    return m > 0.0 ? 1.0 / m : INFINITY;
}

DensityTable Histogram::table() const { return DensityTable::histogram(edges, mean_density); }

Histogram empirical_histogram(const std::vector<Configuration>& configs, double bin_width,
                              std::optional<double> x_max) {
    if (!(bin_width > 0.0)) throw std::invalid_argument("bin_width must be positive");
    if (configs.empty()) throw std::invalid_argument("histogram needs a nonempty ensemble");
    double top = 0.0;
    if (x_max) {
        top = *x_max;
    } else {
        for (const auto& c : configs)
            if (!c.energies.empty()) top = std::max(top, c.energies.back());
    }
    const auto bins = static_cast<Eigen::Index>(std::max(1.0, std::ceil(top / bin_width - 1e-12)));
    Histogram h;
    h.edges.resize(bins + 1);
    for (Eigen::Index b = 0; b <= bins; ++b) h.edges(b) = b * bin_width;
    h.counts.assign(bins, std::vector<int>(configs.size(), 0));
    const double S = static_cast<double>(configs.size());
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(bins), sumsq = Eigen::VectorXd::Zero(bins);
    for (std::size_t s = 0; s < configs.size(); ++s) {
        const auto& x = configs[s].energies;
        for (double v : x) {
            auto b = static_cast<Eigen::Index>(std::floor(v / bin_width));
            if (v == top && b == bins) b = bins - 1;
            if (b >= 0 && b < bins) ++h.counts[b][s];
        }
        const double norm = 1.0 / (static_cast<double>(x.size()) * bin_width);
        for (Eigen::Index b = 0; b < bins; ++b) {
            const double d = h.counts[b][s] * norm;
            sum(b) += d;
            sumsq(b) += d * d;
        }
    }
    h.mean_density = sum / S;
    h.std_error.resize(bins);
    for (Eigen::Index b = 0; b < bins; ++b) {
        const double var = S > 1 ? std::max(0.0, (sumsq(b) - S * h.mean_density(b) * h.mean_density(b)) / (S - 1))
                                 : 0.0;
        h.std_error(b) = std::sqrt(var / S);
    }
    return h;
}

namespace {
void collect_gaps(const Configuration& c, double x, double window, std::vector<double>& out, int& inside) {
    const auto& e = c.energies;
    const double a = x - 0.5 * window, b = x + 0.5 * window;
    auto first = std::lower_bound(e.begin(), e.end(), a);
    auto last = std::upper_bound(e.begin(), e.end(), b);
    inside += static_cast<int>(last - first);
    const double eps = c.params.min_gap();
    const double scale = (c.params.n() - 1) / c.params.alpha();
    for (auto it = first; it != last && it + 1 != last; ++it)
        out.push_back(std::max(0.0, (*(it + 1) - *it - eps) * scale));
}

GapSample finish_gaps(std::vector<double> gaps, double x, double window, std::optional<double> reference_rate) {
    GapSample g;
    g.center_x = x;
    g.window = window;
    g.fitted_rate = exponential_rate_mle(gaps);
    g.reference_rate = reference_rate ? *reference_rate : g.fitted_rate;
    const double r = g.reference_rate;
    const KsResult ks = ks_test(gaps, [r](double v) { return v <= 0.0 ? 0.0 : -std::expm1(-r * v); });
    g.ks_statistic = ks.statistic;
    g.ks_pvalue = ks.pvalue;
    g.ks_pass = !ks.rejects(0.05);
    g.scaled_gaps = std::move(gaps);
    return g;
}
}  // namespace

GapSample gap_statistics(const Configuration& config, double x, double window,
                         std::optional<double> reference_rate) {
    return gap_statistics(std::vector<Configuration>{config}, x, window, reference_rate);
}

GapSample gap_statistics(const std::vector<Configuration>& ensemble, double x, double window,
                         std::optional<double> reference_rate) {
    if (!(window > 0.0)) throw std::invalid_argument("gap window must be positive");
    std::vector<double> gaps;
    int inside = 0;
    for (const auto& c : ensemble) {
        int here = 0;
        collect_gaps(c, x, window, gaps, here);
        inside += here;
    }
    if (inside < 10)
        throw std::invalid_argument("gap window holds " + std::to_string(inside) + " particles; need at least 10");
    return finish_gaps(std::move(gaps), x, window, reference_rate);
}

}  // namespace kac
