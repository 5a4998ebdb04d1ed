#include "kac/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "kac/quadrature.hpp"

namespace kac {

namespace {
constexpr double kTailXi = 1e-12;     // tables stop at phi(1 - kTailXi)
constexpr double kRightEdge = 1e-6;   // transforms extrapolate for xi > 1 - kRightEdge

void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha < 2.0))
        throw std::invalid_argument("alpha must lie in [0,2), got " + std::to_string(alpha));
}

// Root of increasing f on [lo, hi] by Newton steps guarded with bisection.
template <class F, class D>
double monotone_root(F&& f, D&& df, double target, double lo, double hi, double guess) {
    double x = std::clamp(guess, lo, hi);
    for (int it = 0; it < 200; ++it) {
        const double r = f(x) - target;
        if (r == 0.0) return x;
        if (r > 0.0)
            hi = x;
        else
            lo = x;
        const double d = df(x);
        double xn = d > 0.0 ? x - r / d : 0.5 * (lo + hi);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::abs(xn - x) <= 2.5e-16 * std::max(1.0, std::abs(x)) || hi - lo <= 1e-16) return xn;
        x = xn;
    }
    return x;
}
}  // namespace

QuantileFn::QuantileFn(double alpha) : alpha_(alpha), sup_(std::numeric_limits<double>::infinity()) {
    check_alpha(alpha);
}

QuantileFn::QuantileFn(double alpha, DensityTable w) : alpha_(alpha), w_(std::move(w)) {
    check_alpha(alpha);
    const DensityTable& t = *w_;
    if (std::abs(t.lower()) > 1e-12 || std::abs(t.upper() - 1.0) > 1e-12)
        throw std::invalid_argument("excess-energy density must live on [0,1]");
    w1_ = t.values()(t.points() - 1);
    // J(xi) = w1 * log(1/(1-xi)) + R(xi); R has a bounded integrand and is tabulated.
    const auto& x = t.grid();
    J_.resize(x.size());
    J_(0) = 0.0;
    for (Eigen::Index i = 1; i < x.size(); ++i)
        J_(i) = J_(i - 1) +
                integrate([&](double s) { return (t.density(s) - w1_) / (1.0 - s); }, x(i - 1), x(i), 1, 8);
    sup_ = w1_ > 0.0 ? std::numeric_limits<double>::infinity() : (1.0 - alpha / 2.0) * J_(x.size() - 1) + alpha;
}

double QuantileFn::w(double xi) const { return w_ ? w_->density(xi) : 1.0; }

double QuantileFn::excess_integral(double xi) const {
    if (!w_) return -std::log1p(-xi);
    const DensityTable& t = *w_;
    const auto& x = t.grid();
    const double* b = x.data();
    Eigen::Index i = std::upper_bound(b, b + x.size(), xi) - b - 1;
    i = std::clamp<Eigen::Index>(i, 0, x.size() - 2);
    const double part =
        integrate([&](double s) { return (t.density(s) - w1_) / (1.0 - s); }, x(i), xi, 1, 8);
    return w1_ * -std::log1p(-xi) + J_(i) + part;
}

double QuantileFn::operator()(double xi) const {
    if (!(xi >= 0.0)) throw std::invalid_argument("phi needs xi >= 0");
    if (xi >= 1.0) {
        if (w_ && w1_ == 0.0 && xi == 1.0) return sup_;
        throw std::invalid_argument("phi needs xi < 1");
    }
    return (1.0 - alpha_ / 2.0) * excess_integral(xi) + alpha_ * xi;
}

double QuantileFn::derivative(double xi) const {
    if (!(xi >= 0.0 && xi < 1.0)) throw std::invalid_argument("phi' needs xi in [0,1)");
    return (1.0 - alpha_ / 2.0) * w(xi) / (1.0 - xi) + alpha_;
}

double QuantileFn::inverse(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= sup_) return 1.0;
    // Upper bracket: phi(1 - 2^-k) > x.
    double hi = 0.5;
    while ((*this)(hi) < x) {
        hi = 1.0 - 0.5 * (1.0 - hi);
        if (1.0 - hi < 1e-300) return hi;
    }
    double guess;
    if (!w_) {
        const double c = 1.0 - alpha_ / 2.0;
        guess = -std::expm1(-x / (c + alpha_));
    } else {
        guess = 0.5 * hi;
    }
    return monotone_root([this](double s) { return (*this)(s); }, [this](double s) { return derivative(s); }, x,
                         0.0, hi, guess);
}

double phi(double xi, double alpha) { return QuantileFn(alpha)(xi); }
double phi(double xi, double alpha, const DensityTable& w) { return QuantileFn(alpha, w)(xi); }

namespace {
// Uniform nodes on [0,1], then geometric nodes toward 1 - kRightEdge, then 1.
Eigen::VectorXd tail_refined_grid(int points) {
    std::vector<double> nodes;
    const double step = 1.0 / (points - 1);
    for (int k = 0; k < points - 1; ++k) nodes.push_back(k * step);
    for (double gap = step / 2; gap > kRightEdge; gap /= 2) nodes.push_back(1.0 - gap);
    nodes.push_back(1.0 - kRightEdge);
    nodes.push_back(1.0);
    return Eigen::Map<Eigen::VectorXd>(nodes.data(), static_cast<Eigen::Index>(nodes.size()));
}

DensityTable push_forward(const QuantileFn& q, int points) {
    const double xmax = std::isfinite(q.supremum()) ? q.supremum() : q(1.0 - kTailXi);
    Eigen::VectorXd x = DensityTable::uniform_grid(0.0, xmax, points);
    Eigen::VectorXd g(points), C(points);
    for (int i = 0; i < points; ++i) {
        const double xi = q.inverse(x(i));
        C(i) = xi;
        g(i) = xi < 1.0 ? 1.0 / q.derivative(xi) : 0.0;
    }
    C(0) = 0.0;
    return DensityTable::from_nodes(std::move(x), std::move(g), std::move(C));
}
}  // namespace

DensityTable f_alpha(double alpha, int points) { return push_forward(QuantileFn(alpha), points); }

DensityTable g_from_w(const DensityTable& w, double alpha, int points) {
    for (Eigen::Index i = 0; i < w.points(); ++i)
        if (w.values()(i) < 0.0) throw std::invalid_argument("excess-energy density is negative");
    QuantileFn q(alpha, w.normalized());
    if (alpha == 0.0 && std::isfinite(q.supremum()))
        throw std::invalid_argument("w(1) = 0 with alpha = 0 gives a bounded quantile; no density on the half-line");
    return push_forward(q, points);
}

void require_admissible(const DensityTable& g, double alpha) {
    check_alpha(alpha);
    if (alpha == 0.0) return;
    const double m = g.max_value();
    if (alpha * m > 1.0 + 1e-9)
        throw std::invalid_argument("density exceeds the exclusion cap 1/alpha (max alpha*g = " +
                                    std::to_string(alpha * m) + ")");
    int contact = 0;
    for (Eigen::Index i = 0; i < g.points(); ++i)
        if (alpha * g.values()(i) >= 1.0 - 1e-9) ++contact;
    if (contact > 1) throw std::invalid_argument("density touches the exclusion cap 1/alpha on an interval");
}

double excess_cdf(const DensityTable& g, double alpha, double x) {
    const double G = g.cdf(x);
    return (x - g.cdf_integral(x) - alpha * G * (1.0 - 0.5 * G)) / (1.0 - alpha / 2.0);
}

DensityTable w_from_g(const DensityTable& g, double alpha, int points) {
    require_admissible(g, alpha);
    const double c = 1.0 - alpha / 2.0;
    auto value = [&](double xi) {
        const double x = g.quantile(xi);
        const double gv = g.density(x);
        if (!(gv > 0.0)) throw std::invalid_argument("density vanishes inside its support");
        return std::max((1.0 / gv - alpha) * (1.0 - xi) / c, 0.0);
    };
    const double xc = 1.0 - kRightEdge;
    Eigen::VectorXd xi = tail_refined_grid(points);
    const Eigen::Index m = xi.size();
    Eigen::VectorXd w(m), W(m);
    for (Eigen::Index k = 0; k + 1 < m; ++k) {
        w(k) = value(xi(k));
        W(k) = excess_cdf(g, alpha, g.quantile(xi(k)));
    }
    const double slope = (w(m - 2) - w(m - 3)) / (xi(m - 2) - xi(m - 3));
    w(m - 1) = std::max(w(m - 2) + slope * (1.0 - xc), 0.0);
    W(m - 1) = W(m - 2) + 0.5 * (w(m - 2) + w(m - 1)) * (1.0 - xc);
    W(0) = 0.0;
    return DensityTable::from_nodes(std::move(xi), std::move(w), std::move(W));
}

DensityTable h_from_g(const DensityTable& g, double alpha) {
    require_admissible(g, alpha);
    const double c = 1.0 - alpha / 2.0;
    const auto& x = g.grid();
    Eigen::VectorXd h(x.size()), H(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double G = g.cdf_nodes()(i);
        h(i) = std::max((1.0 - alpha * g.values()(i)) * (1.0 - G) / c, 0.0);
        H(i) = i == 0 ? 0.0 : excess_cdf(g, alpha, x(i));
    }
    for (Eigen::Index i = 1; i < H.size(); ++i) H(i) = std::max(H(i), H(i - 1));
    return DensityTable::from_nodes(x, std::move(h), std::move(H));
}

DensityTable psi_from_g(const DensityTable& g, double alpha, int points) {
    const DensityTable h = h_from_g(g, alpha);
    const double c = 1.0 - alpha / 2.0;
    auto at = [&](double eta, double& psi, double& Psi) {
        const double x = h.quantile(std::min(eta, h.mass()));
        const double gv = g.density(x);
        const double G = g.cdf(x);
        const double hv = (1.0 - alpha * gv) * (1.0 - G) / c;
        Psi = G;
        psi = hv > 0.0 ? gv / hv : std::numeric_limits<double>::infinity();
    };
    const Eigen::VectorXd eta = tail_refined_grid(points);
    const Eigen::Index m = eta.size();
    Eigen::VectorXd psi(m), Psi(m);
    for (Eigen::Index k = 0; k + 1 < m; ++k) at(eta(k), psi(k), Psi(k));
    const double slope = (psi(m - 2) - psi(m - 3)) / (eta(m - 2) - eta(m - 3));
    psi(m - 1) = std::max(psi(m - 2) + slope * kRightEdge, 0.0);
    Psi(m - 1) = Psi(m - 2) + 0.5 * (psi(m - 2) + psi(m - 1)) * kRightEdge;
    Psi(0) = 0.0;
    std::vector<int> linear;
    // Isolated cap contact at the origin: psi is integrable but unbounded there.
    if (!std::isfinite(psi(0)) || psi(0) > 1e6) {
        psi(0) = (Psi(1) - Psi(0)) / (eta(1) - eta(0));
        linear.push_back(0);
    }
    for (Eigen::Index k = 1; k < m; ++k)
        if (!std::isfinite(psi(k))) throw std::invalid_argument("psi is unbounded inside (0,1)");
    return DensityTable::from_nodes(eta, std::move(psi), std::move(Psi), linear);
}

double exclusion_factor(double u) {
    if (u >= 1.0) return 0.0;
    if (u < 0.0) throw std::invalid_argument("exclusion factor needs u >= 0");
    return (1.0 - u) * std::exp(-u / (1.0 - u));
}

double gap_rate(double g_value, double alpha) {
    const double u = alpha * g_value;
    if (u >= 1.0) throw std::invalid_argument("gap rate undefined at the exclusion cap");
    return u / (1.0 - u);
}

double frozen_threshold(double alpha) {
    return std::log(2.0 * alpha / (2.0 - alpha)) + (3.0 * alpha - 2.0) / 2.0;
}

double entropy(const DensityTable& g, double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("entropy needs alpha in (0,2)");
    if (alpha * g.max_value() >= 1.0) throw std::invalid_argument("entropy diverges: density touches 1/alpha");
    auto f = [&](double x) {
        const double v = g.density(x);
        if (v <= 0.0) return 0.0;
        const double u = alpha * v;
        return v * std::log(u / (1.0 - u));
    };
    const auto& x = g.grid();
    double s = 0.0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) s += integrate(f, x(i), x(i + 1), 1, 8);
    return s;
}

double xi_zero() {
    auto f = [](double s) { return -(1.0 - s - std::exp(-2.0 * s)); };
    auto df = [](double s) { return 1.0 - 2.0 * std::exp(-2.0 * s); };
    return monotone_root(f, df, 0.0, 0.5, 1.0, 0.8);
}

namespace builtin {

DensityTable exponential(int points) {
    Eigen::VectorXd x = DensityTable::uniform_grid(0.0, 21.0, points);
    Eigen::VectorXd g = (-x.array()).exp().matrix();
    Eigen::VectorXd C(points);
    for (int i = 0; i < points; ++i) C(i) = -std::expm1(-x(i));
    return DensityTable::from_nodes(std::move(x), std::move(g), std::move(C));
}

namespace {
double excess_profile(double y) {
    const double a = y - 1.0, b = y - 4.0;
    return 1.0 / ((1.0 + a * a) * (1.0 + b * b));
}
}  // namespace

double ExcessShape::operator()(double x) const { return c1 * excess_profile(c2 * x); }

ExcessShape excess_shape() {
    const double i0 = integrate_half_line(excess_profile, 0.0, 1e-15);
    const double i1 = integrate_half_line([](double y) { return y * excess_profile(y); }, 0.0, 1e-15);
    const double c2 = i1 / i0;
    return ExcessShape{c2 / i0, c2};
}

DensityTable excess(int points) {
    const ExcessShape s = excess_shape();
    // Uniform on the bulk, geometric over the x^-4 tail; the mean lost past xmax is ~6e-10.
    const double bulk = 16.0, xmax = 1e4;
    const int tail = std::max(points / 8, 64);
    Eigen::VectorXd x(points + tail);
    for (int i = 0; i < points; ++i) x(i) = bulk * i / (points - 1);
    const double ratio = std::pow(xmax / bulk, 1.0 / tail);
    for (int k = 1; k <= tail; ++k) x(points - 1 + k) = bulk * std::pow(ratio, k);
    x(points + tail - 1) = xmax;
    return DensityTable::from_function(s, std::move(x));
}

}  // namespace builtin

}  // namespace kac
