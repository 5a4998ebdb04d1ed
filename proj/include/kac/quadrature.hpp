#pragma once

#include <cmath>
#include <vector>

namespace kac {

struct GaussRule {
    std::vector<double> nodes;    // on [-1,1]
    std::vector<double> weights;
};

// Gauss-Legendre rule of the given order (Golub-Welsch), cached per order.
const GaussRule& gauss_legendre(int order);

template <class F>
double integrate(F&& f, double a, double b, int panels = 1, int order = 16) {
    const GaussRule& r = gauss_legendre(order);
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double mid = lo + 0.5 * h;
        double s = 0.0;
        for (std::size_t k = 0; k < r.nodes.size(); ++k) s += r.weights[k] * f(mid + 0.5 * h * r.nodes[k]);
        sum += 0.5 * h * s;
    }
    return sum;
}

namespace detail {
template <class F>
double adapt(F& f, double a, double b, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double l = integrate(f, a, m), r = integrate(f, m, b);
    if (depth <= 0 || std::abs(l + r - whole) <= tol) return l + r;
    return adapt(f, a, m, l, 0.5 * tol, depth - 1) + adapt(f, m, b, r, 0.5 * tol, depth - 1);
}
}  // namespace detail

// Bisection-adaptive 16-point Gauss-Legendre.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double tol = 1e-13, int max_depth = 30) {
    return detail::adapt(f, a, b, integrate(f, a, b), tol, max_depth);
}

// Integral over [a, inf) through x = a + t/(1-t).
template <class F>
double integrate_half_line(F&& f, double a, double tol = 1e-13) {
    auto g = [&](double t) {
        const double s = 1.0 - t;
        return f(a + t / s) / (s * s);
    };
    return integrate_adaptive(g, 0.0, 1.0, tol);
}

}  // namespace kac
