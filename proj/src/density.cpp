#include "kac/density.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "kac/quadrature.hpp"

namespace kac {

namespace {
constexpr double kGl2 = 0.21132486540518711775;  // (1 - 1/sqrt(3)) / 2

void check_grid(const Eigen::VectorXd& x) {
    if (x.size() < 2) throw std::invalid_argument("density grid needs at least two points");
    for (Eigen::Index i = 1; i < x.size(); ++i)
        if (!(x(i) > x(i - 1))) throw std::invalid_argument("density grid must be strictly increasing");
}
}  // namespace

Eigen::VectorXd DensityTable::uniform_grid(double a, double b, int points) {
    if (points < 2 || !(b > a)) throw std::invalid_argument("bad uniform grid");
    Eigen::VectorXd x(points);
    const double h = (b - a) / (points - 1);
    for (int i = 0; i < points; ++i) x(i) = a + i * h;
    x(points - 1) = b;
    return x;
}

DensityTable DensityTable::from_nodes(Eigen::VectorXd grid, Eigen::VectorXd values, Eigen::VectorXd cdf,
                                      const std::vector<int>& linear_cells) {
    check_grid(grid);
    if (values.size() != grid.size() || cdf.size() != grid.size())
        throw std::invalid_argument("density table arrays differ in length");
    DensityTable t;
    t.x_ = std::move(grid);
    t.g_ = std::move(values);
    t.C_ = std::move(cdf);
    t.lin_.assign(t.x_.size() - 1, 0);
    for (int c : linear_cells)
        if (c >= 0 && c < static_cast<int>(t.lin_.size())) t.lin_[c] = 1;
    t.finish();
    return t;
}

DensityTable DensityTable::from_values(Eigen::VectorXd grid, Eigen::VectorXd values) {
    check_grid(grid);
    if (values.size() != grid.size()) throw std::invalid_argument("density table arrays differ in length");
    Eigen::VectorXd C(grid.size());
    C(0) = 0.0;
    for (Eigen::Index i = 1; i < grid.size(); ++i)
        C(i) = C(i - 1) + 0.5 * (grid(i) - grid(i - 1)) * (values(i) + values(i - 1));
    return from_nodes(std::move(grid), std::move(values), std::move(C));
}

DensityTable DensityTable::from_function(const std::function<double(double)>& f, Eigen::VectorXd grid) {
    check_grid(grid);
    const Eigen::Index n = grid.size();
    Eigen::VectorXd g(n), C(n);
    for (Eigen::Index i = 0; i < n; ++i) g(i) = f(grid(i));
    C(0) = 0.0;
    for (Eigen::Index i = 1; i < n; ++i) C(i) = C(i - 1) + integrate(f, grid(i - 1), grid(i), 1, 8);
    return from_nodes(std::move(grid), std::move(g), std::move(C));
}

DensityTable DensityTable::histogram(Eigen::VectorXd edges, const Eigen::VectorXd& heights) {
    check_grid(edges);
    const Eigen::Index n = edges.size();
    if (heights.size() != n - 1) throw std::invalid_argument("histogram needs one height per bin");
    Eigen::VectorXd g(n), C(n);
    C(0) = 0.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        if (heights(i) < 0.0) throw std::invalid_argument("negative histogram height");
        g(i) = heights(i);
        C(i + 1) = C(i) + heights(i) * (edges(i + 1) - edges(i));
    }
    g(n - 1) = heights(n - 2);
    std::vector<int> all(n - 1);
    for (Eigen::Index i = 0; i + 1 < n; ++i) all[i] = static_cast<int>(i);
    DensityTable t = from_nodes(std::move(edges), std::move(g), std::move(C), all);
    t.piecewise_constant_ = true;
    return t;
}

void DensityTable::finish() {
    if (std::abs(C_(0)) > 0.0) throw std::invalid_argument("CDF must start at 0");
    const Eigen::Index cells = x_.size() - 1;
    for (Eigen::Index i = 0; i < cells; ++i) {
        if (C_(i + 1) < C_(i)) throw std::invalid_argument("CDF must be nondecreasing");
        if (lin_[i]) continue;
        const double h = x_(i + 1) - x_(i);
        const double D = (C_(i + 1) - C_(i)) / h;
        const double m0 = g_(i), m1 = g_(i + 1);
        const double b = 6.0 * D - 4.0 * m0 - 2.0 * m1;
        const double a = -6.0 * D + 3.0 * m0 + 3.0 * m1;
        double lo = std::min(m0, m1);
        if (a > 0.0) {
            const double tv = -b / (2.0 * a);
            if (tv > 0.0 && tv < 1.0) lo = std::min(lo, m0 + tv * (b + a * tv));
        }
        if (lo < -1e-14 * std::max({std::abs(D), std::abs(m0), std::abs(m1)}) || m0 < 0.0 || m1 < 0.0)
            lin_[i] = 1;
    }
    I_.resize(x_.size());
    I_(0) = 0.0;
    for (Eigen::Index i = 0; i < cells; ++i) {
        const double h = x_(i + 1) - x_(i);
        I_(i + 1) = I_(i) + 0.5 * h * (cell_cdf(i, kGl2) + cell_cdf(i, 1.0 - kGl2));
    }
}

Eigen::Index DensityTable::cell(double x) const {
    const double* b = x_.data();
    const double* e = b + x_.size();
    Eigen::Index i = std::upper_bound(b, e, x) - b - 1;
    return std::clamp<Eigen::Index>(i, 0, x_.size() - 2);
}

double DensityTable::cell_cdf(Eigen::Index i, double t) const {
    const double C0 = C_(i), C1 = C_(i + 1);
    if (lin_[i]) return C0 + t * (C1 - C0);
    const double h = x_(i + 1) - x_(i);
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * C0 + (t3 - 2 * t2 + t) * h * g_(i) + (-2 * t3 + 3 * t2) * C1 +
           (t3 - t2) * h * g_(i + 1);
}

double DensityTable::cell_density(Eigen::Index i, double t) const {
    const double h = x_(i + 1) - x_(i);
    const double D = (C_(i + 1) - C_(i)) / h;
    if (lin_[i]) return D;
    const double m0 = g_(i), m1 = g_(i + 1);
    const double v = m0 + t * (6.0 * D - 4.0 * m0 - 2.0 * m1) + t * t * (-6.0 * D + 3.0 * m0 + 3.0 * m1);
    return std::max(v, 0.0);
}

double DensityTable::density(double x) const {
    if (x < lower() || x > upper()) return 0.0;
    const Eigen::Index i = cell(x);
    return cell_density(i, (x - x_(i)) / (x_(i + 1) - x_(i)));
}

Eigen::ArrayXd DensityTable::density(const Eigen::ArrayXd& x) const {
    Eigen::ArrayXd out(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) out(k) = density(x(k));
    return out;
}

double DensityTable::cdf(double x) const {
    if (x <= lower()) return 0.0;
    if (x >= upper()) return mass();
    const Eigen::Index i = cell(x);
    return cell_cdf(i, (x - x_(i)) / (x_(i + 1) - x_(i)));
}

double DensityTable::cdf_integral(double x) const {
    if (x <= lower()) return 0.0;
    if (x >= upper()) return I_(I_.size() - 1) + mass() * (x - upper());
    const Eigen::Index i = cell(x);
    const double h = x_(i + 1) - x_(i);
    const double tau = (x - x_(i)) / h;
    return I_(i) + 0.5 * tau * h * (cell_cdf(i, kGl2 * tau) + cell_cdf(i, (1.0 - kGl2) * tau));
}

double DensityTable::quantile(double p) const {
    if (p <= 0.0) return lower();
    if (p >= mass()) return upper();
    const double* b = C_.data();
    Eigen::Index i = std::upper_bound(b, b + C_.size(), p) - b - 1;
    i = std::clamp<Eigen::Index>(i, 0, x_.size() - 2);
    const double h = x_(i + 1) - x_(i);
    const double C0 = C_(i), C1 = C_(i + 1);
    if (C1 <= C0) return x_(i);
    double lo = 0.0, hi = 1.0;
    double t = (p - C0) / (C1 - C0);
    if (lin_[i]) return x_(i) + t * h;
    for (int it = 0; it < 100; ++it) {
        const double f = cell_cdf(i, t) - p;
        if (f > 0.0)
            hi = t;
        else
            lo = t;
        if (hi - lo < 1e-15) break;
        const double d = cell_density(i, t) * h;
        double tn = d > 0.0 ? t - f / d : 0.5 * (lo + hi);
        if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
        if (std::abs(tn - t) < 1e-15) {
            t = tn;
            break;
        }
        t = tn;
    }
    return x_(i) + t * h;
}

double DensityTable::mean() const { return upper() * mass() - I_(I_.size() - 1); }

DensityTable DensityTable::normalized() const {
    const double m = mass();
    if (!(m > 0.0)) throw std::invalid_argument("cannot normalize a zero density");
    DensityTable t = *this;
    t.g_ /= m;
    t.C_ /= m;
    t.I_ /= m;
    return t;
}

double DensityTable::max_value() const {
    double best = 0.0;
    for (Eigen::Index i = 0; i + 1 < x_.size(); ++i) {
        if (lin_[i]) {
            best = std::max(best, (C_(i + 1) - C_(i)) / (x_(i + 1) - x_(i)));
            continue;
        }
        best = std::max({best, g_(i), g_(i + 1)});
        const double h = x_(i + 1) - x_(i);
        const double D = (C_(i + 1) - C_(i)) / h;
        const double b = 6.0 * D - 4.0 * g_(i) - 2.0 * g_(i + 1);
        const double a = -6.0 * D + 3.0 * g_(i) + 3.0 * g_(i + 1);
        if (a < 0.0) {
            const double tv = -b / (2.0 * a);
            if (tv > 0.0 && tv < 1.0) best = std::max(best, cell_density(i, tv));
        }
    }
    return best;
}

bool DensityTable::admissible(double alpha, double rel_tol) const {
    if (alpha <= 0.0) return true;
    return max_value() * alpha <= 1.0 + rel_tol;
}

void DensityTable::write_csv(std::ostream& os, const std::vector<std::string>& header) const {
    for (const auto& h : header) os << "# " << h << '\n';
    os << "x,density,cdf\n" << std::setprecision(17);
    for (Eigen::Index i = 0; i < x_.size(); ++i) os << x_(i) << ',' << g_(i) << ',' << C_(i) << '\n';
}

DensityTable DensityTable::read_csv(std::istream& is) {
    std::vector<double> xs, gs;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string a, b;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ','))
            throw std::invalid_argument("malformed density row: " + line);
        try {
            const double xv = std::stod(a), gv = std::stod(b);
            xs.push_back(xv);
            gs.push_back(gv);
        } catch (const std::invalid_argument&) {
            if (xs.empty()) continue;  // column header
            throw std::invalid_argument("malformed density row: " + line);
        }
    }
    Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    Eigen::VectorXd g = Eigen::Map<Eigen::VectorXd>(gs.data(), static_cast<Eigen::Index>(gs.size()));
    for (Eigen::Index i = 0; i < g.size(); ++i)
        if (g(i) < 0.0) throw std::invalid_argument("density CSV has a negative value");
    return from_values(std::move(x), std::move(g));
}

}  // namespace kac
