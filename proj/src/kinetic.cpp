#include "kac/kinetic.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "kac/equilibrium.hpp"

namespace kac {

namespace {
constexpr double kCapMargin = 1e-9;

Eigen::ArrayXd exclusion(const KineticState& s) {
    if (s.alpha == 0.0) return Eigen::ArrayXd::Ones(s.size());
    Eigen::ArrayXd p(s.size());
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        const double u = s.alpha * s.g(k);
        if (u > 1.0 - kCapMargin)
            throw std::domain_error("kinetic density reaches the exclusion cap at x = " + std::to_string(s.x(k)));
        p(k) = exclusion_factor(std::max(u, 0.0));
    }
    return p;
}

// Weighted pair averages avg_m = sum_{l+i=m} c_l c_i a_l a_i / W_m.
Eigen::ArrayXd pair_average(const Eigen::ArrayXd& a, const Eigen::ArrayXd& c) {
    const Eigen::Index M = a.size();
    Eigen::ArrayXd ca = c * a;
    Eigen::ArrayXd out(M);
    for (Eigen::Index m = 0; m < M; ++m) {
        double s = 0.0, w = 0.0;
        for (Eigen::Index l = 0; l <= m; ++l) {
            s += ca(l) * ca(m - l);
            w += c(l) * c(m - l);
        }
        out(m) = s / w;
    }
    return out;
}

Eigen::ArrayXd pair_weights(const Eigen::ArrayXd& c) {
    const Eigen::Index M = c.size();
    Eigen::ArrayXd w(M);
    for (Eigen::Index m = 0; m < M; ++m) {
        double s = 0.0;
        for (Eigen::Index l = 0; l <= m; ++l) s += c(l) * c(m - l);
        w(m) = s;
    }
    return w;
}

void check_grid(const KineticState& s) {
    if (s.size() < 3 || !(s.dx > 0.0)) throw std::invalid_argument("kinetic grid needs >= 3 points and dx > 0");
    if (!(s.alpha >= 0.0 && s.alpha < 2.0)) throw std::invalid_argument("kinetic alpha must lie in [0,2)");
}
}  // namespace

Eigen::ArrayXd KineticState::grid() const {
    return Eigen::ArrayXd::LinSpaced(g.size(), 0.0, x_max());
}

DensityTable KineticState::table() const {
    Eigen::VectorXd x = grid().matrix();
    x(x.size() - 1) = x_max();
    return DensityTable::from_values(std::move(x), g.matrix());
}

Eigen::ArrayXd trapezoid_weights(Eigen::Index m) {
    Eigen::ArrayXd c = Eigen::ArrayXd::Ones(m);
    c(0) = c(m - 1) = 0.5;
    return c;
}

double kinetic_mass(const KineticState& s) { return (trapezoid_weights(s.size()) * s.g).sum() * s.dx; }

double kinetic_energy(const KineticState& s) {
    return (trapezoid_weights(s.size()) * s.g * s.grid()).sum() * s.dx;
}

double kinetic_entropy(const KineticState& s) {
    const Eigen::ArrayXd c = trapezoid_weights(s.size());
    double total = 0.0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        const double v = s.g(k);
        if (v <= 0.0) continue;
        if (s.alpha == 0.0) {
            total += c(k) * v * std::log(v);
            continue;
        }
        const double u = s.alpha * v;
        if (u >= 1.0) throw std::domain_error("entropy diverges at the exclusion cap");
        total += c(k) * v * std::log(u / (1.0 - u));
    }
    return total * s.dx;
}

double project_moments(KineticState& s) {
    const Eigen::ArrayXd c = trapezoid_weights(s.size()) * s.dx;
    const Eigen::ArrayXd x = s.grid();
    double a = 0.0, b = 0.0;
    for (int it = 0; it < 60; ++it) {
        const Eigen::ArrayXd t = c * s.g * (a + b * x).exp();
        const double m0 = t.sum(), m1 = (t * x).sum(), m2 = (t * x * x).sum();
        Eigen::Vector2d F(m0 - 1.0, m1 - 1.0);
        if (F.cwiseAbs().maxCoeff() < 1e-15) break;
        Eigen::Matrix2d J;
        J << m0, m1, m1, m2;
        const Eigen::Vector2d d = J.fullPivLu().solve(F);
        a -= d(0);
        b -= d(1);
    }
    s.g *= (a + b * x).exp();
    return std::abs(a) + std::abs(b);
}

KineticState make_state(const std::function<double(double)>& f, double alpha, int points, double x_max) {
    KineticState s;
    s.alpha = alpha;
    s.dx = x_max / (points - 1);
    s.g.resize(std::max(points, 0));
    check_grid(s);
    for (int k = 0; k < points; ++k) {
        const double v = f(s.x(k));
        if (!(v >= 0.0)) throw std::invalid_argument("initial density must be nonnegative");
        s.g(k) = v;
    }
    if (!(kinetic_mass(s) > 0.0)) throw std::invalid_argument("initial density has no mass on the grid");
    project_moments(s);
    exclusion(s);
    return s;
}

KineticState make_state(const DensityTable& g, double alpha, int points, double x_max) {
    return make_state([&g](double x) { return g.density(x); }, alpha, points, x_max);
}

Eigen::ArrayXd collision_operator(const KineticState& s) {
    check_grid(s);
    const Eigen::Index M = s.size();
    const Eigen::ArrayXd c = trapezoid_weights(M);
    const Eigen::ArrayXd P = exclusion(s);
    const Eigen::ArrayXd A = pair_average(s.g, c);
    const Eigen::ArrayXd B = pair_average(P, c);
    const Eigen::ArrayXd cg = c * s.g, cP = c * P;
    Eigen::ArrayXd Q(M);
    for (Eigen::Index k = 0; k < M; ++k) {
        double gain = 0.0, loss = 0.0;
        for (Eigen::Index j = 0; k + j < M; ++j) {
            gain += cP(j) * A(k + j);
            loss += cg(j) * B(k + j);
        }
        Q(k) = s.dx * (P(k) * gain - s.g(k) * loss);
    }
    return Q;
}

double max_loss_rate(const KineticState& s) {
    const Eigen::Index M = s.size();
    const Eigen::ArrayXd c = trapezoid_weights(M);
    const Eigen::ArrayXd B = pair_average(exclusion(s), c);
    double best = 0.0;
    for (Eigen::Index k = 0; k < M; ++k) {
        double nu = 0.0;
        for (Eigen::Index j = 0; k + j < M; ++j) nu += c(j) * s.g(j) * B(k + j);
        best = std::max(best, nu * s.dx);
    }
    return best;
}

KineticState time_step(const KineticState& s, double dt, double* tilt) {
    if (tilt) *tilt = 0.0;
    if (dt < 0.0) throw std::invalid_argument("dt must be nonnegative");
    if (dt == 0.0) return s;
    const double nu = max_loss_rate(s);
    if (dt * nu >= 0.1) throw KineticStepError("dt exceeds the stability bound dt * loss rate < 0.1", 0.5 * dt);
    KineticState out = s;
    try {
        auto stage = [&](const Eigen::ArrayXd& g) {
            KineticState t = s;
            t.g = g;
            return collision_operator(t);
        };
        const Eigen::ArrayXd k1 = stage(s.g);
        const Eigen::ArrayXd k2 = stage(s.g + 0.5 * dt * k1);
        const Eigen::ArrayXd k3 = stage(s.g + 0.5 * dt * k2);
        const Eigen::ArrayXd k4 = stage(s.g + dt * k3);
        out.g = s.g + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } catch (const std::domain_error& e) {
        throw KineticStepError(std::string("admissibility lost inside the step: ") + e.what(), 0.5 * dt);
    }
    const double floor = -1e-12 * out.g.abs().maxCoeff();
    if (out.g.minCoeff() < floor) throw KineticStepError("positivity lost; halve dt", 0.5 * dt);
    out.g = out.g.max(0.0);
    out.time = s.time + dt;
    const double t = project_moments(out);
    if (tilt) *tilt = t;
    if (out.alpha > 0.0 && out.alpha * out.g.maxCoeff() > 1.0 - kCapMargin)
        throw KineticStepError("admissibility lost; halve dt", 0.5 * dt);
    return out;
}

namespace {
KineticDiagnostics diagnose(const KineticState& s, double tilt) {
    KineticDiagnostics d{};
    d.time = s.time;
    d.mass = kinetic_mass(s);
    d.energy = kinetic_energy(s);
    d.entropy = kinetic_entropy(s);
    d.q_sup = collision_operator(s).abs().maxCoeff();
    d.tilt = tilt;
    return d;
}
}  // namespace

KineticTrajectory solve(const KineticState& initial, double t_end, double dt, double snapshot_dt) {
    if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be nonnegative");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    KineticTrajectory tr;
    KineticState s = initial;
    const double t0 = s.time;
    tr.snapshots.push_back(s);
    tr.diagnostics.push_back(diagnose(s, 0.0));
    std::int64_t k = 1;
    const double tol = 1e-12 * std::max(1.0, t_end);
    auto next_snap = [&]() { return snapshot_dt > 0.0 ? t0 + k * snapshot_dt : t0 + t_end; };
    while (s.time < t0 + t_end - tol) {
        const double target = std::min(next_snap(), t0 + t_end);
        const double h = std::min(dt, target - s.time);
        double tilt = 0.0;
        s = time_step(s, h, &tilt);
        if (std::abs(s.time - target) <= tol) s.time = target;
        tr.diagnostics.push_back(diagnose(s, tilt));
        if (s.time == target && target < t0 + t_end) {
            tr.snapshots.push_back(s);
            ++k;
        }
    }
    tr.snapshots.push_back(s);
    return tr;
}

KineticTrajectory solve(const DensityTable& initial, double alpha, double t_end, double dt, double snapshot_dt,
                        int points, double x_max) {
    return solve(make_state(initial, alpha, points, x_max), t_end, dt, snapshot_dt);
}

double weak_form_direct(const KineticState& s, const Eigen::ArrayXd& psi) {
    return (trapezoid_weights(s.size()) * psi * collision_operator(s)).sum() * s.dx;
}

namespace {
template <class F>
void for_each_quadruple(const KineticState& s, F&& f) {
    const Eigen::Index M = s.size();
    const Eigen::ArrayXd c = trapezoid_weights(M);
    const Eigen::ArrayXd W = pair_weights(c);
    const Eigen::ArrayXd P = exclusion(s);
    for (Eigen::Index m = 0; m < M; ++m)
        for (Eigen::Index k = 0; k <= m; ++k)
            for (Eigen::Index l = 0; l <= m; ++l) {
                const Eigen::Index j = m - k, i = m - l;
                const double w = c(k) * c(j) * c(l) * c(i) / W(m);
                const double R = P(k) * P(j) * s.g(l) * s.g(i) - s.g(k) * s.g(j) * P(l) * P(i);
                f(k, j, l, i, w, R);
            }
}
}  // namespace

double weak_form_symmetrized(const KineticState& s, const Eigen::ArrayXd& psi) {
    double total = 0.0;
    for_each_quadruple(s, [&](auto k, auto j, auto l, auto i, double w, double R) {
        total += w * R * (psi(k) + psi(j) - psi(l) - psi(i));
    });
    return 0.25 * s.dx * s.dx * total;
}

double detailed_balance_residual(const KineticState& s) {
    double worst = 0.0;
    for_each_quadruple(s, [&](auto, auto, auto, auto, double, double R) { worst = std::max(worst, std::abs(R)); });
    return worst;
}

double entropy_dissipation(const KineticState& s) {
    const Eigen::ArrayXd P = exclusion(s);
    const Eigen::ArrayXd Q = collision_operator(s);
    const Eigen::ArrayXd c = trapezoid_weights(s.size());
    double total = 0.0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (s.g(k) > 0.0)
            total += c(k) * std::log(s.g(k) / P(k)) * Q(k);
        else if (Q(k) > 0.0)
            return std::numeric_limits<double>::infinity();  // gain into an empty node
    }
    return -total * s.dx;
}

}  // namespace kac
