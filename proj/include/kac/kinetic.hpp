#pragma once

#include <Eigen/Core>
#include <functional>
#include <stdexcept>
#include <vector>

#include "kac/density.hpp"

namespace kac {

// Density on the uniform grid x_k = k*dx, k = 0..M-1. alpha = 0 switches the
// exclusion factor off.
struct KineticState {
    Eigen::ArrayXd g;
    double dx = 0.0;
    double alpha = 0.0;
    double time = 0.0;

    Eigen::Index size() const { return g.size(); }
    double x(Eigen::Index k) const { return static_cast<double>(k) * dx; }
    double x_max() const { return x(g.size() - 1); }
    Eigen::ArrayXd grid() const;
    // Linear interpolant of the nodal values.
    DensityTable table() const;
};

class KineticStepError : public std::runtime_error {
public:
    KineticStepError(const std::string& what, double suggested_dt)
        : std::runtime_error(what), suggested_dt_(suggested_dt) {}
    double suggested_dt() const { return suggested_dt_; }

private:
    double suggested_dt_;
};

inline constexpr int kDefaultKineticPoints = 512;
inline constexpr double kDefaultKineticXmax = 12.0;

Eigen::ArrayXd trapezoid_weights(Eigen::Index m);

// Samples f on the grid, then projects onto mass 1 and mean 1.
KineticState make_state(const std::function<double(double)>& f, double alpha, int points = kDefaultKineticPoints,
                        double x_max = kDefaultKineticXmax);
KineticState make_state(const DensityTable& g, double alpha, int points = kDefaultKineticPoints,
                        double x_max = kDefaultKineticXmax);

double kinetic_mass(const KineticState& s);
double kinetic_energy(const KineticState& s);
double kinetic_entropy(const KineticState& s);

// Multiplies g by exp(a + b x) so that mass and mean are 1. Returns |a| + |b|.
double project_moments(KineticState& s);

// Grid values of the collision operator. Pairs are restricted to x + y <= x_max.
Eigen::ArrayXd collision_operator(const KineticState& s);

// Largest per-particle loss rate; dt times this must stay below 0.1.
double max_loss_rate(const KineticState& s);

// Classical RK4 step followed by moment projection.
KineticState time_step(const KineticState& s, double dt, double* tilt = nullptr);

struct KineticDiagnostics {
    double time, mass, energy, entropy, q_sup, tilt;
};

struct KineticTrajectory {
    std::vector<KineticState> snapshots;
    std::vector<KineticDiagnostics> diagnostics;  // one per step, plus the initial state
};

KineticTrajectory solve(const KineticState& initial, double t_end, double dt, double snapshot_dt);
KineticTrajectory solve(const DensityTable& initial, double alpha, double t_end, double dt, double snapshot_dt,
                        int points = kDefaultKineticPoints, double x_max = kDefaultKineticXmax);

// Int psi Q dx from the grid values of Q.
double weak_form_direct(const KineticState& s, const Eigen::ArrayXd& psi);
// Same quantity from the symmetrized four-point form (cubic cost).
double weak_form_symmetrized(const KineticState& s, const Eigen::ArrayXd& psi);
// Max over admissible quadruples of |P(x)P(y)g(x')g(y') - g(x)g(y)P(x')P(y')|.
double detailed_balance_residual(const KineticState& s);
// Minus the entropy production; nonnegative.
double entropy_dissipation(const KineticState& s);

}  // namespace kac
