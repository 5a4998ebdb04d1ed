#pragma once

#include <optional>

#include "kac/density.hpp"

namespace kac {

inline constexpr int kDefaultTablePoints = 8192;

// Quantile function of the limiting density for an excess-energy density w on [0,1]:
// phi(xi) = (1 - alpha/2) * int_0^xi w(t)/(1-t) dt + alpha*xi. Without a table w = 1.
class QuantileFn {
public:
    explicit QuantileFn(double alpha);
    QuantileFn(double alpha, DensityTable w);

    double alpha() const { return alpha_; }
    bool uniform_w() const { return !w_.has_value(); }
    double w(double xi) const;

    double operator()(double xi) const;
    double derivative(double xi) const;
    double inverse(double x) const;
    // Limit of phi at xi -> 1; infinite unless w(1) = 0.
    double supremum() const { return sup_; }

private:
    double excess_integral(double xi) const;

    double alpha_;
    std::optional<DensityTable> w_;
    Eigen::VectorXd J_;  // excess_integral at the table nodes
    double w1_ = 1.0;
    double sup_;
};

double phi(double xi, double alpha);
double phi(double xi, double alpha, const DensityTable& w);

// Equilibrium density 1/phi'(phi^{-1}(x)); alpha in [0,2), alpha = 0 gives exp(-x).
DensityTable f_alpha(double alpha, int points = kDefaultTablePoints);

DensityTable w_from_g(const DensityTable& g, double alpha, int points = kDefaultTablePoints);
DensityTable g_from_w(const DensityTable& w, double alpha, int points = kDefaultTablePoints);
DensityTable h_from_g(const DensityTable& g, double alpha);
DensityTable psi_from_g(const DensityTable& g, double alpha, int points = kDefaultTablePoints);

// H(x), the CDF of h, in closed form from G and its integral.
double excess_cdf(const DensityTable& g, double alpha, double x);

// Throws unless alpha*g <= 1 everywhere with at most isolated contact.
void require_admissible(const DensityTable& g, double alpha);

double exclusion_factor(double u);
double gap_rate(double g_value, double alpha);
double frozen_threshold(double alpha);
double entropy(const DensityTable& g, double alpha);

// Root of 1 - xi - exp(-2 xi) in (0,1).
double xi_zero();

namespace builtin {
DensityTable exponential(int points = kDefaultTablePoints);

struct ExcessShape {
    double c1, c2;
    double operator()(double x) const;
};
// Constants fixed by mass 1 and mean 1, computed by quadrature.
ExcessShape excess_shape();
DensityTable excess(int points = kDefaultTablePoints);
}  // namespace builtin

}  // namespace kac
