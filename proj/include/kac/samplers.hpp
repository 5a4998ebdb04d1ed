#pragma once

#include <vector>

#include "kac/density.hpp"
#include "kac/model.hpp"
#include "kac/rng.hpp"

namespace kac {

class DirichletSpec {
public:
    DirichletSpec(std::vector<double> weights, double concentration);
    static DirichletSpec flat(int n, double concentration = 1.0);

    const std::vector<double>& weights() const { return w_; }
    double concentration() const { return K_; }

private:
    std::vector<double> w_;
    double K_;
};

// Uniform point of the standard simplex from normalized exponentials.
SimplexPoint sample_simplex_flat(int n, RngStream& rng);
// Dirichlet(K*n*w) point via log-gamma variates.
SimplexPoint sample_simplex_dirichlet(const DirichletSpec& spec, RngStream& rng);

Configuration sample_flat(const ModelParams& params, RngStream& rng);
Configuration sample_dirichlet(const DirichletSpec& spec, const ModelParams& params, RngStream& rng);

// Bin masses of w over [(j-1)/n, j/n].
std::vector<double> weights_from_density(const DensityTable& w, int n);

// Order-statistics construction: eta_(j) = H(G^{-1}(xi_(j))) for uniform order statistics
// xi_(j), excess fractions are the spacings of eta, then the T_n map.
Configuration sample_detailed(const DensityTable& g, const ModelParams& params, RngStream& rng);

}  // namespace kac
