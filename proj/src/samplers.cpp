#include "kac/samplers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "kac/equilibrium.hpp"

namespace kac {

DirichletSpec::DirichletSpec(std::vector<double> weights, double concentration)
    : w_(std::move(weights)), K_(concentration) {
    if (!(K_ > 0.0)) throw std::invalid_argument("Dirichlet concentration K must be positive");
    if (w_.empty()) throw std::invalid_argument("Dirichlet weights are empty");
    for (double v : w_)
        if (!(v >= 0.0)) throw std::invalid_argument("Dirichlet weights must be nonnegative");
    const double s = neumaier_sum(w_);
    if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument("Dirichlet weights must sum to 1");
}

DirichletSpec DirichletSpec::flat(int n, double concentration) {
    return DirichletSpec(std::vector<double>(n, 1.0 / n), concentration);
}

SimplexPoint sample_simplex_flat(int n, RngStream& rng) {
    std::vector<double> e(n);
    for (double& v : e) v = rng.exponential();
    return SimplexPoint::normalized(std::move(e));
}

SimplexPoint sample_simplex_dirichlet(const DirichletSpec& spec, RngStream& rng) {
    const auto& w = spec.weights();
    const double Kn = spec.concentration() * static_cast<double>(w.size());
    std::vector<double> lg(w.size());
    double top = -INFINITY;
    for (std::size_t j = 0; j < w.size(); ++j) {
        const double shape = Kn * w[j];
        if (!(shape > 0.0))
            throw std::invalid_argument("Dirichlet component " + std::to_string(j) + " has zero shape");
        lg[j] = rng.log_gamma_variate(shape);
        top = std::max(top, lg[j]);
    }
    for (double& v : lg) v = std::exp(v - top);
    return SimplexPoint::normalized(std::move(lg));
}

Configuration sample_flat(const ModelParams& params, RngStream& rng) {
    return t_n_map(sample_simplex_flat(params.n(), rng), params);
}

Configuration sample_dirichlet(const DirichletSpec& spec, const ModelParams& params, RngStream& rng) {
    if (static_cast<int>(spec.weights().size()) != params.n())
        throw std::invalid_argument("Dirichlet weights have length " + std::to_string(spec.weights().size()) +
                                    " but n = " + std::to_string(params.n()));
    return t_n_map(sample_simplex_dirichlet(spec, rng), params);
}

std::vector<double> weights_from_density(const DensityTable& w, int n) {
    if (n < 1) throw std::invalid_argument("need n >= 1 weights");
    for (Eigen::Index i = 0; i < w.points(); ++i)
        if (w.values()(i) < 0.0) throw std::invalid_argument("excess-energy density has negative values");
    std::vector<double> out(n);
    double prev = 0.0;
    for (int j = 1; j <= n; ++j) {
        const double c = w.cdf(static_cast<double>(j) / n);
        out[j - 1] = std::max(c - prev, 0.0);
        prev = c;
    }
    const double s = neumaier_sum(out);
    if (!(s > 0.0)) throw std::invalid_argument("excess-energy density has zero mass");
    for (double& v : out) v /= s;
    return out;
}

Configuration sample_detailed(const DensityTable& g, const ModelParams& params, RngStream& rng) {
    const double alpha = params.alpha();
    require_admissible(g, alpha);
    if (std::abs(g.mass() - 1.0) > 1e-3 || std::abs(g.mean() - 1.0) > 1e-3)
        throw std::invalid_argument("target density must have mass 1 and mean 1");
    const int n = params.n();
    std::vector<double> e(n);
    for (double& v : e) v = rng.exponential();
    const double total = neumaier_sum(e);
    std::vector<double> z(n);
    double cum = 0.0, prev = 0.0;
    for (int j = 0; j + 1 < n; ++j) {
        cum += e[j];
        const double xi = cum / total;
        const double eta = std::clamp(excess_cdf(g, alpha, g.quantile(xi)), prev, 1.0);
        z[j] = eta - prev;
        prev = eta;
    }
    z[n - 1] = std::max(1.0 - prev, 0.0);
    return t_n_map(SimplexPoint::normalized(std::move(z)), params);
}

}  // namespace kac
